#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "rydvqe/measure.hpp"
#include "rydvqe/pulse.hpp"
#include "rydvqe/vqe.hpp"

namespace rydvqe {

/// {"breakpoints": [[t_ns, omega, delta], ...]}
nlohmann::json pulse_to_json(const PulseSequence& seq);
PulseSequence pulse_from_json(const nlohmann::json& doc, const PhysicalConstants& c);

nlohmann::json split_info_to_json(const SplitInfo& s);

/// Data first, then a "metadata" block holding the host-dependent wall time.
nlohmann::json run_record_to_json(const RunRecord& r);

/// Rebuilds a record written by run_record_to_json (the metadata block is
/// read back too).
RunRecord run_record_from_json(const nlohmann::json& doc);

/// Columns: run_id, stage, segments, energy, eta_err_percent, iterations,
/// cumulative_iterations, radius_um.
std::string stage_csv_header();
std::string stage_csv_rows(const RunRecord& r);

nlohmann::json ensemble_stats_to_json(const EnsembleStats& s, const VqeConfig& cfg, std::uint64_t base_seed,
                                      const std::vector<std::string>& failures);

nlohmann::json shot_table_to_json(const ShotTable& t);

/// Shortest round-tripping decimal form.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace rydvqe
