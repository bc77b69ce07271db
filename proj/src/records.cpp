#include "rydvqe/records.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rydvqe/config.hpp"

namespace rydvqe {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

json pulse_to_json(const PulseSequence& seq) {
    json bp = json::array();
    for (const auto& b : seq.breakpoints()) {
        bp.push_back({b.t_ns, b.omega, b.delta});
    }
    return {{"breakpoints", bp}};
}

PulseSequence pulse_from_json(const json& doc, const PhysicalConstants& c) {
    if (!doc.is_object() || !doc.contains("breakpoints") || !doc["breakpoints"].is_array()) {
        throw ValidationError("pulse document needs a \"breakpoints\" array");
    }
    std::vector<Breakpoint> bps;
    for (const auto& e : doc["breakpoints"]) {
        if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number() || !e[2].is_number()) {
            throw ValidationError("each breakpoint must be [t_ns (integer), omega, delta]");
        }
        bps.push_back({e[0].get<std::int64_t>(), e[1].get<double>(), e[2].get<double>()});
    }
    return PulseSequence(std::move(bps), c);
}

json split_info_to_json(const SplitInfo& s) {
    return {{"segment", s.segment},
            {"t_s_ns", s.t_s},
            {"eligible_segments", s.eligible_segments},
            {"segment_draw", s.segment_draw},
            {"legal_points", s.legal_points},
            {"point_draw", s.point_draw}};
}

json run_record_to_json(const RunRecord& r) {
    json stages = json::array();
    for (const auto& s : r.stages) {
        json j = {{"stage", s.stage},
                  {"segments", s.segments},
                  {"times_ns", s.times},
                  {"theta", s.theta},
                  {"energy", s.energy},
                  {"eta_err_percent", s.eta_err_percent ? json(*s.eta_err_percent) : json(nullptr)},
                  {"iterations", s.iterations},
                  {"cumulative_iterations", s.cumulative_iterations},
                  {"evaluations", s.evaluations},
                  {"cumulative_evaluations", s.cumulative_evaluations},
                  {"converged", s.converged},
                  {"radius_um", s.radius_um},
                  {"split", s.split ? split_info_to_json(*s.split) : json(nullptr)}};
        stages.push_back(j);
    }
    json doc = {{"run_index", r.run_index},
                {"seed", r.seed},
                {"generator", r.generator},
                {"config", serialize_vqe_config(r.config)},
                {"ground_energy", r.ground_energy ? json(*r.ground_energy) : json(nullptr)},
                {"initial_theta", r.initial_theta},
                {"stages", stages},
                {"final_sequence", r.final_sequence ? pulse_to_json(*r.final_sequence) : json(nullptr)},
                {"final_radius_um", r.final_radius_um},
                {"stop_reason", r.stop_reason}};
    doc["metadata"] = {{"wall_time_s", r.wall_time_s}};
    return doc;
}

RunRecord run_record_from_json(const json& doc) {
    try {
        RunRecord r;
        r.config = parse_config(doc.at("config")).vqe;
        r.run_index = doc.at("run_index").get<std::size_t>();
        r.seed = doc.at("seed").get<std::uint64_t>();
        r.generator = doc.at("generator").get<std::string>();
        if (!doc.at("ground_energy").is_null()) {
            r.ground_energy = doc["ground_energy"].get<double>();
        }
        r.initial_theta = doc.at("initial_theta").get<std::vector<double>>();
        for (const auto& j : doc.at("stages")) {
            StageRecord s;
            s.stage = j.at("stage").get<std::size_t>();
            s.segments = j.at("segments").get<std::size_t>();
            s.times = j.at("times_ns").get<std::vector<std::int64_t>>();
            s.theta = j.at("theta").get<std::vector<double>>();
            s.energy = j.at("energy").get<double>();
            if (!j.at("eta_err_percent").is_null()) {
                s.eta_err_percent = j["eta_err_percent"].get<double>();
            }
            s.iterations = j.at("iterations").get<std::size_t>();
            s.cumulative_iterations = j.at("cumulative_iterations").get<std::size_t>();
            s.evaluations = j.at("evaluations").get<std::size_t>();
            s.cumulative_evaluations = j.at("cumulative_evaluations").get<std::size_t>();
            s.converged = j.at("converged").get<bool>();
            s.radius_um = j.at("radius_um").get<double>();
            if (!j.at("split").is_null()) {
                const auto& p = j["split"];
                s.split = SplitInfo{p.at("segment").get<std::size_t>(),       p.at("t_s_ns").get<std::int64_t>(),
                                    p.at("eligible_segments").get<std::size_t>(), p.at("segment_draw").get<std::size_t>(),
                                    p.at("legal_points").get<std::size_t>(),  p.at("point_draw").get<std::size_t>()};
            }
            r.stages.push_back(std::move(s));
        }
        if (!doc.at("final_sequence").is_null()) {
            r.final_sequence = pulse_from_json(doc["final_sequence"], r.config.constants);
        }
        r.final_radius_um = doc.at("final_radius_um").get<double>();
        r.stop_reason = doc.at("stop_reason").get<std::string>();
        if (doc.contains("metadata")) {
            r.wall_time_s = doc["metadata"].value("wall_time_s", 0.0);
        }
        if (r.stages.empty()) {
            throw ValidationError("run record has no stages");
        }
        return r;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed run record: ") + e.what());
    }
}

std::string stage_csv_header() {
    return "run_id,stage,segments,energy,eta_err_percent,iterations,cumulative_iterations,radius_um\n";
}

std::string stage_csv_rows(const RunRecord& r) {
    std::ostringstream out;
    for (const auto& s : r.stages) {
        out << r.run_index << ',' << s.stage << ',' << s.segments << ',' << format_double(s.energy) << ','
            << (s.eta_err_percent ? format_double(*s.eta_err_percent) : std::string()) << ',' << s.iterations << ','
            << s.cumulative_iterations << ',' << format_double(s.radius_um) << '\n';
    }
    return out.str();
}

json ensemble_stats_to_json(const EnsembleStats& s, const VqeConfig& cfg, std::uint64_t base_seed,
                            const std::vector<std::string>& failures) {
    json doc = {{"base_seed", base_seed},
                {"generator", std::string(Rng::kGeneratorName)},
                {"completed_runs", s.completed},
                {"failed_runs", failures},
                {"final_energies", s.final_energies},
                {"mean_energy", s.mean_energy},
                {"stderr_energy", s.stderr_energy},
                {"best_run", s.best_run},
                {"final_radii_um", s.final_radii},
                {"mean_radius_um", s.mean_radius},
                {"stderr_radius_um", s.stderr_radius},
                {"config", serialize_vqe_config(cfg)}};
    if (!s.final_errors.empty()) {
        doc["final_eta_err_percent"] = s.final_errors;
        doc["mean_eta_err_percent"] = s.mean_error;
        doc["stderr_eta_err_percent"] = s.stderr_error;
    }
    if (cfg.variable_radius) {
        doc["nn_ising_mhz_at_mean_radius"] = s.nn_ising_mhz_at_mean_radius;
    }
    return doc;
}

json shot_table_to_json(const ShotTable& t) {
    json h = json::object();
    for (const auto& [b, count] : t.histogram) {
        h[to_bitstring(b, t.n_qubits)] = count;
    }
    return {{"n_qubits", t.n_qubits}, {"shots", t.shots}, {"histogram", h}};
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return json::parse(in);
}

}  // namespace rydvqe
