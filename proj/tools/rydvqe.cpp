// rydvqe: command-line driver.
//
//   rydvqe ed       CONFIG
//   rydvqe run      CONFIG [--seed S] [--dry-run]
//   rydvqe ensemble CONFIG --runs K [--seed S] [--parallel P]
//   rydvqe measure  CONFIG --schedule FILE [--radius R] [--shots N] [--seed S]
//   rydvqe figdata  RECORDS_DIR --figure NAME
//
// Exit codes: 0 ok, 2 configuration or usage error, 3 runtime failure.
// RYDVQE_OUTDIR overrides output.directory.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "rydvqe/config.hpp"
#include "rydvqe/ed.hpp"
#include "rydvqe/measure.hpp"
#include "rydvqe/records.hpp"
#include "rydvqe/vqe.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rydvqe;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fs::path output_dir(const AppConfig& cfg) {
    if (const char* env = std::getenv("RYDVQE_OUTDIR"); env && *env) {
        return env;
    }
    return cfg.output.directory;
}

std::string dump(const json& j) {
    return j.dump(2) + "\n";
}

// <S^a_1 S^a_{1+r}> for r = 0..N-1 on the three axes.
json correlator_table(const StateVector& psi, SpinNormalization norm) {
    json rows = json::array();
    for (int r = 0; r < psi.n_qubits(); ++r) {
        rows.push_back({{"r", r},
                        {"xx", correlation(psi, PauliAxis::X, 0, PauliAxis::X, r, norm)},
                        {"yy", correlation(psi, PauliAxis::Y, 0, PauliAxis::Y, r, norm)},
                        {"zz", correlation(psi, PauliAxis::Z, 0, PauliAxis::Z, r, norm)}});
    }
    return rows;
}

SpinNormalization normalization_for(const TargetHamiltonian& h) {
    return h.kind == TargetKind::Xxx ? SpinNormalization::Spin : SpinNormalization::Pauli;
}

int cmd_ed(const std::string& config_path) {
    const AppConfig cfg = load_config(config_path);
    const auto& h = cfg.vqe.target;
    const GroundStateResult gs = dense_ground_state(h);
    json out = {{"target", serialize_vqe_config(cfg.vqe)["target"]},
                {"energy", gs.energy},
                {"gap", gs.degeneracy_gap},
                {"correlator_normalization", h.kind == TargetKind::Xxx ? "spin" : "pauli"},
                {"correlators", correlator_table(gs.vector, normalization_for(h))}};
    if (h.boundary == Boundary::Periodic) {
        out["momentum"] = to_string(momentum_of(gs.vector));
        if (h.n_sites % 2 == 0 && h.kind == TargetKind::Xxx) {
            out["marshall_momentum"] = to_string(marshall_momentum(h.n_sites));
        }
        out["q0_sector_energy"] = sector_ground_energy(h, SectorLabel{1, 1});
    }
    const fs::path path = output_dir(cfg) / "ed.json";
    write_text_file(path, dump(out));
    std::cout << "E_GS = " << format_double(gs.energy) << "  (" << path.string() << ")\n";
    return kOk;
}

void write_run(const fs::path& dir, const RunRecord& r) {
    const std::string stem = "run_" + std::to_string(r.seed);
    write_text_file(dir / (stem + ".json"), dump(run_record_to_json(r)));
    write_text_file(dir / (stem + ".csv"), stage_csv_header() + stage_csv_rows(r));
}

std::string summary_line(const RunRecord& r) {
    std::ostringstream s;
    s << "seed " << r.seed << ": " << r.last().segments << " segments, E = " << format_double(r.last().energy);
    if (r.last().eta_err_percent) {
        s << ", eta_err = " << format_double(*r.last().eta_err_percent) << " %";
    }
    s << ", R = " << format_double(r.final_radius_um) << " um (" << r.stop_reason << ")";
    return s.str();
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, bool dry_run) {
    AppConfig cfg = load_config(config_path);
    if (seed) {
        cfg.vqe.seed = *seed;
    }
    if (dry_run) {
        std::cout << "config ok: " << to_string(cfg.vqe.target.kind) << " N=" << cfg.vqe.n_atoms() << ", seed "
                  << cfg.vqe.seed << "\n";
        return kOk;
    }
    Rng rng(cfg.vqe.seed);
    const RunRecord r = adaptive_run(cfg.vqe, rng);
    write_run(output_dir(cfg), r);
    std::cout << summary_line(r) << "\n";
    return kOk;
}

int cmd_ensemble(const std::string& config_path, std::size_t runs, std::optional<std::uint64_t> seed,
                 std::size_t parallel) {
    if (runs < 1) {
        throw UsageError("--runs must be at least 1");
    }
    if (parallel < 1) {
        throw UsageError("--parallel must be at least 1");
    }
    const AppConfig cfg = load_config(config_path);
    const std::uint64_t base = seed.value_or(cfg.vqe.seed);
    const EnsembleResult res = ensemble(cfg.vqe, runs, base, parallel);
    const fs::path dir = output_dir(cfg);
    std::string csv = stage_csv_header();
    for (const auto& r : res.runs) {
        write_run(dir, r);
        csv += stage_csv_rows(r);
        std::cout << "run " << r.run_index << ", " << summary_line(r) << "\n";
    }
    write_text_file(dir / "ensemble_stages.csv", csv);
    write_text_file(dir / "ensemble_stats.json", dump(ensemble_stats_to_json(res.stats, cfg.vqe, base, res.failures)));
    for (const auto& f : res.failures) {
        std::cerr << "failed: " << f << "\n";
    }
    const auto& s = res.stats;
    if (!s.final_errors.empty()) {
        std::cout << "mean eta_err = " << format_double(s.mean_error) << " +- " << format_double(s.stderr_error)
                  << " %\n";
    }
    if (cfg.vqe.variable_radius) {
        std::cout << "mean R = " << format_double(s.mean_radius) << " +- " << format_double(s.stderr_radius)
                  << " um, J_nn/h(<R>) = " << format_double(s.nn_ising_mhz_at_mean_radius) << " MHz\n";
    }
    return res.runs.empty() ? kRuntimeError : kOk;
}

int cmd_measure(const std::string& config_path, const std::string& schedule_path, std::optional<double> radius,
                std::optional<std::uint64_t> shots, std::optional<std::uint64_t> seed) {
    AppConfig cfg = load_config(config_path);
    if (cfg.vqe.target.kind != TargetKind::Xxx) {
        throw ConfigError("measure: the shot estimator supports target.kind = xxx");
    }
    json doc;
    try {
        doc = read_json_file(schedule_path);
    } catch (const json::exception& e) {
        throw ConfigError(schedule_path + ": " + e.what());
    }
    // Either a bare pulse file or a run record (its final schedule and radius).
    PulseSequence seq = doc.contains("final_sequence") ? pulse_from_json(doc["final_sequence"], cfg.vqe.constants)
                                                       : pulse_from_json(doc, cfg.vqe.constants);
    double r_um = cfg.vqe.variable_radius ? 0.0 : cfg.vqe.fixed_radius_um;
    if (doc.contains("final_radius_um")) {
        r_um = doc["final_radius_um"].get<double>();
    }
    if (radius) {
        r_um = *radius;
    }
    if (!(r_um > 0.0)) {
        throw ConfigError("measure: no radius (use --radius, geometry.fixed_radius_um or a run record)");
    }
    const std::uint64_t n_shots = shots.value_or(cfg.measure.shots_per_basis);
    const std::uint64_t s = seed.value_or(cfg.measure.seed);

    const RingGeometry ring(cfg.vqe.n_atoms(), r_um);
    ring.check_spacing(cfg.vqe.constants);
    const StateVector psi = evolve(seq, initial_state(cfg.vqe), interaction_matrix(ring, cfg.vqe.constants),
                                   {cfg.vqe.step_ns, cfg.vqe.frame, 1e-6});
    Rng rng(s);
    const EnergyEstimate est = estimate_heisenberg_energy(psi, cfg.vqe.target, n_shots, rng);
    const EnergyEstimate exact = estimate_heisenberg_energy_exact(psi, cfg.vqe.target);
    Rng zrng(derive_seed(s, 3));
    const ShotTable z = sample_bitstrings(psi, std::min<std::uint64_t>(n_shots, 10000), zrng);

    json settings = json::array();
    for (std::size_t k = 0; k < est.settings.size(); ++k) {
        const char* name = k == 0 ? "z" : (k == 1 ? "x" : "y");
        settings.push_back({{"basis", name},
                            {"bond_correlators", est.settings[k].bond_correlators},
                            {"bond_correlators_exact", exact.settings[k].bond_correlators}});
    }
    const DurationBudget budget{static_cast<double>(seq.duration_ns()) * 1e-3, cfg.measure.rotation_us,
                                cfg.measure.coherence_us};
    const json out = {{"seed", s},
                      {"generator", std::string(Rng::kGeneratorName)},
                      {"radius_um", r_um},
                      {"shots_per_basis", n_shots},
                      {"energy_estimate", est.energy},
                      {"energy_stderr", est.stderr},
                      {"energy_exact", expectation(psi, cfg.vqe.target)},
                      {"settings", settings},
                      {"z_basis_shots", shot_table_to_json(z)},
                      {"duration",
                       {{"evolution_us", budget.evolution_us},
                        {"rotation_us", budget.rotation_us},
                        {"total_us", budget.total_us()},
                        {"coherence_us", budget.coherence_us},
                        {"within_coherence", budget.within_coherence()}}}};
    const fs::path path = output_dir(cfg) / ("measure_" + std::to_string(s) + ".json");
    write_text_file(path, dump(out));
    std::cout << "E_hat = " << format_double(est.energy) << " +- " << format_double(est.stderr)
              << " (exact " << format_double(expectation(psi, cfg.vqe.target)) << ")\n";
    return kOk;
}

std::vector<RunRecord> load_records(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw UsageError(dir.string() + " is not a directory");
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.rfind("run_", 0) == 0 && e.path().extension() == ".json") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<RunRecord> out;
    for (const auto& f : files) {
        out.push_back(run_record_from_json(read_json_file(f)));
    }
    if (out.empty()) {
        throw UsageError(dir.string() + " holds no run records");
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const RunRecord& a, const RunRecord& b) { return a.run_index < b.run_index; });
    return out;
}

int cmd_figdata(const std::string& records_dir, const std::string& figure) {
    const std::vector<RunRecord> runs = load_records(records_dir);
    const char* env = std::getenv("RYDVQE_OUTDIR");
    const fs::path dir = env && *env ? fs::path(env) : fs::path(records_dir);
    std::ostringstream csv;
    if (figure == "error_vs_segments") {
        csv << "run,seed,segments,energy,eta_err\n";
        for (const auto& r : runs) {
            for (const auto& s : r.stages) {
                csv << r.run_index << ',' << r.seed << ',' << s.segments << ',' << format_double(s.energy) << ','
                    << (s.eta_err_percent ? format_double(*s.eta_err_percent) : "") << '\n';
            }
        }
    } else if (figure == "pulse_profile") {
        csv << "run,seed,t_ns,omega,delta\n";
        for (const auto& r : runs) {
            for (const auto& b : r.final_sequence->breakpoints()) {
                csv << r.run_index << ',' << r.seed << ',' << b.t_ns << ',' << format_double(b.omega) << ','
                    << format_double(b.delta) << '\n';
            }
        }
    } else if (figure == "radius_vs_segments") {
        csv << "run,seed,stage,segments,radius_um\n";
        for (const auto& r : runs) {
            for (const auto& s : r.stages) {
                csv << r.run_index << ',' << r.seed << ',' << s.stage << ',' << s.segments << ','
                    << format_double(s.radius_um) << '\n';
            }
        }
    } else if (figure == "iterations") {
        csv << "run,seed,stage,segments,iterations,cumulative_iterations,evaluations,cumulative_evaluations\n";
        for (const auto& r : runs) {
            for (const auto& s : r.stages) {
                csv << r.run_index << ',' << r.seed << ',' << s.stage << ',' << s.segments << ',' << s.iterations
                    << ',' << s.cumulative_iterations << ',' << s.evaluations << ',' << s.cumulative_evaluations
                    << '\n';
            }
        }
    } else if (figure == "correlators") {
        csv << "source,run,r,xx,yy,zz\n";
        auto emit = [&csv](const std::string& source, const std::string& run, const json& table) {
            for (const auto& row : table) {
                csv << source << ',' << run << ',' << row["r"].get<int>() << ','
                    << format_double(row["xx"].get<double>()) << ',' << format_double(row["yy"].get<double>()) << ','
                    << format_double(row["zz"].get<double>()) << '\n';
            }
        };
        const auto& h = runs.front().config.target;
        emit("oracle", "", correlator_table(dense_ground_state(h).vector, normalization_for(h)));
        for (const auto& r : runs) {
            const CostFunction cf(r.config);
            const auto& last = r.last();
            emit("pvqe", std::to_string(r.run_index),
                 correlator_table(cf.final_state(last.theta, last.times), normalization_for(r.config.target)));
        }
    } else {
        throw UsageError("unknown figure \"" + figure +
                         "\" (error_vs_segments, pulse_profile, correlators, radius_vs_segments, iterations)");
    }
    const fs::path path = dir / (figure + ".csv");
    write_text_file(path, csv.str());
    std::cout << path.string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pulse-based VQE simulator for Rydberg atom rings"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::uint64_t> seed;
    bool dry_run = false;
    std::size_t runs = 0;
    std::size_t parallel = 1;
    std::string schedule;
    std::optional<double> radius;
    std::optional<std::uint64_t> shots;
    std::string records;
    std::string figure;

    auto* ed = app.add_subcommand("ed", "Exact ground state of the configured target");
    ed->add_option("config", config, "Config JSON")->required();

    auto* run = app.add_subcommand("run", "One adaptive PVQE run");
    run->add_option("config", config, "Config JSON")->required();
    run->add_option("--seed", seed, "Run seed (default vqe.seed)");
    run->add_flag("--dry-run", dry_run, "Validate the config and exit");

    auto* ens = app.add_subcommand("ensemble", "Independent seeded runs");
    ens->add_option("config", config, "Config JSON")->required();
    ens->add_option("--runs", runs, "Number of runs")->required();
    ens->add_option("--seed", seed, "Base seed (default vqe.seed)");
    ens->add_option("--parallel", parallel, "Worker threads");

    auto* meas = app.add_subcommand("measure", "Shot-based energy estimate for a schedule");
    meas->add_option("config", config, "Config JSON")->required();
    meas->add_option("--schedule", schedule, "Pulse JSON or run record")->required();
    meas->add_option("--radius", radius, "Ring radius in um");
    meas->add_option("--shots", shots, "Shots per measurement setting");
    meas->add_option("--seed", seed, "Sampling seed");

    auto* fig = app.add_subcommand("figdata", "Tidy CSV from run records");
    fig->add_option("records_dir", records, "Directory with run_*.json")->required();
    fig->add_option("--figure", figure, "error_vs_segments | pulse_profile | correlators | radius_vs_segments | iterations")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*ed) {
            return cmd_ed(config);
        }
        if (*run) {
            return cmd_run(config, seed, dry_run);
        }
        if (*ens) {
            return cmd_ensemble(config, runs, seed, parallel);
        }
        if (*meas) {
            return cmd_measure(config, schedule, radius, shots, seed);
        }
        if (*fig) {
            return cmd_figdata(records, figure);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kConfigError;
}
