#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rydvqe/config.hpp"
#include "rydvqe/records.hpp"

using namespace rydvqe;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json minimal() {
    return json::parse(R"({"geometry": {"n_atoms": 4}, "target": {"kind": "xxx"}})");
}

std::string error_of(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rydvqe_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args, const fs::path& outdir) {
    const std::string cmd = "RYDVQE_OUTDIR='" + outdir.string() + "' '" RYDVQE_CLI_PATH "' " + args + " > '" +
                            (outdir / "stdout.txt").string() + "' 2> '" + (outdir / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream(p) << j.dump(2);
}

}  // namespace

TEST_CASE("minimal config takes the documented defaults") {
    const auto c = parse_config(minimal());
    CHECK(c.vqe.n_atoms() == 4);
    CHECK(c.vqe.total_duration_ns == 2400);
    CHECK(c.vqe.max_iter == 5000);
    CHECK(c.vqe.error_threshold_percent == 0.01);
    CHECK(c.vqe.step_ns == 1.0);
    CHECK(c.vqe.radius_bounds.hi == 35.0);
    CHECK(c.vqe.constants.c6_over_hbar == 5420158.53);
    CHECK(c.vqe.optimizer == OptimizerKind::NelderMead);
    CHECK(c.vqe.initial_state == InitialState::ProductG);
}

TEST_CASE("config round trip") {
    auto doc = minimal();
    doc["target"] = {{"kind", "mfi"}, {"J_I", 1.0}, {"h_x", 1.2}, {"h_z", -0.9}};
    doc["geometry"]["init_radius_um"] = {5.0, 9.0};
    doc["vqe"] = {{"optimizer", {{"kind", "lbfgsb_fd"}, {"fd_step", 2e-4}}}, {"seed", 77}, {"frame", "lab"}};
    const auto a = parse_config(doc);
    const json s1 = serialize_config(a);
    const auto b = parse_config(s1);
    CHECK(serialize_config(b) == s1);
    CHECK(b.vqe.target.h_z == -0.9);
    CHECK(b.vqe.optimizer == OptimizerKind::LbfgsbFd);
    CHECK(b.vqe.fd_step == 2e-4);
    CHECK(b.vqe.frame == Frame::Lab);
    CHECK(b.vqe.init_radius->hi == 9.0);

    auto custom = minimal();
    custom["vqe"] = {{"initial_state", "custom"}, {"custom_state", json::array()}};
    for (int k = 0; k < 16; ++k) {
        custom["vqe"]["custom_state"].push_back({k == 5 ? 1.0 : 0.0, 0.0});
    }
    const auto c = parse_config(custom);
    CHECK(serialize_config(parse_config(serialize_config(c))) == serialize_config(c));
    CHECK(c.vqe.custom_state->operator[](5) == cplx(1, 0));
}

TEST_CASE("config errors name the field") {
    auto doc = minimal();
    doc["target"].erase("kind");
    CHECK(error_of(doc).find("target.kind") != std::string::npos);

    doc = minimal();
    doc["target"]["kind"] = "ising";
    CHECK(error_of(doc).find("target.kind") != std::string::npos);

    doc = minimal();
    doc["vqe"] = {{"max_segmnets", 4}};
    CHECK(error_of(doc).find("vqe.max_segmnets") != std::string::npos);

    doc = minimal();
    doc["vqe"] = {{"optimizer", {{"max_iter", "many"}}}};
    CHECK(error_of(doc).find("vqe.optimizer.max_iter") != std::string::npos);

    doc = minimal();
    doc["target"] = {{"kind", "mfi"}, {"h_x", 1.0}};
    CHECK(error_of(doc).find("target.h_z") != std::string::npos);

    doc = minimal();
    doc["target"]["n_sites"] = 6;
    CHECK(error_of(doc).find("n_sites") != std::string::npos);

    doc = minimal();
    doc["vqe"] = {{"total_duration_ns", 2401}};
    CHECK(error_of(doc).find("total_duration_ns") != std::string::npos);

    doc = minimal();
    doc["geometry"]["radius_mode"] = "fixed";
    CHECK(error_of(doc).find("geometry.fixed_radius_um") != std::string::npos);

    const auto dir = scratch("syntax");
    std::ofstream(dir / "bad.json") << "{\n  \"geometry\": {\"n_atoms\": 4},\n  \"target\": {kind: 1}\n}\n";
    try {
        load_config(dir / "bad.json");
        FAIL("expected a syntax error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bad.json:3:") != std::string::npos);
    }
}

TEST_CASE("run record round trip") {
    VqeConfig cfg;
    cfg.max_iter = 30;
    cfg.max_segments = 2;
    Rng rng(12);
    const auto r = adaptive_run(cfg, rng);
    const json j = run_record_to_json(r);
    const auto back = run_record_from_json(j);
    CHECK(run_record_to_json(back) == j);
    CHECK(back.final_sequence == r.final_sequence);
    CHECK(back.stages.size() == r.stages.size());
    CHECK(back.stages.back().split == r.stages.back().split);
    CHECK(j.contains("metadata"));
    CHECK(j["generator"] == "mt19937_64/u53-lemire");

    const auto csv = stage_csv_header() + stage_csv_rows(r);
    CHECK(csv.rfind("run_id,stage,segments,energy,eta_err_percent,iterations,cumulative_iterations,radius_um\n", 0) ==
          0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(r.stages.size() + 1));

    const auto p = pulse_to_json(*r.final_sequence);
    CHECK(pulse_from_json(p, cfg.constants) == *r.final_sequence);
    CHECK_THROWS_AS(pulse_from_json(json::parse(R"({"breakpoints": [[0, 1, 2], [3.5, 1, 2]]})"), cfg.constants),
                    ValidationError);
    CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("cli ed, run and exit codes") {
    const auto dir = scratch("cli");
    const auto cfg = dir / "xxx4.json";
    auto doc = minimal();
    doc["vqe"] = {{"optimizer", {{"max_iter", 40}}}, {"max_segments", 2}, {"seed", 3}};
    write_json(cfg, doc);

    CHECK(run_cli("ed " + cfg.string(), dir) == 0);
    const json ed = json::parse(slurp(dir / "ed.json"));
    CHECK(ed["energy"].get<double>() == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(ed["momentum"] == "0");
    CHECK(ed["marshall_momentum"] == "0");
    CHECK(ed["correlators"].size() == 4);

    auto mfi = minimal();
    mfi["geometry"]["n_atoms"] = 10;
    mfi["target"] = {{"kind", "mfi"}, {"h_x", 0.0}, {"h_z", 0.0}};
    write_json(dir / "mfi.json", mfi);
    CHECK(run_cli("ed " + (dir / "mfi.json").string(), dir) == 0);
    CHECK(json::parse(slurp(dir / "ed.json"))["energy"].get<double>() == doctest::Approx(-10.0));

    auto broken = minimal();
    broken["target"].erase("kind");
    write_json(dir / "broken.json", broken);
    CHECK(run_cli("ed " + (dir / "broken.json").string(), dir) == 2);
    CHECK(slurp(dir / "stderr.txt").find("target.kind") != std::string::npos);
    CHECK(run_cli("ed " + (dir / "missing.json").string(), dir) == 2);
    CHECK(run_cli("bogus", dir) == 2);

    CHECK(run_cli("run " + cfg.string() + " --dry-run", dir) == 0);
    CHECK_FALSE(fs::exists(dir / "run_3.json"));

    CHECK(run_cli("run " + cfg.string(), dir) == 0);
    const std::string first = slurp(dir / "run_3.csv");
    CHECK(run_cli("run " + cfg.string(), dir) == 0);
    CHECK(slurp(dir / "run_3.csv") == first);
    CHECK(run_cli("run " + cfg.string() + " --seed 4", dir) == 0);
    CHECK(fs::exists(dir / "run_4.json"));

    CHECK(run_cli("figdata " + dir.string() + " --figure pulse_profile", dir) == 0);
    const json rec = json::parse(slurp(dir / "run_3.json"));
    const std::string prof = slurp(dir / "pulse_profile.csv");
    for (const auto& b : rec["final_sequence"]["breakpoints"]) {
        CHECK(prof.find("," + std::to_string(b[0].get<long>()) + "," + format_double(b[1].get<double>())) !=
              std::string::npos);
    }
    for (const char* f : {"error_vs_segments", "iterations", "radius_vs_segments", "correlators"}) {
        CHECK(run_cli("figdata " + dir.string() + " --figure " + f, dir) == 0);
        CHECK(fs::exists(dir / (std::string(f) + ".csv")));
    }
    CHECK(slurp(dir / "correlators.csv").find("oracle,") != std::string::npos);
    CHECK(run_cli("figdata " + dir.string() + " --figure nope", dir) == 2);
    const auto empty = scratch("cli_empty");
    CHECK(run_cli("figdata " + empty.string() + " --figure iterations", empty) == 2);

    CHECK(run_cli("measure " + cfg.string() + " --schedule " + (dir / "run_3.json").string() + " --shots 2000", dir) ==
          0);
    const json m = json::parse(slurp(dir / "measure_0.json"));
    CHECK(std::abs(m["energy_estimate"].get<double>() - m["energy_exact"].get<double>()) <=
          4.0 * m["energy_stderr"].get<double>());
    CHECK(m["radius_um"] == rec["final_radius_um"]);
}

TEST_CASE("cli ensemble is independent of the worker count") {
    const auto d1 = scratch("ens1");
    const auto d2 = scratch("ens2");
    auto doc = minimal();
    doc["vqe"] = {{"optimizer", {{"max_iter", 30}}}, {"max_segments", 2}};
    write_json(d1 / "c.json", doc);
    CHECK(run_cli("ensemble " + (d1 / "c.json").string() + " --runs 2 --parallel 1 --seed 11", d1) == 0);
    CHECK(run_cli("ensemble " + (d1 / "c.json").string() + " --runs 2 --parallel 2 --seed 11", d2) == 0);
    CHECK(slurp(d1 / "ensemble_stats.json") == slurp(d2 / "ensemble_stats.json"));
    CHECK(slurp(d1 / "ensemble_stages.csv") == slurp(d2 / "ensemble_stages.csv"));
    const json s = json::parse(slurp(d1 / "ensemble_stats.json"));
    CHECK(s.contains("mean_eta_err_percent"));
    CHECK(s.contains("mean_radius_um"));
    CHECK(s.contains("nn_ising_mhz_at_mean_radius"));
    CHECK(run_cli("ensemble " + (d1 / "c.json").string() + " --runs 0", d1) == 2);
}
