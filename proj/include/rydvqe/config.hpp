#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "rydvqe/vqe.hpp"

namespace rydvqe {

/// A malformed configuration document. what() names the field path
/// (e.g. "target.kind") or the line and column of a syntax error.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MeasureConfig {
    std::uint64_t shots_per_basis = 100000;
    std::uint64_t seed = 0;
    double rotation_us = 0.9;
    double coherence_us = 6.0;
};

struct OutputConfig {
    std::string directory = "out";
};

/// The whole document: sections constants, geometry, target, vqe, measure,
/// output.
struct AppConfig {
    VqeConfig vqe;
    MeasureConfig measure;
    OutputConfig output;
};

AppConfig parse_config(const nlohmann::json& doc);
AppConfig load_config(const std::filesystem::path& path);

/// Writes every field, defaults included, so that parse(serialize(c))
/// reproduces c.
nlohmann::json serialize_config(const AppConfig& cfg);

/// The constants, geometry, target and vqe sections only.
nlohmann::json serialize_vqe_config(const VqeConfig& cfg);

std::string to_string(TargetKind k);
std::string to_string(InitialState s);
std::string to_string(OptimizerKind k);

}  // namespace rydvqe
