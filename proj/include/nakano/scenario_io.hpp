#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nakano/continuation.hpp"
#include "nakano/scenario.hpp"

namespace nakano {

// Scenario files are JSON documents. Every object rejects keys it does not
// know; see scenarios/README.md for the annotated schema.

struct BackgroundConfig {
    std::string kind = "flat";  // flat | diagonal_torus | explicit | random
    double tau = 1.0;                      // flat, diagonal_torus
    std::vector<FourierSpec> potentials;   // diagonal_torus, one per bundle index
    Eigen::MatrixXcd theta;                // explicit: constant nr x nr tensor
    std::optional<Eigen::MatrixXcd> metric;  // explicit: constant n x n metric
    double level = 0.5;                    // random: margin Id part
    double amplitude = 0.25;               // random
    int max_wavenumber = 1;                // random
    bool operator==(const BackgroundConfig&) const = default;
};

struct PhiConfig {
    std::string kind = "none";  // none | fourier | random | manufactured
    FourierSpec modes;          // fourier
    FourierSpec u_star;         // manufactured
    std::string exact = "discrete";  // manufactured: discrete | continuum
    double amplitude = 0.1;     // random
    int mode_count = 3;         // random
    int max_wavenumber = 1;     // random
    bool operator==(const PhiConfig&) const = default;
};

struct OutputConfig {
    std::string directory = "results";
    std::vector<std::string> formats{"csv", "json", "pgm", "ppm"};
    bool operator==(const OutputConfig&) const = default;
    bool wants(const std::string& f) const;
};

/// Typed image of a scenario file.
struct ScenarioConfig {
    std::uint64_t seed = 0;
    GridSpec grid;
    int rank = 1;
    double lambda = 0.0;
    double margin = 1e-3;
    BackgroundConfig background;
    PhiConfig phi;
    SolverOptions solver;
    OutputConfig outputs;
    bool operator==(const ScenarioConfig&) const = default;
};

/// Schema validation. Throws SchemaError(key path, reason).
ScenarioConfig parse_config(const nlohmann::json& doc);
/// Reads and validates a file. Throws IoError, SchemaError.
ScenarioConfig load_config(const std::string& path);
/// Canonical document; parse_config(to_json(c)) == c.
nlohmann::json to_json(const ScenarioConfig& config);

/// Deterministic construction from the config (random pieces seeded from
/// config.seed). Throws NotNakanoPositive, NonPositiveMetric, SchemaError.
Scenario build_scenario(const ScenarioConfig& config);
/// parse_scenario(path) = build_scenario(load_config(path)).
Scenario parse_scenario(const std::string& path);

/// u* on the grid for manufactured phi (shifted to sup 0 when lambda == 0).
std::optional<ScalarField> manufactured_solution(const ScenarioConfig& config);

/// FNV-1a 64 of the canonical document, as 16 hex digits.
std::string scenario_hash(const ScenarioConfig& config);

/// Field-by-field bitwise equality.
bool identical(const Scenario& a, const Scenario& b);

}  // namespace nakano
