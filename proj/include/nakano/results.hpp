#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "nakano/continuation.hpp"
#include "nakano/scenario_io.hpp"

namespace nakano {

struct Timings {
    double build_seconds = 0.0;
    double solve_seconds = 0.0;
    double diagnostics_seconds = 0.0;
};

/// Everything a solve produces. The summary embeds the scenario document, so
/// a bundle directory can be re-verified without the original file.
struct ResultBundle {
    ScenarioConfig config;
    std::string hash;
    ContinuationResult result;
    double start_residual = 0.0;   // residual(u = 0, t = 1)
    double final_min_eigenvalue = 0.0;
    std::optional<BoundReport> bound;  // lambda > 0 only
    DiagnosticsSummary diagnostics;
    std::optional<double> manufactured_error;  // sup |u - u*|
    Timings timings;
};

std::string version_string();

/// Builds the scenario and runs the continuation. Scenario errors propagate;
/// solver failure is recorded in result.success / result.failure.
ResultBundle run_solve(const ScenarioConfig& config);

nlohmann::json summary_json(const ResultBundle& bundle);

/// Solution grid as CSV: '#' metadata lines, then size / N lines of N values
/// (last axis fastest), each printed with %.17g.
void write_grid_csv(const std::string& path, const ScalarField& u, double c, const std::string& label);

struct GridCsv {
    GridSpec grid;
    double c = 0.0;
    ScalarField u;
};
/// Throws IoError on unreadable or malformed files.
GridCsv read_grid_csv(const std::string& path);

/// Writes u.csv, summary.json, u.pgm, min_eigenvalue.pgm and residual.ppm
/// according to config.outputs.formats. Throws IoError.
void write_bundle(const ResultBundle& bundle, const std::string& directory);

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool pass() const;
};

/// Recomputes the residual, cone membership, normalization and bound from
/// u.csv and the scenario embedded in summary.json.
VerifyReport verify_bundle(const std::string& directory);

}  // namespace nakano
