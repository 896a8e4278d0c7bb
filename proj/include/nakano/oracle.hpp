#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

#include "nakano/scenario.hpp"

namespace nakano::oracle {

// Reference implementations for cross-checking the main solver on tiny grids.
// Nothing here calls the Krylov solver, the FFT preconditioner, the
// Cholesky-based curvature kernels or the real second-difference assembly.

/// Jacobian of the discretized residual at the current iterate, assembled by
/// central finite differences of the residual (Curtis-Powell-Reid colouring).
struct DenseSystem {
    Eigen::MatrixXd jacobian;
    Eigen::VectorXd rhs;  // -R
};

struct OracleResult {
    ScalarField u;
    double c = 0.0;
    double residual_sup = 0.0;
    int iterations = 0;
};

/// Residual at t = 0 written from scratch: complex one-sided difference
/// compositions for d dbar u and LU determinants.
using ResidualFn = std::function<ScalarField(const ScalarField& u, double c)>;

ScalarField bundle_residual(const Scenario& sc, const ScalarField& u, double c);

/// r == 1 residual with closed-form n x n determinants and no bundle machinery:
/// log det(F + Hess u) - log(n! det g) - lambda u - phi - c.
ScalarField classical_residual(const Scenario& sc, const ScalarField& u, double c);

/// Columns by finite differences of `residual`; eps = 1e-6.
DenseSystem assemble_dense_system(const Scenario& sc, const ResidualFn& residual, const ScalarField& u, double c);

/// Newton with direct LU solves, from u = 0 at t = 0. Grid must have
/// N <= 12, at most 4096 unknowns and second-order stencils. For lambda == 0 the unknown c is
/// bordered with the mean-zero gauge; the result is shifted to sup u = 0.
/// Throws SingularJacobian, NoConvergence.
OracleResult dense_solve(const Scenario& sc);

/// dense_solve driven by classical_residual. Throws RankMismatch unless r == 1.
OracleResult classical_reference_solve(const Scenario& sc);

struct ClassicalReport {
    double max_abs_difference = 0.0;
    double bundle_sup = 0.0;
    double classical_sup = 0.0;
};

/// Compares the main residual at (u, t = 0, c) with classical_residual.
/// Throws RankMismatch unless r == 1; second-order stencils only.
ClassicalReport classical_ma_check(const Scenario& sc, const ScalarField& u, double c = 0.0);

struct ProbeReport {
    double max_error = 0.0;
    std::vector<double> errors;
};

/// For k random band-limited directions v (normalized so that
/// sup|v| + sup|Hess v| = 1): sup |(L(u+eps v) - L(u-eps v))/(2 eps) - delta L(u) v|.
ProbeReport jacobian_probe(const Scenario& sc, const ScalarField& u, int probes, std::uint64_t seed,
                           double eps = 1e-4);

/// Same error for one direction at several step sizes.
std::vector<double> jacobian_probe_errors(const Scenario& sc, const ScalarField& u, const ScalarField& v,
                                          const std::vector<double>& eps);

/// Normalized random direction used by jacobian_probe.
ScalarField probe_direction(const GridSpec& grid, std::uint64_t seed);

/// Least-squares slope of log(error) against log(eps).
double loglog_slope(const std::vector<double>& eps, const std::vector<double>& errors);

}  // namespace nakano::oracle
