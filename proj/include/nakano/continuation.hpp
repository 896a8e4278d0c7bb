#pragma once

#include <string>
#include <vector>

#include "nakano/linear_solver.hpp"
#include "nakano/residual.hpp"

namespace nakano {

struct SolverOptions {
    double newton_tolerance = 1e-10;  // sup-norm of the residual
    int max_newton_iterations = 40;
    int max_damping_halvings = 10;    // s in {1, 1/2, ..., 2^-10}
    KrylovOptions krylov{};
    double initial_step = 0.25;
    double step_growth = 1.5;
    double step_floor = 1e-4;
    int easy_newton_iterations = 3;   // accepted steps at or below this grow the step
    double margin_factor = 1e-6;      // cone margin = margin_factor * scenario margin

    bool operator==(const SolverOptions& o) const {
        return newton_tolerance == o.newton_tolerance && max_newton_iterations == o.max_newton_iterations &&
               max_damping_halvings == o.max_damping_halvings && krylov.tolerance == o.krylov.tolerance &&
               krylov.max_iterations == o.krylov.max_iterations && initial_step == o.initial_step &&
               step_growth == o.step_growth && step_floor == o.step_floor &&
               easy_newton_iterations == o.easy_newton_iterations && margin_factor == o.margin_factor;
    }
};

/// Unknowns (u, c, t) and the bookkeeping of the Newton iterations that produced them.
struct SolverState {
    ScalarField u;
    double t = 1.0;
    double c = 0.0;
    int newton_iterations = 0;
    int krylov_iterations = 0;
    std::vector<double> damping_history;
    std::vector<double> residual_history;  // sup residual before each Newton step and at exit
    double residual_sup = 0.0;
    double min_eigenvalue = 0.0;
};

/// Diagnostics of one accepted continuation step.
struct PathStep {
    double t = 0.0;
    double step = 0.0;
    double residual_sup = 0.0;
    double min_eigenvalue = 0.0;
    double c = 0.0;
    double sup_u = 0.0;
    double sup_du = 0.0;        // sup |du|_g
    double sup_ddbar_u = 0.0;   // sup |i ddbar u|_g
    double c2_ratio = 0.0;      // sup |ddbar u| / (1 + sup |du|^2)
    int newton_iterations = 0;
    int krylov_iterations = 0;
    std::vector<double> residual_history;
};

struct PathTrace {
    std::vector<PathStep> steps;
};

struct ContinuationResult {
    SolverState state;
    PathTrace trace;
    bool success = false;
    double t_reached = 1.0;
    std::string failure;
};

/// Damped Newton for R(u, t, c) = 0 at fixed t. Each step solves
/// delta L(u) v = -R (bordered in (v, dc) when lambda == 0) and takes the
/// largest s in {1, 1/2, ..., 2^-10} keeping Theta min eigenvalue >= cone
/// margin and strictly decreasing the sup residual.
/// Throws NewtonStall, NoConvergence (Krylov) or OutsideCone (initial state).
SolverState newton_at_t(const ResidualOperator& R, SolverState state, double t, const SolverOptions& options = {});

/// Marches t from 1 to 0 starting at (u, c) = (0, 0). For lambda == 0 the
/// final u is shifted so sup u = 0. On failure the partial state is returned
/// with success == false.
ContinuationResult continuity_solve(const Scenario& sc, const SolverOptions& options = {});

struct BoundReport {
    double sup_abs_u = 0.0;
    double bound = 0.0;
    double sup_abs_phi1 = 0.0;
    double sup_abs_phi = 0.0;
    bool pass = false;
};

/// sup|u| <= (1/(lambda r)) (sup|phi_1| + sup|phi|) + 1e-8. Requires lambda > 0.
BoundReport assert_c0_bound(const Scenario& sc, const SolverState& state);

struct FieldNorms {
    double sup_u = 0.0;
    double sup_du = 0.0;
    double sup_ddbar_u = 0.0;
    double c2_ratio = 0.0;
};

/// |du|_g^2 = 2 g^{i jbar} u_i u_jbar and |ddbar u|_g = (tr (g^-1 H)^2)^{1/2}.
FieldNorms field_norms(const ScalarField& u, const HermitianMetricField& g);

struct DiagnosticsSummary {
    double max_sup_du = 0.0;
    double max_c2_ratio = 0.0;
    double max_inverse_min_eigenvalue = 0.0;
    double final_sup_du = 0.0;
    double final_c2_ratio = 0.0;
    double final_inverse_min_eigenvalue = 0.0;
    std::string note;
};

/// Maxima over the path; reported only, the estimate constants are not explicit.
DiagnosticsSummary diagnostics(const PathTrace& trace);

}  // namespace nakano
