#include "nakano/continuation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nakano {

SolverState newton_at_t(const ResidualOperator& R, SolverState state, double t, const SolverOptions& options) {
    const Scenario& sc = R.scenario();
    const double cone_margin = options.margin_factor * sc.margin;
    const bool bordered = sc.lambda == 0.0;
    state.t = t;
    state.residual_history.clear();
    state.damping_history.clear();

    ResidualReport rep = R.evaluate(state.u, t, state.c);
    for (int it = 0;; ++it) {
        state.residual_history.push_back(rep.sup_norm);
        state.residual_sup = rep.sup_norm;
        state.min_eigenvalue = rep.theta_min_eig;
        if (rep.sup_norm <= options.newton_tolerance) return state;
        if (it == options.max_newton_iterations)
            throw NewtonStall("Newton did not reach tolerance in " + std::to_string(it) + " iterations");

        const LinearizedOperator op = R.linearize(state.u);
        const ScalarField rhs = -1.0 * rep.residual;
        ScalarField v;
        double dc = 0.0;
        if (bordered) {
            BorderedSolution sol = solve_bordered(op, rhs, options.krylov);
            v = std::move(sol.v);
            dc = sol.dc;
            state.krylov_iterations += sol.report.iterations;
        } else {
            auto [x, kr] = solve(op, rhs, options.krylov);
            v = std::move(x);
            state.krylov_iterations += kr.iterations;
        }

        bool accepted = false;
        double s = 1.0;
        for (int k = 0; k <= options.max_damping_halvings; ++k, s *= 0.5) {
            ScalarField trial(state.u.grid);
            for (std::size_t p = 0; p < trial.size(); ++p) trial[p] = state.u[p] + s * v[p];
            const double trial_c = state.c + s * dc;
            ResidualReport trial_rep;
            try {
                trial_rep = R.evaluate(trial, t, trial_c);
            } catch (const OutsideCone&) {
                continue;
            }
            if (trial_rep.theta_min_eig < cone_margin || !(trial_rep.sup_norm < rep.sup_norm)) continue;
            state.u = std::move(trial);
            state.c = trial_c;
            rep = std::move(trial_rep);
            accepted = true;
            break;
        }
        if (!accepted) throw NewtonStall("no admissible damping factor at t = " + std::to_string(t));
        state.damping_history.push_back(s);
        ++state.newton_iterations;
    }
}

FieldNorms field_norms(const ScalarField& u, const HermitianMetricField& g) {
    const ComplexVectorField du = complex_gradient(u);
    const HermitianMetricField H = complex_hessian(u);
    const int n = u.grid.n;
    FieldNorms out;
    out.sup_u = u.sup_norm();
    for (std::size_t p = 0; p < u.size(); ++p) {
        const Eigen::MatrixXcd ginv = g.at(p).inverse();
        cplx q{0.0, 0.0};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) q += ginv(j, i) * du(p, i) * std::conj(du(p, j));
        out.sup_du = std::max(out.sup_du, std::sqrt(std::max(0.0, 2.0 * q.real())));
        const Eigen::MatrixXcd A = ginv * H.at(p);
        out.sup_ddbar_u = std::max(out.sup_ddbar_u, std::sqrt(std::max(0.0, (A * A).trace().real())));
    }
    out.c2_ratio = out.sup_ddbar_u / (1.0 + out.sup_du * out.sup_du);
    return out;
}

static PathStep record_step(const Scenario& sc, const SolverState& st, double step) {
    PathStep ps;
    ps.t = st.t;
    ps.step = step;
    ps.residual_sup = st.residual_sup;
    ps.min_eigenvalue = st.min_eigenvalue;
    ps.c = st.c;
    const FieldNorms fn = field_norms(st.u, sc.metric);
    ps.sup_u = fn.sup_u;
    ps.sup_du = fn.sup_du;
    ps.sup_ddbar_u = fn.sup_ddbar_u;
    ps.c2_ratio = fn.c2_ratio;
    ps.residual_history = st.residual_history;
    return ps;
}

ContinuationResult continuity_solve(const Scenario& sc, const SolverOptions& options) {
    const ResidualOperator R(sc);
    ContinuationResult out;
    SolverState state;
    state.u = ScalarField(sc.grid);
    state.t = 1.0;
    state.c = 0.0;
    state = newton_at_t(R, state, 1.0, options);

    double t = 1.0;
    double dt = options.initial_step;
    // target already solved by the start (phi == phi_1): one step to t = 0
    if (R.evaluate(state.u, 0.0, state.c).sup_norm <= options.newton_tolerance) dt = 1.0;

    while (t > 0.0) {
        const double t_new = std::max(0.0, t - dt);
        const int newton_before = state.newton_iterations;
        const int krylov_before = state.krylov_iterations;
        SolverState next;
        try {
            next = newton_at_t(R, state, t_new, options);
        } catch (const Error& e) {
            // NewtonStall, NoConvergence, OutsideCone: shorten the step
            dt *= 0.5;
            if (dt < options.step_floor) {
                out.state = state;
                out.success = false;
                out.t_reached = t;
                out.failure = std::string("PathFailure: ") + e.kind() + ": " + e.what();
                return out;
            }
            continue;
        }
        PathStep ps = record_step(sc, next, t - t_new);
        ps.newton_iterations = next.newton_iterations - newton_before;
        ps.krylov_iterations = next.krylov_iterations - krylov_before;
        out.trace.steps.push_back(std::move(ps));
        if (next.newton_iterations - newton_before <= options.easy_newton_iterations) dt *= options.step_growth;
        state = std::move(next);
        t = t_new;
    }

    if (sc.normalization == Normalization::sup_zero) {
        const double top = state.u.max();
        for (double& v : state.u.values) v -= top;
        state.residual_sup = R.evaluate(state.u, 0.0, state.c).sup_norm;
    }
    out.state = std::move(state);
    out.success = true;
    out.t_reached = 0.0;
    return out;
}

BoundReport assert_c0_bound(const Scenario& sc, const SolverState& state) {
    if (!(sc.lambda > 0.0)) throw std::invalid_argument("assert_c0_bound: requires lambda > 0");
    BoundReport rep;
    rep.sup_abs_u = state.u.sup_norm();
    rep.sup_abs_phi1 = phi_one(sc).sup_norm();
    rep.sup_abs_phi = sc.phi.sup_norm();
    rep.bound = (rep.sup_abs_phi1 + rep.sup_abs_phi) / (sc.lambda * sc.rank);
    rep.pass = rep.sup_abs_u <= rep.bound + 1e-8;
    return rep;
}

DiagnosticsSummary diagnostics(const PathTrace& trace) {
    DiagnosticsSummary d;
    d.note = "reported only: the C1 and C2 estimate constants are not explicit, no thresholds applied";
    for (const auto& s : trace.steps) {
        d.max_sup_du = std::max(d.max_sup_du, s.sup_du);
        d.max_c2_ratio = std::max(d.max_c2_ratio, s.c2_ratio);
        if (s.min_eigenvalue > 0.0)
            d.max_inverse_min_eigenvalue = std::max(d.max_inverse_min_eigenvalue, 1.0 / s.min_eigenvalue);
    }
    if (!trace.steps.empty()) {
        const auto& last = trace.steps.back();
        d.final_sup_du = last.sup_du;
        d.final_c2_ratio = last.c2_ratio;
        d.final_inverse_min_eigenvalue = last.min_eigenvalue > 0.0 ? 1.0 / last.min_eigenvalue : 0.0;
    }
    return d;
}

}  // namespace nakano
