#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nakano/continuation.hpp"

using namespace nakano;
using std::numbers::pi;

namespace {

FourierSpec mode(std::vector<int> k, cplx a) { return FourierSpec{{FourierMode{std::move(k), a}}}; }

Scenario flat(const GridSpec& g, int r, double lambda, double phi) {
    return with_phi(make_diagonal_torus_scenario(g, r, std::vector<FourierSpec>(r), 1.0, {}, lambda), ScalarField(g, phi));
}

// n = 1, r = 2, psi_1 = 0.05 cos(2 pi x), tau = 2, u* = 0.1 cos(2 pi y)
Scenario manufactured(double lambda, int N = 32) {
    const GridSpec g{1, N, 1.0, 2};
    const Scenario base = make_diagonal_torus_scenario(g, 2, {mode({1, 0}, 0.025), {}}, 2.0, {}, lambda);
    return with_phi(base, manufacture_phi(base, build_field(mode({0, 1}, 0.05), g)));
}

// log-log slope over the last three residuals above round-off: 2 for a square law
double worst_order(const std::vector<double>& hist) {
    std::vector<double> r;
    for (double v : hist)
        if (v > 1e-13) r.push_back(v);
    if (r.size() < 3) return 2.0;
    const std::size_t k = r.size() - 1;
    return std::log(r[k] / r[k - 1]) / std::log(r[k - 1] / r[k - 2]);
}

ScalarField mean_free(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return f - ScalarField(f.grid, s / f.size());
}

}  // namespace

TEST_CASE("Newton at fixed t") {
    const GridSpec g{1, 16, 1.0, 2};
    SUBCASE("the start of the path needs no iterations") {
        const Scenario sc = manufactured(1.0, 16);
        const ResidualOperator R(sc);
        SolverState s0;
        s0.u = ScalarField(g);
        const SolverState s = newton_at_t(R, s0, 1.0);
        CHECK(s.newton_iterations == 0);
        CHECK(s.residual_sup <= 1e-13);
    }
    SUBCASE("constant phi on the flat torus") {
        const Scenario sc = flat(g, 1, 1.0, 0.5);
        const ResidualOperator R(sc);
        SolverState s0;
        s0.u = ScalarField(g);
        const SolverState s = newton_at_t(R, s0, 0.0);
        CHECK((s.u - ScalarField(g, -0.5)).sup_norm() <= 1e-12);
        CHECK(s.residual_sup <= 1e-10);
        CHECK(s.newton_iterations >= 1);
        CHECK(worst_order(s.residual_history) >= 1.8);
    }
    SUBCASE("manufactured, direct at t = 0, square-law decay") {
        const Scenario sc = manufactured(1.0);
        const ResidualOperator R(sc);
        SolverState s0;
        s0.u = ScalarField(sc.grid);
        const SolverState s = newton_at_t(R, s0, 0.0);
        CHECK(s.residual_sup <= 1e-10);
        CHECK((s.u - build_field(mode({0, 1}, 0.05), sc.grid)).sup_norm() <= 1e-9);
        CHECK(s.residual_history.size() >= 3);
        CHECK(worst_order(s.residual_history) >= 1.8);
        for (double d : s.damping_history) CHECK(d <= 1.0);
    }
    SUBCASE("initial state outside the cone") {
        const Scenario sc = flat(g, 1, 1.0, 0.0);
        const ResidualOperator R(sc);
        SolverState s0;
        s0.u = build_field(mode({1, 0}, 1.0), g);
        CHECK_THROWS_AS(newton_at_t(R, s0, 0.0), OutsideCone);
    }
}

TEST_CASE("continuity solve examples") {
    const GridSpec g{1, 16, 1.0, 2};
    SUBCASE("target equals start") {
        const Scenario base = make_diagonal_torus_scenario(g, 2, {mode({1, 1}, 0.02), {}}, 1.0, {}, 1.0);
        const Scenario sc = with_phi(base, phi_one(base));
        const ContinuationResult res = continuity_solve(sc);
        CHECK(res.success);
        CHECK(res.state.u.sup_norm() <= 1e-14);
        REQUIRE(res.trace.steps.size() == 1);
        CHECK(res.trace.steps[0].t == 0.0);
        const DiagnosticsSummary d = diagnostics(res.trace);
        CHECK(d.max_sup_du <= 1e-14);
        CHECK(d.max_c2_ratio <= 1e-14);
    }
    SUBCASE("flat lambda = 0, phi = 0.3") {
        const ContinuationResult res = continuity_solve(flat(g, 2, 0.0, 0.3));
        CHECK(res.success);
        CHECK(res.state.u.sup_norm() <= 1e-12);
        CHECK(res.state.c == doctest::Approx(-0.3).epsilon(1e-10));
    }
    SUBCASE("manufactured, both lambda regimes") {
        for (double lambda : {1.0, 0.0}) {
            const Scenario sc = manufactured(lambda);
            const ContinuationResult res = continuity_solve(sc);
            REQUIRE(res.success);
            CHECK(res.t_reached == 0.0);
            CHECK(res.state.residual_sup <= 1e-10);
            ScalarField ustar = build_field(mode({0, 1}, 0.05), sc.grid);
            if (lambda == 0.0) ustar = ustar - ScalarField(sc.grid, ustar.max());
            CHECK((res.state.u - ustar).sup_norm() <= 1e-9);
            CHECK(std::abs(res.state.c) <= 1e-10);
            if (lambda == 0.0) CHECK(std::abs(res.state.u.max()) <= 1e-14);
        }
    }
    SUBCASE("path failure is reported with the partial state") {
        SolverOptions o;
        o.max_newton_iterations = 1;
        o.newton_tolerance = 1e-14;
        o.step_floor = 0.1;
        const ContinuationResult res = continuity_solve(manufactured(1.0, 16), o);
        CHECK_FALSE(res.success);
        CHECK(res.t_reached > 0.0);
        CHECK_FALSE(res.failure.empty());
    }
}

TEST_CASE("path invariants") {
    const Scenario sc = manufactured(1.0);
    const SolverOptions o;
    const ContinuationResult res = continuity_solve(sc, o);
    REQUIRE(res.success);
    double last = 1.0;
    for (const PathStep& s : res.trace.steps) {
        CHECK(s.t < last);  // strictly decreasing
        last = s.t;
        CHECK(s.min_eigenvalue >= o.margin_factor * sc.margin);
        CHECK(s.residual_sup <= o.newton_tolerance);
        CHECK(s.step > 0.0);
        if (s.residual_history.size() >= 3) CHECK(worst_order(s.residual_history) >= 1.8);
    }
    CHECK(last == 0.0);
}

TEST_CASE("C0 bound") {
    const GridSpec g{1, 16, 1.0, 2};
    SUBCASE("saturated by the constant solution") {
        const Scenario sc = flat(g, 2, 1.0, 0.5);
        const ContinuationResult res = continuity_solve(sc);
        REQUIRE(res.success);
        CHECK((res.state.u - ScalarField(g, -0.25)).sup_norm() <= 1e-12);
        const BoundReport b = assert_c0_bound(sc, res.state);
        CHECK(b.bound == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(b.sup_abs_phi == 0.5);
        CHECK(b.sup_abs_phi1 == 0.0);
        CHECK(b.pass);

        SolverState inflated = res.state;
        inflated.u = 1.01 * inflated.u;
        CHECK_FALSE(assert_c0_bound(sc, inflated).pass);
    }
    SUBCASE("strict on the manufactured case") {
        const Scenario sc = manufactured(1.0);
        const ContinuationResult res = continuity_solve(sc);
        const BoundReport b = assert_c0_bound(sc, res.state);
        CHECK(b.pass);
        CHECK(b.sup_abs_u < b.bound);
    }
    SUBCASE("needs lambda > 0") {
        SolverState s;
        s.u = ScalarField(g);
        CHECK_THROWS(assert_c0_bound(flat(g, 1, 0.0, 0.0), s));
    }
}

TEST_CASE("diagnostics") {
    const Scenario sc = manufactured(1.0);
    const ContinuationResult res = continuity_solve(sc);
    REQUIRE(res.success);
    const DiagnosticsSummary d = diagnostics(res.trace);
    CHECK(d.max_sup_du >= d.final_sup_du);
    CHECK(d.max_c2_ratio >= d.final_c2_ratio);
    CHECK(d.max_inverse_min_eigenvalue >= d.final_inverse_min_eigenvalue);
    CHECK_FALSE(d.note.empty());

    // closed form: u_z = (i/2) 0.2 pi sin(2 pi y), |du|_g^2 = 2 |u_z|^2 / g
    double expected = 0.0;
    for (std::size_t p = 0; p < sc.grid.size(); ++p) {
        const double uz = 0.1 * pi * std::abs(std::sin(2 * pi * sc.grid.coordinate(p, 1)));
        expected = std::max(expected, std::sqrt(2.0 * uz * uz / sc.metric.at(p)(0, 0).real()));
    }
    CHECK(std::abs(d.final_sup_du - expected) <= 0.1 * expected);

    const FieldNorms z = field_norms(ScalarField(sc.grid), sc.metric);
    CHECK(z.sup_du == 0.0);
    CHECK(z.sup_ddbar_u == 0.0);
    CHECK(z.c2_ratio == 0.0);
}

TEST_CASE("uniqueness probes") {
    SUBCASE("lambda > 0: perturbed start at t = 0") {
        const Scenario sc = manufactured(1.0);
        const ContinuationResult a = continuity_solve(sc);
        REQUIRE(a.success);
        const ResidualOperator R(sc);
        SolverState s0;
        s0.u = build_field(random_fourier_spec(2, 77, 0.01, 2, 4), sc.grid);
        const SolverState b = newton_at_t(R, s0, 0.0);
        CHECK((a.state.u - b.u).sup_norm() <= 1e-8);
    }
    SUBCASE("lambda = 0: equal up to a constant, then equal after normalization") {
        const GridSpec g{1, 16, 1.0, 2};
        const Scenario sc =
            make_diagonal_torus_scenario(g, 2, {mode({1, 0}, 0.02), mode({1, 1}, 0.01)}, 1.0, random_fourier_spec(2, 5, 0.2), 0.0);
        const ContinuationResult a = continuity_solve(sc);
        REQUIRE(a.success);
        const ResidualOperator R(sc);
        SolverState s0;
        s0.u = build_field(random_fourier_spec(2, 78, 0.002, 1, 4), g) + ScalarField(g, 0.4);
        s0.c = 0.2;
        SolverState b = newton_at_t(R, s0, 0.0);
        CHECK(std::abs(a.state.c - b.c) <= 1e-9);
        CHECK(mean_free(a.state.u - b.u).sup_norm() <= 1e-8);
        b.u = b.u - ScalarField(g, b.u.max());
        CHECK((a.state.u - b.u).sup_norm() <= 1e-8);
    }
}

TEST_CASE("gauge covariance at lambda = 0") {
    const GridSpec g{1, 16, 1.0, 2};
    const Scenario sc =
        make_diagonal_torus_scenario(g, 2, {mode({0, 1}, 0.02), {}}, 1.0, random_fourier_spec(2, 6, 0.2), 0.0);
    const ContinuationResult a = continuity_solve(sc);
    REQUIRE(a.success);
    for (double s : {0.3, -1.1}) {
        const ContinuationResult b = continuity_solve(with_phi(sc, sc.phi + ScalarField(g, s)));
        REQUIRE(b.success);
        CHECK((a.state.u - b.state.u).sup_norm() <= 1e-8);
        CHECK(std::abs((a.state.c - s) - b.state.c) <= 1e-10);
    }
}
