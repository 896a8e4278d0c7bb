#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nakano/residual.hpp"
#include "nakano/scenario.hpp"

using namespace nakano;
using std::numbers::pi;

namespace {

FourierSpec mode(std::vector<int> k, cplx a) { return FourierSpec{{FourierMode{std::move(k), a}}}; }

}  // namespace

TEST_CASE("build_field") {
    const GridSpec g{1, 16, 1.0, 2};
    CHECK(build_field({}, g).sup_norm() == 0.0);
    const ScalarField c = build_field(mode({1, 0}, 0.5), g);
    double worst = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) worst = std::max(worst, std::abs(c[p] - std::cos(2 * pi * g.coordinate(p, 0))));
    CHECK(worst <= 1e-15);

    FourierSpec two{{{{1, 0}, {0.3, 0.2}}, {{1, -2}, {-0.1, 0.4}}}};
    CHECK(build_field(two, g)[0] == doctest::Approx(2 * (0.3 - 0.1)));

    CHECK_THROWS_AS(build_field(mode({5, 0}, 1.0), g), UnresolvedMode);  // |k| > N/4
    CHECK_THROWS_AS(build_field(mode({1}, 1.0), g), UnresolvedMode);     // wrong length

    // a non-real spec that still evaluates to a real field: explicit conjugate pairs
    FourierSpec pair{{{{0, 1}, {0.0, 0.5}}, {{0, -1}, {0.0, -0.5}}}, false};
    const ScalarField s = build_field(pair, g);
    CHECK(std::abs(s[1] + std::sin(2 * pi * g.coordinate(1, 1))) <= 1e-15);
}

TEST_CASE("closed-form derivatives of Fourier specs") {
    const GridSpec g{2, 16, 1.0, 2};
    const FourierSpec f = mode({1, 0, 0, 2}, {0.2, -0.1});
    const HermitianMetricField H = exact_complex_hessian(f, g);
    CHECK(H.hermitian_defect() <= 1e-15);
    // trace of the Hessian is 1/4 of the Laplacian: -(1/4)(2 pi)^2 |k|^2 f
    const ScalarField u = build_field(f, g);
    double worst = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p)
        worst = std::max(worst, std::abs((H.at(p)(0, 0) + H.at(p)(1, 1)).real() + pi * pi * 5.0 * u[p]));
    CHECK(worst <= 1e-12);
}

TEST_CASE("diagonal torus generator") {
    const GridSpec g{1, 64, 1.0, 2};
    SUBCASE("flat case") {
        const Scenario sc = make_diagonal_torus_scenario(g, 2, {{}, {}}, 1.5, {}, 1.0);
        CHECK(sc.background == NakanoTensorField::constant(g, 2, 1.5 * Eigen::MatrixXcd::Identity(2, 2)));
        CHECK(sc.metric == HermitianMetricField::constant(g, 1.5 * Eigen::MatrixXcd::Identity(1, 1)));
        CHECK(sc.normalization == Normalization::none);
    }
    SUBCASE("twisted potential, closed-form minimum eigenvalue") {
        const Scenario sc = make_diagonal_torus_scenario(g, 2, {mode({1, 0}, 0.025), {}}, 1.0, {}, 1.0);
        // F_11 = 1 + Hess psi_1 = 1 - 0.05 pi^2 cos(2 pi x) up to O(h^2)
        CHECK(min_nakano_eigenvalue(sc.background) == doctest::Approx(1.0 - 0.05 * pi * pi).epsilon(1e-3));
        const HermitianMetricField Hpsi = complex_hessian(build_field(mode({1, 0}, 0.025), g));
        for (std::size_t p = 0; p < g.size(); p += 7)
            CHECK(sc.background.at(p)(0, 0) == 1.0 + Hpsi.at(p)(0, 0));
        CHECK(std::abs(sc.background.at(0)(0, 1)) == 0.0);
        // generator coupling g = (1/r) tr_E F, exactly
        HermitianMetricField tr = bundle_partial_trace(sc.background);
        for (auto& v : tr.raw()) v /= 2.0;
        CHECK(tr == sc.metric);
        CHECK(sc.coupling_discrepancy == 0.0);
    }
    SUBCASE("over-large amplitude is rejected with the offending point") {
        try {
            make_diagonal_torus_scenario(g, 2, {mode({1, 0}, 0.15), {}}, 1.0, {}, 1.0);
            FAIL("expected NotNakanoPositive");
        } catch (const NotNakanoPositive& e) {
            // 1 - 0.3 pi^2 < 0 at x = 0
            CHECK(e.point() == 0);
            CHECK(e.min_eigenvalue() == doctest::Approx(1.0 - 0.3 * pi * pi).epsilon(1e-3));
        }
    }
    SUBCASE("lambda = 0 carries sup normalization") {
        CHECK(make_diagonal_torus_scenario(g, 1, {{}}, 1.0, {}, 0.0).normalization == Normalization::sup_zero);
    }
    SUBCASE("argument errors") {
        CHECK_THROWS_AS(make_diagonal_torus_scenario(g, 2, {{}}, 1.0, {}, 1.0), ShapeMismatch);
        CHECK_THROWS_AS(make_diagonal_torus_scenario(g, 1, {{}}, -1.0, {}, 1.0), SchemaError);
        CHECK_THROWS_AS(make_diagonal_torus_scenario(g, 1, {{}}, 1.0, {}, -1.0), SchemaError);
    }
}

TEST_CASE("make_scenario with general F") {
    const GridSpec g{1, 16, 1.0, 2};
    const NakanoTensorField F = random_nakano_field(g, 2, 4, 0.3);
    const Scenario coupled = make_scenario(F, nullptr, ScalarField(g), 1.0);
    CHECK(coupled.coupling_discrepancy == 0.0);
    const HermitianMetricField g2 = HermitianMetricField::constant(g, 2.0 * Eigen::MatrixXcd::Identity(1, 1));
    const Scenario independent = make_scenario(F, &g2, ScalarField(g), 1.0);
    double expected = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p)
        expected = std::max(expected, std::abs(coupled.metric.at(p)(0, 0) - cplx(2.0, 0.0)));
    CHECK(independent.coupling_discrepancy == doctest::Approx(expected));
    CHECK(independent.metric == g2);

    const HermitianMetricField neg = HermitianMetricField::constant(g, -Eigen::MatrixXcd::Identity(1, 1));
    CHECK_THROWS_AS(make_scenario(F, &neg, ScalarField(g), 1.0), NonPositiveMetric);
    CHECK_THROWS_AS(make_scenario(F, nullptr, ScalarField(g), 1.0, 10.0), NotNakanoPositive);
    CHECK_THROWS_AS(make_scenario(F, nullptr, ScalarField(GridSpec{1, 8, 1.0, 2}), 1.0), ShapeMismatch);
    CHECK(volume_convention(1) == 1.0);
    CHECK(volume_convention(2) == 2.0);
    CHECK(coupled.volume_density().values == metric_determinant(coupled.metric).values);
}

TEST_CASE("manufactured phi") {
    const GridSpec g{1, 32, 1.0, 2};
    const Scenario sc = make_diagonal_torus_scenario(g, 2, {mode({1, 0}, 0.025), {}}, 2.0, {}, 1.0);
    const ScalarField phi0 = manufacture_phi(sc, ScalarField(g));
    CHECK((phi0 - phi_one(sc)).sup_norm() <= 1e-14);

    const Scenario flat = make_diagonal_torus_scenario(g, 1, {{}}, 1.0, {}, 0.0);
    CHECK(manufacture_phi(flat, ScalarField(g)).sup_norm() == 0.0);

    const ScalarField ustar = build_field(mode({0, 1}, 0.05), g);
    const Scenario m = with_phi(sc, manufacture_phi(sc, ustar));
    CHECK(residual(m, ustar, 0.0, 0.0).sup_norm <= 1e-13);

    // continuum variant differs by the O(h^2) Hessian defect only
    const ScalarField phic = manufacture_phi_exact(sc, mode({0, 1}, 0.05));
    const double d32 = (phic - m.phi).sup_norm();
    const GridSpec g64{1, 64, 1.0, 2};
    const Scenario sc64 = make_diagonal_torus_scenario(g64, 2, {mode({1, 0}, 0.025), {}}, 2.0, {}, 1.0);
    const double d64 = (manufacture_phi_exact(sc64, mode({0, 1}, 0.05)) -
                        manufacture_phi(sc64, build_field(mode({0, 1}, 0.05), g64)))
                           .sup_norm();
    CHECK(d32 / d64 == doctest::Approx(4.0).epsilon(0.05));

    CHECK_THROWS_AS(manufacture_phi(sc, build_field(mode({0, 1}, 1.0), g)), NotNakanoPositive);
}

TEST_CASE("random generators") {
    const GridSpec g{2, 8, 1.0, 2};
    CHECK(random_nakano_field(g, 2, 5, 1.0, 0.0) == NakanoTensorField::constant(g, 2, Eigen::MatrixXcd::Identity(4, 4)));
    CHECK(random_nakano_field(g, 3, 99, 0.2) == random_nakano_field(g, 3, 99, 0.2));
    CHECK_FALSE(random_nakano_field(g, 3, 99, 0.2) == random_nakano_field(g, 3, 100, 0.2));
    for (std::uint64_t seed = 0; seed < 10; ++seed)
        CHECK(min_nakano_eigenvalue(random_nakano_field(g, 2, seed, 0.05, 0.8, 1)) >= 0.05);
    CHECK(random_fourier_spec(4, 3, 0.1) == random_fourier_spec(4, 3, 0.1));
    const FourierSpec s = random_fourier_spec(2, 3, 0.1, 2, 5);
    CHECK(s.modes.size() == 5);
    for (const auto& m : s.modes) {
        CHECK(std::abs(m.amplitude) <= 0.1 + 1e-15);
        for (int k : m.k) CHECK(std::abs(k) <= 2);
    }
}
