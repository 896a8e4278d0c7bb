#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "nakano/curvature.hpp"
#include "nakano/property_suites.hpp"
#include "nakano/scenario.hpp"

using namespace nakano;

namespace {

Eigen::MatrixXcd diag(std::initializer_list<double> d) {
    Eigen::VectorXcd v(d.size());
    int k = 0;
    for (double x : d) v(k++) = x;
    return v.asDiagonal();
}

NakanoTensorField constant_field(int n, int r, const Eigen::MatrixXcd& M, int N = 8) {
    return NakanoTensorField::constant(GridSpec{n, N, 1.0, 2}, r, M);
}

// determinant by cofactor expansion, test-side only
cplx cofactor_det(const Eigen::MatrixXcd& M) {
    const Eigen::Index d = M.rows();
    if (d == 1) return M(0, 0);
    cplx det{0.0, 0.0};
    for (Eigen::Index j = 0; j < d; ++j) {
        Eigen::MatrixXcd minor(d - 1, d - 1);
        for (Eigen::Index r = 1; r < d; ++r)
            for (Eigen::Index c = 0, cc = 0; c < d; ++c)
                if (c != j) minor(r - 1, cc++) = M(r, c);
        det += (j % 2 ? -1.0 : 1.0) * M(0, j) * cofactor_det(minor);
    }
    return det;
}

}  // namespace

TEST_CASE("assemble_theta") {
    const GridSpec g1{1, 8, 1.0, 2};
    const NakanoTensorField F = constant_field(1, 2, diag({2, 3}));
    SUBCASE("zero Hessian leaves F") { CHECK(assemble_theta(F, HermitianMetricField(g1)) == F); }
    SUBCASE("n = 1, r = 2 diagonal arithmetic") {
        const auto H = HermitianMetricField::constant(g1, Eigen::MatrixXcd::Constant(1, 1, -0.5));
        const NakanoTensorField T = assemble_theta(F, H);
        CHECK(Eigen::MatrixXcd(T.at(3)).isApprox(diag({1.5, 2.5}), 1e-15));
    }
    SUBCASE("n = 2, r = 1 is elementwise addition") {
        const GridSpec g2{2, 8, 1.0, 2};
        Eigen::MatrixXcd f(2, 2), h(2, 2);
        f << 2.0, cplx(0.1, 0.2), cplx(0.1, -0.2), 3.0;
        h << -0.3, cplx(0.0, 0.5), cplx(0.0, -0.5), 0.4;
        const NakanoTensorField T = assemble_theta(constant_field(2, 1, f), HermitianMetricField::constant(g2, h));
        CHECK((Eigen::MatrixXcd(T.at(100)) - (f + h)).norm() == 0.0);
    }
    SUBCASE("block pattern H (x) Id_r with index i * r + alpha") {
        const GridSpec g2{2, 8, 1.0, 2};
        Eigen::MatrixXcd h(2, 2);
        h << 1.0, cplx(2.0, 3.0), cplx(2.0, -3.0), 4.0;
        const NakanoTensorField T = assemble_theta(NakanoTensorField(g2, 3), HermitianMetricField::constant(g2, h));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        CHECK(T.at(0)(i * 3 + a, j * 3 + b) == (a == b ? h(i, j) : cplx(0.0, 0.0)));
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(assemble_theta(F, HermitianMetricField(GridSpec{1, 16, 1.0, 2})), ShapeMismatch);
    }
}

TEST_CASE("log_det_power") {
    CHECK(log_det_power(constant_field(2, 2, Eigen::MatrixXcd::Identity(4, 4))).sup_norm() == 0.0);
    CHECK(log_det_power(constant_field(1, 2, diag({2, 3})))[0] == doctest::Approx(0.5 * std::log(6.0)).epsilon(1e-15));
    Eigen::MatrixXcd m(2, 2);
    m << 2.0, cplx(0.0, 1.0), cplx(0.0, -1.0), 2.0;
    CHECK(log_det_power(constant_field(2, 1, m))[7] == doctest::Approx(std::log(3.0)).epsilon(1e-15));

    NakanoTensorField bad = constant_field(1, 2, diag({2, 3}));
    bad.at(11) = diag({2, -1});
    try {
        log_det_power(bad);
        FAIL("expected NotPositive");
    } catch (const NotPositive& e) {
        CHECK(e.point() == 11);
        CHECK(e.min_eigenvalue() == doctest::Approx(-1.0));
    }
    CHECK(std::isnan(log_det_power(diag({2, -1}), 2)));

    SUBCASE("matches cofactor determinant on random PD matrices") {
        std::mt19937_64 rng(5);
        for (int d : {1, 2, 3, 4, 6}) {
            const Eigen::MatrixXcd A = random_pd_matrix(rng, d);
            CHECK(log_det_power(A, 2) == doctest::Approx(0.5 * std::log(cofactor_det(A).real())).epsilon(1e-12));
        }
    }
}

TEST_CASE("invert") {
    CHECK(invert(constant_field(2, 2, Eigen::MatrixXcd::Identity(4, 4))) ==
          constant_field(2, 2, Eigen::MatrixXcd::Identity(4, 4)));
    const NakanoTensorField inv = invert(constant_field(1, 2, diag({2, 3})));
    CHECK(inv.at(0)(0, 0).real() == doctest::Approx(0.5));
    CHECK(inv.at(0)(1, 1).real() == doctest::Approx(1.0 / 3.0));
    const NakanoTensorField R = random_nakano_field(GridSpec{2, 8, 1.0, 2}, 2, 17, 0.1, 0.5);
    const NakanoTensorField Ri = invert(R);
    double worst = 0.0;
    for (std::size_t p = 0; p < R.points(); ++p)
        worst = std::max(worst, (Eigen::MatrixXcd(R.at(p)) * Ri.at(p) - Eigen::MatrixXcd::Identity(4, 4)).norm());
    CHECK(worst <= 1e-12);
    CHECK(Ri.hermitian_defect() == 0.0);
}

TEST_CASE("partial traces") {
    const HermitianMetricField a = partial_trace_inverse(constant_field(1, 2, diag({0.5, 1.0 / 3.0})));
    CHECK(a.at(0)(0, 0).real() == doctest::Approx(5.0 / 6.0));
    const HermitianMetricField b = partial_trace_inverse(constant_field(2, 3, Eigen::MatrixXcd::Identity(6, 6)));
    CHECK((Eigen::MatrixXcd(b.at(5)) - 3.0 * Eigen::MatrixXcd::Identity(2, 2)).norm() == 0.0);

    // brute-force index summation over (i, alpha, j, beta)
    const NakanoTensorField M = random_nakano_field(GridSpec{2, 8, 1.0, 2}, 2, 3, 0.2, 0.6);
    const HermitianMetricField alpha = bundle_partial_trace(M);
    double worst = 0.0;
    for (std::size_t p = 0; p < M.points(); ++p)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                cplx s{0.0, 0.0};
                for (int al = 0; al < 2; ++al)
                    for (int be = 0; be < 2; ++be)
                        if (al == be) s += M.at(p)(NakanoTensorField::flat_index(i, al, 2), NakanoTensorField::flat_index(j, be, 2));
                worst = std::max(worst, std::abs(alpha.at(p)(i, j) - s));
            }
    CHECK(worst <= 1e-15);
}

TEST_CASE("eigenvalues, quadratic forms and decompositions") {
    CHECK(min_nakano_eigenvalue(constant_field(1, 3, Eigen::MatrixXcd::Identity(3, 3))) == doctest::Approx(1.0));
    NakanoTensorField f = constant_field(1, 2, diag({2, 3}));
    f.at(9) = diag({2 - 2.5, 3 - 2.5});
    CHECK(min_nakano_eigenvalue(f) == doctest::Approx(-0.5));

    const NakanoTensorField R = random_nakano_field(GridSpec{1, 8, 1.0, 2}, 3, 4, 0.1, 0.7);
    double oracle = 1e300;
    for (std::size_t p = 0; p < R.points(); ++p) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(R.at(p));  // general (non-Hermitian) solver as the oracle
        for (int k = 0; k < 3; ++k) oracle = std::min(oracle, es.eigenvalues()(k).real());
    }
    CHECK(std::abs(min_nakano_eigenvalue(R) - oracle) <= 1e-12);

    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(2);
    e1(0) = 1.0;
    CHECK(quad_form(Eigen::MatrixXcd::Identity(2, 2), e1) == 1.0);
    CHECK(quad_form(diag({2, 3}), e1) == 2.0);
    std::mt19937_64 rng(9);
    const Eigen::MatrixXcd A = random_pd_matrix(rng, 4);
    Eigen::VectorXcd gam(4);
    gam << cplx(1, 2), cplx(-0.5, 0.1), cplx(0, 1), cplx(0.3, -0.7);
    cplx loops{0.0, 0.0};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) loops += std::conj(gam(a)) * A(a, b) * gam(b);
    CHECK(quad_form(A, gam) == doctest::Approx(loops.real()).epsilon(1e-14));

    const EigenDecomposition id = eigendecompose(Eigen::MatrixXcd::Identity(3, 3));
    CHECK((id.values.array() - 1.0).abs().maxCoeff() == 0.0);
    const EigenDecomposition d31 = eigendecompose(diag({1, 3}));
    CHECK(d31.values(0) == doctest::Approx(3.0));
    CHECK(d31.values(1) == doctest::Approx(1.0));
    CHECK(std::abs(d31.vectors(1, 0)) == doctest::Approx(1.0));
    for (int d : {2, 4, 6}) {
        const Eigen::MatrixXcd X = random_pd_matrix(rng, d) - 2.0 * Eigen::MatrixXcd::Identity(d, d);
        const EigenDecomposition ed = eigendecompose(X);
        CHECK(std::abs(ed.values.sum() - X.trace().real()) <= 1e-12);
        const Eigen::MatrixXcd rebuilt = ed.vectors * ed.values.asDiagonal() * ed.vectors.adjoint();
        CHECK((rebuilt - X).norm() <= 1e-12 * X.norm());
        CHECK((ed.vectors.adjoint() * ed.vectors - Eigen::MatrixXcd::Identity(d, d)).norm() <= 1e-13 * d);
        for (int k = 0; k + 1 < d; ++k) CHECK(ed.values(k) >= ed.values(k + 1));
    }
}

TEST_CASE("frame change") {
    const NakanoTensorField M = random_nakano_field(GridSpec{2, 8, 1.0, 2}, 2, 21, 0.1);
    CHECK(frame_change(M, Eigen::MatrixXcd::Identity(2, 2)) == M);

    Eigen::MatrixXcd swap(2, 2);
    swap << 0, 1, 1, 0;
    const NakanoTensorField S = frame_change(constant_field(1, 2, diag({2, 3})), swap);
    CHECK(S.at(0)(0, 0).real() == 3.0);
    CHECK(S.at(0)(1, 1).real() == 2.0);
    CHECK(log_det_power(S)[0] == doctest::Approx(0.5 * std::log(6.0)));

    std::mt19937_64 rng(33);
    const Eigen::MatrixXcd U = random_unitary(rng, 2);
    const ScalarField before = log_det_power(M), after = log_det_power(frame_change(M, U));
    CHECK((after - before).sup_norm() <= 1e-12);
    // the block structure (Id_n (x) U) acts only on the bundle index
    const NakanoTensorField C = frame_change(M, U);
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(4, 4);
    W.block(0, 0, 2, 2) = U;
    W.block(2, 2, 2, 2) = U;
    CHECK((Eigen::MatrixXcd(C.at(77)) - W * M.at(77) * W.adjoint()).norm() <= 1e-14);

    Eigen::MatrixXcd notU = U;
    notU(0, 0) += 1e-10;
    CHECK_THROWS_AS(frame_change(M, notU), NotUnitary);
}

TEST_CASE("random-matrix property suites (reduced counts)") {
    for (const auto& r : run_property_suites(77, 200)) {
        INFO(r.name << " worst " << r.worst);
        CHECK(r.pass());
        CHECK(r.instances > 0);
    }
    // independent concavity check with cofactor determinants
    std::mt19937_64 rng(8);
    for (int k = 0; k < 50; ++k) {
        const Eigen::MatrixXcd A = random_pd_matrix(rng, 3), B = random_pd_matrix(rng, 3);
        const double lhs = std::log(cofactor_det(A).real());
        const double rhs = std::log(cofactor_det(B).real()) + (B.inverse() * (A - B)).trace().real();
        CHECK(lhs <= rhs + 1e-12);
    }
}
