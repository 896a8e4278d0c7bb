#include "nakano/property_suites.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

#include <cmath>

#include "nakano/curvature.hpp"
#include "nakano/scenario.hpp"

namespace nakano {

namespace {

Eigen::MatrixXcd gaussian(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXcd X(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) X(i, j) = cplx(normal(rng), normal(rng));
    return X;
}

/// nr with n in {1,2}, r in {1,2,3}
std::pair<int, int> random_shape(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nd(1, 2), rd(1, 3);
    const int n = nd(rng);
    return {n, rd(rng)};
}

double logdet(const Eigen::MatrixXcd& A) {
    const Eigen::LLT<Eigen::MatrixXcd> llt(A);
    return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
}

void record(SuiteReport& rep, double violation) {
    ++rep.instances;
    rep.worst = std::max(rep.worst, violation);
    if (!(violation <= rep.tolerance)) ++rep.failures;
}

}  // namespace

Eigen::MatrixXcd random_unitary(std::mt19937_64& rng, int d) {
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(gaussian(rng, d, d));
    Eigen::MatrixXcd Q = qr.householderQ();
    return Q;
}

Eigen::MatrixXcd random_pd_matrix(std::mt19937_64& rng, int d, double lo, double hi) {
    std::uniform_real_distribution<double> eig(lo, hi);
    const Eigen::MatrixXcd U = random_unitary(rng, d);
    Eigen::VectorXd e(d);
    for (int k = 0; k < d; ++k) e(k) = eig(rng);
    Eigen::MatrixXcd A = U * e.asDiagonal() * U.adjoint();
    return 0.5 * (A + A.adjoint());
}

SuiteReport concavity_suite(std::uint64_t seed, int instances, double tol) {
    std::mt19937_64 rng(seed);
    SuiteReport rep{"concavity", 0, 0, -std::numeric_limits<double>::infinity(), tol};
    for (int k = 0; k < instances; ++k) {
        const auto [n, r] = random_shape(rng);
        const Eigen::MatrixXcd A = random_pd_matrix(rng, n * r), B = random_pd_matrix(rng, n * r);
        const double rhs = logdet(B) + (B.llt().solve(A - B)).trace().real();
        record(rep, logdet(A) - rhs);
    }
    return rep;
}

SuiteReport mean_value_suite(std::uint64_t seed, int instances, double tol) {
    std::mt19937_64 rng(seed);
    SuiteReport rep{"mean_value", 0, 0, -std::numeric_limits<double>::infinity(), tol};
    for (int k = 0; k < instances; ++k) {
        const auto [n, r] = random_shape(rng);
        const int d = n * r;
        const Eigen::MatrixXcd A = random_pd_matrix(rng, d), B = random_pd_matrix(rng, d);
        const double mean = B.llt().solve(A).trace().real() / d;
        const double geometric = std::exp((logdet(A) - logdet(B)) / d);
        record(rep, geometric - mean);
    }
    return rep;
}

SuiteReport mutual_control_suite(std::uint64_t seed, int instances, double tol) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> shift(-2.0, 2.0);
    SuiteReport rep{"mutual_control", 0, 0, -std::numeric_limits<double>::infinity(), tol};
    for (int k = 0; k < instances; ++k) {
        const auto [n, r] = random_shape(rng);
        const int d = n * r;
        const Eigen::MatrixXcd X = gaussian(rng, d, d);
        const Eigen::MatrixXcd F = 0.5 * (X + X.adjoint());
        Eigen::VectorXd lam(n);
        for (int i = 0; i < n; ++i) lam(i) = shift(rng);
        Eigen::MatrixXcd M = F;
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < r; ++a) M(i * r + a, i * r + a) += lam(i);
        const EigenDecomposition ed = eigendecompose(M);
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < r; ++a) {
                const int row = NakanoTensorField::flat_index(i, a, r);
                double sum = 0.0;
                for (int q = 0; q < d; ++q) sum += std::norm(ed.vectors(row, q)) * ed.values(q);
                worst = std::max(worst, std::abs(F(row, row).real() + lam(i) - sum));
            }
        record(rep, worst);
    }
    return rep;
}

SuiteReport frame_invariance_suite(std::uint64_t seed, int pairs, double tol) {
    std::mt19937_64 rng(seed);
    SuiteReport rep{"frame_invariance", 0, 0, -std::numeric_limits<double>::infinity(), tol};
    for (int k = 0; k < pairs; ++k) {
        const auto [n, r] = random_shape(rng);
        const GridSpec grid{n, 8, 1.0, 2};
        const NakanoTensorField M = random_nakano_field(grid, r, rng(), 0.1, 0.5, 1);
        const Eigen::MatrixXcd U = random_unitary(rng, r);
        const ScalarField before = log_det_power(M);
        const ScalarField after = log_det_power(frame_change(M, U));
        double worst = 0.0;
        for (std::size_t p = 0; p < before.size(); ++p) worst = std::max(worst, std::abs(after[p] - before[p]));
        record(rep, worst);
    }
    return rep;
}

SuiteReport positivity_equivalence_suite(std::uint64_t seed, int instances, double tol) {
    std::mt19937_64 rng(seed);
    SuiteReport rep{"positivity_equivalence", 0, 0, -std::numeric_limits<double>::infinity(), tol};
    for (int k = 0; k < instances; ++k) {
        const auto [n, r] = random_shape(rng);
        const int d = n * r;
        const Eigen::MatrixXcd X = gaussian(rng, d, d);
        const Eigen::MatrixXcd M = 0.5 * (X + X.adjoint());
        const EigenDecomposition ed = eigendecompose(M);
        const double smallest = ed.values(d - 1);
        // the eigenvector attains the minimum; no sampled unit vector goes below it
        double violation = std::abs(quad_form(M, ed.vectors.col(d - 1)) - smallest);
        for (int s = 0; s < 16; ++s) {
            Eigen::VectorXcd g = gaussian(rng, d, 1);
            g.normalize();
            violation = std::max(violation, smallest - quad_form(M, g));
        }
        record(rep, violation);
    }
    return rep;
}

std::vector<SuiteReport> run_property_suites(std::uint64_t seed, int instances) {
    return {concavity_suite(seed, instances), mean_value_suite(seed + 1, instances),
            mutual_control_suite(seed + 2, instances), frame_invariance_suite(seed + 3, 100),
            positivity_equivalence_suite(seed + 4, instances)};
}

}  // namespace nakano
