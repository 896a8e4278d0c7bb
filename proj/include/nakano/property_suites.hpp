#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace nakano {

/// Outcome of one seeded random-matrix suite. `worst` is the largest
/// violation of the inequality or identity (negative when every instance holds
/// with room to spare).
struct SuiteReport {
    std::string name;
    int instances = 0;
    int failures = 0;
    double worst = -std::numeric_limits<double>::infinity();
    double tolerance = 0.0;
    bool pass() const { return failures == 0; }
};

/// Hermitian positive definite d x d matrix U diag(e) U^* with eigenvalues in [lo, hi].
Eigen::MatrixXcd random_pd_matrix(std::mt19937_64& rng, int d, double lo = 0.2, double hi = 5.0);
/// Haar-like unitary from the QR factor of a complex Gaussian matrix.
Eigen::MatrixXcd random_unitary(std::mt19937_64& rng, int d);

/// log det A <= log det B + tr(B^-1 (A - B)) + tol.
SuiteReport concavity_suite(std::uint64_t seed, int instances = 1000, double tol = 1e-12);
/// tr(B^-1 A) / d >= (det A / det B)^(1/d) - tol.
SuiteReport mean_value_suite(std::uint64_t seed, int instances = 1000, double tol = 1e-12);
/// M = F + diag(lambda_i) (x) Id_r: F_(i a)(i a) + lambda_i = sum_k |gamma_k[(i a)]|^2 Lambda_k.
SuiteReport mutual_control_suite(std::uint64_t seed, int instances = 1000, double tol = 1e-12);
/// log_det_power(frame_change(M, U)) = log_det_power(M) pointwise.
SuiteReport frame_invariance_suite(std::uint64_t seed, int pairs = 100, double tol = 1e-12);
/// min over sampled unit vectors of quad_form matches the smallest eigenvalue.
SuiteReport positivity_equivalence_suite(std::uint64_t seed, int instances = 1000, double tol = 1e-10);

std::vector<SuiteReport> run_property_suites(std::uint64_t seed, int instances = 1000);

}  // namespace nakano
