#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nakano/grid.hpp"

namespace nakano {

/// delta L(u) v = (1/r) alpha^{i jbar} d_i dbar_j v - lambda r v, with alpha frozen at u.
struct LinearizedOperator {
    HermitianMetricField alpha;
    double lambda = 0.0;
    int rank = 1;

    const GridSpec& grid() const { return alpha.grid(); }
    /// Throws NotPositive if alpha fails to be positive definite somewhere.
    void check_elliptic() const;
};

struct KrylovReport {
    int iterations = 0;
    double relative_residual = 0.0;
    std::string preconditioner = "fft-mean-coefficient";
    bool converged = false;
};

struct KrylovOptions {
    double tolerance = 1e-10;
    int max_iterations = 500;
};

/// Real part of (1/r) tr(alpha Hess v) - lambda r v. Throws ImaginaryLeak if the
/// discarded imaginary part exceeds 1e-10 relative.
ScalarField apply(const LinearizedOperator& op, const ScalarField& v);

/// Solves apply(op, v) = rhs to ||.||_2 relative tolerance. Requires lambda > 0.
/// Throws NoConvergence.
std::pair<ScalarField, KrylovReport> solve(const LinearizedOperator& op, const ScalarField& rhs,
                                           const KrylovOptions& options = {},
                                           const ScalarField* initial_guess = nullptr);

struct BorderedSolution {
    ScalarField v;
    double dc = 0.0;
    KrylovReport report;
};

/// lambda == 0: solves (1/r) alpha^{i jbar} v_{i jbar} - dc = rhs with mean(v) = 0.
BorderedSolution solve_bordered(const LinearizedOperator& op, const ScalarField& rhs,
                                const KrylovOptions& options = {}, const ScalarField* initial_v = nullptr,
                                double initial_dc = 0.0);

/// Exact inverse of the constant-coefficient operator with alpha replaced by
/// its grid mean, applied per Fourier mode. The zero mode is dropped when the
/// symbol vanishes there (lambda == 0).
class MeanCoefficientPreconditioner {
public:
    explicit MeanCoefficientPreconditioner(const LinearizedOperator& op);
    ~MeanCoefficientPreconditioner();
    MeanCoefficientPreconditioner(const MeanCoefficientPreconditioner&) = delete;
    MeanCoefficientPreconditioner& operator=(const MeanCoefficientPreconditioner&) = delete;

    void apply(std::span<const double> in, std::span<double> out) const;
    const std::vector<double>& symbol() const { return symbol_; }

private:
    struct Plan;
    std::vector<double> symbol_;
    Plan* plan_;
};

/// Right-preconditioned BiCGStab on plain vectors.
using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;
KrylovReport bicgstab(const LinearMap& A, const LinearMap& M_inv, std::span<const double> b, std::span<double> x,
                      const KrylovOptions& options);

}  // namespace nakano
