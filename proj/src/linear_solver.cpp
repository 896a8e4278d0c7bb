#include "nakano/linear_solver.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nakano {

void LinearizedOperator::check_elliptic() const {
    for (std::size_t p = 0; p < alpha.points(); ++p) {
        Eigen::LLT<Eigen::MatrixXcd> llt(alpha.at(p));
        if (llt.info() != Eigen::Success) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(alpha.at(p), Eigen::EigenvaluesOnly);
            throw NotPositive(p, es.eigenvalues()(0), "linearized operator is not elliptic");
        }
    }
}

ScalarField apply(const LinearizedOperator& op, const ScalarField& v) {
    if (!(v.grid == op.grid())) throw ShapeMismatch("apply: v grid differs from operator grid");
    const HermitianMetricField H = complex_hessian(v);
    const int n = op.grid().n;
    const double inv_r = 1.0 / op.rank;
    const double lr = op.lambda * op.rank;
    ScalarField out(v.grid);
    double leak = 0.0, scale = 0.0;
    for (std::size_t p = 0; p < v.size(); ++p) {
        auto a = op.alpha.at(p);
        auto h = H.at(p);
        cplx s{0.0, 0.0};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += a(j, i) * h(i, j);
        out[p] = inv_r * s.real() - lr * v[p];
        leak = std::max(leak, std::abs(s.imag()));
        scale = std::max(scale, std::abs(s));
    }
    if (leak > 1e-10 * std::max(1.0, scale))
        throw ImaginaryLeak("tr(alpha Hess v) has imaginary part " + std::to_string(leak));
    return out;
}

// ---------------------------------------------------------------------------
// FFT preconditioner

struct MeanCoefficientPreconditioner::Plan {
    fftw_complex* buffer = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::size_t size = 0;

    Plan(const GridSpec& grid) : size(grid.size()) {
        buffer = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size));
        std::vector<int> dims(grid.real_axes(), grid.points_per_axis);
        forward = fftw_plan_dft(grid.real_axes(), dims.data(), buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
        backward = fftw_plan_dft(grid.real_axes(), dims.data(), buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Plan() {
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(buffer);
    }
};

MeanCoefficientPreconditioner::MeanCoefficientPreconditioner(const LinearizedOperator& op)
    : plan_(new Plan(op.grid())) {
    const GridSpec& g = op.grid();
    const int n = g.n;
    Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t p = 0; p < op.alpha.points(); ++p) mean += op.alpha.at(p);
    mean /= static_cast<double>(op.alpha.points());
    mean = 0.5 * (mean + mean.adjoint()).eval();
    const LinearizedOperator constant{HermitianMetricField::constant(g, mean), op.lambda, op.rank};

    ScalarField delta(g);
    delta[0] = 1.0;
    const ScalarField kernel = nakano::apply(constant, delta);
    for (std::size_t p = 0; p < g.size(); ++p) {
        plan_->buffer[p][0] = kernel[p];
        plan_->buffer[p][1] = 0.0;
    }
    fftw_execute(plan_->forward);
    symbol_.resize(g.size());
    double largest = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        symbol_[p] = plan_->buffer[p][0];
        largest = std::max(largest, std::abs(symbol_[p]));
    }
    // only the zero mode can vanish (lambda == 0); treat it as exactly singular
    if (std::abs(symbol_[0]) <= 1e-10 * largest) symbol_[0] = 0.0;
}

MeanCoefficientPreconditioner::~MeanCoefficientPreconditioner() { delete plan_; }

void MeanCoefficientPreconditioner::apply(std::span<const double> in, std::span<double> out) const {
    const std::size_t N = plan_->size;
    for (std::size_t p = 0; p < N; ++p) {
        plan_->buffer[p][0] = in[p];
        plan_->buffer[p][1] = 0.0;
    }
    fftw_execute(plan_->forward);
    for (std::size_t p = 0; p < N; ++p) {
        const double s = symbol_[p] == 0.0 ? 0.0 : 1.0 / (symbol_[p] * static_cast<double>(N));
        plan_->buffer[p][0] *= s;
        plan_->buffer[p][1] *= s;
    }
    fftw_execute(plan_->backward);
    for (std::size_t p = 0; p < N; ++p) out[p] = plan_->buffer[p][0];
}

// ---------------------------------------------------------------------------
// BiCGStab

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

KrylovReport bicgstab(const LinearMap& A, const LinearMap& M_inv, std::span<const double> b, std::span<double> x,
                      const KrylovOptions& options) {
    const std::size_t N = b.size();
    KrylovReport rep;
    const double bnorm = norm(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        rep.converged = true;
        return rep;
    }
    std::vector<double> r(N), rhat(N), p(N, 0.0), v(N, 0.0), y(N), s(N), z(N), t(N), tmp(N);

    auto true_residual = [&]() {
        A(x, tmp);
        for (std::size_t i = 0; i < N; ++i) r[i] = b[i] - tmp[i];
        return norm(r) / bnorm;
    };

    rep.relative_residual = true_residual();
    // each pass restarts from the true residual (after breakdown or recurrence drift)
    constexpr int kMaxRestarts = 20;
    for (int pass = 0; pass <= kMaxRestarts && rep.relative_residual > options.tolerance &&
                       rep.iterations < options.max_iterations;
         ++pass) {
        rhat.assign(r.begin(), r.end());
        double rho = 1.0, alpha = 1.0, omega = 1.0;
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        while (rep.iterations < options.max_iterations) {
            ++rep.iterations;
            const double rho_new = dot(rhat, r);
            if (rho_new == 0.0 || omega == 0.0) break;
            const double beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for (std::size_t i = 0; i < N; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
            M_inv(p, y);
            A(y, v);
            const double rv = dot(rhat, v);
            if (rv == 0.0) break;
            alpha = rho / rv;
            for (std::size_t i = 0; i < N; ++i) s[i] = r[i] - alpha * v[i];
            if (norm(s) / bnorm <= options.tolerance) {
                for (std::size_t i = 0; i < N; ++i) x[i] += alpha * y[i];
                break;
            }
            M_inv(s, z);
            A(z, t);
            const double tt = dot(t, t);
            omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                x[i] += alpha * y[i] + omega * z[i];
                r[i] = s[i] - omega * t[i];
            }
            if (norm(r) / bnorm <= options.tolerance) break;
        }
        rep.relative_residual = true_residual();
    }
    rep.converged = rep.relative_residual <= options.tolerance;
    return rep;
}

// ---------------------------------------------------------------------------

std::pair<ScalarField, KrylovReport> solve(const LinearizedOperator& op, const ScalarField& rhs,
                                           const KrylovOptions& options, const ScalarField* initial_guess) {
    if (!(op.lambda > 0.0)) throw std::invalid_argument("solve: lambda == 0 requires solve_bordered");
    if (!(rhs.grid == op.grid())) throw ShapeMismatch("solve: rhs grid differs from operator grid");
    const MeanCoefficientPreconditioner pre(op);
    const GridSpec& g = op.grid();
    ScalarField work(g), out(g);

    LinearMap A = [&](std::span<const double> in, std::span<double> res) {
        std::copy(in.begin(), in.end(), work.values.begin());
        const ScalarField a = nakano::apply(op, work);
        std::copy(a.values.begin(), a.values.end(), res.begin());
    };
    LinearMap M = [&](std::span<const double> in, std::span<double> res) { pre.apply(in, res); };

    ScalarField x = initial_guess ? *initial_guess : ScalarField(g);
    KrylovReport rep = bicgstab(A, M, rhs.values, x.values, options);
    if (!rep.converged) throw NoConvergence(rep.iterations, rep.relative_residual);
    return {std::move(x), rep};
}

BorderedSolution solve_bordered(const LinearizedOperator& op, const ScalarField& rhs, const KrylovOptions& options,
                                const ScalarField* initial_v, double initial_dc) {
    if (op.lambda != 0.0) throw std::invalid_argument("solve_bordered: lambda must be 0");
    if (!(rhs.grid == op.grid())) throw ShapeMismatch("solve_bordered: rhs grid differs from operator grid");
    const MeanCoefficientPreconditioner pre(op);
    const GridSpec& g = op.grid();
    const std::size_t N = g.size();
    ScalarField work(g);

    // unknown (v, dc) stored as v followed by dc
    LinearMap A = [&](std::span<const double> in, std::span<double> res) {
        std::copy(in.begin(), in.begin() + N, work.values.begin());
        const double dc = in[N];
        const ScalarField a = nakano::apply(op, work);
        for (std::size_t p = 0; p < N; ++p) res[p] = a[p] - dc;
        res[N] = work.mean();
    };
    LinearMap M = [&](std::span<const double> in, std::span<double> res) {
        pre.apply(in.first(N), res.first(N));
        const double target_mean = in[N];
        double rmean = 0.0;
        for (std::size_t p = 0; p < N; ++p) rmean += in[p];
        rmean /= static_cast<double>(N);
        for (std::size_t p = 0; p < N; ++p) res[p] += target_mean;
        res[N] = -rmean;
    };

    std::vector<double> b(N + 1, 0.0), x(N + 1, 0.0);
    std::copy(rhs.values.begin(), rhs.values.end(), b.begin());
    if (initial_v) std::copy(initial_v->values.begin(), initial_v->values.end(), x.begin());
    x[N] = initial_dc;

    BorderedSolution sol;
    sol.report = bicgstab(A, M, b, x, options);
    if (!sol.report.converged) throw NoConvergence(sol.report.iterations, sol.report.relative_residual);
    sol.v = ScalarField(g);
    std::copy(x.begin(), x.begin() + N, sol.v.values.begin());
    sol.dc = x[N];
    return sol;
}

}  // namespace nakano
