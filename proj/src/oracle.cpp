#include "nakano/oracle.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nakano/linear_solver.hpp"
#include "nakano/residual.hpp"

namespace nakano::oracle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxDenseUnknowns = 4096;  // n = 2 at N = 8; a dense N = 12 system would need ~3.5 GB

/// Periodic neighbour tables built from explicit multi-indices.
struct Lattice {
    int N = 0;
    int axes = 0;
    double h = 0.0;
    std::size_t size = 0;
    std::vector<std::vector<std::size_t>> plus, minus;  // [axis][point]

    explicit Lattice(const GridSpec& g) : N(g.points_per_axis), axes(g.real_axes()), h(g.spacing()) {
        size = 1;
        for (int a = 0; a < axes; ++a) size *= N;
        plus.assign(axes, std::vector<std::size_t>(size));
        minus.assign(axes, std::vector<std::size_t>(size));
        std::vector<int> multi(axes);
        for (std::size_t p = 0; p < size; ++p) {
            decode(p, multi);
            for (int a = 0; a < axes; ++a) {
                std::vector<int> m = multi;
                m[a] = (multi[a] + 1) % N;
                plus[a][p] = encode(m);
                m[a] = (multi[a] + N - 1) % N;
                minus[a][p] = encode(m);
            }
        }
    }
    void decode(std::size_t p, std::vector<int>& multi) const {
        for (int a = axes - 1; a >= 0; --a) {
            multi[a] = static_cast<int>(p % N);
            p /= N;
        }
    }
    std::size_t encode(const std::vector<int>& multi) const {
        std::size_t p = 0;
        for (int a = 0; a < axes; ++a) p = p * N + multi[a];
        return p;
    }
};

using CField = std::vector<cplx>;

CField forward(const Lattice& L, const CField& f, int a) {
    CField out(L.size);
    for (std::size_t p = 0; p < L.size; ++p) out[p] = (f[L.plus[a][p]] - f[p]) / L.h;
    return out;
}

CField backward(const Lattice& L, const CField& f, int a) {
    CField out(L.size);
    for (std::size_t p = 0; p < L.size; ++p) out[p] = (f[p] - f[L.minus[a][p]]) / L.h;
    return out;
}

/// d_i dbar_j u = 1/8 [ (D+x_i - i D+y_i)(D-x_j + i D-y_j) + (D-x_i - i D-y_i)(D+x_j + i D+y_j) ] u
/// Returned point-major: H[(p * n + i) * n + j].
std::vector<cplx> oracle_hessian(const Lattice& L, int n, const ScalarField& u) {
    const cplx I{0.0, 1.0};
    CField uc(u.values.begin(), u.values.end());
    std::vector<CField> wminus(n), wplus(n);
    for (int j = 0; j < n; ++j) {
        const CField bx = backward(L, uc, 2 * j), by = backward(L, uc, 2 * j + 1);
        const CField fx = forward(L, uc, 2 * j), fy = forward(L, uc, 2 * j + 1);
        wminus[j].resize(L.size);
        wplus[j].resize(L.size);
        for (std::size_t p = 0; p < L.size; ++p) {
            wminus[j][p] = bx[p] + I * by[p];
            wplus[j][p] = fx[p] + I * fy[p];
        }
    }
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<cplx> H(L.size * nn);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const CField a1 = forward(L, wminus[j], 2 * i), a2 = forward(L, wminus[j], 2 * i + 1);
            const CField b1 = backward(L, wplus[j], 2 * i), b2 = backward(L, wplus[j], 2 * i + 1);
            for (std::size_t p = 0; p < L.size; ++p)
                H[p * nn + i * n + j] = 0.125 * (a1[p] - I * a2[p] + b1[p] - I * b2[p]);
        }
    for (std::size_t p = 0; p < L.size; ++p)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                cplx& hij = H[p * nn + i * n + j];
                cplx& hji = H[p * nn + j * n + i];
                const cplx avg = 0.5 * (hij + std::conj(hji));
                hij = avg;
                hji = std::conj(avg);
            }
    return H;
}

/// Gaussian elimination without pivoting on a copy of the d x d matrix a
/// (row-major). The k-th pivot is the ratio of consecutive leading principal
/// minors, so all pivots are positive exactly when the matrix is positive
/// definite. Returns log det, or NaN if a pivot is not positive.
double logdet_positive(cplx* a, int d) {
    double logdet = 0.0;
    for (int k = 0; k < d; ++k) {
        const cplx pivot = a[k * d + k];
        if (!(pivot.real() > 0.0)) return kNaN;
        logdet += std::log(pivot.real());
        for (int i = k + 1; i < d; ++i) {
            const cplx f = a[i * d + k] / pivot;
            for (int j = k + 1; j < d; ++j) a[i * d + j] -= f * a[k * d + j];
        }
    }
    return logdet;
}

double logdet_closed_form(const cplx* m, int n) {
    if (n == 1) return m[0].real() > 0.0 ? std::log(m[0].real()) : kNaN;
    const double a = m[0].real(), d = m[3].real();
    const double det = a * d - std::norm(m[1]);
    return (a > 0.0 && det > 0.0) ? std::log(det) : kNaN;
}

void require_small_grid(const Scenario& sc) {
    if (sc.grid.points_per_axis > 12) throw std::invalid_argument("oracle: requires N <= 12");
    if (sc.grid.stencil_order != 2) throw std::invalid_argument("oracle: second-order stencils only");
    if (sc.grid.size() > kMaxDenseUnknowns)
        throw std::invalid_argument("oracle: " + std::to_string(sc.grid.size()) + " unknowns exceed the dense limit");
}

int colour_spacing(int N) {
    for (int s = 3; s <= N; ++s)
        if (N % s == 0) return s;
    return N;
}

OracleResult newton_dense(const Scenario& sc, const ResidualFn& residual) {
    require_small_grid(sc);
    const bool bordered = sc.lambda == 0.0;
    const std::size_t M = sc.grid.size();
    OracleResult res;
    res.u = ScalarField(sc.grid);
    ScalarField R = residual(res.u, 0.0);
    if (!R.all_finite()) throw NoConvergence(0, kNaN);
    double sup = R.sup_norm();

    for (int it = 0; it < 40 && sup > 1e-12; ++it) {
        const DenseSystem sys = assemble_dense_system(sc, residual, res.u, res.c);
        Eigen::VectorXd step;
        if (bordered) {
            Eigen::MatrixXd A(M + 1, M + 1);
            A.topLeftCorner(M, M) = sys.jacobian;
            A.topRightCorner(M, 1).setConstant(-1.0);
            A.bottomLeftCorner(1, M).setConstant(1.0 / static_cast<double>(M));
            A(M, M) = 0.0;
            Eigen::VectorXd b(M + 1);
            b.head(M) = sys.rhs;
            b(M) = -res.u.mean();
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
            if (!(lu.rcond() > 1e-14)) throw SingularJacobian("bordered oracle Jacobian is singular");
            step = lu.solve(b);
        } else {
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.jacobian);
            if (!(lu.rcond() > 1e-14)) throw SingularJacobian("oracle Jacobian is singular");
            step = lu.solve(sys.rhs);
        }
        bool accepted = false;
        double s = 1.0;
        for (int k = 0; k <= 20; ++k, s *= 0.5) {
            ScalarField trial = res.u;
            for (std::size_t p = 0; p < M; ++p) trial[p] += s * step(p);
            const double trial_c = bordered ? res.c + s * step(M) : 0.0;
            const ScalarField Rt = residual(trial, trial_c);
            if (!Rt.all_finite() || !(Rt.sup_norm() < sup)) continue;
            res.u = std::move(trial);
            res.c = trial_c;
            sup = Rt.sup_norm();
            accepted = true;
            break;
        }
        ++res.iterations;
        if (!accepted) break;
    }
    res.residual_sup = sup;
    if (!(sup <= 1e-9)) throw NoConvergence(res.iterations, sup);
    if (bordered) {
        const double top = res.u.max();
        for (double& v : res.u.values) v -= top;
    }
    return res;
}

}  // namespace

ScalarField bundle_residual(const Scenario& sc, const ScalarField& u, double c) {
    const Lattice L(sc.grid);
    const int n = sc.grid.n, r = sc.rank, d = n * r;
    const auto H = oracle_hessian(L, n, u);
    std::vector<cplx> theta(static_cast<std::size_t>(d) * d), g(static_cast<std::size_t>(n) * n);
    ScalarField R(sc.grid);
    for (std::size_t p = 0; p < L.size; ++p) {
        const auto F = sc.background.at(p);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) theta[a * d + b] = F(a, b);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int al = 0; al < r; ++al) theta[(i * r + al) * d + j * r + al] += H[(p * n + i) * n + j];
        const auto G = sc.metric.at(p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g[i * n + j] = G(i, j);
        const double log_vol = std::log(sc.volume_convention) + logdet_positive(g.data(), n);
        R[p] = logdet_positive(theta.data(), d) / r - log_vol - sc.lambda * r * u[p] - sc.phi[p] - c;
    }
    return R;
}

ScalarField classical_residual(const Scenario& sc, const ScalarField& u, double c) {
    if (sc.rank != 1) throw RankMismatch("classical residual needs rank 1");
    const Lattice L(sc.grid);
    const int n = sc.grid.n;
    const auto H = oracle_hessian(L, n, u);
    double factorial = 1.0;
    for (int k = 2; k <= n; ++k) factorial *= k;
    cplx m[4], g[4];
    ScalarField R(sc.grid);
    for (std::size_t p = 0; p < L.size; ++p) {
        const auto F = sc.background.at(p);
        const auto G = sc.metric.at(p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                m[i * n + j] = F(i, j) + H[(p * n + i) * n + j];
                g[i * n + j] = G(i, j);
            }
        const double log_vol = std::log(factorial) + logdet_closed_form(g, n);
        R[p] = logdet_closed_form(m, n) - log_vol - sc.lambda * u[p] - sc.phi[p] - c;
    }
    return R;
}

DenseSystem assemble_dense_system(const Scenario& sc, const ResidualFn& residual, const ScalarField& u, double c) {
    const Lattice L(sc.grid);
    const std::size_t M = L.size;
    const double eps = 1e-6;
    const int s = colour_spacing(L.N);
    DenseSystem sys{Eigen::MatrixXd::Zero(M, M), Eigen::VectorXd(M)};
    const ScalarField R0 = residual(u, c);
    for (std::size_t p = 0; p < M; ++p) sys.rhs(p) = -R0[p];

    std::size_t colours = 1;
    for (int a = 0; a < L.axes; ++a) colours *= s;
    std::vector<int> multi(L.axes), cm(L.axes);
    for (std::size_t colour = 0; colour < colours; ++colour) {
        std::size_t rem = colour;
        for (int a = 0; a < L.axes; ++a) {
            cm[a] = static_cast<int>(rem % s);
            rem /= s;
        }
        std::vector<std::size_t> cols;
        for (std::size_t p = 0; p < M; ++p) {
            L.decode(p, multi);
            bool hit = true;
            for (int a = 0; a < L.axes && hit; ++a) hit = multi[a] % s == cm[a];
            if (hit) cols.push_back(p);
        }
        ScalarField up = u, um = u;
        for (std::size_t j : cols) {
            up[j] += eps;
            um[j] -= eps;
        }
        const ScalarField Rp = residual(up, c), Rm = residual(um, c);
        // each perturbed column reaches the 3^axes box around it
        for (std::size_t j : cols) {
            std::vector<std::size_t> box{j};
            for (int a = 0; a < L.axes; ++a) {
                const std::size_t len = box.size();
                for (std::size_t k = 0; k < len; ++k) {
                    box.push_back(L.plus[a][box[k]]);
                    box.push_back(L.minus[a][box[k]]);
                }
            }
            for (std::size_t p : box) sys.jacobian(p, j) = (Rp[p] - Rm[p]) / (2.0 * eps);
        }
    }
    return sys;
}

OracleResult dense_solve(const Scenario& sc) {
    return newton_dense(sc, [&](const ScalarField& u, double c) { return bundle_residual(sc, u, c); });
}

OracleResult classical_reference_solve(const Scenario& sc) {
    if (sc.rank != 1) throw RankMismatch("classical reference solve needs rank 1");
    return newton_dense(sc, [&](const ScalarField& u, double c) { return classical_residual(sc, u, c); });
}

ClassicalReport classical_ma_check(const Scenario& sc, const ScalarField& u, double c) {
    if (sc.rank != 1) throw RankMismatch("classical_ma_check needs rank 1");
    if (sc.grid.stencil_order != 2) throw std::invalid_argument("classical_ma_check: second-order stencils only");
    const ResidualReport main = ResidualOperator(sc).evaluate(u, 0.0, c);
    const ScalarField classical = classical_residual(sc, u, c);
    ClassicalReport rep;
    rep.bundle_sup = main.sup_norm;
    rep.classical_sup = classical.sup_norm();
    for (std::size_t p = 0; p < u.size(); ++p)
        rep.max_abs_difference = std::max(rep.max_abs_difference, std::abs(main.residual[p] - classical[p]));
    return rep;
}

ScalarField probe_direction(const GridSpec& grid, std::uint64_t seed) {
    ScalarField v = build_field(random_fourier_spec(grid.real_axes(), seed, 1.0, 1, 3), grid);
    const HermitianMetricField H = complex_hessian(v);
    double hmax = 0.0;
    for (const cplx& z : H.raw()) hmax = std::max(hmax, std::abs(z));
    const double scale = v.sup_norm() + hmax;
    return scale > 0.0 ? (1.0 / scale) * v : v;
}

std::vector<double> jacobian_probe_errors(const Scenario& sc, const ScalarField& u, const ScalarField& v,
                                          const std::vector<double>& eps) {
    const ResidualOperator R(sc);
    const ScalarField exact = apply(R.linearize(u), v);
    std::vector<double> errors;
    for (double e : eps) {
        const ScalarField Lp = R.apply(u + e * v);
        const ScalarField Lm = R.apply(u - e * v);
        double err = 0.0;
        for (std::size_t p = 0; p < u.size(); ++p)
            err = std::max(err, std::abs((Lp[p] - Lm[p]) / (2.0 * e) - exact[p]));
        errors.push_back(err);
    }
    return errors;
}

ProbeReport jacobian_probe(const Scenario& sc, const ScalarField& u, int probes, std::uint64_t seed, double eps) {
    ProbeReport rep;
    for (int k = 0; k < probes; ++k) {
        const ScalarField v = probe_direction(sc.grid, seed + static_cast<std::uint64_t>(k));
        const double e = jacobian_probe_errors(sc, u, v, {eps}).front();
        rep.errors.push_back(e);
        rep.max_error = std::max(rep.max_error, e);
    }
    return rep;
}

double loglog_slope(const std::vector<double>& eps, const std::vector<double>& errors) {
    const std::size_t m = eps.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double x = std::log(eps[k]), y = std::log(errors[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace nakano::oracle
