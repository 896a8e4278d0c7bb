#include "nakano/grid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nakano {

NotPositive::NotPositive(std::size_t point, double min_eigenvalue, const std::string& what)
    : Error(what + " (point " + std::to_string(point) + ", min eigenvalue " + std::to_string(min_eigenvalue) + ")"),
      point_(point),
      min_eig_(min_eigenvalue) {}

NoConvergence::NoConvergence(int iterations, double achieved)
    : Error("no convergence after " + std::to_string(iterations) + " iterations (achieved " +
            std::to_string(achieved) + ")"),
      iterations_(iterations),
      achieved_(achieved) {}

SchemaError::SchemaError(std::string key, const std::string& reason)
    : Error("schema error at '" + key + "': " + reason), key_(std::move(key)) {}

void GridSpec::validate() const {
    std::ostringstream msg;
    if (n != 1 && n != 2) msg << "complex dimension must be 1 or 2 (got " << n << "); ";
    if (points_per_axis < 8 || points_per_axis % 2 != 0)
        msg << "points per axis must be even and >= 8 (got " << points_per_axis << "); ";
    if (!(period > 0.0) || !std::isfinite(period)) msg << "period must be positive; ";
    if (stencil_order != 2 && stencil_order != 4) msg << "stencil order must be 2 or 4; ";
    if (!msg.str().empty()) throw InvalidGrid(msg.str());
}

std::size_t GridSpec::size() const {
    std::size_t s = 1;
    for (int a = 0; a < real_axes(); ++a) s *= static_cast<std::size_t>(points_per_axis);
    return s;
}

std::size_t GridSpec::stride(int axis) const {
    std::size_t s = 1;
    for (int a = real_axes() - 1; a > axis; --a) s *= static_cast<std::size_t>(points_per_axis);
    return s;
}

int GridSpec::coordinate_index(std::size_t point, int axis) const {
    return static_cast<int>((point / stride(axis)) % static_cast<std::size_t>(points_per_axis));
}

std::size_t GridSpec::shifted(std::size_t point, int axis, int shift) const {
    const int N = points_per_axis;
    const int i = coordinate_index(point, axis);
    const int j = ((i + shift) % N + N) % N;
    const auto s = static_cast<std::ptrdiff_t>(stride(axis));
    return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(point) + (j - i) * s);
}

double ScalarField::sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }
double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }

double ScalarField::mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

bool ScalarField::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

static void require_same_grid(const GridSpec& a, const GridSpec& b) {
    if (!(a == b)) throw ShapeMismatch("fields live on different grids");
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid);
    ScalarField out(a.grid);
    for (std::size_t p = 0; p < a.size(); ++p) out[p] = a[p] + b[p];
    return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid);
    ScalarField out(a.grid);
    for (std::size_t p = 0; p < a.size(); ++p) out[p] = a[p] - b[p];
    return out;
}

ScalarField operator*(double s, const ScalarField& a) {
    ScalarField out(a.grid);
    for (std::size_t p = 0; p < a.size(); ++p) out[p] = s * a[p];
    return out;
}

MatrixField::MatrixField(const GridSpec& grid, int dim)
    : grid_(grid), dim_(dim), data_(grid.size() * static_cast<std::size_t>(dim) * dim, cplx{0.0, 0.0}) {}

double MatrixField::hermitian_defect() const {
    double defect = 0.0;
    double scale = 0.0;
    for (std::size_t p = 0; p < points(); ++p) {
        auto m = at(p);
        defect = std::max(defect, (m - m.adjoint()).cwiseAbs().maxCoeff());
        scale = std::max(scale, m.cwiseAbs().maxCoeff());
    }
    return scale > 0.0 ? defect / scale : defect;
}

HermitianMetricField HermitianMetricField::constant(const GridSpec& grid, const Eigen::MatrixXcd& value) {
    if (value.rows() != grid.n || value.cols() != grid.n)
        throw ShapeMismatch("constant metric must be n x n");
    HermitianMetricField g(grid);
    for (std::size_t p = 0; p < g.points(); ++p) g.at(p) = value;
    return g;
}

ScalarField first_difference(const ScalarField& u, int axis) {
    const GridSpec& g = u.grid;
    const double h = g.spacing();
    ScalarField out(g);
    for (std::size_t p = 0; p < u.size(); ++p) {
        const double f1 = u[g.shifted(p, axis, 1)] - u[g.shifted(p, axis, -1)];
        if (g.stencil_order == 2) {
            out[p] = f1 / (2.0 * h);
        } else {
            const double f2 = u[g.shifted(p, axis, 2)] - u[g.shifted(p, axis, -2)];
            out[p] = (8.0 * f1 - f2) / (12.0 * h);
        }
    }
    return out;
}

ScalarField second_difference(const ScalarField& u, int a, int b) {
    const GridSpec& g = u.grid;
    const double h2 = g.spacing() * g.spacing();
    if (g.stencil_order == 4 && a != b) return first_difference(first_difference(u, b), a);

    ScalarField out(g);
    for (std::size_t p = 0; p < u.size(); ++p) {
        if (a == b) {
            const double up = u[g.shifted(p, a, 1)];
            const double um = u[g.shifted(p, a, -1)];
            if (g.stencil_order == 2) {
                out[p] = (up - 2.0 * u[p] + um) / h2;
            } else {
                const double upp = u[g.shifted(p, a, 2)];
                const double umm = u[g.shifted(p, a, -2)];
                out[p] = (-upp + 16.0 * up - 30.0 * u[p] + 16.0 * um - umm) / (12.0 * h2);
            }
        } else {
            const std::size_t pa = g.shifted(p, a, 1), ma = g.shifted(p, a, -1);
            const std::size_t pb = g.shifted(p, b, 1), mb = g.shifted(p, b, -1);
            const std::size_t pa_mb = g.shifted(pa, b, -1), ma_pb = g.shifted(ma, b, 1);
            out[p] = (u[pa] + u[ma] + u[pb] + u[mb] - 2.0 * u[p] - u[pa_mb] - u[ma_pb]) / (2.0 * h2);
        }
    }
    return out;
}

ComplexVectorField complex_gradient(const ScalarField& u) {
    const GridSpec& g = u.grid;
    ComplexVectorField out{g, std::vector<cplx>(g.size() * g.n)};
    for (int i = 0; i < g.n; ++i) {
        const ScalarField dx = first_difference(u, 2 * i);
        const ScalarField dy = first_difference(u, 2 * i + 1);
        for (std::size_t p = 0; p < u.size(); ++p) out.values[p * g.n + i] = 0.5 * cplx{dx[p], -dy[p]};
    }
    return out;
}

HermitianMetricField complex_hessian(const ScalarField& u) {
    const GridSpec& g = u.grid;
    const int m = g.real_axes();
    // S[a][b] for a <= b
    std::vector<std::vector<ScalarField>> S(m, std::vector<ScalarField>(m));
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) S[a][b] = second_difference(u, a, b);
    auto s = [&](int a, int b, std::size_t p) { return a <= b ? S[a][b][p] : S[b][a][p]; };

    HermitianMetricField H(g);
    for (std::size_t p = 0; p < u.size(); ++p) {
        auto h = H.at(p);
        for (int i = 0; i < g.n; ++i) {
            const int xi = 2 * i, yi = 2 * i + 1;
            h(i, i) = 0.25 * (s(xi, xi, p) + s(yi, yi, p));
            for (int j = i + 1; j < g.n; ++j) {
                const int xj = 2 * j, yj = 2 * j + 1;
                const cplx hij = 0.25 * cplx{s(xi, xj, p) + s(yi, yj, p), s(xi, yj, p) - s(yi, xj, p)};
                h(i, j) = hij;
                h(j, i) = std::conj(hij);
            }
        }
    }
    return H;
}

ScalarField metric_determinant(const HermitianMetricField& g) {
    ScalarField det(g.grid());
    for (std::size_t p = 0; p < g.points(); ++p) det[p] = g.at(p).determinant().real();
    return det;
}

double volume_mean(const ScalarField& f, const HermitianMetricField& g) {
    require_same_grid(f.grid, g.grid());
    const ScalarField det = metric_determinant(g);
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < f.size(); ++p) {
        if (!(det[p] > 0.0))
            throw NonPositiveMetric("metric determinant " + std::to_string(det[p]) + " at point " + std::to_string(p));
        num += f[p] * det[p];
        den += det[p];
    }
    return num / den;
}

double grid_inner(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid);
    double s = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) s += a[p] * b[p];
    return s;
}

}  // namespace nakano
