#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "nakano/errors.hpp"

namespace nakano {

using cplx = std::complex<double>;

/// Periodic node grid on the real torus underlying C^n / (Z + iZ)^n.
///
/// Real axes are ordered (x_1, y_1, ..., x_n, y_n), so z^i = x^i + i y^i uses
/// axes 2i and 2i+1. Flat indices are row-major with axis 0 slowest.
struct GridSpec {
    int n = 1;
    int points_per_axis = 32;
    double period = 1.0;
    int stencil_order = 2;  // 2 or 4

    /// Throws InvalidGrid unless n in {1,2}, N >= 8 even, period > 0, order in {2,4}.
    void validate() const;

    int real_axes() const { return 2 * n; }
    std::size_t size() const;
    double spacing() const { return period / points_per_axis; }
    std::size_t stride(int axis) const;
    int coordinate_index(std::size_t point, int axis) const;
    double coordinate(std::size_t point, int axis) const { return spacing() * coordinate_index(point, axis); }
    /// Index of the node reached from `point` by `shift` steps along `axis` (periodic wrap).
    std::size_t shifted(std::size_t point, int axis, int shift) const;

    bool operator==(const GridSpec&) const = default;
};

/// Real grid function (u, phi, phi_t, residuals).
struct ScalarField {
    GridSpec grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t p) { return values[p]; }
    double operator[](std::size_t p) const { return values[p]; }

    double sup_norm() const;
    double max() const;
    double min() const;
    double mean() const;
    bool all_finite() const;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);

/// Per-point complex square matrices of a fixed dimension, stored column-major.
class MatrixField {
public:
    MatrixField() = default;
    MatrixField(const GridSpec& grid, int dim);

    const GridSpec& grid() const { return grid_; }
    int dim() const { return dim_; }
    std::size_t points() const { return grid_.size(); }

    Eigen::Map<Eigen::MatrixXcd> at(std::size_t p) {
        return {data_.data() + p * block(), dim_, dim_};
    }
    Eigen::Map<const Eigen::MatrixXcd> at(std::size_t p) const {
        return {data_.data() + p * block(), dim_, dim_};
    }
    std::span<const cplx> raw() const { return data_; }
    std::span<cplx> raw() { return data_; }

    /// Largest |M - M^*| entry relative to the largest |M| entry, over all points.
    double hermitian_defect() const;

    bool operator==(const MatrixField&) const = default;

private:
    std::size_t block() const { return static_cast<std::size_t>(dim_) * dim_; }

    GridSpec grid_{};
    int dim_ = 0;
    std::vector<cplx> data_;
};

/// n x n Hermitian field: the base metric g_{i jbar} or the coefficient alpha_u^{i jbar}.
class HermitianMetricField : public MatrixField {
public:
    HermitianMetricField() = default;
    explicit HermitianMetricField(const GridSpec& grid) : MatrixField(grid, grid.n) {}
    static HermitianMetricField constant(const GridSpec& grid, const Eigen::MatrixXcd& value);
};

/// Complex gradient (d_1 u, ..., d_n u); one n-vector per point, point-major.
struct ComplexVectorField {
    GridSpec grid;
    std::vector<cplx> values;  // values[p * n + i]

    cplx operator()(std::size_t p, int i) const { return values[p * grid.n + i]; }
};

/// Real second difference S_ab u approximating d^2 u / dx_a dx_b.
///
/// Order 2: compact three-point for a == b and 1/2 (D+_a D-_b + D-_a D+_b)
/// for a != b. Order 4: five-point for a == b, product of fourth-order
/// central first differences otherwise. Symmetric in (a, b) and self-adjoint.
ScalarField second_difference(const ScalarField& u, int a, int b);

/// First difference along one real axis (central, order matches the grid).
ScalarField first_difference(const ScalarField& u, int axis);

/// d_i u = 1/2 (d/dx_i - i d/dy_i) u with central differences.
ComplexVectorField complex_gradient(const ScalarField& u);

/// H_{ij} = d_i dbar_j u assembled from the second differences as
/// 1/4 [S_{x_i x_j} + S_{y_i y_j} + i (S_{x_i y_j} - S_{y_i x_j})].
/// Exactly Hermitian: H_{ji} is written as conj(H_{ij}) and diagonals are real.
HermitianMetricField complex_hessian(const ScalarField& u);

/// det g at every point (real part; g Hermitian).
ScalarField metric_determinant(const HermitianMetricField& g);

/// sum f det g / sum det g. Throws NonPositiveMetric if some det g <= 0.
double volume_mean(const ScalarField& f, const HermitianMetricField& g);

/// Plain sum of a*b over the grid.
double grid_inner(const ScalarField& a, const ScalarField& b);

}  // namespace nakano
