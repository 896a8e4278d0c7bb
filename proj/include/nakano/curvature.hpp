#pragma once

#include <Eigen/Core>

#include "nakano/grid.hpp"

namespace nakano {

/// Field of nr x nr Hermitian matrices Theta_{(i alpha),(j beta)} on T X (x) E.
///
/// The pair (i, alpha), 0-based, flattens to a = i * r + alpha, so that
/// H (x) Id_r is the block pattern H_{ij} Id_r.
class NakanoTensorField : public MatrixField {
public:
    NakanoTensorField() = default;
    NakanoTensorField(const GridSpec& grid, int rank);

    int n() const { return grid().n; }
    int rank() const { return rank_; }
    static int flat_index(int i, int alpha, int rank) { return i * rank + alpha; }

    static NakanoTensorField constant(const GridSpec& grid, int rank, const Eigen::MatrixXcd& value);

    bool operator==(const NakanoTensorField&) const = default;

private:
    int rank_ = 1;
};

/// Spectrum of one Hermitian matrix, eigenvalues descending; column a of
/// `vectors` is gamma_a.
struct EigenDecomposition {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
};

/// Theta_u = F + Hu (x) Id_r.
NakanoTensorField assemble_theta(const NakanoTensorField& F, const HermitianMetricField& Hu);

/// (1/r) log det M at each point via Cholesky. Throws NotPositive at the first
/// point that fails to factor.
ScalarField log_det_power(const NakanoTensorField& M);

/// Pointwise inverse. Throws NotPositive like log_det_power.
NakanoTensorField invert(const NakanoTensorField& M);

/// alpha_{ij} = sum_alpha Minv[(i,alpha),(j,alpha)].
HermitianMetricField partial_trace_inverse(const NakanoTensorField& Minv);

/// Bundle partial trace of any tensor field (same contraction as above).
HermitianMetricField bundle_partial_trace(const NakanoTensorField& M);

/// Smallest eigenvalue at each point, and its global minimum.
ScalarField min_eigenvalue_field(const MatrixField& M);
double min_nakano_eigenvalue(const MatrixField& M);

/// gamma^* M gamma.
double quad_form(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& gamma);

EigenDecomposition eigendecompose(const Eigen::MatrixXcd& M);

/// M -> (Id_n (x) U) M (Id_n (x) U)^*. Throws NotUnitary if |U U^* - I| > 1e-13.
NakanoTensorField frame_change(const NakanoTensorField& M, const Eigen::MatrixXcd& U);

/// (1/r) log det of a single positive matrix, or NaN if it does not factor.
double log_det_power(const Eigen::MatrixXcd& M, int rank);

}  // namespace nakano
