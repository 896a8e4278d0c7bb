#include "nakano/curvature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace nakano {

NakanoTensorField::NakanoTensorField(const GridSpec& grid, int rank)
    : MatrixField(grid, grid.n * rank), rank_(rank) {
    if (rank < 1) throw ShapeMismatch("bundle rank must be >= 1");
}

NakanoTensorField NakanoTensorField::constant(const GridSpec& grid, int rank, const Eigen::MatrixXcd& value) {
    NakanoTensorField F(grid, rank);
    if (value.rows() != F.dim() || value.cols() != F.dim()) throw ShapeMismatch("constant tensor must be nr x nr");
    for (std::size_t p = 0; p < F.points(); ++p) F.at(p) = value;
    return F;
}

NakanoTensorField assemble_theta(const NakanoTensorField& F, const HermitianMetricField& Hu) {
    if (!(F.grid() == Hu.grid()) || Hu.dim() != F.n()) throw ShapeMismatch("assemble_theta: F and Hu disagree");
    const int n = F.n(), r = F.rank();
    NakanoTensorField M = F;
    for (std::size_t p = 0; p < M.points(); ++p) {
        auto m = M.at(p);
        auto h = Hu.at(p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int a = 0; a < r; ++a) m(i * r + a, j * r + a) += h(i, j);
    }
    return M;
}

static double smallest_eigenvalue(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double log_det_power(const Eigen::MatrixXcd& M, int rank) {
    Eigen::LLT<Eigen::MatrixXcd> llt(M);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
    const auto& L = llt.matrixLLT();
    double s = 0.0;
    for (Eigen::Index k = 0; k < L.rows(); ++k) {
        const double d = L(k, k).real();
        if (!(d > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        s += std::log(d);
    }
    return 2.0 * s / rank;
}

ScalarField log_det_power(const NakanoTensorField& M) {
    ScalarField out(M.grid());
    for (std::size_t p = 0; p < M.points(); ++p) {
        const Eigen::MatrixXcd m = M.at(p);
        const double v = log_det_power(m, M.rank());
        if (std::isnan(v)) throw NotPositive(p, smallest_eigenvalue(m));
        out[p] = v;
    }
    return out;
}

NakanoTensorField invert(const NakanoTensorField& M) {
    NakanoTensorField out(M.grid(), M.rank());
    const auto I = Eigen::MatrixXcd::Identity(M.dim(), M.dim());
    for (std::size_t p = 0; p < M.points(); ++p) {
        const Eigen::MatrixXcd m = M.at(p);
        Eigen::LLT<Eigen::MatrixXcd> llt(m);
        if (llt.info() != Eigen::Success) throw NotPositive(p, smallest_eigenvalue(m));
        Eigen::MatrixXcd inv = llt.solve(I);
        out.at(p) = 0.5 * (inv + inv.adjoint());
    }
    return out;
}

HermitianMetricField bundle_partial_trace(const NakanoTensorField& M) {
    const int n = M.n(), r = M.rank();
    HermitianMetricField out(M.grid());
    for (std::size_t p = 0; p < M.points(); ++p) {
        auto m = M.at(p);
        auto a = out.at(p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                cplx s{0.0, 0.0};
                for (int al = 0; al < r; ++al) s += m(i * r + al, j * r + al);
                a(i, j) = s;
            }
    }
    return out;
}

HermitianMetricField partial_trace_inverse(const NakanoTensorField& Minv) { return bundle_partial_trace(Minv); }

ScalarField min_eigenvalue_field(const MatrixField& M) {
    ScalarField out(M.grid());
    for (std::size_t p = 0; p < M.points(); ++p) out[p] = smallest_eigenvalue(M.at(p));
    return out;
}

double min_nakano_eigenvalue(const MatrixField& M) { return min_eigenvalue_field(M).min(); }

double quad_form(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& gamma) {
    if (M.rows() != gamma.size() || M.cols() != gamma.size()) throw ShapeMismatch("quad_form: size mismatch");
    return gamma.dot(M * gamma).real();
}

EigenDecomposition eigendecompose(const Eigen::MatrixXcd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    const Eigen::Index d = M.rows();
    EigenDecomposition out{Eigen::VectorXd(d), Eigen::MatrixXcd(d, d)};
    for (Eigen::Index a = 0; a < d; ++a) {
        out.values(a) = es.eigenvalues()(d - 1 - a);
        out.vectors.col(a) = es.eigenvectors().col(d - 1 - a);
    }
    return out;
}

NakanoTensorField frame_change(const NakanoTensorField& M, const Eigen::MatrixXcd& U) {
    const int r = M.rank(), n = M.n();
    if (U.rows() != r || U.cols() != r) throw ShapeMismatch("frame_change: U must be r x r");
    const double defect = (U * U.adjoint() - Eigen::MatrixXcd::Identity(r, r)).cwiseAbs().maxCoeff();
    if (defect > 1e-13) throw NotUnitary("frame_change: |U U* - I| = " + std::to_string(defect));

    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(n * r, n * r);
    for (int i = 0; i < n; ++i) W.block(i * r, i * r, r, r) = U;
    NakanoTensorField out(M.grid(), r);
    for (std::size_t p = 0; p < M.points(); ++p) out.at(p) = W * M.at(p) * W.adjoint();
    return out;
}

}  // namespace nakano
