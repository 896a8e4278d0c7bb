#include "nakano/scenario.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace nakano {

double volume_convention(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

ScalarField Scenario::volume_density() const {
    ScalarField d = metric_determinant(metric);
    for (double& v : d.values) v *= volume_convention;
    return d;
}

static void check_background(const NakanoTensorField& F, double margin) {
    const ScalarField eig = min_eigenvalue_field(F);
    std::size_t worst = 0;
    for (std::size_t p = 0; p < eig.size(); ++p)
        if (eig[p] < eig[worst]) worst = p;
    if (!(eig[worst] >= margin))
        throw NotNakanoPositive(worst, eig[worst], "background is not Nakano positive with margin " + std::to_string(margin));
}

Scenario make_scenario(const NakanoTensorField& background, const HermitianMetricField* metric, ScalarField phi,
                       double lambda, double margin) {
    background.grid().validate();
    if (!(margin > 0.0)) throw SchemaError("margin", "must be positive");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw SchemaError("lambda", "must be finite and >= 0");
    if (!(phi.grid == background.grid())) throw ShapeMismatch("phi and background live on different grids");
    if (!phi.all_finite()) throw SchemaError("phi", "values must be finite");
    if (background.hermitian_defect() > 1e-13) throw ShapeMismatch("background is not Hermitian");
    check_background(background, margin);

    Scenario sc;
    sc.grid = background.grid();
    sc.rank = background.rank();
    sc.background = background;
    sc.phi = std::move(phi);
    sc.lambda = lambda;
    sc.margin = margin;
    sc.volume_convention = volume_convention(sc.grid.n);
    sc.normalization = lambda == 0.0 ? Normalization::sup_zero : Normalization::none;

    HermitianMetricField coupled = bundle_partial_trace(background);
    for (auto& v : coupled.raw()) v /= static_cast<double>(sc.rank);
    if (metric) {
        if (!(metric->grid() == sc.grid) || metric->dim() != sc.grid.n) throw ShapeMismatch("metric shape");
        sc.metric = *metric;
        double d = 0.0;
        for (std::size_t k = 0; k < coupled.raw().size(); ++k)
            d = std::max(d, std::abs(coupled.raw()[k] - metric->raw()[k]));
        sc.coupling_discrepancy = d;
    } else {
        sc.metric = std::move(coupled);
    }
    if (sc.metric.hermitian_defect() > 1e-13) throw NonPositiveMetric("metric is not Hermitian");
    const ScalarField g_eig = min_eigenvalue_field(sc.metric);
    for (std::size_t p = 0; p < g_eig.size(); ++p)
        if (!(g_eig[p] > 0.0))
            throw NonPositiveMetric("metric not positive definite at point " + std::to_string(p));
    return sc;
}

Scenario make_diagonal_torus_scenario(const GridSpec& grid, int rank, const std::vector<FourierSpec>& potentials,
                                      double tau, const FourierSpec& phi, double lambda, double margin) {
    grid.validate();
    if (static_cast<int>(potentials.size()) != rank)
        throw ShapeMismatch("diagonal torus needs one potential per bundle index");
    if (!(tau > 0.0)) throw SchemaError("background.tau", "must be positive");
    const int n = grid.n;
    NakanoTensorField F(grid, rank);
    for (int al = 0; al < rank; ++al) {
        const HermitianMetricField H = complex_hessian(build_field(potentials[al], grid));
        for (std::size_t p = 0; p < F.points(); ++p) {
            auto f = F.at(p);
            auto h = H.at(p);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    f(i * rank + al, j * rank + al) = (i == j ? cplx{tau, 0.0} : cplx{0.0, 0.0}) + h(i, j);
        }
    }
    return make_scenario(F, nullptr, build_field(phi, grid), lambda, margin);
}

static ScalarField phi_from_hessian(const Scenario& sc, const HermitianMetricField& H, const ScalarField& u_star) {
    const NakanoTensorField theta = assemble_theta(sc.background, H);
    ScalarField ld;
    try {
        ld = log_det_power(theta);
    } catch (const NotPositive& e) {
        throw NotNakanoPositive(e.point(), e.min_eigenvalue(), "manufactured u* leaves the cone");
    }
    const ScalarField vol = sc.volume_density();
    ScalarField phi(sc.grid);
    const double lr = sc.lambda * sc.rank;
    for (std::size_t p = 0; p < phi.size(); ++p) phi[p] = ld[p] - std::log(vol[p]) - lr * u_star[p];
    return phi;
}

ScalarField manufacture_phi(const Scenario& sc, const ScalarField& u_star) {
    if (!(u_star.grid == sc.grid)) throw ShapeMismatch("u* grid differs from scenario grid");
    return phi_from_hessian(sc, complex_hessian(u_star), u_star);
}

ScalarField manufacture_phi_exact(const Scenario& sc, const FourierSpec& u_star) {
    return phi_from_hessian(sc, exact_complex_hessian(u_star, sc.grid), build_field(u_star, sc.grid));
}

Scenario with_phi(const Scenario& sc, ScalarField phi) {
    if (!(phi.grid == sc.grid)) throw ShapeMismatch("phi grid differs from scenario grid");
    Scenario out = sc;
    out.phi = std::move(phi);
    return out;
}

namespace {

std::vector<int> random_wave_vector(std::mt19937_64& rng, int real_axes, int K) {
    std::uniform_int_distribution<int> dist(-K, K);
    std::vector<int> k(real_axes);
    for (int& v : k) v = dist(rng);
    return k;
}

}  // namespace

NakanoTensorField random_nakano_field(const GridSpec& grid, int rank, std::uint64_t seed, double margin,
                                      double amplitude, int max_wavenumber) {
    grid.validate();
    const int d = grid.n * rank;
    NakanoTensorField M(grid, rank);
    if (amplitude == 0.0) {
        for (std::size_t p = 0; p < M.points(); ++p) M.at(p) = margin * Eigen::MatrixXcd::Identity(d, d);
        return M;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    constexpr int kModes = 3;
    std::vector<std::vector<int>> ks;
    std::vector<Eigen::MatrixXcd> coeffs;
    for (int m = 0; m <= kModes; ++m) {
        ks.push_back(m == 0 ? std::vector<int>(grid.real_axes(), 0)
                            : random_wave_vector(rng, grid.real_axes(), max_wavenumber));
        Eigen::MatrixXcd C(d, d);
        for (Eigen::Index a = 0; a < d; ++a)
            for (Eigen::Index b = 0; b < d; ++b) C(a, b) = cplx{normal(rng), normal(rng)};
        coeffs.push_back(amplitude / std::sqrt(2.0 * (kModes + 1) * d) * C);
    }
    const double w = 2.0 * std::numbers::pi / grid.period;
    for (std::size_t p = 0; p < M.points(); ++p) {
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(d, d);
        for (std::size_t m = 0; m < ks.size(); ++m) {
            double arg = 0.0;
            for (int a = 0; a < grid.real_axes(); ++a) arg += ks[m][a] * grid.coordinate(p, a);
            A += coeffs[m] * cplx{std::cos(w * arg), std::sin(w * arg)};
        }
        Eigen::MatrixXcd AA = A * A.adjoint();
        AA = 0.5 * (AA + AA.adjoint()).eval();
        // rounding slack so the post hoc eigenvalue check sees >= margin
        const double slack = 64.0 * std::numeric_limits<double>::epsilon() * d * AA.cwiseAbs().maxCoeff();
        M.at(p) = AA + (margin + slack) * Eigen::MatrixXcd::Identity(d, d);
    }
    return M;
}

FourierSpec random_fourier_spec(int real_axes, std::uint64_t seed, double amplitude, int max_wavenumber,
                                int mode_count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    FourierSpec spec;
    for (int m = 0; m < mode_count; ++m) {
        std::vector<int> k;
        do {
            k = random_wave_vector(rng, real_axes, max_wavenumber);
        } while (std::all_of(k.begin(), k.end(), [](int v) { return v == 0; }));
        spec.modes.push_back({k, 0.5 * amplitude * cplx{unit(rng), unit(rng)} / std::sqrt(2.0)});
    }
    return spec;
}

}  // namespace nakano
