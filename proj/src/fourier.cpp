#include "nakano/fourier.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace nakano {

namespace {

struct Term {
    std::vector<int> k;
    cplx amplitude;
};

std::vector<Term> expand(const FourierSpec& spec, const GridSpec& grid) {
    const int m = grid.real_axes();
    std::vector<Term> terms;
    for (const auto& mode : spec.modes) {
        if (static_cast<int>(mode.k.size()) != m)
            throw UnresolvedMode("wave vector needs " + std::to_string(m) + " components");
        for (int kk : mode.k)
            if (4 * std::abs(kk) > grid.points_per_axis)
                throw UnresolvedMode("mode |k| = " + std::to_string(std::abs(kk)) + " exceeds N/4 for N = " +
                                     std::to_string(grid.points_per_axis));
        terms.push_back({mode.k, mode.amplitude});
        if (spec.real) {
            std::vector<int> neg(mode.k);
            for (int& v : neg) v = -v;
            terms.push_back({neg, std::conj(mode.amplitude)});
        }
    }
    return terms;
}

cplx phase(const Term& t, const GridSpec& grid, std::size_t p) {
    double arg = 0.0;
    for (int a = 0; a < grid.real_axes(); ++a) arg += t.k[a] * grid.coordinate(p, a);
    arg *= 2.0 * std::numbers::pi / grid.period;
    return {std::cos(arg), std::sin(arg)};
}

}  // namespace

ScalarField build_field(const FourierSpec& spec, const GridSpec& grid) {
    const auto terms = expand(spec, grid);
    ScalarField f(grid);
    double imag_max = 0.0, scale = 0.0;
    for (std::size_t p = 0; p < f.size(); ++p) {
        cplx s{0.0, 0.0};
        for (const auto& t : terms) s += t.amplitude * phase(t, grid, p);
        f[p] = s.real();
        imag_max = std::max(imag_max, std::abs(s.imag()));
        scale = std::max(scale, std::abs(s));
    }
    if (!spec.real && imag_max > 1e-12 * std::max(1.0, scale))
        throw UnresolvedMode("non-real Fourier data must list conjugate pairs");
    return f;
}

ComplexVectorField exact_gradient(const FourierSpec& spec, const GridSpec& grid) {
    const auto terms = expand(spec, grid);
    const double w = 2.0 * std::numbers::pi / grid.period;
    ComplexVectorField out{grid, std::vector<cplx>(grid.size() * grid.n)};
    for (std::size_t p = 0; p < grid.size(); ++p)
        for (const auto& t : terms) {
            const cplx e = t.amplitude * phase(t, grid, p);
            for (int i = 0; i < grid.n; ++i) {
                // d_i = 1/2 (d_x - i d_y) acting on exp(i w k.x)
                const cplx factor = 0.5 * cplx{0.0, w} * cplx{double(t.k[2 * i]), -double(t.k[2 * i + 1])};
                out.values[p * grid.n + i] += factor * e;
            }
        }
    return out;
}

HermitianMetricField exact_complex_hessian(const FourierSpec& spec, const GridSpec& grid) {
    const auto terms = expand(spec, grid);
    const double w = 2.0 * std::numbers::pi / grid.period;
    HermitianMetricField H(grid);
    for (std::size_t p = 0; p < grid.size(); ++p) {
        auto h = H.at(p);
        for (const auto& t : terms) {
            const cplx e = t.amplitude * phase(t, grid, p);
            for (int i = 0; i < grid.n; ++i)
                for (int j = 0; j < grid.n; ++j) {
                    const cplx di = cplx{double(t.k[2 * i]), -double(t.k[2 * i + 1])};
                    const cplx dj = cplx{double(t.k[2 * j]), double(t.k[2 * j + 1])};
                    h(i, j) += -0.25 * w * w * di * dj * e;
                }
        }
        // exact symmetrization; the analytic tensor is Hermitian
        const Eigen::MatrixXcd sym = 0.5 * (Eigen::MatrixXcd(h) + Eigen::MatrixXcd(h).adjoint());
        h = sym;
    }
    return H;
}

}  // namespace nakano
