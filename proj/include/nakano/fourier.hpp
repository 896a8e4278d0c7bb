#pragma once

#include <vector>

#include "nakano/grid.hpp"

namespace nakano {

/// One term amplitude * exp(2 pi i k.x / period); k has one entry per real axis.
struct FourierMode {
    std::vector<int> k;
    cplx amplitude{0.0, 0.0};

    bool operator==(const FourierMode&) const = default;
};

/// Band-limited periodic data. With `real` set, each mode implicitly carries
/// its conjugate partner at -k, so the field is sum 2 Re(a e^{i k.x}).
struct FourierSpec {
    std::vector<FourierMode> modes;
    bool real = true;

    bool empty() const { return modes.empty(); }
    bool operator==(const FourierSpec&) const = default;
};

/// Evaluates the trigonometric polynomial on the grid nodes.
/// Throws UnresolvedMode if |k|_inf > N/4 or k has the wrong length.
ScalarField build_field(const FourierSpec& spec, const GridSpec& grid);

/// Closed-form d_i f of the trigonometric polynomial.
ComplexVectorField exact_gradient(const FourierSpec& spec, const GridSpec& grid);

/// Closed-form d_i dbar_j f of the trigonometric polynomial.
HermitianMetricField exact_complex_hessian(const FourierSpec& spec, const GridSpec& grid);

}  // namespace nakano
