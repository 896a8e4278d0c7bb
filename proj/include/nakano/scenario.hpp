#pragma once

#include <cstdint>
#include <vector>

#include "nakano/curvature.hpp"
#include "nakano/fourier.hpp"
#include "nakano/grid.hpp"

namespace nakano {

enum class Normalization { none, sup_zero };

/// n! : the density of omega^n against the coordinate (n,n)-form is n! det g.
double volume_convention(int n);

/// Complete problem statement for
///   det(F + i ddbar u (x) Id)^{1/r} = exp(lambda r u + phi) omega^n.
///
/// Instances come only from `make_scenario` and the generators, which check
/// the invariants: F positive with min eigenvalue >= margin, g positive,
/// lambda >= 0, and sup_zero normalization exactly when lambda == 0.
struct Scenario {
    GridSpec grid;
    int rank = 1;
    NakanoTensorField background;  // Theta_0
    HermitianMetricField metric;   // g, omega = i g_{i jbar} dz^i ^ dzbar^j
    ScalarField phi;
    double lambda = 0.0;
    double volume_convention = 1.0;
    double margin = 1e-3;
    Normalization normalization = Normalization::none;
    /// sup |g - (1/r) tr_E F|; zero for generated backgrounds.
    double coupling_discrepancy = 0.0;

    /// Pointwise vol density of omega^n (n! det g).
    ScalarField volume_density() const;
};

/// Validates and assembles a scenario. With `metric` absent, g := (1/r) tr_E F.
/// Throws NotNakanoPositive (with grid point) if min eig F < margin, and
/// NonPositiveMetric if g is not positive definite.
Scenario make_scenario(const NakanoTensorField& background, const HermitianMetricField* metric, ScalarField phi,
                       double lambda, double margin = 1e-3);

/// Direct sum of twisted line bundles: F = blockdiag_alpha(tau Id_n + Hess psi_alpha),
/// g = (1/r) sum_alpha (tau Id_n + Hess psi_alpha), Hess being the discrete complex Hessian.
Scenario make_diagonal_torus_scenario(const GridSpec& grid, int rank, const std::vector<FourierSpec>& potentials,
                                      double tau, const FourierSpec& phi, double lambda, double margin = 1e-3);

/// phi such that u_star solves the discrete equation exactly:
/// (1/r) log det(F + Hess_h u*) - log(n! det g) - lambda r u*.
ScalarField manufacture_phi(const Scenario& sc, const ScalarField& u_star);

/// Same formula with the closed-form Hessian of u*; the discrete solution then
/// differs from u* by the discretization error.
ScalarField manufacture_phi_exact(const Scenario& sc, const FourierSpec& u_star);

/// Returns a copy of sc with phi replaced.
Scenario with_phi(const Scenario& sc, ScalarField phi);

/// Smooth Hermitian field margin Id + A A^* with A a band-limited random
/// complex matrix field of the given amplitude; reproducible from seed.
NakanoTensorField random_nakano_field(const GridSpec& grid, int rank, std::uint64_t seed, double margin,
                                      double amplitude = 0.25, int max_wavenumber = 1);

/// Band-limited random real field with the given sup amplitude per mode.
FourierSpec random_fourier_spec(int real_axes, std::uint64_t seed, double amplitude, int max_wavenumber = 1,
                                int mode_count = 3);

}  // namespace nakano
