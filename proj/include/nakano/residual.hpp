#pragma once

#include "nakano/curvature.hpp"
#include "nakano/scenario.hpp"

namespace nakano {

struct LinearizedOperator;

/// R(u, t, c) = L(u) - phi_t - c with its cone diagnostics.
struct ResidualReport {
    ScalarField residual;
    double sup_norm = 0.0;
    double theta_min_eig = 0.0;
    ScalarField volume_density;
};

/// phi_1 = (1/r) log det Theta_0 - log(n! det g).
ScalarField phi_one(const Scenario& sc);

/// phi + t (phi_1 - phi).
ScalarField phi_t(const ScalarField& phi, const ScalarField& phi1, double t);

/// The nonlinear operator L(u) = (1/r) log det(Theta_0 + Hess u (x) Id) - log(n! det g) - lambda r u
/// with the continuity targets cached for one scenario.
class ResidualOperator {
public:
    explicit ResidualOperator(const Scenario& sc);

    const Scenario& scenario() const { return *sc_; }
    const ScalarField& phi1() const { return phi1_; }

    /// Theta_u; no positivity check.
    NakanoTensorField theta(const ScalarField& u) const;

    /// L(u). Throws OutsideCone if Theta_u does not factor.
    ScalarField apply(const ScalarField& u) const;

    /// Full residual. Throws OutsideCone (min eig <= 0) and std::invalid_argument
    /// when c != 0 with lambda > 0.
    ResidualReport evaluate(const ScalarField& u, double t, double c) const;

    /// delta L(u), frozen at u.
    LinearizedOperator linearize(const ScalarField& u) const;

private:
    const Scenario* sc_;
    ScalarField log_volume_;
    ScalarField phi1_;
};

ResidualReport residual(const Scenario& sc, const ScalarField& u, double t, double c);

}  // namespace nakano
