#include "nakano/residual.hpp"

#include <cmath>
#include <stdexcept>

#include "nakano/linear_solver.hpp"

namespace nakano {

ScalarField phi_one(const Scenario& sc) {
    ScalarField ld;
    try {
        ld = log_det_power(sc.background);
    } catch (const NotPositive& e) {
        throw NotNakanoPositive(e.point(), e.min_eigenvalue(), "background does not factor");
    }
    const ScalarField vol = sc.volume_density();
    for (std::size_t p = 0; p < ld.size(); ++p) ld[p] -= std::log(vol[p]);
    return ld;
}

ScalarField phi_t(const ScalarField& phi, const ScalarField& phi1, double t) {
    if (!(phi.grid == phi1.grid)) throw ShapeMismatch("phi_t: grids differ");
    ScalarField out(phi.grid);
    // written so both endpoints are reproduced bit for bit
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = (1.0 - t) * phi[p] + t * phi1[p];
    return out;
}

ResidualOperator::ResidualOperator(const Scenario& sc) : sc_(&sc), phi1_(phi_one(sc)) {
    log_volume_ = sc.volume_density();
    for (double& v : log_volume_.values) v = std::log(v);
}

NakanoTensorField ResidualOperator::theta(const ScalarField& u) const {
    if (!(u.grid == sc_->grid)) throw ShapeMismatch("u grid differs from scenario grid");
    return assemble_theta(sc_->background, complex_hessian(u));
}

ScalarField ResidualOperator::apply(const ScalarField& u) const {
    ScalarField L;
    try {
        L = log_det_power(theta(u));
    } catch (const NotPositive& e) {
        throw OutsideCone(e.point(), e.min_eigenvalue(), "Theta_u left the Nakano cone");
    }
    const double lr = sc_->lambda * sc_->rank;
    for (std::size_t p = 0; p < L.size(); ++p) L[p] -= log_volume_[p] + lr * u[p];
    return L;
}

ResidualReport ResidualOperator::evaluate(const ScalarField& u, double t, double c) const {
    if (sc_->lambda > 0.0 && c != 0.0) throw std::invalid_argument("residual: c must be 0 when lambda > 0");
    const NakanoTensorField th = theta(u);
    const double min_eig = min_nakano_eigenvalue(th);
    if (!(min_eig > 0.0)) {
        const ScalarField eig = min_eigenvalue_field(th);
        std::size_t worst = 0;
        for (std::size_t p = 0; p < eig.size(); ++p)
            if (eig[p] < eig[worst]) worst = p;
        throw OutsideCone(worst, min_eig, "Theta_u left the Nakano cone");
    }
    ResidualReport rep;
    rep.residual = apply(u);
    const double lt = 1.0 - t;
    for (std::size_t p = 0; p < u.size(); ++p) {
        const double target = lt * sc_->phi[p] + t * phi1_[p];
        rep.residual[p] -= target + c;
    }
    rep.sup_norm = rep.residual.sup_norm();
    rep.theta_min_eig = min_eig;
    rep.volume_density = sc_->volume_density();
    return rep;
}

LinearizedOperator ResidualOperator::linearize(const ScalarField& u) const {
    NakanoTensorField inv;
    try {
        inv = invert(theta(u));
    } catch (const NotPositive& e) {
        throw OutsideCone(e.point(), e.min_eigenvalue(), "Theta_u left the Nakano cone");
    }
    return LinearizedOperator{partial_trace_inverse(inv), sc_->lambda, sc_->rank};
}

ResidualReport residual(const Scenario& sc, const ScalarField& u, double t, double c) {
    return ResidualOperator(sc).evaluate(u, t, c);
}

}  // namespace nakano
