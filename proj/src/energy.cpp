#include "birk/energy.hpp"

#include "birk/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace birk {

namespace {

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Eigen::VectorXd shift_vector(const BirkhoffSystem& sys) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(sys.dim);
    for (const auto& t : sys.resistors) s += t.characteristic(0.0).value * t.row;
    return s;
}

}  // namespace

EnergyFunction::EnergyFunction(const BirkhoffSystem& sys, bool shifted)
    : inductors_(sys.inductors), capacitors_(sys.capacitors), shifted_(shifted) {
    shift_ = shifted ? shift_vector(sys) : Eigen::VectorXd::Zero(sys.dim);
}

double EnergyFunction::kinetic(const Eigen::VectorXd& qdot) const {
    double e = 0.0;
    for (const auto& t : inductors_) {
        double u = t.argument(qdot);
        if (t.model.is_linear()) {
            e += 0.5 * t.model.constant() * u * u;
        } else {
            e += adaptive_simpson([&](double v) { return t.characteristic(v).value * v; }, 0.0, u);
        }
    }
    return e;
}

double EnergyFunction::potential(const Eigen::VectorXd& q) const {
    double e = 0.0;
    for (const auto& t : capacitors_) {
        double s = t.argument(q);
        if (t.model.is_linear()) {
            e += (s * s - t.offset * t.offset) / (2.0 * t.model.constant());
        } else {
            e += adaptive_simpson([&](double v) { return t.characteristic(v).value; }, t.offset, s);
        }
    }
    return e;
}

double EnergyFunction::value(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot) const {
    return kinetic(qdot) + potential(q) + shift_.dot(q);
}

Eigen::VectorXd EnergyFunction::grad_q(const Eigen::VectorXd& q) const {
    Eigen::VectorXd g = shift_;
    for (const auto& t : capacitors_) g += t.characteristic(t.argument(q)).value * t.row;
    return g;
}

Eigen::VectorXd EnergyFunction::grad_qdot(const Eigen::VectorXd& qdot) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(shift_.size());
    for (const auto& t : inductors_) {
        double u = t.argument(qdot);
        g += t.characteristic(u).value * u * t.row;
    }
    return g;
}

DissipativeForm::DissipativeForm(const BirkhoffSystem& sys, bool shifted)
    : resistors_(sys.resistors), m_(sys.dim), shifted_(shifted) {}

Eigen::VectorXd DissipativeForm::components(const Eigen::VectorXd& qdot) const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(m_);
    for (const auto& t : resistors_) {
        double r = t.characteristic(t.argument(qdot)).value;
        if (shifted_) r -= t.characteristic(0.0).value;
        d += r * t.row;
    }
    return d;
}

bool needs_shift(const BirkhoffSystem& sys) {
    return std::any_of(sys.resistors.begin(), sys.resistors.end(),
                       [](const DeviceTerm& t) { return t.characteristic(0.0).value != 0.0; });
}

EnergyModel build_energy(const BirkhoffSystem& sys, bool shifted) {
    EnergyModel model{EnergyFunction(sys, shifted), std::nullopt};
    if (!is_lc(sys.case_tag)) model.dissipation.emplace(sys, shifted);
    return model;
}

IdentityReport verify_identity(const BirkhoffSystem& sys, const EnergyModel& model,
                               const std::vector<IdentitySample>& samples, double tol, double fd_tol) {
    IdentityReport rep;
    const double h = 1e-6;
    const auto& energy_fn = model.energy;
    for (const auto& s : samples) {
        double scale = 1.0 + std::max({inf_norm(s.q), inf_norm(s.qdot), inf_norm(s.qddot)});
        double lhs = sys.components(s.q, s.qdot, s.qddot).dot(s.qdot);
        double diss = model.dissipation ? model.dissipation->power(s.qdot) : 0.0;

        double rhs = energy_fn.grad_q(s.q).dot(s.qdot) + energy_fn.grad_qdot(s.qdot).dot(s.qddot) + diss;

        Eigen::VectorXd gq(sys.dim), gv(sys.dim);
        for (std::size_t i = 0; i < sys.dim; ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Unit(sys.dim, i) * h;
            gq(i) = (energy_fn.potential(s.q + e) - energy_fn.potential(s.q - e)) / (2 * h) + energy_fn.linear_shift()(i);
            gv(i) = (energy_fn.kinetic(s.qdot + e) - energy_fn.kinetic(s.qdot - e)) / (2 * h);
        }
        double rhs_fd = gq.dot(s.qdot) + gv.dot(s.qddot) + diss;

        rep.max_residual = std::max(rep.max_residual, std::abs(lhs - rhs) / scale);
        rep.max_residual_fd = std::max(rep.max_residual_fd, std::abs(lhs - rhs_fd) / scale);
        ++rep.samples;
    }
    rep.passed = rep.max_residual <= tol && rep.max_residual_fd <= fd_tol;
    return rep;
}

std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> energy_rate(const EnergyModel& model,
                                                                                 const BirkhoffSystem& sys) {
    return [energy_fn = model.energy, sys](const Eigen::VectorXd& q, const Eigen::VectorXd& qdot) {
        Eigen::VectorXd qddot = acceleration(sys, q, qdot);
        return energy_fn.grad_q(q).dot(qdot) + energy_fn.grad_qdot(qdot).dot(qddot);
    };
}

}  // namespace birk
