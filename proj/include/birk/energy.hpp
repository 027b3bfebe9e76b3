#pragma once

#include "birk/birkhoffian.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace birk {

/// E(q, qdot) = kinetic(qdot) + potential(q) + shift . q
///
/// kinetic   = sum over inductors of int_0^{row . qdot} L(u) u du
/// potential = sum over capacitors of int_{offset}^{row . q + offset} C(u) du
///
/// so E(0, 0) = 0. The shift is the sum of row * R(0) over resistors when
/// the shifted storage function is requested, zero otherwise.
class EnergyFunction {
public:
    EnergyFunction(const BirkhoffSystem& sys, bool shifted);

    double kinetic(const Eigen::VectorXd& qdot) const;
    double potential(const Eigen::VectorXd& q) const;
    double value(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot) const;

    /// dE/dq and dE/dqdot in closed form.
    Eigen::VectorXd grad_q(const Eigen::VectorXd& q) const;
    Eigen::VectorXd grad_qdot(const Eigen::VectorXd& qdot) const;

    bool shifted() const { return shifted_; }
    const Eigen::VectorXd& linear_shift() const { return shift_; }

private:
    std::vector<DeviceTerm> inductors_;
    std::vector<DeviceTerm> capacitors_;
    Eigen::VectorXd shift_;
    bool shifted_;
};

/// D(qdot) = sum over resistors of row * [R(row . qdot) - R(0) if shifted].
class DissipativeForm {
public:
    DissipativeForm(const BirkhoffSystem& sys, bool shifted);

    Eigen::VectorXd components(const Eigen::VectorXd& qdot) const;
    /// sum_j D_j(qdot) qdot^j
    double power(const Eigen::VectorXd& qdot) const { return components(qdot).dot(qdot); }

private:
    std::vector<DeviceTerm> resistors_;
    std::size_t m_;
    bool shifted_;
};

struct EnergyModel {
    EnergyFunction energy;
    std::optional<DissipativeForm> dissipation;  // present for RLC networks
};

/// Energy (LC) or storage function plus dissipative one-form (RLC).
EnergyModel build_energy(const BirkhoffSystem& sys, bool shifted);

/// True when some resistor has R(0) != 0, i.e. the shifted storage applies.
bool needs_shift(const BirkhoffSystem& sys);

struct IdentitySample {
    Eigen::VectorXd q, qdot, qddot;
};

struct IdentityReport {
    double max_residual = 0.0;     // analytic partials, divided by scale
    double max_residual_fd = 0.0;  // finite-difference partials, divided by scale
    std::size_t samples = 0;
    bool passed = true;
};

/// Checks sum_j Q_j qdot^j = dE/dq . qdot + dE/dqdot . qddot + D . qdot at each
/// sample, with scale = 1 + max-norm of the sample. The analytic residual must
/// stay within `tol`; the finite-difference one (step 1e-6) within `fd_tol`.
IdentityReport verify_identity(const BirkhoffSystem& sys, const EnergyModel& model,
                               const std::vector<IdentitySample>& samples, double tol = 1e-8,
                               double fd_tol = 1e-8);

/// dE/dt along the Birkhoffian vector field.
std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> energy_rate(const EnergyModel& model,
                                                                                 const BirkhoffSystem& sys);

}  // namespace birk
