#pragma once

#include "birk/configspace.hpp"
#include "birk/netlist.hpp"

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace birk {

enum class CaseTag { LinLC, NonlinLC, LinRLC, NonlinRLC };

const char* to_string(CaseTag tag);
inline bool is_lc(CaseTag t) { return t == CaseTag::LinLC || t == CaseTag::NonlinLC; }
inline bool is_linear(CaseTag t) { return t == CaseTag::LinLC || t == CaseTag::LinRLC; }

/// One branch as seen from the chart: its row of the basis and its offset.
/// The scalar argument of the device is row.dot(q) + offset (capacitors) or
/// row.dot(qdot) (resistors and inductors).
struct DeviceTerm {
    std::size_t branch;
    std::string name;
    BranchKind kind;
    DeviceModel model;
    Eigen::VectorXd row;
    double offset;

    double argument(const Eigen::VectorXd& v) const {
        return row.dot(v) + (kind == BranchKind::Capacitor ? offset : 0.0);
    }
    Dual characteristic(double x) const { return eval_characteristic(kind, model, x); }
};

class SingularMassError : public std::runtime_error {
public:
    SingularMassError(const std::string& msg, Eigen::VectorXd q, Eigen::VectorXd qdot)
        : std::runtime_error(msg), q_(std::move(q)), qdot_(std::move(qdot)) {}
    const Eigen::VectorXd& q() const { return q_; }
    const Eigen::VectorXd& qdot() const { return qdot_; }

private:
    Eigen::VectorXd q_, qdot_;
};

/// Q_j(q, qdot, qddot) = sum_i mass(qdot)_ji qddot^i + resistive(qdot)_j
///                       + capacitive(q)_j + const_term_j.
///
/// For linear networks capacitive(q) is the homogeneous stiffness term and
/// const_term carries the offset-dependent part; for nonlinear networks the whole
/// capacitor law is inside capacitive(q) and const_term is zero.
struct BirkhoffSystem {
    CaseTag case_tag = CaseTag::LinLC;
    std::size_t dim = 0;
    std::vector<DeviceTerm> resistors;
    std::vector<DeviceTerm> inductors;
    std::vector<DeviceTerm> capacitors;
    Eigen::VectorXd const_term;

    Eigen::MatrixXd mass(const Eigen::VectorXd& qdot) const;
    Eigen::VectorXd resistive(const Eigen::VectorXd& qdot) const;
    Eigen::VectorXd capacitive(const Eigen::VectorXd& q) const;
    /// d capacitive / dq.
    Eigen::MatrixXd capacitive_jacobian(const Eigen::VectorXd& q) const;
    Eigen::VectorXd components(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                               const Eigen::VectorXd& qddot) const;
    /// Q(q, 0, 0): zero exactly at equilibria.
    Eigen::VectorXd equilibrium_residual(const Eigen::VectorXd& q) const;
};

BirkhoffSystem assemble(const ConfigSpace& cs, const NetlistDoc& doc);

/// |det mass(qdot)| > 1e-12 * max|mass|^m at qdot = 0 and every sample.
bool regularity(const BirkhoffSystem& sys, const std::vector<Eigen::VectorXd>& qdot_samples = {});

/// qddot solving Q(q, qdot, qddot) = 0. Throws SingularMassError.
Eigen::VectorXd acceleration(const BirkhoffSystem& sys, const Eigen::VectorXd& q, const Eigen::VectorXd& qdot);

using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;
VectorField vector_field(const BirkhoffSystem& sys);

}  // namespace birk
