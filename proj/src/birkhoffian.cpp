#include "birk/birkhoffian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace birk {

const char* to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::LinLC: return "LinLC";
        case CaseTag::NonlinLC: return "NonlinLC";
        case CaseTag::LinRLC: return "LinRLC";
        case CaseTag::NonlinRLC: return "NonlinRLC";
    }
    return "?";
}

namespace {

bool singular(const Eigen::MatrixXd& mass_matrix, double det) {
    double scale = mass_matrix.cwiseAbs().maxCoeff();
    if (scale == 0.0) return true;
    return std::abs(det) <= 1e-12 * std::pow(scale, static_cast<double>(mass_matrix.rows()));
}

std::string format_state(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot) {
    std::ostringstream out;
    Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, ", ", ", ", "", "", "(", ")");
    out << "q=" << q.transpose().format(fmt) << " qdot=" << qdot.transpose().format(fmt);
    return out.str();
}

}  // namespace

Eigen::MatrixXd BirkhoffSystem::mass(const Eigen::VectorXd& qdot) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& t : inductors) out += t.characteristic(t.argument(qdot)).value * t.row * t.row.transpose();
    return out;
}

Eigen::VectorXd BirkhoffSystem::resistive(const Eigen::VectorXd& qdot) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(dim);
    for (const auto& t : resistors) f += t.characteristic(t.argument(qdot)).value * t.row;
    return f;
}

Eigen::VectorXd BirkhoffSystem::capacitive(const Eigen::VectorXd& q) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(dim);
    if (is_linear(case_tag)) {
        for (const auto& t : capacitors) f += (t.row.dot(q) / t.model.constant()) * t.row;
    } else {
        for (const auto& t : capacitors) f += t.characteristic(t.argument(q)).value * t.row;
    }
    return f;
}

Eigen::MatrixXd BirkhoffSystem::capacitive_jacobian(const Eigen::VectorXd& q) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& t : capacitors) out += t.characteristic(t.argument(q)).deriv * t.row * t.row.transpose();
    return out;
}

Eigen::VectorXd BirkhoffSystem::components(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                                           const Eigen::VectorXd& qddot) const {
    return mass(qdot) * qddot + resistive(qdot) + capacitive(q) + const_term;
}

Eigen::VectorXd BirkhoffSystem::equilibrium_residual(const Eigen::VectorXd& q) const {
    return resistive(Eigen::VectorXd::Zero(dim)) + capacitive(q) + const_term;
}

BirkhoffSystem assemble(const ConfigSpace& cs, const NetlistDoc& doc) {
    BirkhoffSystem sys;
    sys.dim = cs.dim();
    Eigen::MatrixXd basis = cs.basis_real();
    bool all_linear = true;
    for (std::size_t i = 0; i < doc.branches.size(); ++i) {
        const auto& br = doc.branches[i];
        DeviceTerm t{i, br.name, br.kind, br.model, basis.row(i).transpose(), cs.offset(i)};
        all_linear = all_linear && br.model.is_linear();
        switch (br.kind) {
            case BranchKind::Resistor: sys.resistors.push_back(std::move(t)); break;
            case BranchKind::Inductor: sys.inductors.push_back(std::move(t)); break;
            case BranchKind::Capacitor: sys.capacitors.push_back(std::move(t)); break;
        }
    }
    bool lc = sys.resistors.empty();
    if (all_linear)
        sys.case_tag = lc ? CaseTag::LinLC : CaseTag::LinRLC;
    else
        sys.case_tag = lc ? CaseTag::NonlinLC : CaseTag::NonlinRLC;

    sys.const_term = Eigen::VectorXd::Zero(sys.dim);
    if (all_linear)
        for (const auto& t : sys.capacitors) sys.const_term += (t.offset / t.model.constant()) * t.row;
    return sys;
}

bool regularity(const BirkhoffSystem& sys, const std::vector<Eigen::VectorXd>& qdot_samples) {
    auto regular_at = [&](const Eigen::VectorXd& qdot) {
        Eigen::MatrixXd mass_matrix = sys.mass(qdot);
        return !singular(mass_matrix, mass_matrix.determinant());
    };
    if (!regular_at(Eigen::VectorXd::Zero(sys.dim))) return false;
    for (const auto& s : qdot_samples)
        if (!regular_at(s)) return false;
    return true;
}

Eigen::VectorXd acceleration(const BirkhoffSystem& sys, const Eigen::VectorXd& q, const Eigen::VectorXd& qdot) {
    Eigen::MatrixXd mass_matrix = sys.mass(qdot);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(mass_matrix);
    if (singular(mass_matrix, lu.determinant()))
        throw SingularMassError("singular mass matrix at " + format_state(q, qdot), q, qdot);
    Eigen::VectorXd force = sys.resistive(qdot) + sys.capacitive(q) + sys.const_term;
    Eigen::VectorXd qddot = lu.solve(-force);

    double scale = 1.0 + std::max({q.cwiseAbs().maxCoeff(), qdot.cwiseAbs().maxCoeff(),
                                   qddot.cwiseAbs().maxCoeff(), force.cwiseAbs().maxCoeff()});
    double residual = (mass_matrix * qddot + force).cwiseAbs().maxCoeff();
    if (residual > 1e-10 * scale)
        throw SingularMassError("ill-conditioned mass matrix (residual " + std::to_string(residual) + ") at " +
                                    format_state(q, qdot),
                                q, qdot);
    return qddot;
}

VectorField vector_field(const BirkhoffSystem& sys) {
    return [sys](const Eigen::VectorXd& q, const Eigen::VectorXd& qdot) { return acceleration(sys, q, qdot); };
}

}  // namespace birk
