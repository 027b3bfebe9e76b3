#include "birk/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace birk {

namespace {

double state_norm(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot) {
    double a = q.size() ? q.cwiseAbs().maxCoeff() : 0.0;
    double b = qdot.size() ? qdot.cwiseAbs().maxCoeff() : 0.0;
    return std::max(a, b);
}

double distance(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot, const Eigen::VectorXd& q_e) {
    return std::sqrt((q - q_e).squaredNorm() + qdot.squaredNorm());
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Trajectory integrate(const BirkhoffSystem& sys, const EnergyModel& model, const Eigen::VectorXd& q0,
                     const Eigen::VectorXd& qdot0, double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw IntegratorError("time step must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw IntegratorError("end time must be non-negative");
    if (static_cast<std::size_t>(q0.size()) != sys.dim || static_cast<std::size_t>(qdot0.size()) != sys.dim)
        throw IntegratorError("initial state has the wrong dimension");

    Trajectory traj;
    const auto& energy_fn = model.energy;
    auto record = [&](double t, const Eigen::VectorXd& q, const Eigen::VectorXd& v, const Eigen::VectorXd& a) {
        traj.times.push_back(t);
        traj.q.push_back(q);
        traj.qdot.push_back(v);
        traj.energies.push_back(energy_fn.value(q, v));
        traj.rates.push_back(energy_fn.grad_q(q).dot(v) + energy_fn.grad_qdot(v).dot(a));
        traj.dissipation.push_back(model.dissipation ? model.dissipation->power(v) : 0.0);
    };

    Eigen::VectorXd q = q0, v = qdot0;
    Eigen::VectorXd a;
    try {
        a = acceleration(sys, q, v);
    } catch (const SingularMassError& e) {
        throw IntegratorError(e.what());
    }
    record(0.0, q, v, a);

    // A step that jumps over a singular mass matrix shows up as a sign change
    // of its determinant at one of the stage velocities.
    auto mass_sign = [&](const Eigen::VectorXd& vel) { return sys.mass(vel).determinant() > 0.0; };
    const bool sign0 = mass_sign(v);
    auto guard = [&](const Eigen::VectorXd& pos, const Eigen::VectorXd& vel) {
        if (mass_sign(vel) != sign0)
            throw SingularMassError("mass matrix passed through a singular point", pos, vel);
    };

    auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    double t = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        double h = (i + 1 == steps) ? t_end - t : dt;
        if (h <= 0.0) break;
        try {
            Eigen::VectorXd k1q = v, k1v = a;
            Eigen::VectorXd k2q = v + 0.5 * h * k1v;
            Eigen::VectorXd k2v = acceleration(sys, q + 0.5 * h * k1q, k2q);
            Eigen::VectorXd k3q = v + 0.5 * h * k2v;
            Eigen::VectorXd k3v = acceleration(sys, q + 0.5 * h * k2q, k3q);
            Eigen::VectorXd k4q = v + h * k3v;
            Eigen::VectorXd k4v = acceleration(sys, q + h * k3q, k4q);
            guard(q, k2q);
            guard(q, k3q);
            guard(q, k4q);
            Eigen::VectorXd q_next = q + h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
            Eigen::VectorXd v_next = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            guard(q_next, v_next);
            q = q_next;
            v = v_next;
            t = (i + 1 == steps) ? t_end : t + h;
            if (!q.allFinite() || !v.allFinite() || state_norm(q, v) > 1e12)
                throw IntegratorError("state blew up at t = " + num(t));
            a = acceleration(sys, q, v);
        } catch (const SingularMassError& e) {
            traj.truncated = true;
            traj.diagnostic = std::string("truncated at t = ") + num(t) + ": " + e.what();
            break;
        } catch (const ExprDomainError& e) {
            traj.truncated = true;
            traj.diagnostic = std::string("truncated at t = ") + num(t) + ": " + e.what();
            break;
        }
        record(t, q, v, a);
    }
    return traj;
}

MonotoneReport verify_monotone(const Trajectory& traj, CaseTag tag) {
    MonotoneReport rep;
    if (traj.size() == 0) throw std::invalid_argument("empty trajectory");
    double e0 = traj.energies.front();
    auto flag = [&](std::size_t i, const std::string& what) {
        if (!rep.first_violation) {
            rep.first_violation = traj.times[i];
            rep.detail = what + " at t = " + num(traj.times[i]);
        }
        rep.passed = false;
    };

    if (is_lc(tag)) {
        double limit = 1e-7 * (1.0 + std::abs(e0));
        for (std::size_t i = 0; i < traj.size(); ++i) {
            double d = std::abs(traj.energies[i] - e0);
            rep.max_drift = std::max(rep.max_drift, d);
            if (d > limit) flag(i, "energy drift " + num(d));
        }
        return rep;
    }

    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (i > 0) {
            double inc = traj.energies[i] - traj.energies[i - 1];
            rep.max_increase = std::max(rep.max_increase, inc);
            if (inc > 1e-9) flag(i, "energy increased by " + num(inc));
        }
        double scale = 1.0 + std::max(std::abs(traj.rates[i]), std::abs(traj.dissipation[i]));
        double mismatch = std::abs(traj.rates[i] + traj.dissipation[i]) / scale;
        rep.max_rate_mismatch = std::max(rep.max_rate_mismatch, mismatch);
        if (mismatch > 1e-7) flag(i, "dE/dt differs from minus the dissipation by " + num(mismatch));
    }
    return rep;
}

double convergence_ratio(const Trajectory& traj, const Eigen::VectorXd& q_e) {
    std::size_t n = traj.size();
    std::size_t quarter = std::max<std::size_t>(1, n / 4);
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < quarter; ++i) {
        first += distance(traj.q[i], traj.qdot[i], q_e);
        last += distance(traj.q[n - 1 - i], traj.qdot[n - 1 - i], q_e);
    }
    return first == 0.0 ? 0.0 : last / first;
}

double final_distance(const Trajectory& traj, const Eigen::VectorXd& q_e) {
    return state_norm(traj.q.back() - q_e, traj.qdot.back());
}

void write_csv(std::ostream& out, const Trajectory& traj) {
    std::size_t dim = traj.q.empty() ? 0 : static_cast<std::size_t>(traj.q.front().size());
    out << "t";
    for (std::size_t j = 1; j <= dim; ++j) out << ",q" << j;
    for (std::size_t j = 1; j <= dim; ++j) out << ",qd" << j;
    out << ",E,dEdt\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        std::ostringstream row;
        row << num(traj.times[i]);
        for (std::size_t j = 0; j < dim; ++j) row << ',' << num(traj.q[i](j));
        for (std::size_t j = 0; j < dim; ++j) row << ',' << num(traj.qdot[i](j));
        row << ',' << num(traj.energies[i]) << ',' << num(traj.rates[i]) << '\n';
        out << row.str();
    }
}

}  // namespace birk
