#pragma once

#include "birk/birkhoffian.hpp"
#include "birk/energy.hpp"

#include <Eigen/Dense>

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace birk {

class IntegratorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> q;
    std::vector<Eigen::VectorXd> qdot;
    std::vector<double> energies;
    std::vector<double> rates;        // dE/dt along the vector field
    std::vector<double> dissipation;  // sum_j D_j qdot^j, zero for LC networks
    bool truncated = false;           // mass matrix became singular
    std::string diagnostic;

    std::size_t size() const { return times.size(); }
};

/// Fixed-step RK4 on (q, qdot)' = (qdot, qddot(q, qdot)). The last step is
/// shortened to land exactly on t_end. Throws IntegratorError when the state
/// norm exceeds 1e12 or the arguments are invalid.
Trajectory integrate(const BirkhoffSystem& sys, const EnergyModel& model, const Eigen::VectorXd& q0,
                     const Eigen::VectorXd& qdot0, double t_end, double dt);

struct MonotoneReport {
    bool passed = true;
    double max_drift = 0.0;        // LC: max |E(t) - E(0)|
    double max_increase = 0.0;     // RLC: max E(t_{i+1}) - E(t_i)
    double max_rate_mismatch = 0.0;  // RLC: max |dE/dt + D . qdot| / scale
    std::optional<double> first_violation;
    std::string detail;
};

MonotoneReport verify_monotone(const Trajectory& traj, CaseTag tag);

/// Mean distance of (q, qdot) from (q_e, 0) over the last quarter divided by
/// the same mean over the first quarter.
double convergence_ratio(const Trajectory& traj, const Eigen::VectorXd& q_e);

/// Distance of the final state from (q_e, 0) in the max norm.
double final_distance(const Trajectory& traj, const Eigen::VectorXd& q_e);

/// Header `t,q1..qm,qd1..qdm,E,dEdt`, values with 17 significant digits.
void write_csv(std::ostream& out, const Trajectory& traj);

}  // namespace birk
