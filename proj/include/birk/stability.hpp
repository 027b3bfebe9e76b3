#pragma once

#include "birk/birkhoffian.hpp"
#include "birk/energy.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace birk {

struct Equilibrium {
    Eigen::VectorXd q_e;
    double residual = 0.0;  // max-norm of Q(q_e, 0, 0)
    std::vector<Eigen::VectorXd> basin_hint;  // seeds that converged here
};

struct NewtonOptions {
    std::uint64_t seed = 42;
    int random_starts = 50;
    double random_box = 10.0;  // random seeds uniform in [-box, box]^m
    int max_iterations = 100;
    int max_halvings = 30;
    double merge_distance = 1e-8;
};

struct EquilibriumSearch {
    std::vector<Equilibrium> equilibria;  // sorted lexicographically
    std::vector<std::string> diagnostics;
};

/// Linear networks: the unique solution of the stiffness system. Nonlinear
/// networks: damped Newton from a deterministic multi-start grid.
EquilibriumSearch find_equilibria(const BirkhoffSystem& sys, const NewtonOptions& opts = {});

/// Residual tolerance for an equilibrium: 1e-10 * (1 + |q_e|_inf).
double equilibrium_tolerance(const Eigen::VectorXd& q_e);

enum class ConditionStatus { Holds, Fails, Sampled };
const char* to_string(ConditionStatus s);

struct Condition {
    std::string name;
    ConditionStatus status;
    std::string detail;
};

using ConditionSet = std::vector<Condition>;

std::optional<ConditionStatus> find_condition(const ConditionSet& set, const std::string& name);

/// Condition names used by check_conditions.
namespace cond {
inline constexpr const char* kInductancePositive = "inductance_positive";
inline constexpr const char* kCapacitancePositive = "capacitance_positive";
inline constexpr const char* kResistancePositive = "resistance_positive";
inline constexpr const char* kInductanceAtZeroPositive = "inductance_at_zero_positive";
inline constexpr const char* kCapacitorSlopePositive = "capacitor_slope_positive";
inline constexpr const char* kResistorZeroAtOrigin = "resistor_zero_at_origin";
inline constexpr const char* kResistorSector = "resistor_sector";
inline constexpr const char* kResistorShiftedSector = "resistor_shifted_sector";
}  // namespace cond

/// The sign grid for sector checks: +-10^(-6 + 9 i / 60), i = 0..60.
std::vector<double> sector_grid();

/// x R(x) > 0 on the grid, with R'(0) >= 0 as a necessary witness.
ConditionStatus check_sector(const DeviceTerm& resistor, bool shifted, std::string* detail = nullptr);

ConditionSet check_conditions(const BirkhoffSystem& sys, const Eigen::VectorXd& q_e);

class HessianMismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LiapunovHessian {
    Eigen::MatrixXd hessian;  // 2m x 2m, ordered (qdot, q)
    double min_eigenvalue = 0.0;
    bool positive_definite = false;
    double fd_discrepancy = 0.0;  // max |matrix - H_fd| / max(1, max |matrix|)
};

/// Attempted Cholesky factorization; fails when a pivot drops below
/// 1e-12 * trace / size.
bool is_positive_definite(const Eigen::MatrixXd& matrix);

/// Block Hessian of V = E - E(q_e, 0) at (q_e, 0), cross-checked against
/// central second differences of V. Throws HessianMismatchError.
LiapunovHessian liapunov_hessian(const BirkhoffSystem& sys, const EnergyFunction& energy,
                                 const Eigen::VectorXd& q_e);

enum class StabilityClass {
    StableCenter,
    AsymptoticallyStable,
    LocallyAsymptoticallyStable,
    LocallyStableCenter,
    Inconclusive
};
const char* to_string(StabilityClass c);

struct StabilityVerdict {
    StabilityClass cls = StabilityClass::Inconclusive;
    ConditionSet conditions;
    Eigen::MatrixXd hessian;
    double hessian_min_eigenvalue = 0.0;
    std::vector<std::string> notes;
};

StabilityVerdict classify(const BirkhoffSystem& sys, const ConditionSet& conditions, const LiapunovHessian& h,
                          bool shifted_energy);

struct EquilibriumVerdict {
    Equilibrium equilibrium;
    StabilityVerdict verdict;
};

struct StabilityReport {
    CaseTag case_tag;
    bool shifted_energy = false;
    std::vector<EquilibriumVerdict> results;
    std::vector<std::string> notes;
};

/// find_equilibria, check_conditions, liapunov_hessian and classify for every
/// equilibrium found.
StabilityReport analyze_stability(const BirkhoffSystem& sys, const NewtonOptions& opts = {});

}  // namespace birk
