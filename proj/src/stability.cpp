#include "birk/stability.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace birk {

namespace {

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

struct NewtonResult {
    bool converged = false;
    Eigen::VectorXd q;
    double residual = 0.0;
};

// Damped Newton on residual(q) = Q(q, 0, 0) with Armijo backtracking on |residual|^2 / 2.
NewtonResult newton(const BirkhoffSystem& sys, Eigen::VectorXd q, const NewtonOptions& opts) {
    auto merit = [&](const Eigen::VectorXd& x, Eigen::VectorXd& residual) -> std::optional<double> {
        try {
            residual = sys.equilibrium_residual(x);
        } catch (const ExprDomainError&) {
            return std::nullopt;
        }
        if (!residual.allFinite()) return std::nullopt;
        return 0.5 * residual.squaredNorm();
    };

    NewtonResult res;
    Eigen::VectorXd residual;
    auto phi = merit(q, residual);
    if (!phi) return res;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        if (*phi == 0.0) break;
        Eigen::MatrixXd jacobian;
        try {
            jacobian = sys.capacitive_jacobian(q);
        } catch (const ExprDomainError&) {
            return res;
        }
        Eigen::VectorXd step = jacobian.completeOrthogonalDecomposition().solve(-residual);
        Eigen::VectorXd grad = jacobian.transpose() * residual;
        double slope = grad.dot(step);
        if (!step.allFinite() || !(slope < 0.0)) {
            step = -grad;
            slope = -grad.squaredNorm();
            if (slope == 0.0) break;
        }

        double t = 1.0;
        Eigen::VectorXd trial_residual;
        std::optional<double> trial_phi;
        Eigen::VectorXd trial;
        bool accepted = false;
        for (int k = 0; k <= opts.max_halvings; ++k, t *= 0.5) {
            trial = q + t * step;
            trial_phi = merit(trial, trial_residual);
            if (trial_phi && *trial_phi <= *phi + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        double moved = inf_norm(trial - q);
        q = trial;
        residual = trial_residual;
        phi = trial_phi;
        if (inf_norm(residual) <= equilibrium_tolerance(q) && moved <= 1e-14 * (1.0 + inf_norm(q))) break;
    }
    res.q = q;
    res.residual = inf_norm(residual);
    res.converged = res.residual <= equilibrium_tolerance(q);
    return res;
}

std::vector<Eigen::VectorXd> seeds(std::size_t dim, const NewtonOptions& opts) {
    std::vector<Eigen::VectorXd> out;
    out.push_back(Eigen::VectorXd::Zero(dim));
    for (std::size_t i = 0; i < dim; ++i)
        for (double v : {1.0, -1.0, 10.0, -10.0}) {
            Eigen::VectorXd s = Eigen::VectorXd::Zero(dim);
            s(i) = v;
            out.push_back(s);
        }
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> dist(-opts.random_box, opts.random_box);
    for (int k = 0; k < opts.random_starts; ++k) {
        Eigen::VectorXd s(dim);
        for (std::size_t i = 0; i < dim; ++i) s(i) = dist(rng);
        out.push_back(s);
    }
    return out;
}

ConditionStatus combine(ConditionStatus a, ConditionStatus b) {
    if (a == ConditionStatus::Fails || b == ConditionStatus::Fails) return ConditionStatus::Fails;
    if (a == ConditionStatus::Sampled || b == ConditionStatus::Sampled) return ConditionStatus::Sampled;
    return ConditionStatus::Holds;
}

// Applies `pred` to each device; the first failure is recorded in the detail.
template <typename Pred>
Condition all_devices(const char* name, const std::vector<DeviceTerm>& terms, Pred pred) {
    Condition c{name, ConditionStatus::Holds, ""};
    for (const auto& t : terms) {
        std::string why;
        ConditionStatus s;
        try {
            s = pred(t, why);
        } catch (const ExprDomainError& e) {
            s = ConditionStatus::Fails;
            why = e.what();
        }
        if (s == ConditionStatus::Fails && c.status != ConditionStatus::Fails) c.detail = t.name + ": " + why;
        c.status = combine(c.status, s);
    }
    return c;
}

ConditionStatus positive(double v, const std::string& what, std::string& why) {
    if (v > 0.0) return ConditionStatus::Holds;
    why = what + " = " + fmt(v) + " is not positive";
    return ConditionStatus::Fails;
}

}  // namespace

double equilibrium_tolerance(const Eigen::VectorXd& q_e) { return 1e-10 * (1.0 + inf_norm(q_e)); }

EquilibriumSearch find_equilibria(const BirkhoffSystem& sys, const NewtonOptions& opts) {
    EquilibriumSearch out;
    std::size_t dim = sys.dim;

    if (is_linear(sys.case_tag)) {
        Eigen::MatrixXd stiffness = sys.capacitive_jacobian(Eigen::VectorXd::Zero(dim));
        Eigen::FullPivLU<Eigen::MatrixXd> lu(stiffness);
        double scale = stiffness.cwiseAbs().maxCoeff();
        if (scale == 0.0 || std::abs(lu.determinant()) <= 1e-12 * std::pow(scale, static_cast<double>(dim)))
            throw std::runtime_error("stiffness matrix is singular; the equilibrium is not unique");
        Eigen::VectorXd rhs = -(sys.const_term + sys.resistive(Eigen::VectorXd::Zero(dim)));
        Equilibrium e;
        e.q_e = lu.solve(rhs);
        e.q_e.array() += 0.0;  // no negative zeros in reports
        e.residual = inf_norm(sys.equilibrium_residual(e.q_e));
        out.equilibria.push_back(std::move(e));
        return out;
    }

    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> found;  // (root, seed)
    std::size_t failures = 0;
    for (const auto& s : seeds(dim, opts)) {
        NewtonResult r = newton(sys, s, opts);
        if (r.converged)
            found.emplace_back(r.q, s);
        else
            ++failures;
    }
    std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
    for (auto& [root, seed] : found) {
        auto hit = std::find_if(out.equilibria.begin(), out.equilibria.end(), [&](const Equilibrium& e) {
            return (e.q_e - root).norm() <= opts.merge_distance;
        });
        if (hit != out.equilibria.end()) {
            hit->basin_hint.push_back(seed);
            continue;
        }
        Equilibrium e;
        e.q_e = root;
        e.q_e.array() += 0.0;
        e.residual = inf_norm(sys.equilibrium_residual(root));
        e.basin_hint.push_back(seed);
        out.equilibria.push_back(std::move(e));
    }
    if (out.equilibria.empty())
        out.diagnostics.push_back("Newton did not converge from any of the " +
                                  std::to_string(failures) + " starting points");
    else if (failures > 0)
        out.diagnostics.push_back(std::to_string(failures) + " starting points did not converge");
    return out;
}

const char* to_string(ConditionStatus s) {
    switch (s) {
        case ConditionStatus::Holds: return "holds";
        case ConditionStatus::Fails: return "fails";
        case ConditionStatus::Sampled: return "sampled";
    }
    return "?";
}

std::optional<ConditionStatus> find_condition(const ConditionSet& set, const std::string& name) {
    for (const auto& c : set)
        if (c.name == name) return c.status;
    return std::nullopt;
}

std::vector<double> sector_grid() {
    std::vector<double> grid;
    for (int sign : {-1, 1})
        for (int i = 0; i <= 60; ++i) grid.push_back(sign * std::pow(10.0, -6.0 + 9.0 * i / 60.0));
    return grid;
}

ConditionStatus check_sector(const DeviceTerm& resistor, bool shifted, std::string* detail) {
    auto report = [&](const std::string& s) {
        if (detail) *detail = s;
        return ConditionStatus::Fails;
    };
    if (resistor.model.is_linear()) {
        double r = resistor.model.constant();
        return r > 0.0 ? ConditionStatus::Holds : report("R = " + fmt(r) + " is not positive");
    }
    Dual at_zero = resistor.characteristic(0.0);
    double offset = shifted ? at_zero.value : 0.0;
    if (at_zero.deriv < 0.0) return report("R'(0) = " + fmt(at_zero.deriv) + " < 0");
    for (double x : sector_grid()) {
        double v = x * (resistor.characteristic(x).value - offset);
        if (!(v > 0.0))
            return report(std::string(shifted ? "x (R(x) - R(0))" : "x R(x)") + " = " + fmt(v) + " at x = " + fmt(x));
    }
    return ConditionStatus::Sampled;
}

ConditionSet check_conditions(const BirkhoffSystem& sys, const Eigen::VectorXd& q_e) {
    ConditionSet out;
    if (is_linear(sys.case_tag)) {
        out.push_back(all_devices(cond::kInductancePositive, sys.inductors, [](const DeviceTerm& t, std::string& why) {
            return positive(t.model.constant(), "L", why);
        }));
        out.push_back(all_devices(cond::kCapacitancePositive, sys.capacitors, [](const DeviceTerm& t, std::string& why) {
            return positive(t.model.constant(), "C", why);
        }));
        if (!is_lc(sys.case_tag))
            out.push_back(all_devices(cond::kResistancePositive, sys.resistors,
                                      [](const DeviceTerm& t, std::string& why) {
                                          return positive(t.model.constant(), "R", why);
                                      }));
        return out;
    }

    out.push_back(all_devices(cond::kInductanceAtZeroPositive, sys.inductors,
                              [](const DeviceTerm& t, std::string& why) {
                                  return positive(t.characteristic(0.0).value, "L(0)", why);
                              }));
    out.push_back(all_devices(cond::kCapacitorSlopePositive, sys.capacitors,
                              [&](const DeviceTerm& t, std::string& why) {
                                  double s = t.argument(q_e);
                                  return positive(t.characteristic(s).deriv, "C'(" + fmt(s) + ")", why);
                              }));
    if (is_lc(sys.case_tag)) return out;

    out.push_back(all_devices(cond::kResistorZeroAtOrigin, sys.resistors, [](const DeviceTerm& t, std::string& why) {
        double r0 = t.characteristic(0.0).value;
        if (r0 == 0.0) return ConditionStatus::Holds;
        why = "R(0) = " + fmt(r0);
        return ConditionStatus::Fails;
    }));
    out.push_back(all_devices(cond::kResistorSector, sys.resistors, [](const DeviceTerm& t, std::string& why) {
        return check_sector(t, false, &why);
    }));
    out.push_back(all_devices(cond::kResistorShiftedSector, sys.resistors, [](const DeviceTerm& t, std::string& why) {
        return check_sector(t, true, &why);
    }));
    return out;
}

bool is_positive_definite(const Eigen::MatrixXd& matrix) {
    Eigen::Index n = matrix.rows();
    double trace = matrix.trace();
    if (n == 0 || !(trace > 0.0)) return false;
    double tol = 1e-12 * trace / static_cast<double>(n);
    Eigen::MatrixXd factor = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = matrix(j, j) - factor.row(j).head(j).squaredNorm();
        if (!(pivot > tol)) return false;
        factor(j, j) = std::sqrt(pivot);
        for (Eigen::Index i = j + 1; i < n; ++i)
            factor(i, j) = (matrix(i, j) - factor.row(i).head(j).dot(factor.row(j).head(j))) / factor(j, j);
    }
    return true;
}

LiapunovHessian liapunov_hessian(const BirkhoffSystem& sys, const EnergyFunction& energy,
                                 const Eigen::VectorXd& q_e) {
    std::size_t dim = sys.dim;
    LiapunovHessian out;
    out.hessian = Eigen::MatrixXd::Zero(2 * dim, 2 * dim);
    for (const auto& t : sys.inductors)
        out.hessian.topLeftCorner(dim, dim) += t.characteristic(0.0).value * t.row * t.row.transpose();
    for (const auto& t : sys.capacitors)
        out.hessian.bottomRightCorner(dim, dim) += t.characteristic(t.argument(q_e)).deriv * t.row * t.row.transpose();

    // Central second differences of liapunov(z), z = (qdot, q), around (0, q_e),
    // Richardson-extrapolated from steps h and h/2.
    auto liapunov = [&](const Eigen::VectorXd& z) { return energy.value(z.tail(dim), z.head(dim)); };
    Eigen::VectorXd z0(2 * dim);
    z0 << Eigen::VectorXd::Zero(dim), q_e;
    double v0 = liapunov(z0);
    auto second_differences = [&](double h) {
        Eigen::MatrixXd fd(2 * dim, 2 * dim);
        for (std::size_t i = 0; i < 2 * dim; ++i) {
            Eigen::VectorXd ei = Eigen::VectorXd::Unit(2 * dim, i) * h;
            fd(i, i) = (liapunov(z0 + ei) - 2.0 * v0 + liapunov(z0 - ei)) / (h * h);
            for (std::size_t j = 0; j < i; ++j) {
                Eigen::VectorXd ej = Eigen::VectorXd::Unit(2 * dim, j) * h;
                double v = (liapunov(z0 + ei + ej) - liapunov(z0 + ei - ej) - liapunov(z0 - ei + ej) + liapunov(z0 - ei - ej)) / (4.0 * h * h);
                fd(i, j) = fd(j, i) = v;
            }
        }
        return fd;
    };
    const double h = 1e-3;
    Eigen::MatrixXd fd = (4.0 * second_differences(h / 2) - second_differences(h)) / 3.0;
    double scale = std::max(1.0, out.hessian.cwiseAbs().maxCoeff());
    out.fd_discrepancy = (out.hessian - fd).cwiseAbs().maxCoeff() / scale;
    if (out.fd_discrepancy > 1e-5)
        throw HessianMismatchError("analytic Hessian disagrees with finite differences (relative error " +
                                   fmt(out.fd_discrepancy) + ")");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.hessian, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = eig.eigenvalues().minCoeff();
    out.positive_definite = is_positive_definite(out.hessian);
    return out;
}

const char* to_string(StabilityClass c) {
    switch (c) {
        case StabilityClass::StableCenter: return "StableCenter";
        case StabilityClass::AsymptoticallyStable: return "AsymptoticallyStable";
        case StabilityClass::LocallyAsymptoticallyStable: return "LocallyAsymptoticallyStable";
        case StabilityClass::LocallyStableCenter: return "LocallyStableCenter";
        case StabilityClass::Inconclusive: return "Inconclusive";
    }
    return "?";
}

StabilityVerdict classify(const BirkhoffSystem& sys, const ConditionSet& conditions, const LiapunovHessian& h,
                          bool shifted_energy) {
    StabilityVerdict v;
    v.conditions = conditions;
    v.hessian = h.hessian;
    v.hessian_min_eigenvalue = h.min_eigenvalue;

    auto holds = [&](const char* name) { return find_condition(conditions, name) == ConditionStatus::Holds; };
    auto sampled_true = [&](const char* name) {
        auto s = find_condition(conditions, name);
        return s == ConditionStatus::Holds || s == ConditionStatus::Sampled;
    };

    switch (sys.case_tag) {
        case CaseTag::LinLC:
            if (holds(cond::kInductancePositive) && holds(cond::kCapacitancePositive))
                v.cls = StabilityClass::StableCenter;
            break;
        case CaseTag::LinRLC:
            if (holds(cond::kInductancePositive) && holds(cond::kCapacitancePositive) &&
                holds(cond::kResistancePositive))
                v.cls = StabilityClass::AsymptoticallyStable;
            break;
        case CaseTag::NonlinLC:
            if (holds(cond::kInductanceAtZeroPositive) && holds(cond::kCapacitorSlopePositive) &&
                h.positive_definite)
                v.cls = StabilityClass::LocallyStableCenter;
            break;
        case CaseTag::NonlinRLC: {
            if (!(holds(cond::kInductanceAtZeroPositive) && holds(cond::kCapacitorSlopePositive) &&
                  h.positive_definite))
                break;
            bool zero_at_origin = holds(cond::kResistorZeroAtOrigin) && sampled_true(cond::kResistorSector);
            bool shifted = shifted_energy && sampled_true(cond::kResistorShiftedSector);
            if (zero_at_origin) {
                v.cls = StabilityClass::LocallyAsymptoticallyStable;
            } else if (shifted) {
                v.cls = StabilityClass::LocallyAsymptoticallyStable;
                v.notes.push_back("R(0) != 0: decrease shown with the shifted storage function");
            }
            break;
        }
    }
    if (v.cls == StabilityClass::Inconclusive) {
        for (const auto& c : conditions)
            if (c.status == ConditionStatus::Fails) v.notes.push_back(c.name + " fails: " + c.detail);
        if (!is_linear(sys.case_tag) && !h.positive_definite)
            v.notes.push_back("Liapunov Hessian is not positive definite (min eigenvalue " + fmt(h.min_eigenvalue) +
                              ")");
    }
    return v;
}

StabilityReport analyze_stability(const BirkhoffSystem& sys, const NewtonOptions& opts) {
    StabilityReport rep;
    rep.case_tag = sys.case_tag;
    rep.shifted_energy = needs_shift(sys);
    EnergyFunction energy(sys, rep.shifted_energy);
    EquilibriumSearch search = find_equilibria(sys, opts);
    rep.notes = search.diagnostics;
    for (auto& eq : search.equilibria) {
        ConditionSet conditions = check_conditions(sys, eq.q_e);
        LiapunovHessian h = liapunov_hessian(sys, energy, eq.q_e);
        StabilityVerdict v = classify(sys, conditions, h, rep.shifted_energy);
        rep.results.push_back({std::move(eq), std::move(v)});
    }
    return rep;
}

}  // namespace birk
