#pragma once

#include "birk/graph.hpp"
#include "birk/netlist.hpp"

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace birk {

class ChartError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Affine chart x = basis q + offset of the configuration space, the branch
/// charges x with incidence^T x = constants.
struct ConfigSpace {
    IntMatrix basis;              // branches x loops
    Eigen::MatrixXd offset_map;   // branches x independent nodes, offset = offset_map * constants
    Eigen::VectorXd offset;       // branches
    Eigen::VectorXd constants;    // independent nodes
    /// Branches whose charges are the coordinates q (q[k] = x[coord_branches[k]]).
    /// Empty when the chart was built from an arbitrary basis of the kernel.
    std::vector<std::size_t> coord_branches;

    std::size_t dim() const { return basis.cols(); }
    Eigen::MatrixXd basis_real() const;
    Eigen::VectorXd point(const Eigen::VectorXd& q) const;
};

/// Solves incidence^T x = constants by exact elimination. Pivots are chosen
/// left to right among eligible columns; the remaining columns become q. With
/// `coords`, exactly those branches are the coordinates, in the given order.
ConfigSpace build_chart(const CircuitGraph& g, const Eigen::VectorXd& constants,
                        const std::optional<std::vector<std::size_t>>& coords = std::nullopt);

/// Chart with a caller-supplied kernel basis (for example the loop matrix, or
/// the loop matrix times a unimodular matrix). The offset is the particular
/// solution of the default chart.
ConfigSpace build_chart_with_basis(const CircuitGraph& g, const Eigen::VectorXd& constants, const IntMatrix& basis);

/// Branch indices named as "x5" (1-based position) or by branch name.
std::vector<std::size_t> parse_coordinate_list(const std::string& list, const NetlistDoc& doc);

/// x(0): capacitor charges from the netlist, zero on every other branch.
Eigen::VectorXd initial_branch_charges(const NetlistDoc& doc);

/// incidence^T x(0).
Eigen::VectorXd initial_constants(const NetlistDoc& doc, const CircuitGraph& g);

class InitialConditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InitialState {
    Eigen::VectorXd constants;
    Eigen::VectorXd q0;
    Eigen::VectorXd qdot0;
    double current_residual = 0.0;
    /// Inductor rows of the basis are rank deficient: qdot0 is the minimum-norm fit.
    bool qdot_underdetermined = false;
};

/// Maps netlist initial data into chart coordinates. The chart must have
/// been built with constants = initial_constants(doc, g).
InitialState initial_state(const NetlistDoc& doc, const CircuitGraph& g, const ConfigSpace& cs);

struct DegeneracyReport {
    bool capacitor_loop_detected = false;  // mass form singular
    bool inductor_loop_detected = false;   // stiffness form singular
    Eigen::VectorXd null_vector;           // q-space direction of the first failure
    std::vector<std::string> loop_branches;
    double mass_determinant = 0.0;
    std::optional<double> stiffness_determinant;  // linear networks only

    bool degenerate() const { return capacitor_loop_detected || inductor_loop_detected; }
    std::string describe() const;
};

/// Mass form: sum over inductors of L row row^T (L(0) for nonlinear ones).
/// Stiffness form, linear networks only: sum over capacitors of row row^T / C.
DegeneracyReport check_degeneracy(const ConfigSpace& cs, const NetlistDoc& doc);

}  // namespace birk
