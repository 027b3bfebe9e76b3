#pragma once

#include "birk/int_matrix.hpp"
#include "birk/report.hpp"

#include <random>
#include <string>

namespace testing_support {

/// Device models of the six-branch example network (R1, L1, L2, C1, C2, C3
/// over nodes 1..5, reference node 5). Each entry is a netlist model field.
struct SixBranch {
    std::string r1 = "1", l1 = "1", l2 = "1", c1 = "1", c2 = "1", c3 = "1";
    std::string directives;  // extra lines such as ".ic C1 1"
    bool with_resistor = true;
};

std::string six_branch_netlist(const SixBranch& devices = {});

inline constexpr const char* kUnitLcLoop = "L1 1 2 1\nC1 2 1 1\n.ic C1 1\n";
inline constexpr const char* kCubicLoop = "L1 1 2 1\nC1 2 1 expr: x^3 - x\n";

/// Front end with the example's own chart (coordinates C2, C3).
birk::Pipeline six_branch_pipeline(const SixBranch& devices = {});

struct NetworkOptions {
    bool resistors = false;
    bool nonlinear = false;
    bool resistor_offset = false;  // some resistor has R(0) != 0
    int max_loops = 4;
    int max_branches = 12;
};

/// Random connected graph with b <= max_branches, every branch kind random.
/// Degenerate networks are allowed.
std::string random_graph_netlist(std::mt19937_64& rng, int max_branches);

/// Random nondegenerate network (retries until the mass and stiffness forms
/// are regular) with random initial charges.
std::string random_network(std::mt19937_64& rng, const NetworkOptions& opts);

/// Product of random elementary integer column operations and sign flips.
birk::IntMatrix random_unimodular(std::mt19937_64& rng, std::size_t size);

Eigen::VectorXd random_vector(std::mt19937_64& rng, std::size_t size, double box);

}  // namespace testing_support
