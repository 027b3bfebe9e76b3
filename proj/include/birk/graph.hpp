#pragma once

#include "birk/int_matrix.hpp"
#include "birk/netlist.hpp"

#include <stdexcept>
#include <vector>

namespace birk {

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Oriented circuit graph. Rows of the incidence and loop matrices follow
/// the normalized branch order; incidence columns are the nodes in index
/// order with the reference node removed.
struct CircuitGraph {
    std::size_t branch_count = 0;
    std::size_t independent_nodes = 0;  // nodes minus the reference
    std::size_t loop_count = 0;
    IntMatrix incidence;                // branches x independent nodes
    IntMatrix loop_matrix;              // branches x loops
    std::vector<std::size_t> spanning_tree;  // branch indices, ascending
    std::vector<int> node_of_column;         // node index of each incidence column
};

/// +1 where the branch leaves a node, -1 where it enters.
IntMatrix build_incidence(const NetlistDoc& doc);

/// Fundamental cycles of a BFS spanning tree, one column per co-tree branch,
/// oriented along that branch.
IntMatrix build_loop_matrix(const NetlistDoc& doc);

/// Incidence, loop matrix and tree; throws GraphError if the graph has no loop.
CircuitGraph build_graph(const NetlistDoc& doc);

/// loops^T incidence = 0 and rank(incidence) + rank(loops) = branch count.
bool check_tellegen(const IntMatrix& incidence, const IntMatrix& loops);

}  // namespace birk
