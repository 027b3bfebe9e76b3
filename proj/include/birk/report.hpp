#pragma once

#include "birk/birkhoffian.hpp"
#include "birk/configspace.hpp"
#include "birk/graph.hpp"
#include "birk/netlist.hpp"
#include "birk/sim.hpp"
#include "birk/stability.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace birk {

using Json = nlohmann::ordered_json;

/// Everything up to and including the degeneracy check. `system` is only
/// assembled for nondegenerate networks.
struct Pipeline {
    NetlistDoc doc;
    CircuitGraph graph;
    ConfigSpace chart;
    DegeneracyReport degeneracy;
    std::optional<BirkhoffSystem> system;
    std::optional<InitialState> initial;
};

/// parse -> graph -> chart (constants from the initial data) -> degeneracy -> assemble.
Pipeline run_front_end(std::string_view netlist_text, const std::string& coords = "");

Json matrix_json(const IntMatrix& m);
Json matrix_json(const Eigen::MatrixXd& m);
Json vector_json(const Eigen::VectorXd& v);

Json graph_json(const CircuitGraph& g);
Json chart_json(const ConfigSpace& cs, const NetlistDoc& doc);
Json degeneracy_json(const DegeneracyReport& d);
Json equilibria_json(const EquilibriumSearch& search);
Json stability_json(const StabilityReport& rep);
Json monotone_json(const MonotoneReport& rep, const Trajectory& traj);

/// Full analysis report; `stability` is absent for degenerate networks.
Json analysis_json(const Pipeline& p, const std::optional<StabilityReport>& stability);

/// Incidence, loop matrix, their product, chart basis and offset map as
/// space-separated rows.
std::string matrices_text(const Pipeline& p);

}  // namespace birk
