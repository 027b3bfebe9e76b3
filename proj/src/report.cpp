#include "birk/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace birk {

namespace {

std::string shortest(double v) {
    if (v == std::round(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", v == 0.0 ? 0.0 : v);
        return buf;
    }
    char buf[32];
    for (int p = 1; p <= 17; ++p) {
        std::snprintf(buf, sizeof buf, "%.*g", p, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string rows_text(const Eigen::MatrixXd& m) {
    std::ostringstream out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << shortest(m(i, j));
        out << '\n';
    }
    return out.str();
}

Json conditions_json(const ConditionSet& set) {
    Json out = Json::object();
    for (const auto& c : set) out[c.name] = to_string(c.status);
    return out;
}

Json condition_details_json(const ConditionSet& set) {
    Json out = Json::object();
    for (const auto& c : set)
        if (!c.detail.empty()) out[c.name] = c.detail;
    return out;
}

Json verdict_json(const StabilityVerdict& v) {
    return Json{{"classification", to_string(v.cls)},
                {"conditions", conditions_json(v.conditions)},
                {"condition_details", condition_details_json(v.conditions)},
                {"hessian", matrix_json(v.hessian)},
                {"min_eigenvalue", v.hessian_min_eigenvalue},
                {"notes", v.notes}};
}

}  // namespace

Pipeline run_front_end(std::string_view netlist_text, const std::string& coords) {
    Pipeline p;
    p.doc = parse_netlist(netlist_text);
    p.graph = build_graph(p.doc);
    std::optional<std::vector<std::size_t>> order;
    if (!coords.empty()) order = parse_coordinate_list(coords, p.doc);
    p.chart = build_chart(p.graph, initial_constants(p.doc, p.graph), order);
    p.degeneracy = check_degeneracy(p.chart, p.doc);
    if (!p.degeneracy.degenerate()) {
        p.system = assemble(p.chart, p.doc);
        p.initial = initial_state(p.doc, p.graph, p.chart);
    }
    return p;
}

Json matrix_json(const IntMatrix& m) {
    Json out = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

Json matrix_json(const Eigen::MatrixXd& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

Json vector_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Json graph_json(const CircuitGraph& g) {
    return Json{{"b", g.branch_count},
                {"n", g.independent_nodes},
                {"m", g.loop_count},
                {"rank_B", rank(g.incidence)},
                {"rank_A", rank(g.loop_matrix)},
                {"tellegen", check_tellegen(g.incidence, g.loop_matrix)},
                {"B", matrix_json(g.incidence)},
                {"A", matrix_json(g.loop_matrix)}};
}

Json chart_json(const ConfigSpace& cs, const NetlistDoc& doc) {
    Json coords = Json::array();
    for (std::size_t i : cs.coord_branches) coords.push_back(doc.branches[i].name);
    return Json{{"coordinates", coords},
                {"N", matrix_json(cs.basis)},
                {"K_of_c", matrix_json(cs.offset_map)},
                {"c", vector_json(cs.constants)},
                {"K", vector_json(cs.offset)}};
}

Json degeneracy_json(const DegeneracyReport& d) {
    Json dets{{"mass", d.mass_determinant}};
    dets["stiffness"] = d.stiffness_determinant ? Json(*d.stiffness_determinant) : Json(nullptr);
    return Json{{"degenerate", d.degenerate()},
                {"capacitor_loop_detected", d.capacitor_loop_detected},
                {"inductor_loop_detected", d.inductor_loop_detected},
                {"null_vector", vector_json(d.null_vector)},
                {"determinant_values", dets},
                {"loop_branches", d.loop_branches},
                {"diagnostic", d.describe()}};
}

Json equilibria_json(const EquilibriumSearch& search) {
    Json list = Json::array();
    for (const auto& e : search.equilibria)
        list.push_back(Json{{"q_e", vector_json(e.q_e)}, {"residual", e.residual}, {"seeds", e.basin_hint.size()}});
    return Json{{"equilibria", list}, {"diagnostics", search.diagnostics}};
}

Json stability_json(const StabilityReport& rep) {
    Json out{{"case", to_string(rep.case_tag)}, {"shifted_energy", rep.shifted_energy}};
    Json list = Json::array();
    for (const auto& r : rep.results) {
        Json item{{"q_e", vector_json(r.equilibrium.q_e)}, {"residual", r.equilibrium.residual}};
        item.update(verdict_json(r.verdict));
        list.push_back(std::move(item));
    }
    out["equilibria"] = list;
    if (!rep.results.empty()) out.update(verdict_json(rep.results.front().verdict));
    std::vector<std::string> notes = rep.notes;
    if (!rep.results.empty())
        for (const auto& n : rep.results.front().verdict.notes) notes.push_back(n);
    out["notes"] = notes;
    return out;
}

Json monotone_json(const MonotoneReport& rep, const Trajectory& traj) {
    Json out{{"passed", rep.passed},
             {"samples", traj.size()},
             {"t_final", traj.times.empty() ? 0.0 : traj.times.back()},
             {"truncated", traj.truncated},
             {"max_drift", rep.max_drift},
             {"max_increase", rep.max_increase},
             {"max_rate_mismatch", rep.max_rate_mismatch}};
    out["first_violation"] = rep.first_violation ? Json(*rep.first_violation) : Json(nullptr);
    if (!rep.detail.empty()) out["detail"] = rep.detail;
    if (!traj.diagnostic.empty()) out["diagnostic"] = traj.diagnostic;
    return out;
}

Json analysis_json(const Pipeline& p, const std::optional<StabilityReport>& stability) {
    Json out{{"netlist", format_netlist(p.doc)},
             {"graph", graph_json(p.graph)},
             {"chart", chart_json(p.chart, p.doc)},
             {"degeneracy", degeneracy_json(p.degeneracy)}};
    if (p.initial) {
        out["initial_state"] = Json{{"q0", vector_json(p.initial->q0)},
                                    {"qdot0", vector_json(p.initial->qdot0)},
                                    {"qdot_underdetermined", p.initial->qdot_underdetermined}};
    }
    if (stability) {
        Json s = stability_json(*stability);
        for (auto it = s.begin(); it != s.end(); ++it) out[it.key()] = it.value();
    }
    return out;
}

std::string matrices_text(const Pipeline& p) {
    std::ostringstream out;
    out << "B\n" << p.graph.incidence.to_text() << "A\n" << p.graph.loop_matrix.to_text();
    out << "AtB\n" << (p.graph.loop_matrix.transpose() * p.graph.incidence).to_text() << "N\n" << p.chart.basis.to_text();
    out << "K_of_c\n" << rows_text(p.chart.offset_map);
    out << "coordinates";
    for (std::size_t i : p.chart.coord_branches) out << ' ' << p.doc.branches[i].name;
    out << "\nbranches";
    for (const auto& br : p.doc.branches) out << ' ' << br.name;
    out << '\n';
    return out.str();
}

}  // namespace birk
