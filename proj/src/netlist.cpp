#include "birk/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>

namespace birk {

const char* to_string(BranchKind kind) {
    switch (kind) {
        case BranchKind::Resistor: return "resistor";
        case BranchKind::Inductor: return "inductor";
        case BranchKind::Capacitor: return "capacitor";
    }
    return "?";
}

namespace {

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Token {
    std::string_view text;
    std::size_t column;  // 1-based
};

std::vector<Token> split_tokens(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size()) break;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        out.push_back({line.substr(start, i - start), start + 1});
    }
    return out;
}

std::optional<double> to_real(std::string_view s) {
    std::string buf(s);
    char* end = nullptr;
    double v = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<int> to_int(std::string_view s) {
    if (s.empty() || s.size() > 9) return std::nullopt;
    int v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        v = v * 10 + (c - '0');
    }
    return v;
}

struct PendingIc {
    std::string name;
    double value;
    std::size_t line;
    std::size_t column;
};

int kind_rank(BranchKind k) {
    switch (k) {
        case BranchKind::Resistor: return 0;
        case BranchKind::Inductor: return 1;
        case BranchKind::Capacitor: return 2;
    }
    return 3;
}

}  // namespace

std::string DeviceModel::to_text() const {
    if (is_linear()) return format_real(constant());
    return "expr: " + print_expression(expr());
}

Dual eval_model(const DeviceModel& m, double x) {
    if (m.is_linear()) return {m.constant(), 0.0};
    return evaluate(m.expr(), x);
}

Dual eval_characteristic(BranchKind kind, const DeviceModel& m, double x) {
    if (!m.is_linear()) return evaluate(m.expr(), x);
    double c = m.constant();
    switch (kind) {
        case BranchKind::Resistor: return {c * x, c};
        case BranchKind::Inductor: return {c, 0.0};
        case BranchKind::Capacitor: return {x / c, 1.0 / c};
    }
    return {0.0, 0.0};
}

std::size_t NetlistDoc::count(BranchKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(branches.begin(), branches.end(), [&](const Branch& b) { return b.kind == kind; }));
}

double NetlistDoc::initial_value(const std::string& branch) const {
    auto it = initial_conditions.find(branch);
    return it == initial_conditions.end() ? 0.0 : it->second;
}

std::size_t NetlistDoc::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < branches.size(); ++i)
        if (branches[i].name == name) return i;
    throw std::out_of_range("no branch named '" + std::string(name) + "'");
}

NetlistError::NetlistError(const std::string& msg, std::size_t line, std::size_t column)
    : std::runtime_error(line == 0 ? msg
                                   : "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                         ": " + msg),
      line_(line),
      column_(column) {}

NetlistDoc parse_netlist(std::string_view text) {
    NetlistDoc doc;
    std::vector<Branch> branches;
    std::vector<std::size_t> branch_lines;
    std::vector<PendingIc> ics;
    std::optional<int> declared_nodes;
    std::size_t nodes_line = 0;
    std::optional<int> ref;
    std::size_t ref_line = 0, ref_col = 0;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        auto tokens = split_tokens(line);
        if (tokens.empty()) continue;
        const Token& head = tokens[0];

        if (head.text[0] == '.') {
            if (head.text == ".nodes") {
                if (tokens.size() != 2) throw NetlistError(".nodes expects one integer", line_no, head.column);
                auto n = to_int(tokens[1].text);
                if (!n || *n < 2) throw NetlistError("node count must be an integer >= 2", line_no, tokens[1].column);
                if (declared_nodes) throw NetlistError("duplicate .nodes directive", line_no, head.column);
                declared_nodes = *n;
                nodes_line = line_no;
            } else if (head.text == ".ref") {
                if (tokens.size() != 2) throw NetlistError(".ref expects one node index", line_no, head.column);
                auto n = to_int(tokens[1].text);
                if (!n) throw NetlistError("reference node must be a positive integer", line_no, tokens[1].column);
                if (ref) throw NetlistError("duplicate .ref directive", line_no, head.column);
                ref = *n;
                ref_line = line_no;
                ref_col = tokens[1].column;
            } else if (head.text == ".ic") {
                if (tokens.size() != 3) throw NetlistError(".ic expects a branch name and a value", line_no, head.column);
                auto v = to_real(tokens[2].text);
                if (!v) throw NetlistError("invalid initial value", line_no, tokens[2].column);
                ics.push_back({std::string(tokens[1].text), *v, line_no, tokens[1].column});
            } else {
                throw NetlistError("unknown directive '" + std::string(head.text) + "'", line_no, head.column);
            }
            continue;
        }

        // Branch line: <Name> <from> <to> <model>
        BranchKind kind;
        switch (std::toupper(static_cast<unsigned char>(head.text[0]))) {
            case 'R': kind = BranchKind::Resistor; break;
            case 'L': kind = BranchKind::Inductor; break;
            case 'C': kind = BranchKind::Capacitor; break;
            default:
                throw NetlistError("unknown device letter '" + std::string(1, head.text[0]) + "'", line_no,
                                   head.column);
        }
        if (tokens.size() < 4) throw NetlistError("branch line needs <name> <from> <to> <model>", line_no, head.column);
        auto from = to_int(tokens[1].text);
        if (!from || *from < 1) throw NetlistError("invalid node index", line_no, tokens[1].column);
        auto to = to_int(tokens[2].text);
        if (!to || *to < 1) throw NetlistError("invalid node index", line_no, tokens[2].column);
        if (*from == *to) throw NetlistError("branch connects a node to itself", line_no, tokens[2].column);
        for (const auto& b : branches)
            if (b.name == head.text)
                throw NetlistError("duplicate branch name '" + std::string(head.text) + "'", line_no, head.column);

        DeviceModel model{DeviceModel::LinearConst{0.0}};
        const Token& m = tokens[3];
        if (m.text.substr(0, 5) == "expr:") {
            std::size_t expr_col = m.column + 5;  // 1-based column of the expression text
            std::string_view expr_text = line.substr(expr_col - 1);
            try {
                model.variant = DeviceModel::Expr{parse_expression(expr_text)};
            } catch (const ExprSyntaxError& e) {
                throw NetlistError(e.what(), line_no, expr_col + e.column() - 1);
            }
        } else {
            if (tokens.size() != 4) throw NetlistError("unexpected text after device value", line_no, tokens[4].column);
            auto v = to_real(m.text);
            if (!v) throw NetlistError("invalid device value '" + std::string(m.text) + "'", line_no, m.column);
            if (*v == 0.0) throw NetlistError("device value must be nonzero", line_no, m.column);
            model.variant = DeviceModel::LinearConst{*v};
        }
        branches.push_back({std::string(head.text), kind, *from, *to, std::move(model)});
        branch_lines.push_back(line_no);
    }

    if (branches.empty()) throw NetlistError("no branches", 0, 0);

    int max_node = 0;
    for (const auto& b : branches) max_node = std::max({max_node, b.from_node, b.to_node});
    if (declared_nodes) {
        for (std::size_t i = 0; i < branches.size(); ++i)
            if (std::max(branches[i].from_node, branches[i].to_node) > *declared_nodes)
                throw NetlistError("node index exceeds .nodes " + std::to_string(*declared_nodes), branch_lines[i], 1);
        doc.node_count = *declared_nodes;
    } else {
        doc.node_count = max_node;
    }
    (void)nodes_line;
    doc.reference_node = ref.value_or(doc.node_count);
    if (doc.reference_node < 1 || doc.reference_node > doc.node_count)
        throw NetlistError("reference node out of range", ref_line, ref_col);

    // Stable reorder into resistor, inductor, capacitor blocks.
    std::vector<std::size_t> order(branches.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return kind_rank(branches[a].kind) < kind_rank(branches[b].kind);
    });
    for (std::size_t i : order) doc.branches.push_back(branches[i]);
    doc.original_index = order;

    for (const auto& ic : ics) {
        auto it = std::find_if(doc.branches.begin(), doc.branches.end(),
                               [&](const Branch& b) { return b.name == ic.name; });
        if (it == doc.branches.end())
            throw NetlistError(".ic names unknown branch '" + ic.name + "'", ic.line, ic.column);
        if (it->kind == BranchKind::Resistor)
            throw NetlistError(".ic is not allowed on resistor '" + ic.name + "'", ic.line, ic.column);
        if (!doc.initial_conditions.emplace(ic.name, ic.value).second)
            throw NetlistError("duplicate .ic for '" + ic.name + "'", ic.line, ic.column);
    }
    return doc;
}

std::string format_netlist(const NetlistDoc& doc) {
    std::ostringstream out;
    out << ".nodes " << doc.node_count << "\n.ref " << doc.reference_node << "\n";
    for (const auto& b : doc.branches)
        out << b.name << ' ' << b.from_node << ' ' << b.to_node << ' ' << b.model.to_text() << "\n";
    for (const auto& [name, value] : doc.initial_conditions) out << ".ic " << name << ' ' << format_real(value) << "\n";
    return out.str();
}

}  // namespace birk
