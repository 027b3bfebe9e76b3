#include "birk/netlist.hpp"
#include "networks.hpp"

#include <catch_amalgamated.hpp>

#include <random>
#include <set>

using namespace birk;
using testing_support::six_branch_netlist;

TEST_CASE("six-branch example parses into R, L, C blocks", "[netlist]") {
    NetlistDoc doc = parse_netlist(six_branch_netlist());
    CHECK(doc.branches.size() == 6);
    CHECK(doc.count(BranchKind::Resistor) == 1);
    CHECK(doc.count(BranchKind::Inductor) == 2);
    CHECK(doc.count(BranchKind::Capacitor) == 3);
    CHECK(doc.node_count == 5);
    CHECK(doc.reference_node == 5);
    std::vector<std::string> names;
    for (const auto& b : doc.branches) names.push_back(b.name);
    CHECK(names == std::vector<std::string>{"R1", "L1", "L2", "C1", "C2", "C3"});
}

TEST_CASE("empty branch list is rejected", "[netlist]") {
    CHECK_THROWS_WITH(parse_netlist(""), Catch::Matchers::ContainsSubstring("no branches"));
    CHECK_THROWS_WITH(parse_netlist("# only a comment\n.nodes 3\n"), Catch::Matchers::ContainsSubstring("no branches"));
}

TEST_CASE("expression model on a capacitor line", "[netlist]") {
    NetlistDoc doc = parse_netlist("C1 1 2 expr: x^3 + x\nL1 2 1 1\n");
    const Branch& c = doc.branches[doc.index_of("C1")];
    REQUIRE_FALSE(c.model.is_linear());
    Dual d = eval_model(c.model, 2.0);
    CHECK(d.value == 10.0);
    CHECK(d.deriv == 13.0);
}

TEST_CASE("linear model evaluates to its constant", "[netlist]") {
    NetlistDoc doc = parse_netlist("L1 1 2 2.5\nC1 2 1 1\n");
    Dual d = eval_model(doc.branches[0].model, 7.0);
    CHECK(d.value == 2.5);
    CHECK(d.deriv == 0.0);
}

TEST_CASE("device laws for linear constants", "[netlist]") {
    DeviceModel two{DeviceModel::LinearConst{2.0}};
    CHECK(eval_characteristic(BranchKind::Resistor, two, 3.0).value == 6.0);
    CHECK(eval_characteristic(BranchKind::Resistor, two, 3.0).deriv == 2.0);
    CHECK(eval_characteristic(BranchKind::Inductor, two, 3.0).value == 2.0);
    CHECK(eval_characteristic(BranchKind::Capacitor, two, 3.0).value == 1.5);
    CHECK(eval_characteristic(BranchKind::Capacitor, two, 3.0).deriv == 0.5);
}

TEST_CASE("kind comes from the leading letter in either case", "[netlist]") {
    NetlistDoc doc = parse_netlist("c1 1 2 1\nl1 2 1 1\nr9 1 2 3\n");
    CHECK(doc.branches[0].kind == BranchKind::Resistor);
    CHECK(doc.branches[1].kind == BranchKind::Inductor);
    CHECK(doc.branches[2].kind == BranchKind::Capacitor);
}

TEST_CASE("malformed netlists", "[netlist]") {
    auto rejects = [](const std::string& text, const std::string& needle) {
        INFO(text);
        CHECK_THROWS_WITH(parse_netlist(text), Catch::Matchers::ContainsSubstring(needle));
    };
    rejects("X1 1 2 1\n", "line 1");
    rejects("L1 1 2 1\nL1 2 1 1\n", "duplicate");
    rejects("L1 1 1 1\nC1 1 2 1\n", "self");
    rejects("L1 1 2 1\nC1 2 1 1\n.ref 7\n", "reference");
    rejects("R1 1 2 1\nL1 1 2 1\nC1 2 1 1\n.ic R1 1\n", "resistor");
    rejects("L1 1 2 1\nC1 2 1 1\n.ic C9 1\n", "C9");
    rejects("L1 1 2 0\nC1 2 1 1\n", "line 1");
    rejects("L1 1 2 1\nC1 2 1 expr: x +\n", "line 2");
    rejects(".nodes 2\nL1 1 3 1\nC1 2 1 1\n", "line 2");
    rejects("L1 1 2\n", "line 1");
    rejects(".bogus 3\nL1 1 2 1\n", "line 1");
}

TEST_CASE("initial conditions default to zero", "[netlist]") {
    NetlistDoc doc = parse_netlist("L1 1 2 1\nC1 2 1 1\n.ic L1 0.5\n");
    CHECK(doc.initial_value("L1") == 0.5);
    CHECK(doc.initial_value("C1") == 0.0);
}

TEST_CASE("normalization is a stable bijection that keeps endpoints", "[netlist]") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        std::string text = testing_support::random_graph_netlist(rng, 14);
        NetlistDoc doc = parse_netlist(text);
        // Recover the original line order from the text.
        std::vector<std::tuple<std::string, int, int>> lines;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '.') continue;
            std::istringstream ls(line);
            std::string name;
            int a, b;
            ls >> name >> a >> b;
            lines.emplace_back(name, a, b);
        }
        REQUIRE(doc.original_index.size() == doc.branches.size());
        std::set<std::size_t> seen(doc.original_index.begin(), doc.original_index.end());
        CHECK(seen.size() == lines.size());
        for (std::size_t i = 0; i < doc.branches.size(); ++i) {
            const auto& [name, a, b] = lines[doc.original_index[i]];
            CHECK(doc.branches[i].name == name);
            CHECK(doc.branches[i].from_node == a);
            CHECK(doc.branches[i].to_node == b);
            if (i > 0) {
                CHECK(static_cast<int>(doc.branches[i - 1].kind) <= static_cast<int>(doc.branches[i].kind));
                if (doc.branches[i - 1].kind == doc.branches[i].kind)
                    CHECK(doc.original_index[i - 1] < doc.original_index[i]);
            }
        }
    }
}

TEST_CASE("formatting round-trips through the parser", "[netlist]") {
    NetlistDoc doc = parse_netlist(six_branch_netlist({"expr: x^3", "expr: 1 + x^2", "1", "2", "expr: x + x^3", "0.5",
                                                       ".ic C1 0.25\n.ic L2 -1\n"}));
    NetlistDoc again = parse_netlist(format_netlist(doc));
    CHECK(format_netlist(again) == format_netlist(doc));
    CHECK(again.initial_value("C1") == 0.25);
    CHECK(again.initial_value("L2") == -1.0);
    CHECK(again.reference_node == 5);
}
