#include "birk/graph.hpp"
#include "birk/int_matrix.hpp"
#include "networks.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <random>

using namespace birk;

namespace {

const IntMatrix kExampleIncidence{{1, -1, 0, 0}, {0, 0, 0, 1}, {0, 1, -1, 0}, {0, 1, 0, -1}, {-1, 0, 0, 0}, {0, 0, 1, -1}};
const IntMatrix kExampleLoops{{1, 0}, {1, 0}, {0, 1}, {1, -1}, {1, 0}, {0, 1}};

// Rank over the reals through a floating-point factorization, independent of
// the exact elimination under test.
std::size_t float_rank(const IntMatrix& m) {
    Eigen::MatrixXd d(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) d(r, c) = static_cast<double>(m(r, c));
    return static_cast<std::size_t>(Eigen::FullPivLU<Eigen::MatrixXd>(d).rank());
}

}  // namespace

TEST_CASE("incidence matrix of the six-branch example", "[graph]") {
    NetlistDoc doc = parse_netlist(testing_support::six_branch_netlist());
    CHECK(build_incidence(doc) == kExampleIncidence);
}

TEST_CASE("loop matrix spans the same lattice as the hand-drawn loops", "[graph]") {
    CircuitGraph g = build_graph(parse_netlist(testing_support::six_branch_netlist()));
    CHECK(g.branch_count == 6);
    CHECK(g.independent_nodes == 4);
    CHECK(g.loop_count == 2);
    CHECK(integer_column_span_contains(g.loop_matrix, kExampleLoops));
    CHECK(integer_column_span_contains(kExampleLoops, g.loop_matrix));
    CHECK(check_tellegen(kExampleIncidence, kExampleLoops));
}

TEST_CASE("two parallel branches", "[graph]") {
    NetlistDoc doc = parse_netlist("L1 1 2 1\nC1 1 2 1\n");
    CircuitGraph g = build_graph(doc);
    CHECK(g.incidence == IntMatrix{{1}, {1}});
    CHECK(g.loop_matrix.rows() == 2);
    CHECK(g.loop_matrix.cols() == 1);
    bool plus = g.loop_matrix == IntMatrix{{1}, {-1}};
    bool minus = g.loop_matrix == IntMatrix{{-1}, {1}};
    CHECK((plus || minus));
    CHECK(check_tellegen(g.incidence, g.loop_matrix));
}

TEST_CASE("a single sign flip breaks orthogonality", "[graph]") {
    IntMatrix flipped = kExampleLoops;
    flipped(3, 1) = 1;
    CHECK_FALSE(check_tellegen(kExampleIncidence, flipped));
    IntMatrix short_rank{{1, 1}, {1, 1}, {0, 0}, {1, 1}, {1, 1}, {0, 0}};
    CHECK_FALSE(check_tellegen(kExampleIncidence, short_rank));
}

TEST_CASE("topology errors", "[graph]") {
    CHECK_THROWS_AS(build_graph(parse_netlist(".nodes 4\nL1 1 2 1\nC1 2 1 1\nC2 3 4 1\nL2 4 3 1\n")), GraphError);
    CHECK_THROWS_AS(build_graph(parse_netlist(".nodes 3\nL1 1 2 1\nC1 2 1 1\n")), GraphError);
    CHECK_THROWS_WITH(build_graph(parse_netlist("L1 1 2 1\nC1 2 3 1\n")), Catch::Matchers::ContainsSubstring("loop"));
}

TEST_CASE("random connected graphs satisfy the structural identities", "[graph]") {
    std::mt19937_64 rng(2024);
    int built = 0;
    for (int t = 0; t < 200; ++t) {
        std::string text = testing_support::random_graph_netlist(rng, 20);
        NetlistDoc doc = parse_netlist(text);
        CircuitGraph g;
        try {
            g = build_graph(doc);
        } catch (const GraphError&) {
            continue;  // tree: no loop
        }
        ++built;
        INFO(text);
        CHECK(g.branch_count == g.loop_count + g.independent_nodes);
        CHECK(float_rank(g.incidence) == g.independent_nodes);
        CHECK(float_rank(g.loop_matrix) == g.loop_count);
        CHECK((g.loop_matrix.transpose() * g.incidence).is_zero());
        CHECK(check_tellegen(g.incidence, g.loop_matrix));
        for (std::size_t r = 0; r < g.branch_count; ++r) {
            int plus = 0, minus = 0;
            for (std::size_t c = 0; c < g.independent_nodes; ++c) {
                plus += g.incidence(r, c) == 1;
                minus += g.incidence(r, c) == -1;
                CHECK(std::abs(g.incidence(r, c)) <= 1);
            }
            CHECK(plus <= 1);
            CHECK(minus <= 1);
        }
        for (std::size_t r = 0; r < g.branch_count; ++r)
            for (std::size_t c = 0; c < g.loop_count; ++c) CHECK(std::abs(g.loop_matrix(r, c)) <= 1);
    }
    CHECK(built > 150);
}

TEST_CASE("loop matrix is deterministic", "[graph]") {
    std::string text = testing_support::six_branch_netlist();
    CHECK(build_loop_matrix(parse_netlist(text)) == build_loop_matrix(parse_netlist(text)));
}

TEST_CASE("exact integer linear algebra", "[graph]") {
    IntMatrix m{{2, 4, 1}, {1, 2, 0}, {3, 6, 1}};
    CHECK(rank(m) == 2);
    CHECK(determinant(m) == 0);
    CHECK(determinant(IntMatrix{{2, 1}, {1, 2}}) == 3);
    IntMatrix ker = integer_kernel(m);
    REQUIRE(ker.cols() == 1);
    CHECK((m * ker).is_zero());
    auto sol = solve_exact(IntMatrix{{2, 0}, {0, 3}}, {Rational(1), Rational(1)});
    REQUIRE(sol);
    CHECK((*sol)[0] == Rational(1, 2));
    CHECK((*sol)[1] == Rational(1, 3));
    CHECK_FALSE(solve_exact(IntMatrix{{1}, {1}}, {Rational(1), Rational(2)}));
    CHECK_FALSE(integer_column_span_contains(IntMatrix{{2}, {0}}, IntMatrix{{1}, {0}}));
}
