#include "birk/energy.hpp"
#include "birk/quadrature.hpp"
#include "networks.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace birk;
using namespace testing_support;

namespace {

double inf(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

std::vector<IdentitySample> random_samples(std::mt19937_64& rng, std::size_t dim, int count, double box) {
    std::vector<IdentitySample> out;
    for (int s = 0; s < count; ++s)
        out.push_back({random_vector(rng, dim, box), random_vector(rng, dim, box), random_vector(rng, dim, box)});
    return out;
}

}  // namespace

TEST_CASE("six-branch storage function and dissipation", "[energy]") {
    LinearSixBranch d{1.5, 0.5, 2.0, 1.25, 0.75, 3.0};
    SixBranch nets{"1.5", "0.5", "2", "1.25", "0.75", "3", ".ic C1 0.6\n"};
    Pipeline p = six_branch_pipeline(nets);
    EnergyModel model = build_energy(*p.system, false);
    REQUIRE(model.dissipation);
    std::mt19937_64 rng(17);
    for (int s = 0; s < 50; ++s) {
        Eigen::VectorXd q = random_vector(rng, 2, 3), qd = random_vector(rng, 2, 3);
        double expected = six_branch_energy(d, 0.6, q, qd);
        CHECK(model.energy.value(q, qd) == Catch::Approx(expected).epsilon(1e-13).margin(1e-13));
        Eigen::VectorXd dissipation = model.dissipation->components(qd);
        CHECK(dissipation(0) == Catch::Approx(1.5 * qd(0)));
        CHECK(dissipation(1) == 0.0);
    }
}

TEST_CASE("energy vanishes at the origin", "[energy]") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 10; ++t) {
        Pipeline p = run_front_end(random_network(rng, {true, true, t % 2 == 1, 4, 12}));
        EnergyFunction E(*p.system, needs_shift(*p.system));
        Eigen::VectorXd z = Eigen::VectorXd::Zero(p.system->dim);
        CHECK(E.kinetic(z) == 0.0);
        CHECK(E.potential(z) == 0.0);
        CHECK(E.value(z, z) == 0.0);
    }
}

TEST_CASE("unit L-C loop energy", "[energy]") {
    Pipeline p = run_front_end("L1 1 2 1\nC1 2 1 1\n");
    EnergyModel model = build_energy(*p.system, false);
    CHECK_FALSE(model.dissipation);
    Eigen::VectorXd q(1), qd(1);
    q << 0.7;
    qd << -1.3;
    CHECK(model.energy.value(q, qd) == Catch::Approx(0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7).epsilon(1e-15));
    CHECK(energy_rate(model, *p.system)(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)) == 0.0);
}

TEST_CASE("identity on the six-branch example at random states", "[energy]") {
    SixBranch nets;
    nets.directives = ".ic C1 0.4\n.ic C3 -0.2\n";
    Pipeline p = six_branch_pipeline(nets);
    EnergyModel model = build_energy(*p.system, false);
    std::mt19937_64 rng(29);
    IdentityReport rep = verify_identity(*p.system, model, random_samples(rng, 2, 100, 3.0), 1e-8, 1e-8);
    CHECK(rep.samples == 100);
    CHECK(rep.passed);
    CHECK(rep.max_residual <= 1e-8);
    CHECK(rep.max_residual_fd <= 1e-8);
}

TEST_CASE("identity with zero velocity and acceleration", "[energy]") {
    Pipeline p = six_branch_pipeline();
    EnergyModel model = build_energy(*p.system, false);
    Eigen::Vector2d z = Eigen::Vector2d::Zero();
    IdentityReport rep = verify_identity(*p.system, model, {{Eigen::Vector2d(0.3, -2.0), z, z}});
    CHECK(rep.max_residual == 0.0);
}

TEST_CASE("identity flags an inconsistent energy", "[energy]") {
    Pipeline p = six_branch_pipeline({"2"});
    Pipeline other = six_branch_pipeline({"2", "3"});  // different L1
    EnergyModel wrong = build_energy(*other.system, false);
    std::mt19937_64 rng(31);
    IdentityReport rep = verify_identity(*p.system, wrong, random_samples(rng, 2, 20, 2.0));
    CHECK_FALSE(rep.passed);
}

TEST_CASE("energy rate examples", "[energy]") {
    Pipeline p = six_branch_pipeline({"2"});
    EnergyModel model = build_energy(*p.system, false);
    CHECK(energy_rate(model, *p.system)(Eigen::Vector2d::Zero(), Eigen::Vector2d(3, 0)) == Catch::Approx(-18.0));

    Pipeline shifted = six_branch_pipeline({"expr: 1 + x"});
    REQUIRE(needs_shift(*shifted.system));
    EnergyModel sm = build_energy(*shifted.system, true);
    for (double a : {-2.0, -0.5, 0.25, 1.0, 3.0}) {
        Eigen::Vector2d q(0.1, -0.3);
        CHECK(energy_rate(sm, *shifted.system)(q, Eigen::Vector2d(a, 0)) == Catch::Approx(-a * a).margin(1e-12));
        CHECK(sm.dissipation->power(Eigen::Vector2d(a, 0)) == Catch::Approx(a * a));
    }
}

TEST_CASE("analytic gradients match central differences", "[energy]") {
    std::mt19937_64 rng(37);
    int points = 0;
    for (int t = 0; t < 20; ++t) {
        Pipeline p = run_front_end(random_network(rng, {t % 2 == 0, true, t % 4 == 0, 4, 12}));
        EnergyFunction E(*p.system, needs_shift(*p.system));
        std::size_t dim = p.system->dim;
        for (int s = 0; s < 10; ++s, ++points) {
            Eigen::VectorXd q = random_vector(rng, dim, 1.5), qd = random_vector(rng, dim, 1.5);
            Eigen::VectorXd gq = E.grad_q(q), gv = E.grad_qdot(qd);
            const double h = 1e-5;
            for (std::size_t i = 0; i < dim; ++i) {
                Eigen::VectorXd e = Eigen::VectorXd::Unit(dim, i) * h;
                double fq = (E.value(q + e, qd) - E.value(q - e, qd)) / (2 * h);
                double fv = (E.value(q, qd + e) - E.value(q, qd - e)) / (2 * h);
                CHECK(std::abs(fq - gq(i)) <= 1e-6 * (1 + std::abs(gq(i))));
                CHECK(std::abs(fv - gv(i)) <= 1e-6 * (1 + std::abs(gv(i))));
            }
        }
    }
    CHECK(points == 200);
}

TEST_CASE("quadrature agrees with closed-form quadratics", "[energy]") {
    SixBranch lin{"1", "0.5", "2", "1.25", "0.75", "3", ".ic C1 0.6\n.ic C2 0.1\n"};
    SixBranch ex{"expr: x", "expr: 0.5 + 0*x", "expr: 2 + 0*x", "expr: x/1.25", "expr: x/0.75", "expr: x/3", lin.directives};
    Pipeline a = six_branch_pipeline(lin), b = six_branch_pipeline(ex);
    EnergyFunction Ea(*a.system, false), Eb(*b.system, false);
    std::mt19937_64 rng(41);
    for (int s = 0; s < 50; ++s) {
        Eigen::VectorXd q = random_vector(rng, 2, 3), qd = random_vector(rng, 2, 3);
        CHECK(std::abs(Ea.value(q, qd) - Eb.value(q, qd)) <= 1e-12 * (1 + std::abs(Ea.value(q, qd))));
    }
    CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0, 1) == Catch::Approx(std::exp(1.0) - 1).epsilon(1e-13));
    CHECK(adaptive_simpson([](double x) { return x; }, 2, 2) == 0.0);
}

TEST_CASE("conservation and power balance at random states", "[energy]") {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 16; ++t) {
        bool rlc = t % 2 == 1;
        Pipeline p = run_front_end(random_network(rng, {rlc, t % 4 >= 2, rlc && t % 8 >= 4, 4, 12}));
        bool shifted = needs_shift(*p.system);
        EnergyModel model = build_energy(*p.system, shifted);
        auto rate = energy_rate(model, *p.system);
        for (int s = 0; s < 20; ++s) {
            Eigen::VectorXd q = random_vector(rng, p.system->dim, 1.5), qd = random_vector(rng, p.system->dim, 1.5);
            double scale = 1 + std::max(inf(q), inf(qd));
            double power = model.dissipation ? model.dissipation->power(qd) : 0.0;
            CHECK(std::abs(rate(q, qd) + power) <= 1e-9 * scale);
            if (model.dissipation) CHECK(power >= 0.0);
        }
    }
}

TEST_CASE("quadrature failure is reported", "[energy]") {
    CHECK_THROWS_AS(adaptive_simpson([](double x) { return std::sin(1 / x); }, 1e-300, 1, 1e-12, 12), QuadratureError);
}
