#include "networks.hpp"

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + " " + BIRK_CLI + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    std::string out;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string data(const std::string& name) { return std::string(BIRK_DATA_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& contents) {
    fs::path dir = fs::temp_directory_path() / "birk_cli_tests";
    fs::create_directories(dir);
    fs::path p = dir / name;
    std::ofstream(p) << contents;
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("analyze: linear RLC network", "[cli]") {
    Result r = run("analyze " + data("rlc_linear.net"));
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["classification"] == "AsymptoticallyStable");
    CHECK(j["case"] == "LinRLC");
    CHECK(j["equilibria"][0]["q_e"] == json::array({0.0, 0.0}));
    CHECK(j["graph"]["tellegen"] == true);
    CHECK(j["graph"]["b"] == 6);
    CHECK(j["degeneracy"]["capacitor_loop_detected"] == false);
    CHECK(j["conditions"]["resistance_positive"] == "holds");
    CHECK(j.contains("hessian"));
    CHECK(j.contains("min_eigenvalue"));
    CHECK(j.contains("notes"));
}

TEST_CASE("analyze: capacitor loop exits with code 2", "[cli]") {
    Result r = run("analyze " + data("capacitor_loop.net"));
    CHECK(r.code == 2);
    json j = json::parse(r.out);
    CHECK(j["degeneracy"]["capacitor_loop_detected"] == true);
    CHECK(j["degeneracy"]["loop_branches"] == json::array({"C1", "C2", "C3"}));
    CHECK(j["degeneracy"].contains("null_vector"));
    CHECK(j["degeneracy"].contains("determinant_values"));
    CHECK_FALSE(j.contains("classification"));
}

TEST_CASE("analyze: resistor with R(0) != 0 uses the shifted storage", "[cli]") {
    Result r = run("analyze " + data("rlc_shifted.net"));
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["classification"] == "LocallyAsymptoticallyStable");
    CHECK(j["shifted_energy"] == true);
    bool noted = false;
    for (const auto& n : j["notes"]) noted = noted || n.get<std::string>().find("shifted") != std::string::npos;
    CHECK(noted);
}

TEST_CASE("analyze: cubic loop lists three verdicts", "[cli]") {
    Result r = run("analyze " + data("cubic_loop.net"));
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    REQUIRE(j["equilibria"].size() == 3);
    CHECK(j["equilibria"][0]["classification"] == "LocallyStableCenter");
    CHECK(j["equilibria"][1]["classification"] == "Inconclusive");
    CHECK(j["equilibria"][2]["classification"] == "LocallyStableCenter");
}

TEST_CASE("input errors exit with code 1", "[cli]") {
    CHECK(run("analyze /nonexistent/file.net").code == 1);
    CHECK(run("analyze " + temp_file("bad.net", "L1 1 2 1\nC1 2 1 expr: x +\n")).code == 1);
    CHECK(run("analyze " + temp_file("empty.net", "# nothing\n")).code == 1);
    CHECK(run("simulate " + data("rlc_linear.net") + " --dt 0").code == 1);
    CHECK(run("simulate " + data("rlc_linear.net") + " --t-end -1").code == 1);
    CHECK(run("analyze " + data("rlc_linear.net") + " --coords x1").code == 1);
    CHECK(run("").code == 1);
    CHECK(run("frobnicate " + data("rlc_linear.net")).code == 1);
    CHECK(run("analyze " + data("rlc_linear.net"), "BIR_SEED=abc").code == 1);
}

TEST_CASE("output is byte-for-byte reproducible", "[cli]") {
    for (const char* name : {"rlc_nonlinear.net", "cubic_loop.net", "rlc_shifted.net"}) {
        Result a = run("analyze " + data(name)), b = run("analyze " + data(name));
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
    }
    Result s1 = run("simulate " + data("rlc_nonlinear.net") + " --t-end 2 --dt 0.01");
    Result s2 = run("simulate " + data("rlc_nonlinear.net") + " --t-end 2 --dt 0.01");
    CHECK(s1.out == s2.out);
    CHECK(run("analyze " + data("cubic_loop.net"), "BIR_SEED=42").out == run("analyze " + data("cubic_loop.net")).out);
    json other = json::parse(run("analyze " + data("cubic_loop.net"), "BIR_SEED=5").out);
    CHECK(other["equilibria"].size() == 3);
}

TEST_CASE("--out writes to a file", "[cli]") {
    std::string path = temp_file("report.json", "");
    Result r = run("analyze " + data("lc_loop.net") + " --out " + path);
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(json::parse(slurp(path))["classification"] == "StableCenter");
}

TEST_CASE("simulate: LC energy column is constant", "[cli]") {
    std::string path = temp_file("lc.csv", "");
    Result r = run("simulate " + data("lc_loop.net") + " --t-end 20 --dt 1e-3 --out " + path + " --json");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["monotone"]["passed"] == true);
    auto rows = csv_rows(slurp(path));
    REQUIRE(rows.size() == 20001);
    for (const auto& row : rows) CHECK(std::abs(row[3] - rows[0][3]) <= 1e-7);
    CHECK(slurp(path).rfind("t,q1,qd1,E,dEdt\n", 0) == 0);
}

TEST_CASE("simulate: RLC energy column decreases", "[cli]") {
    Result r = run("simulate " + data("rlc_linear.net") + " --t-end 5 --dt 1e-2");
    REQUIRE(r.code == 0);
    auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 501);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][5] <= rows[i - 1][5] + 1e-9);
}

TEST_CASE("simulate: integrator failure exits with code 3", "[cli]") {
    Result blowup = run("simulate " + temp_file("neg.net", "L1 1 2 1\nC1 2 1 -1\n.ic C1 1\n") + " --t-end 40");
    CHECK(blowup.code == 3);
    Result coarse = run("simulate " + data("lc_loop.net") + " --t-end 50 --dt 0.5");
    CHECK(coarse.code == 3);
}

TEST_CASE("matrices: six-branch network in its hand-chosen chart", "[cli]") {
    Result r = run("matrices " + data("rlc_linear.net") + " --coords x5,x6");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("B\n1 -1 0 0\n0 0 0 1\n0 1 -1 0\n0 1 0 -1\n-1 0 0 0\n0 0 1 -1\n") == 0);
    CHECK(r.out.find("N\n1 0\n1 0\n0 1\n1 -1\n1 0\n0 1\n") != std::string::npos);
    CHECK(r.out.find("K_of_c\n1 0 0 0\n1 1 1 1\n0 0 -1 0\n1 1 1 0\n0 0 0 0\n0 0 0 0\n") != std::string::npos);
    json j = json::parse(run("matrices " + data("rlc_linear.net") + " --coords x5,x6 --json").out);
    CHECK(j["chart"]["coordinates"] == json::array({"C2", "C3"}));
}

TEST_CASE("matrices: two-branch loop", "[cli]") {
    Result r = run("matrices " + data("lc_loop.net"));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("B\n1\n-1\n") == 0);
    CHECK(r.out.find("AtB\n0\n") != std::string::npos);
}

TEST_CASE("matrices: random graphs print a zero orthogonality block", "[cli]") {
    std::mt19937_64 rng(67);
    int checked = 0;
    for (int t = 0; t < 10; ++t) {
        std::string text = testing_support::random_graph_netlist(rng, 12);
        Result r = run("matrices " + temp_file("random.net", text));
        if (r.code != 0) continue;  // trees have no loop
        auto start = r.out.find("AtB\n") + 4, end = r.out.find("N\n");
        std::string block = r.out.substr(start, end - start);
        CHECK(block.find_first_not_of("0 \n") == std::string::npos);
        ++checked;
    }
    CHECK(checked >= 5);
}

TEST_CASE("equilibria command", "[cli]") {
    Result r = run("equilibria " + data("cubic_loop.net"));
    REQUIRE(r.code == 0);
    CHECK(r.out == "-1\n0\n1\n");
    json j = json::parse(run("equilibria " + data("rlc_linear.net") + " --json").out);
    CHECK(j["equilibria"].size() == 1);
    CHECK(run("equilibria " + data("capacitor_loop.net")).code == 2);
}
