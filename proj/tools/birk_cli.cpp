// birk: stability analysis of LC/RLC netlists.
#include "birk/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace birk;

namespace {

enum ExitCode { kOk = 0, kInputError = 1, kDegenerate = 2, kIntegratorFailure = 3 };

struct Options {
    std::string path;
    std::string out;
    std::string coords;
    double t_end = 10.0;
    double dt = 1e-3;
    bool json = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const Options& opt, const std::string& text) {
    if (opt.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(opt.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + opt.out);
    file << text;
}

NewtonOptions newton_options() {
    NewtonOptions n;
    if (const char* env = std::getenv("BIR_SEED")) {
        std::size_t used = 0;
        std::string s = env;
        try {
            n.seed = std::stoull(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw std::runtime_error("BIR_SEED must be a non-negative integer");
    }
    return n;
}

Pipeline front_end(const Options& opt) { return run_front_end(read_file(opt.path), opt.coords); }

int report_degenerate(const Pipeline& p) {
    std::cerr << "degenerate network: " << p.degeneracy.describe() << '\n';
    return kDegenerate;
}

int cmd_analyze(const Options& opt) {
    Pipeline p = front_end(opt);
    if (p.degeneracy.degenerate()) {
        emit(opt, analysis_json(p, std::nullopt).dump(2) + "\n");
        return report_degenerate(p);
    }
    StabilityReport rep = analyze_stability(*p.system, newton_options());
    emit(opt, analysis_json(p, rep).dump(2) + "\n");
    return kOk;
}

int cmd_equilibria(const Options& opt) {
    Pipeline p = front_end(opt);
    if (p.degeneracy.degenerate()) return report_degenerate(p);
    EquilibriumSearch search = find_equilibria(*p.system, newton_options());
    if (opt.json) {
        emit(opt, equilibria_json(search).dump(2) + "\n");
        return kOk;
    }
    std::ostringstream out;
    out.precision(17);
    for (const auto& e : search.equilibria) {
        for (Eigen::Index i = 0; i < e.q_e.size(); ++i) out << (i ? " " : "") << e.q_e(i);
        out << '\n';
    }
    for (const auto& d : search.diagnostics) std::cerr << d << '\n';
    emit(opt, out.str());
    return kOk;
}

int cmd_matrices(const Options& opt) {
    Pipeline p = front_end(opt);
    if (opt.json) {
        Json j{{"graph", graph_json(p.graph)}, {"chart", chart_json(p.chart, p.doc)}};
        emit(opt, j.dump(2) + "\n");
    } else {
        emit(opt, matrices_text(p));
    }
    return kOk;
}

int cmd_simulate(const Options& opt) {
    if (opt.json && opt.out.empty()) throw CLI::ValidationError("--json", "requires --out for the CSV");
    Pipeline p = front_end(opt);
    if (p.degeneracy.degenerate()) return report_degenerate(p);
    const BirkhoffSystem& sys = *p.system;
    StabilityReport rep = analyze_stability(sys, newton_options());
    EnergyModel model = build_energy(sys, rep.shifted_energy);

    Trajectory traj;
    try {
        traj = integrate(sys, model, p.initial->q0, p.initial->qdot0, opt.t_end, opt.dt);
    } catch (const IntegratorError& e) {
        std::cerr << "integration failed: " << e.what() << '\n';
        return kIntegratorFailure;
    }
    std::ostringstream csv;
    write_csv(csv, traj);
    if (opt.out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream file(opt.out, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write " + opt.out);
        file << csv.str();
    }

    MonotoneReport mono = verify_monotone(traj, sys.case_tag);
    std::cerr << (is_lc(sys.case_tag) ? "energy conservation: " : "energy decay: ")
              << (mono.passed ? "passed" : "FAILED (" + mono.detail + ")") << '\n';
    if (traj.truncated) std::cerr << traj.diagnostic << '\n';
    if (opt.json) {
        Json j{{"case", to_string(sys.case_tag)},
               {"classification", rep.results.empty() ? "Inconclusive" : to_string(rep.results.front().verdict.cls)},
               {"dt", opt.dt},
               {"t_end", opt.t_end},
               {"monotone", monotone_json(mono, traj)}};
        std::cout << j.dump(2) << '\n';
    }
    return (traj.truncated || !mono.passed) ? kIntegratorFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability analysis of LC/RLC networks"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("netlist", opt.path, "Netlist file")->required();
        cmd->add_option("--out", opt.out, "Write output to this file");
        cmd->add_option("--coords", opt.coords, "Chart coordinates, e.g. x5,x6 or C2,C3");
        cmd->add_flag("--json", opt.json, "Machine-readable output");
    };
    auto* analyze = app.add_subcommand("analyze", "Classify the stability of every equilibrium (JSON)");
    auto* simulate = app.add_subcommand("simulate", "Integrate from the netlist's initial conditions (CSV)");
    auto* matrices = app.add_subcommand("matrices", "Print B, A, N and K");
    auto* equilibria = app.add_subcommand("equilibria", "List equilibria");
    for (auto* cmd : {analyze, simulate, matrices, equilibria}) add_common(cmd);
    simulate->add_option("--t-end", opt.t_end, "End time (default 10)")->check(CLI::PositiveNumber);
    simulate->add_option("--dt", opt.dt, "Step size (default 1e-3)")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    try {
        if (*analyze) return cmd_analyze(opt);
        if (*simulate) return cmd_simulate(opt);
        if (*matrices) return cmd_matrices(opt);
        return cmd_equilibria(opt);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return kInputError;
}
