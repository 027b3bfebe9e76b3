#include "birk/configspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace birk {

namespace {

struct Elimination {
    std::vector<std::vector<Rational>> rows;  // reduced [incidence^T | I]
    std::vector<std::size_t> pivots;          // pivot column per row
};

// Exact Gauss-Jordan on [incidence^T | I_n], pivoting only on eligible columns.
Elimination eliminate(const IntMatrix& incidence, const std::vector<bool>& eligible) {
    std::size_t branches = incidence.rows(), nodes = incidence.cols();
    Elimination e;
    e.rows.assign(nodes, std::vector<Rational>(branches + nodes, Rational(0)));
    for (std::size_t r = 0; r < nodes; ++r) {
        for (std::size_t c = 0; c < branches; ++c) e.rows[r][c] = incidence(c, r);
        e.rows[r][branches + r] = 1;
    }
    std::size_t row = 0;
    for (std::size_t c = 0; c < branches && row < nodes; ++c) {
        if (!eligible[c]) continue;
        std::size_t p = row;
        while (p < nodes && e.rows[p][c].numerator() == 0) ++p;
        if (p == nodes) continue;
        std::swap(e.rows[p], e.rows[row]);
        Rational inv = Rational(1) / e.rows[row][c];
        for (auto& v : e.rows[row]) v *= inv;
        for (std::size_t r = 0; r < nodes; ++r) {
            if (r == row || e.rows[r][c].numerator() == 0) continue;
            Rational f = e.rows[r][c];
            for (std::size_t k = 0; k < branches + nodes; ++k) e.rows[r][k] -= f * e.rows[row][k];
        }
        e.pivots.push_back(c);
        ++row;
    }
    return e;
}

double to_double(const Rational& r) { return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()); }

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& basis, const std::vector<std::size_t>& rows,
                              const std::vector<double>& weights) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(basis.cols(), basis.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Eigen::VectorXd v = basis.row(rows[i]).transpose();
        gram += weights[i] * v * v.transpose();
    }
    return gram;
}

struct Singularity {
    bool singular = false;
    Eigen::VectorXd null_vector;
};

// Structural rank deficiency of the selected rows of basis is decided exactly;
// otherwise the weighted form is tested by its spectrum.
Singularity find_singularity(const IntMatrix& basis, const std::vector<std::size_t>& rows, const Eigen::MatrixXd& form) {
    Singularity s;
    IntMatrix sub = basis.select_rows(rows);
    if (rank(sub) < basis.cols()) {
        IntMatrix ker = integer_kernel(sub);
        s.singular = true;
        s.null_vector = Eigen::VectorXd(basis.cols());
        for (std::size_t i = 0; i < basis.cols(); ++i) s.null_vector(i) = static_cast<double>(ker(i, 0));
        return s;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(form);
    const auto& ev = eig.eigenvalues();
    Eigen::Index imin = 0;
    ev.cwiseAbs().minCoeff(&imin);
    double largest = ev.cwiseAbs().maxCoeff();
    if (largest == 0.0 || std::abs(ev(imin)) <= 1e-12 * largest) {
        s.singular = true;
        s.null_vector = eig.eigenvectors().col(imin);
        s.null_vector /= s.null_vector.cwiseAbs().maxCoeff();
    }
    return s;
}

}  // namespace

Eigen::MatrixXd ConfigSpace::basis_real() const {
    Eigen::MatrixXd out(basis.rows(), basis.cols());
    for (std::size_t r = 0; r < basis.rows(); ++r)
        for (std::size_t c = 0; c < basis.cols(); ++c) out(r, c) = static_cast<double>(basis(r, c));
    return out;
}

Eigen::VectorXd ConfigSpace::point(const Eigen::VectorXd& q) const { return basis_real() * q + offset; }

ConfigSpace build_chart(const CircuitGraph& g, const Eigen::VectorXd& constants,
                        const std::optional<std::vector<std::size_t>>& coords) {
    std::size_t branches = g.branch_count, nodes = g.independent_nodes, loops = g.loop_count;
    if (static_cast<std::size_t>(constants.size()) != nodes) throw ChartError("constant vector has wrong length");

    std::vector<bool> eligible(branches, true);
    if (coords) {
        if (coords->size() != loops)
            throw ChartError("coordinate override needs exactly " + std::to_string(loops) + " branches");
        for (std::size_t k : *coords) {
            if (k >= branches) throw ChartError("coordinate branch out of range");
            if (!eligible[k]) throw ChartError("coordinate branch listed twice");
            eligible[k] = false;
        }
    }

    Elimination e = eliminate(g.incidence, eligible);
    if (e.pivots.size() != nodes) {
        if (coords) throw ChartError("chosen coordinates do not parameterize the configuration space");
        throw ChartError("incidence matrix is rank deficient");
    }

    std::vector<std::size_t> free;
    if (coords) {
        free = *coords;
    } else {
        std::vector<bool> is_pivot(branches, false);
        for (auto p : e.pivots) is_pivot[p] = true;
        for (std::size_t col = 0; col < branches; ++col)
            if (!is_pivot[col]) free.push_back(col);
    }

    ConfigSpace cs;
    cs.basis = IntMatrix(branches, loops);
    cs.offset_map = Eigen::MatrixXd::Zero(branches, nodes);
    for (std::size_t k = 0; k < loops; ++k) cs.basis(free[k], k) = 1;
    for (std::size_t r = 0; r < nodes; ++r) {
        std::size_t p = e.pivots[r];
        for (std::size_t k = 0; k < loops; ++k) {
            Rational v = -e.rows[r][free[k]];
            if (v.denominator() != 1) throw ChartError("chart matrix is not integral");
            cs.basis(p, k) = v.numerator();
        }
        for (std::size_t j = 0; j < nodes; ++j) cs.offset_map(p, j) = to_double(e.rows[r][branches + j]);
    }
    cs.constants = constants;
    cs.offset = cs.offset_map * constants;
    cs.coord_branches = free;
    return cs;
}

ConfigSpace build_chart_with_basis(const CircuitGraph& g, const Eigen::VectorXd& constants, const IntMatrix& basis) {
    if (basis.rows() != g.branch_count || basis.cols() != g.loop_count) throw ChartError("basis has wrong shape");
    if (!(g.incidence.transpose() * basis).is_zero()) throw ChartError("basis is not in the kernel of the transposed incidence matrix");
    if (rank(basis) != g.loop_count) throw ChartError("basis is rank deficient");
    ConfigSpace cs = build_chart(g, constants);
    cs.basis = basis;
    cs.coord_branches.clear();
    return cs;
}

std::vector<std::size_t> parse_coordinate_list(const std::string& list, const NetlistDoc& doc) {
    std::vector<std::size_t> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char ch) { return std::isspace(ch); }),
                   item.end());
        if (item.empty()) continue;
        bool positional = item.size() > 1 && (item[0] == 'x' || item[0] == 'X') &&
                          std::all_of(item.begin() + 1, item.end(), [](unsigned char ch) { return std::isdigit(ch); });
        if (positional) {
            std::size_t k = std::stoul(item.substr(1));
            if (k < 1 || k > doc.branches.size()) throw ChartError("coordinate '" + item + "' out of range");
            out.push_back(k - 1);
        } else {
            try {
                out.push_back(doc.index_of(item));
            } catch (const std::out_of_range&) {
                throw ChartError("unknown coordinate branch '" + item + "'");
            }
        }
    }
    return out;
}

Eigen::VectorXd initial_branch_charges(const NetlistDoc& doc) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(doc.branches.size()));
    for (std::size_t i = 0; i < doc.branches.size(); ++i)
        if (doc.branches[i].kind == BranchKind::Capacitor) x(i) = doc.initial_value(doc.branches[i].name);
    return x;
}

Eigen::VectorXd initial_constants(const NetlistDoc& doc, const CircuitGraph& g) {
    Eigen::VectorXd charges = initial_branch_charges(doc);
    Eigen::VectorXd constants = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.independent_nodes));
    for (std::size_t j = 0; j < g.independent_nodes; ++j)
        for (std::size_t i = 0; i < g.branch_count; ++i) constants(j) += static_cast<double>(g.incidence(i, j)) * charges(i);
    return constants;
}

InitialState initial_state(const NetlistDoc& doc, const CircuitGraph& g, const ConfigSpace& cs) {
    InitialState s;
    s.constants = initial_constants(doc, g);
    if ((s.constants - cs.constants).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + s.constants.cwiseAbs().maxCoeff()))
        throw InitialConditionError("chart constants do not match the netlist initial charges");

    Eigen::MatrixXd basis = cs.basis_real();
    Eigen::VectorXd x0 = initial_branch_charges(doc);
    if (cs.coord_branches.size() == cs.dim()) {
        s.q0 = Eigen::VectorXd(static_cast<Eigen::Index>(cs.dim()));
        for (std::size_t k = 0; k < cs.dim(); ++k) s.q0(k) = x0(cs.coord_branches[k]) - cs.offset(cs.coord_branches[k]);
    } else {
        s.q0 = basis.colPivHouseholderQr().solve(x0 - cs.offset);
    }

    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < doc.branches.size(); ++i)
        if (doc.branches[i].kind == BranchKind::Inductor) rows.push_back(static_cast<Eigen::Index>(i));
    std::size_t dim = cs.dim();
    if (rows.empty()) {
        s.qdot0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
        s.qdot_underdetermined = true;
        return s;
    }
    Eigen::MatrixXd inductor_rows(rows.size(), dim);
    Eigen::VectorXd inductor_currents(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        inductor_rows.row(r) = basis.row(rows[r]);
        inductor_currents(r) = doc.initial_value(doc.branches[rows[r]].name);
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(inductor_rows);
    s.qdot0 = cod.solve(inductor_currents);
    s.qdot_underdetermined = cod.rank() < static_cast<Eigen::Index>(dim);
    s.current_residual = (inductor_rows * s.qdot0 - inductor_currents).cwiseAbs().maxCoeff();
    if (s.current_residual > 1e-9 * (1.0 + inductor_currents.cwiseAbs().maxCoeff()))
        throw InitialConditionError("initial inductor currents violate Kirchhoff's current law (residual " +
                                    std::to_string(s.current_residual) + ")");
    return s;
}

std::string DegeneracyReport::describe() const {
    std::ostringstream out;
    if (capacitor_loop_detected) out << "capacitor loop (singular inductance form)";
    if (inductor_loop_detected) out << (capacitor_loop_detected ? "; " : "") << "inductor loop (singular elastance form)";
    if (!degenerate()) return "nondegenerate";
    out << ": branches";
    for (const auto& name : loop_branches) out << ' ' << name;
    return out.str();
}

DegeneracyReport check_degeneracy(const ConfigSpace& cs, const NetlistDoc& doc) {
    Eigen::MatrixXd basis = cs.basis_real();
    std::vector<std::size_t> ind, cap;
    std::vector<double> ind_w, cap_w;
    bool caps_linear = true;
    for (std::size_t i = 0; i < doc.branches.size(); ++i) {
        const auto& br = doc.branches[i];
        if (br.kind == BranchKind::Inductor) {
            ind.push_back(i);
            ind_w.push_back(eval_characteristic(br.kind, br.model, 0.0).value);
        } else if (br.kind == BranchKind::Capacitor) {
            cap.push_back(i);
            caps_linear = caps_linear && br.model.is_linear();
            cap_w.push_back(br.model.is_linear() ? 1.0 / br.model.constant() : 0.0);
        }
    }

    std::vector<std::size_t> res;
    for (std::size_t i = 0; i < doc.branches.size(); ++i)
        if (doc.branches[i].kind == BranchKind::Resistor) res.push_back(i);
    // A loop made only of capacitors (or inductors) names the fault better
    // than one that also passes through resistors.
    auto prefer_pure = [&](Singularity& s, std::vector<std::size_t> rows) {
        if (!s.singular) return;
        rows.insert(rows.end(), res.begin(), res.end());
        std::sort(rows.begin(), rows.end());
        IntMatrix sub = cs.basis.select_rows(rows);
        if (rank(sub) == cs.dim()) return;
        IntMatrix ker = integer_kernel(sub);
        for (std::size_t i = 0; i < cs.dim(); ++i) s.null_vector(i) = static_cast<double>(ker(i, 0));
    };

    DegeneracyReport rep;
    Eigen::MatrixXd mass = weighted_gram(basis, ind, ind_w);
    rep.mass_determinant = mass.determinant();
    Singularity ms = find_singularity(cs.basis, ind, mass);

    Singularity ss;
    if (caps_linear) {
        Eigen::MatrixXd stiff = weighted_gram(basis, cap, cap_w);
        rep.stiffness_determinant = stiff.determinant();
        ss = find_singularity(cs.basis, cap, stiff);
    } else if (rank(cs.basis.select_rows(cap)) < cs.dim()) {
        ss = find_singularity(cs.basis, cap, Eigen::MatrixXd::Identity(cs.dim(), cs.dim()));
    }

    prefer_pure(ms, ind);
    prefer_pure(ss, cap);
    rep.capacitor_loop_detected = ms.singular;
    rep.inductor_loop_detected = ss.singular;
    if (ms.singular)
        rep.null_vector = ms.null_vector;
    else if (ss.singular)
        rep.null_vector = ss.null_vector;
    if (rep.degenerate()) {
        Eigen::VectorXd loop = basis * rep.null_vector;
        double scale = loop.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < loop.size(); ++i)
            if (std::abs(loop(i)) > 1e-9 * scale) rep.loop_branches.push_back(doc.branches[i].name);
    }
    return rep;
}

}  // namespace birk
