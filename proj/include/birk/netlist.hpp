#pragma once

#include "birk/expr.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace birk {

enum class BranchKind { Resistor, Inductor, Capacitor };

const char* to_string(BranchKind kind);

/// Device characteristic. A linear device stores its constant (ohms, henries,
/// farads); a nonlinear one stores the characteristic as an expression in x.
struct DeviceModel {
    struct LinearConst {
        double value;
    };
    struct Expr {
        ExprPtr tree;
    };
    std::variant<LinearConst, Expr> variant;

    bool is_linear() const { return std::holds_alternative<LinearConst>(variant); }
    double constant() const { return std::get<LinearConst>(variant).value; }
    const ExprNode& expr() const { return *std::get<Expr>(variant).tree; }
    std::string to_text() const;
};

/// (value, derivative) of the model itself. A LinearConst yields (c, 0); the
/// device law that turns the constant into a characteristic is applied by
/// eval_characteristic.
Dual eval_model(const DeviceModel& m, double x);

/// The characteristic function of a branch: R(i) for resistors, L(i) for
/// inductors, C(q) (voltage as a function of charge) for capacitors. Linear
/// devices map to R(x) = R*x, L(x) = L, C(s) = s/C.
Dual eval_characteristic(BranchKind kind, const DeviceModel& m, double x);

struct Branch {
    std::string name;
    BranchKind kind;
    int from_node;  // 1-based
    int to_node;
    DeviceModel model;
};

struct NetlistDoc {
    std::vector<Branch> branches;  // resistors, then inductors, then capacitors
    int node_count = 0;
    int reference_node = 0;
    std::map<std::string, double> initial_conditions;
    /// original_index[i] is the position in the source text of branches[i].
    std::vector<std::size_t> original_index;

    std::size_t count(BranchKind kind) const;
    /// Initial charge (capacitors) or current (inductors); 0 when unspecified.
    double initial_value(const std::string& branch) const;
    std::size_t index_of(std::string_view name) const;  // throws if absent
};

class NetlistError : public std::runtime_error {
public:
    NetlistError(const std::string& msg, std::size_t line, std::size_t column);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

NetlistDoc parse_netlist(std::string_view text);

/// Serializes back to the netlist grammar (normalized order).
std::string format_netlist(const NetlistDoc& doc);

}  // namespace birk
