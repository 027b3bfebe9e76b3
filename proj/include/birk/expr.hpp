#pragma once

// Scalar expression language for nonlinear device characteristics.
//
// Grammar (one free variable `x`):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' ['-'] integer)?
//   primary := number | 'x' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | tanh | ln | sqrt
//
// Evaluation propagates a dual number so every call yields f(x) and f'(x).

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace birk {

/// Value and first derivative carried together (forward-mode AD).
struct Dual {
    double value = 0.0;
    double deriv = 0.0;
};

enum class UnaryFn { Neg, Sin, Cos, Exp, Tanh, Ln, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    struct Constant { double value; };
    struct Variable {};
    struct Unary { UnaryFn fn; ExprPtr arg; };
    struct Binary { BinaryOp op; ExprPtr lhs; ExprPtr rhs; };
    struct Power { ExprPtr base; int exponent; };

    std::variant<Constant, Variable, Unary, Binary, Power> node;
};

/// Thrown by parse_expression; column is 1-based within the expression text.
class ExprSyntaxError : public std::runtime_error {
public:
    ExprSyntaxError(const std::string& msg, std::size_t column)
        : std::runtime_error(msg), column_(column) {}
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

/// Thrown when evaluation leaves the domain (ln/sqrt of a non-positive
/// argument, division by zero, non-finite result).
class ExprDomainError : public std::runtime_error {
public:
    ExprDomainError(const std::string& msg, std::string subexpr)
        : std::runtime_error(msg), subexpr_(std::move(subexpr)) {}
    const std::string& subexpression() const noexcept { return subexpr_; }

private:
    std::string subexpr_;
};

ExprPtr parse_expression(std::string_view text);

/// Canonical text: minimal parentheses, constants with 17 significant digits.
std::string print_expression(const ExprNode& e);

Dual evaluate(const ExprNode& e, Dual x);

inline Dual evaluate(const ExprNode& e, double x) { return evaluate(e, Dual{x, 1.0}); }

// Builders, used by tests and generators.
ExprPtr make_constant(double v);
ExprPtr make_variable();
ExprPtr make_unary(UnaryFn fn, ExprPtr arg);
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_power(ExprPtr base, int exponent);

}  // namespace birk
