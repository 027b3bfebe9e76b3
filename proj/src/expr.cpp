#include "birk/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace birk {

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ExprPtr parse() {
        ExprPtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ExprSyntaxError(msg, pos_ + 1); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' at end of expression");
            fail(std::string("expected '") + c + "'");
        }
    }

    ExprPtr parse_expr() {
        ExprPtr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = make_binary(BinaryOp::Add, lhs, parse_term());
            else if (accept('-'))
                lhs = make_binary(BinaryOp::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = make_binary(BinaryOp::Mul, lhs, parse_unary());
            else if (accept('/'))
                lhs = make_binary(BinaryOp::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    ExprPtr parse_unary() {
        if (accept('-')) return make_unary(UnaryFn::Neg, parse_unary());
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        if (!accept('^')) return base;
        bool negative = accept('-');
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("exponent must be an integer literal");
        int value = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc() || ptr != text_.data() + pos_) {
            pos_ = start;
            fail("exponent out of range");
        }
        return make_power(base, negative ? -value : value);
    }

    ExprPtr parse_number() {
        std::size_t start = pos_;
        auto digits = [&] {
            std::size_t s = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            return pos_ - s;
        };
        std::size_t n = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) {
            pos_ = start;
            fail("malformed number");
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) {
                pos_ = save;
                fail("malformed exponent in number");
            }
        }
        std::string literal(text_.substr(start, pos_ - start));
        double v = std::strtod(literal.c_str(), nullptr);
        if (!std::isfinite(v)) {
            pos_ = start;
            fail("number out of range");
        }
        return make_constant(v);
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos_;
            ExprPtr inner = parse_expr();
            expect(')');
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            std::string_view name = text_.substr(start, pos_ - start);
            if (name == "x") return make_variable();
            UnaryFn fn;
            if (name == "sin") fn = UnaryFn::Sin;
            else if (name == "cos") fn = UnaryFn::Cos;
            else if (name == "exp") fn = UnaryFn::Exp;
            else if (name == "tanh") fn = UnaryFn::Tanh;
            else if (name == "ln") fn = UnaryFn::Ln;
            else if (name == "sqrt") fn = UnaryFn::Sqrt;
            else {
                pos_ = start;
                fail("unknown identifier '" + std::string(name) + "'");
            }
            expect('(');
            ExprPtr arg = parse_expr();
            expect(')');
            return make_unary(fn, arg);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

// Precedence levels used by the printer.
constexpr int kPrecSum = 1;
constexpr int kPrecProduct = 2;
constexpr int kPrecUnary = 3;
constexpr int kPrecPrimary = 5;

std::string format_number(double v) {
    char buf[32];
    for (int digits = 1; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

int precedence(const ExprNode& e) {
    struct Visitor {
        int operator()(const ExprNode::Constant& c) const { return c.value < 0 ? kPrecUnary : kPrecPrimary; }
        int operator()(const ExprNode::Variable&) const { return kPrecPrimary; }
        int operator()(const ExprNode::Unary& u) const { return u.fn == UnaryFn::Neg ? kPrecUnary : kPrecPrimary; }
        int operator()(const ExprNode::Binary& b) const {
            return (b.op == BinaryOp::Add || b.op == BinaryOp::Sub) ? kPrecSum : kPrecProduct;
        }
        // A power with a non-primary base prints as "(...)^n", which still
        // binds tighter than any unary or binary operator.
        int operator()(const ExprNode::Power&) const { return kPrecUnary + 1; }
    };
    return std::visit(Visitor{}, e.node);
}

void print_into(const ExprNode& e, std::string& out);

void print_operand(const ExprNode& e, int min_prec, std::string& out) {
    if (precedence(e) < min_prec) {
        out += '(';
        print_into(e, out);
        out += ')';
    } else {
        print_into(e, out);
    }
}

const char* function_name(UnaryFn fn) {
    switch (fn) {
        case UnaryFn::Sin: return "sin";
        case UnaryFn::Cos: return "cos";
        case UnaryFn::Exp: return "exp";
        case UnaryFn::Tanh: return "tanh";
        case UnaryFn::Ln: return "ln";
        case UnaryFn::Sqrt: return "sqrt";
        case UnaryFn::Neg: return "-";
    }
    return "?";
}

void print_into(const ExprNode& e, std::string& out) {
    if (auto* c = std::get_if<ExprNode::Constant>(&e.node)) {
        out += format_number(c->value);
    } else if (std::holds_alternative<ExprNode::Variable>(e.node)) {
        out += 'x';
    } else if (auto* u = std::get_if<ExprNode::Unary>(&e.node)) {
        if (u->fn == UnaryFn::Neg) {
            out += '-';
            print_operand(*u->arg, kPrecUnary, out);
        } else {
            out += function_name(u->fn);
            out += '(';
            print_into(*u->arg, out);
            out += ')';
        }
    } else if (auto* b = std::get_if<ExprNode::Binary>(&e.node)) {
        bool sum = b->op == BinaryOp::Add || b->op == BinaryOp::Sub;
        int prec = sum ? kPrecSum : kPrecProduct;
        print_operand(*b->lhs, prec, out);
        switch (b->op) {
            case BinaryOp::Add: out += " + "; break;
            case BinaryOp::Sub: out += " - "; break;
            case BinaryOp::Mul: out += " * "; break;
            case BinaryOp::Div: out += " / "; break;
        }
        print_operand(*b->rhs, prec + 1, out);
    } else if (auto* p = std::get_if<ExprNode::Power>(&e.node)) {
        print_operand(*p->base, kPrecPrimary, out);
        out += '^';
        out += std::to_string(p->exponent);
    }
}

[[noreturn]] void domain_error(const std::string& what, const ExprNode& e) {
    std::string sub = print_expression(e);
    throw ExprDomainError(what + " in '" + sub + "'", sub);
}

Dual eval_node(const ExprNode& e, Dual x) {
    if (auto* c = std::get_if<ExprNode::Constant>(&e.node)) return {c->value, 0.0};
    if (std::holds_alternative<ExprNode::Variable>(e.node)) return x;
    if (auto* u = std::get_if<ExprNode::Unary>(&e.node)) {
        Dual a = eval_node(*u->arg, x);
        switch (u->fn) {
            case UnaryFn::Neg: return {-a.value, -a.deriv};
            case UnaryFn::Sin: return {std::sin(a.value), std::cos(a.value) * a.deriv};
            case UnaryFn::Cos: return {std::cos(a.value), -std::sin(a.value) * a.deriv};
            case UnaryFn::Exp: {
                double v = std::exp(a.value);
                return {v, v * a.deriv};
            }
            case UnaryFn::Tanh: {
                double t = std::tanh(a.value);
                return {t, (1.0 - t * t) * a.deriv};
            }
            case UnaryFn::Ln:
                if (!(a.value > 0.0)) domain_error("logarithm of non-positive argument", e);
                return {std::log(a.value), a.deriv / a.value};
            case UnaryFn::Sqrt: {
                if (!(a.value > 0.0)) domain_error("square root of non-positive argument", e);
                double s = std::sqrt(a.value);
                return {s, a.deriv / (2.0 * s)};
            }
        }
    }
    if (auto* b = std::get_if<ExprNode::Binary>(&e.node)) {
        Dual l = eval_node(*b->lhs, x);
        Dual r = eval_node(*b->rhs, x);
        switch (b->op) {
            case BinaryOp::Add: return {l.value + r.value, l.deriv + r.deriv};
            case BinaryOp::Sub: return {l.value - r.value, l.deriv - r.deriv};
            case BinaryOp::Mul: return {l.value * r.value, l.deriv * r.value + l.value * r.deriv};
            case BinaryOp::Div:
                if (r.value == 0.0) domain_error("division by zero", e);
                return {l.value / r.value, (l.deriv * r.value - l.value * r.deriv) / (r.value * r.value)};
        }
    }
    const auto& p = std::get<ExprNode::Power>(e.node);
    Dual a = eval_node(*p.base, x);
    if (p.exponent == 0) return {1.0, 0.0};
    if (a.value == 0.0 && p.exponent < 0) domain_error("division by zero", e);
    double lower = std::pow(a.value, p.exponent - 1);
    return {lower * a.value, p.exponent * lower * a.deriv};
}

}  // namespace

ExprPtr parse_expression(std::string_view text) { return Parser(text).parse(); }

std::string print_expression(const ExprNode& e) {
    std::string out;
    print_into(e, out);
    return out;
}

Dual evaluate(const ExprNode& e, Dual x) {
    Dual r = eval_node(e, x);
    if (!std::isfinite(r.value) || !std::isfinite(r.deriv)) domain_error("non-finite result", e);
    return r;
}

ExprPtr make_constant(double v) { return std::make_shared<const ExprNode>(ExprNode{ExprNode::Constant{v}}); }
ExprPtr make_variable() { return std::make_shared<const ExprNode>(ExprNode{ExprNode::Variable{}}); }
ExprPtr make_unary(UnaryFn fn, ExprPtr arg) {
    return std::make_shared<const ExprNode>(ExprNode{ExprNode::Unary{fn, std::move(arg)}});
}
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<const ExprNode>(ExprNode{ExprNode::Binary{op, std::move(lhs), std::move(rhs)}});
}
ExprPtr make_power(ExprPtr base, int exponent) {
    return std::make_shared<const ExprNode>(ExprNode{ExprNode::Power{std::move(base), exponent}});
}

}  // namespace birk
