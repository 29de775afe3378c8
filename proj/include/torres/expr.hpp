#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace torres {

/// Closed-form expressions in one real variable, used for config-supplied
/// multiplier functions and deformation fields.
///
/// Grammar (parsed by recursive descent, deterministically):
///
///   expr    := term (('+' | '-') term)*
///   term    := factor (('*' | '/') factor)*
///   factor  := unary ('^' factor)?            right-associative
///   unary   := '-' unary | primary
///   primary := number | 'e' | 'pi' | <var> | fn '(' expr ')' | '(' expr ')'
///   fn      := 'exp' | 'sin' | 'cos'
///
/// <var> is the free-variable name fixed at parse time ("xi" for
/// multipliers, "x" for deformation fields). Numbers are decimal with
/// optional fraction and exponent.
class Expression {
    enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Sin, Cos, Log };

    struct Node {
        Op op;
        double value = 0.0;  // Const only
        int a = -1, b = -1;  // child indices
    };

public:
    static Expression parse(std::string_view text, std::string_view var) {
        Expression e;
        e.text_ = std::string(text);
        Parser p{text, var, e.nodes_};
        e.root_ = p.parse_expr();
        p.skip_ws();
        if (p.pos != text.size())
            throw std::invalid_argument("expression: trailing input at offset " +
                                        std::to_string(p.pos) + " in '" + std::string(text) + "'");
        return e;
    }

    double operator()(double v) const { return eval(root_, v); }

    /// Exact derivative as a new expression (internal nodes may use log,
    /// which is not part of the input grammar).
    Expression derivative() const {
        Expression d;
        d.nodes_ = nodes_;
        d.text_ = "d/dv(" + text_ + ")";
        d.root_ = d.diff(root_);
        return d;
    }

    const std::string& text() const { return text_; }

private:
    std::vector<Node> nodes_;
    int root_ = -1;
    std::string text_;

    int add(Node n) {
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }
    int leaf(double c) { return add({Op::Const, c, -1, -1}); }
    int un(Op op, int a) { return add({op, 0.0, a, -1}); }
    int bin(Op op, int a, int b) { return add({op, 0.0, a, b}); }

    double eval(int i, double v) const {
        const Node& n = nodes_[static_cast<size_t>(i)];
        switch (n.op) {
            case Op::Const: return n.value;
            case Op::Var: return v;
            case Op::Add: return eval(n.a, v) + eval(n.b, v);
            case Op::Sub: return eval(n.a, v) - eval(n.b, v);
            case Op::Mul: return eval(n.a, v) * eval(n.b, v);
            case Op::Div: return eval(n.a, v) / eval(n.b, v);
            case Op::Pow: return std::pow(eval(n.a, v), eval(n.b, v));
            case Op::Neg: return -eval(n.a, v);
            case Op::Exp: return std::exp(eval(n.a, v));
            case Op::Sin: return std::sin(eval(n.a, v));
            case Op::Cos: return std::cos(eval(n.a, v));
            case Op::Log: return std::log(eval(n.a, v));
        }
        return 0.0;
    }

    int diff(int i) {
        const Node n = nodes_[static_cast<size_t>(i)];
        switch (n.op) {
            case Op::Const: return leaf(0.0);
            case Op::Var: return leaf(1.0);
            case Op::Add: return bin(Op::Add, diff(n.a), diff(n.b));
            case Op::Sub: return bin(Op::Sub, diff(n.a), diff(n.b));
            case Op::Mul:
                return bin(Op::Add, bin(Op::Mul, diff(n.a), n.b), bin(Op::Mul, n.a, diff(n.b)));
            case Op::Div:
                // (a'b - ab') / b^2
                return bin(Op::Div,
                           bin(Op::Sub, bin(Op::Mul, diff(n.a), n.b), bin(Op::Mul, n.a, diff(n.b))),
                           bin(Op::Mul, n.b, n.b));
            case Op::Pow: {
                const Node& eb = nodes_[static_cast<size_t>(n.b)];
                if (eb.op == Op::Const) {
                    // c * a^(c-1) * a'
                    int p = bin(Op::Pow, n.a, leaf(eb.value - 1.0));
                    return bin(Op::Mul, leaf(eb.value), bin(Op::Mul, p, diff(n.a)));
                }
                // a^b * (b' log a + b a'/a)
                int t1 = bin(Op::Mul, diff(n.b), un(Op::Log, n.a));
                int t2 = bin(Op::Div, bin(Op::Mul, n.b, diff(n.a)), n.a);
                return bin(Op::Mul, i, bin(Op::Add, t1, t2));
            }
            case Op::Neg: return un(Op::Neg, diff(n.a));
            case Op::Exp: return bin(Op::Mul, i, diff(n.a));
            case Op::Sin: return bin(Op::Mul, un(Op::Cos, n.a), diff(n.a));
            case Op::Cos: return un(Op::Neg, bin(Op::Mul, un(Op::Sin, n.a), diff(n.a)));
            case Op::Log: return bin(Op::Div, diff(n.a), n.a);
        }
        return -1;
    }

    struct Parser {
        std::string_view s;
        std::string_view var;
        std::vector<Node>& nodes;
        size_t pos = 0;

        void skip_ws() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool eat(char c) {
            skip_ws();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }
        [[noreturn]] void fail(const std::string& what) {
            throw std::invalid_argument("expression: " + what + " at offset " +
                                        std::to_string(pos) + " in '" + std::string(s) + "'");
        }
        int add(Node n) {
            nodes.push_back(n);
            return static_cast<int>(nodes.size()) - 1;
        }

        int parse_expr() {
            int lhs = parse_term();
            for (;;) {
                if (eat('+')) lhs = add({Op::Add, 0.0, lhs, parse_term()});
                else if (eat('-')) lhs = add({Op::Sub, 0.0, lhs, parse_term()});
                else return lhs;
            }
        }
        int parse_term() {
            int lhs = parse_factor();
            for (;;) {
                if (eat('*')) lhs = add({Op::Mul, 0.0, lhs, parse_factor()});
                else if (eat('/')) lhs = add({Op::Div, 0.0, lhs, parse_factor()});
                else return lhs;
            }
        }
        int parse_factor() {
            int base = parse_unary();
            if (eat('^')) return add({Op::Pow, 0.0, base, parse_factor()});
            return base;
        }
        int parse_unary() {
            if (eat('-')) return add({Op::Neg, 0.0, parse_unary(), -1});
            return parse_primary();
        }
        int parse_primary() {
            skip_ws();
            if (pos >= s.size()) fail("unexpected end of input");
            char c = s[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
            if (c == '(') {
                ++pos;
                int e = parse_expr();
                if (!eat(')')) fail("expected ')'");
                return e;
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                size_t start = pos;
                while (pos < s.size() &&
                       (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                    ++pos;
                std::string_view name = s.substr(start, pos - start);
                if (name == var) return add({Op::Var, 0.0, -1, -1});
                if (name == "e") return add({Op::Const, std::exp(1.0), -1, -1});
                if (name == "pi") return add({Op::Const, 3.14159265358979323846, -1, -1});
                Op fn;
                if (name == "exp") fn = Op::Exp;
                else if (name == "sin") fn = Op::Sin;
                else if (name == "cos") fn = Op::Cos;
                else fail("unknown identifier '" + std::string(name) + "'");
                if (!eat('(')) fail("expected '(' after function name");
                int e = parse_expr();
                if (!eat(')')) fail("expected ')'");
                return add({fn, 0.0, e, -1});
            }
            fail("unexpected character");
        }
        int parse_number() {
            size_t start = pos;
            while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.'))
                ++pos;
            if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
                size_t save = pos;
                ++pos;
                if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
                if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
                    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
                } else {
                    pos = save;  // 'e' was the Euler constant, not an exponent
                }
            }
            try {
                size_t used = 0;
                double v = std::stod(std::string(s.substr(start, pos - start)), &used);
                if (used != pos - start) fail("malformed number");
                return add({Op::Const, v, -1, -1});
            } catch (const std::exception&) {
                fail("malformed number");
            }
        }
    };
};

}  // namespace torres
