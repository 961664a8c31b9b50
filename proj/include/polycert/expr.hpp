#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polycert/multi_index.hpp"
#include "polycert/polynomial.hpp"
#include "polycert/rational.hpp"

namespace polycert {

struct ParseError : std::runtime_error {
    size_t position;
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error("parse error at position " + std::to_string(pos) + ": " + msg),
          position(pos) {}
};

struct EvalError : std::runtime_error {
    std::string subexpression;
    EvalError(const std::string& msg, std::string subexpr)
        : std::runtime_error(msg + " in \"" + subexpr + "\""), subexpression(std::move(subexpr)) {}
};

namespace detail {

enum class ExprKind { Constant, Variable, Add, Sub, Mul, Div, Pow, Exp, Ln, Sin, Cos, Sqrt };

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

// Immutable AST node. Only the fields relevant to `kind` are meaningful.
struct ExprNode {
    ExprKind kind;
    Rational value;     // Constant
    int var = 0;        // Variable, 1-based
    long exponent = 0;  // Pow
    NodePtr a, b;
};

inline NodePtr make_constant(Rational v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Constant;
    n->value = std::move(v);
    return n;
}

inline NodePtr make_variable(int i) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Variable;
    n->var = i;
    return n;
}

inline bool is_const(const NodePtr& n, int v) {
    return n->kind == ExprKind::Constant && n->value == v;
}

// Binary/unary constructors fold constants and annihilate zeros/ones; no
// other rewriting happens, so printed output stays close to the input.
inline NodePtr make_add(NodePtr a, NodePtr b) {
    if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant) {
        return make_constant(a->value + b->value);
    }
    if (is_const(a, 0)) return b;
    if (is_const(b, 0)) return a;
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Add;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

inline NodePtr make_sub(NodePtr a, NodePtr b) {
    if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant) {
        return make_constant(a->value - b->value);
    }
    if (is_const(b, 0)) return a;
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Sub;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

inline NodePtr make_mul(NodePtr a, NodePtr b) {
    if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant) {
        return make_constant(a->value * b->value);
    }
    if (is_const(a, 0) || is_const(b, 0)) return make_constant(Rational(0));
    if (is_const(a, 1)) return b;
    if (is_const(b, 1)) return a;
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Mul;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

inline NodePtr make_div(NodePtr a, NodePtr b) {
    if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant && b->value != 0) {
        return make_constant(a->value / b->value);
    }
    if (is_const(a, 0)) return a;
    if (is_const(b, 1)) return a;
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Div;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

inline NodePtr make_pow(NodePtr base, long k) {
    if (k == 0) return make_constant(Rational(1));
    if (k == 1) return base;
    if (base->kind == ExprKind::Constant && (base->value != 0 || k > 0)) {
        Rational p = rational_pow(base->value, static_cast<unsigned>(k > 0 ? k : -k));
        return make_constant(k > 0 ? p : Rational(1) / p);
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Pow;
    n->exponent = k;
    n->a = std::move(base);
    return n;
}

inline NodePtr make_fn(ExprKind kind, NodePtr arg) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->a = std::move(arg);
    return n;
}

std::string node_to_string(const NodePtr& n, int parent_prec);

inline std::string fn_name(ExprKind k) {
    switch (k) {
        case ExprKind::Exp: return "exp";
        case ExprKind::Ln: return "ln";
        case ExprKind::Sin: return "sin";
        case ExprKind::Cos: return "cos";
        case ExprKind::Sqrt: return "sqrt";
        default: return "?";
    }
}

// Precedence levels: 1 add/sub, 2 mul/div and unary minus, 3 pow, 4 atoms.
inline std::string node_to_string(const NodePtr& n, int parent_prec = 0) {
    auto wrap = [&](const std::string& s, int prec) {
        return prec < parent_prec ? "(" + s + ")" : s;
    };
    switch (n->kind) {
        case ExprKind::Constant: {
            std::string s = rational_to_string(n->value);
            return n->value < 0 ? wrap(s, 2) : s;
        }
        case ExprKind::Variable:
            return "x" + std::to_string(n->var);
        case ExprKind::Add:
            return wrap(node_to_string(n->a, 1) + " + " + node_to_string(n->b, 2), 1);
        case ExprKind::Sub:
            if (is_const(n->a, 0)) return wrap("-" + node_to_string(n->b, 3), 2);
            return wrap(node_to_string(n->a, 1) + " - " + node_to_string(n->b, 2), 1);
        case ExprKind::Mul:
            return wrap(node_to_string(n->a, 2) + "*" + node_to_string(n->b, 3), 2);
        case ExprKind::Div:
            return wrap(node_to_string(n->a, 2) + "/" + node_to_string(n->b, 3), 2);
        case ExprKind::Pow:
            // The grammar admits a bare signed integer after '^', never a
            // parenthesized exponent.
            return wrap(node_to_string(n->a, 4) + "^" + std::to_string(n->exponent), 3);
        default:
            return fn_name(n->kind) + "(" + node_to_string(n->a, 0) + ")";
    }
}

inline double int_pow(double base, long k, const NodePtr& where) {
    if (k < 0) {
        if (base == 0.0) throw EvalError("zero raised to a negative power", node_to_string(where));
        return 1.0 / int_pow(base, -k, where);
    }
    double out = 1.0;
    double acc = base;
    unsigned long e = static_cast<unsigned long>(k);
    while (e > 0) {
        if (e & 1ul) out *= acc;
        e >>= 1ul;
        if (e > 0) acc *= acc;
    }
    return out;
}

inline double eval_node(const NodePtr& n, const std::vector<double>& x) {
    switch (n->kind) {
        case ExprKind::Constant: return rational_to_double(n->value);
        case ExprKind::Variable: return x[static_cast<size_t>(n->var - 1)];
        case ExprKind::Add: return eval_node(n->a, x) + eval_node(n->b, x);
        case ExprKind::Sub: return eval_node(n->a, x) - eval_node(n->b, x);
        case ExprKind::Mul: return eval_node(n->a, x) * eval_node(n->b, x);
        case ExprKind::Div: {
            double denom = eval_node(n->b, x);
            if (denom == 0.0) throw EvalError("division by zero", node_to_string(n));
            return eval_node(n->a, x) / denom;
        }
        case ExprKind::Pow: return int_pow(eval_node(n->a, x), n->exponent, n);
        case ExprKind::Exp: return std::exp(eval_node(n->a, x));
        case ExprKind::Ln: {
            double v = eval_node(n->a, x);
            if (v <= 0.0) throw EvalError("logarithm of a non-positive value", node_to_string(n));
            return std::log(v);
        }
        case ExprKind::Sin: return std::sin(eval_node(n->a, x));
        case ExprKind::Cos: return std::cos(eval_node(n->a, x));
        case ExprKind::Sqrt: {
            double v = eval_node(n->a, x);
            if (v < 0.0) throw EvalError("square root of a negative value", node_to_string(n));
            return std::sqrt(v);
        }
    }
    throw std::logic_error("eval_node: unreachable");
}

// Single-variable derivative; the rule set is closed over the grammar.
inline NodePtr diff_node(const NodePtr& n, int i) {
    switch (n->kind) {
        case ExprKind::Constant: return make_constant(Rational(0));
        case ExprKind::Variable: return make_constant(Rational(n->var == i ? 1 : 0));
        case ExprKind::Add: return make_add(diff_node(n->a, i), diff_node(n->b, i));
        case ExprKind::Sub: return make_sub(diff_node(n->a, i), diff_node(n->b, i));
        case ExprKind::Mul:
            return make_add(make_mul(diff_node(n->a, i), n->b), make_mul(n->a, diff_node(n->b, i)));
        case ExprKind::Div:
            return make_div(
                make_sub(make_mul(diff_node(n->a, i), n->b), make_mul(n->a, diff_node(n->b, i))),
                make_pow(n->b, 2));
        case ExprKind::Pow:
            return make_mul(make_constant(Rational(n->exponent)),
                            make_mul(make_pow(n->a, n->exponent - 1), diff_node(n->a, i)));
        case ExprKind::Exp: return make_mul(make_fn(ExprKind::Exp, n->a), diff_node(n->a, i));
        case ExprKind::Ln: return make_div(diff_node(n->a, i), n->a);
        case ExprKind::Sin: return make_mul(make_fn(ExprKind::Cos, n->a), diff_node(n->a, i));
        case ExprKind::Cos:
            return make_sub(make_constant(Rational(0)),
                            make_mul(make_fn(ExprKind::Sin, n->a), diff_node(n->a, i)));
        case ExprKind::Sqrt:
            return make_div(diff_node(n->a, i),
                            make_mul(make_constant(Rational(2)), make_fn(ExprKind::Sqrt, n->a)));
    }
    throw std::logic_error("diff_node: unreachable");
}

}  // namespace detail

// Immutable symbolic expression over variables x1..xn with rational constants.
class Expression {
  public:
    Expression(int dimension, detail::NodePtr root)
        : dimension_(dimension), root_(std::move(root)) {
        if (dimension_ < 1) throw std::invalid_argument("Expression: dimension must be positive");
        if (!root_) throw std::invalid_argument("Expression: null root");
    }

    int dimension() const { return dimension_; }
    const detail::NodePtr& root() const { return root_; }

  private:
    int dimension_;
    detail::NodePtr root_;
};

inline Expression constant_expression(int dimension, Rational v) {
    return Expression(dimension, detail::make_constant(std::move(v)));
}

inline std::string to_string(const Expression& e) { return detail::node_to_string(e.root()); }

inline double evaluate(const Expression& e, const std::vector<double>& x) {
    if (x.size() != static_cast<size_t>(e.dimension())) {
        throw std::invalid_argument("evaluate: point dimension mismatch");
    }
    double v = detail::eval_node(e.root(), x);
    if (!std::isfinite(v)) throw EvalError("non-finite value", to_string(e));
    return v;
}

inline Expression differentiate(const Expression& e, int i) {
    if (i < 1 || i > e.dimension()) {
        throw std::invalid_argument("differentiate: variable index out of range");
    }
    return Expression(e.dimension(), detail::diff_node(e.root(), i));
}

// Applies the mixed partial D^alpha, coordinates in increasing index order.
inline Expression differentiate(const Expression& e, const MultiIndex& alpha) {
    if (alpha.dimension() != e.dimension()) {
        throw std::invalid_argument("differentiate: index dimension mismatch");
    }
    detail::NodePtr n = e.root();
    for (int i = 1; i <= e.dimension(); ++i) {
        for (uint32_t k = 0; k < alpha[i]; ++k) n = detail::diff_node(n, i);
    }
    return Expression(e.dimension(), n);
}

// Substitutes x_i -> r * x_i, so the result evaluated at x equals e at r*x.
inline Expression scale_input(const Expression& e, const Rational& r) {
    using namespace detail;
    auto rec = [&r](const auto& self, const NodePtr& n) -> NodePtr {
        switch (n->kind) {
            case ExprKind::Constant: return n;
            case ExprKind::Variable: return make_mul(make_constant(r), make_variable(n->var));
            case ExprKind::Add: return make_add(self(self, n->a), self(self, n->b));
            case ExprKind::Sub: return make_sub(self(self, n->a), self(self, n->b));
            case ExprKind::Mul: return make_mul(self(self, n->a), self(self, n->b));
            case ExprKind::Div: return make_div(self(self, n->a), self(self, n->b));
            case ExprKind::Pow: return make_pow(self(self, n->a), n->exponent);
            default: return make_fn(n->kind, self(self, n->a));
        }
    };
    return Expression(e.dimension(), rec(rec, e.root()));
}

// Exact conversion to Polynomial when the expression is one: +, -, *, integer
// powers >= 0, and division by nonzero constants. Returns nullopt otherwise.
inline std::optional<Polynomial> try_polynomial(const Expression& e) {
    using namespace detail;
    int dim = e.dimension();
    auto rec = [dim](const auto& self, const NodePtr& n) -> std::optional<Polynomial> {
        switch (n->kind) {
            case ExprKind::Constant: return Polynomial::constant(dim, n->value);
            case ExprKind::Variable: return Polynomial::variable(dim, n->var);
            case ExprKind::Add: {
                auto a = self(self, n->a), b = self(self, n->b);
                if (a && b) return *a + *b;
                return std::nullopt;
            }
            case ExprKind::Sub: {
                auto a = self(self, n->a), b = self(self, n->b);
                if (a && b) return *a - *b;
                return std::nullopt;
            }
            case ExprKind::Mul: {
                auto a = self(self, n->a), b = self(self, n->b);
                if (a && b) return *a * *b;
                return std::nullopt;
            }
            case ExprKind::Div: {
                if (n->b->kind != ExprKind::Constant || n->b->value == 0) return std::nullopt;
                auto a = self(self, n->a);
                if (a) return (Rational(1) / n->b->value) * *a;
                return std::nullopt;
            }
            case ExprKind::Pow: {
                if (n->exponent < 0) return std::nullopt;
                auto a = self(self, n->a);
                if (!a) return std::nullopt;
                Polynomial out = Polynomial::constant(dim, Rational(1));
                for (long k = 0; k < n->exponent; ++k) out = out * *a;
                return out;
            }
            default: return std::nullopt;
        }
    };
    return rec(rec, e.root());
}

namespace detail {

struct Token {
    enum class Kind { Number, Ident, Op, End } kind;
    std::string text;
    size_t position;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ >= text_.size()) {
            current_ = {Token::Kind::End, "", pos_};
            return;
        }
        size_t start = pos_;
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '.') {
                ++pos_;
                if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    throw ParseError("expected digits after decimal point", pos_);
                }
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
            current_ = {Token::Kind::Number, text_.substr(start, pos_ - start), start};
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            current_ = {Token::Kind::Ident, text_.substr(start, pos_ - start), start};
            return;
        }
        if (std::string("+-*/^()").find(c) != std::string::npos) {
            ++pos_;
            current_ = {Token::Kind::Op, std::string(1, c), start};
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }

    const std::string& text_;
    size_t pos_ = 0;
    Token current_;
};

// Decimal literals convert exactly: "1.25" -> 125/100 canonicalized.
inline Rational rational_from_literal(const std::string& text) {
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(text.c_str(), 10);
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    Rational num(digits.c_str(), 10);
    Rational den(1);
    for (size_t k = 0; k < text.size() - dot - 1; ++k) den *= 10;
    Rational q = num / den;
    q.canonicalize();
    return q;
}

class Parser {
  public:
    Parser(const std::string& text, int dimension) : lex_(text), dim_(dimension) {}

    NodePtr parse() {
        NodePtr e = expression();
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::End) {
            throw ParseError("unexpected trailing input \"" + t.text + "\"", t.position);
        }
        return e;
    }

  private:
    NodePtr expression() {
        NodePtr e = term();
        while (is_op("+") || is_op("-")) {
            std::string op = lex_.take().text;
            NodePtr rhs = term();
            e = op == "+" ? make_add(e, rhs) : make_sub(e, rhs);
        }
        return e;
    }

    NodePtr term() {
        NodePtr e = unary();
        while (is_op("*") || is_op("/")) {
            std::string op = lex_.take().text;
            NodePtr rhs = unary();
            e = op == "*" ? make_mul(e, rhs) : make_div(e, rhs);
        }
        return e;
    }

    NodePtr unary() {
        if (is_op("-")) {
            lex_.take();
            return make_sub(make_constant(Rational(0)), unary());
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (!is_op("^")) return base;
        lex_.take();
        bool negative = false;
        if (is_op("-")) {
            lex_.take();
            negative = true;
        }
        Token t = lex_.peek();
        if (t.kind != Token::Kind::Number || t.text.find('.') != std::string::npos) {
            throw ParseError("exponent must be an integer literal", t.position);
        }
        lex_.take();
        long k = 0;
        try {
            k = std::stol(t.text);
        } catch (const std::exception&) {
            throw ParseError("exponent out of range", t.position);
        }
        return make_pow(base, negative ? -k : k);
    }

    NodePtr atom() {
        Token t = lex_.peek();
        if (t.kind == Token::Kind::Number) {
            lex_.take();
            return make_constant(rational_from_literal(t.text));
        }
        if (t.kind == Token::Kind::Ident) {
            lex_.take();
            if (t.text.size() > 1 && t.text[0] == 'x' &&
                t.text.find_first_not_of("0123456789", 1) == std::string::npos) {
                long idx = 0;
                try {
                    idx = std::stol(t.text.substr(1));
                } catch (const std::exception&) {
                    idx = 0;
                }
                if (idx < 1 || idx > dim_) {
                    throw ParseError("variable index out of range for dimension " +
                                         std::to_string(dim_),
                                     t.position);
                }
                return make_variable(static_cast<int>(idx));
            }
            ExprKind kind;
            if (t.text == "exp") kind = ExprKind::Exp;
            else if (t.text == "ln") kind = ExprKind::Ln;
            else if (t.text == "sin") kind = ExprKind::Sin;
            else if (t.text == "cos") kind = ExprKind::Cos;
            else if (t.text == "sqrt") kind = ExprKind::Sqrt;
            else throw ParseError("unknown identifier \"" + t.text + "\"", t.position);
            expect("(");
            NodePtr arg = expression();
            expect(")");
            return make_fn(kind, arg);
        }
        if (is_op("(")) {
            lex_.take();
            NodePtr e = expression();
            expect(")");
            return e;
        }
        throw ParseError(t.kind == Token::Kind::End ? "unexpected end of input"
                                                    : "unexpected token \"" + t.text + "\"",
                         t.position);
    }

    bool is_op(const char* s) const {
        return lex_.peek().kind == Token::Kind::Op && lex_.peek().text == s;
    }

    void expect(const char* s) {
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::Op || t.text != s) {
            throw ParseError(std::string("expected \"") + s + "\"", t.position);
        }
        lex_.take();
    }

    Lexer lex_;
    int dim_;
};

}  // namespace detail

inline Expression parse_expression(const std::string& text, int dimension) {
    if (dimension < 1) throw std::invalid_argument("parse_expression: dimension must be positive");
    detail::Parser p(text, dimension);
    return Expression(dimension, p.parse());
}

}  // namespace polycert
