#include "entsol/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "entsol/errors.hpp"

namespace entsol {

void Env::set(std::string_view name, double value) {
    for (auto& slot : slots_) {
        if (slot.first == name) {
            slot.second = value;
            return;
        }
    }
    slots_.emplace_back(std::string(name), value);
}

std::optional<double> Env::lookup(std::string_view name) const {
    for (const auto& slot : slots_) {
        if (slot.first == name) return slot.second;
    }
    return std::nullopt;
}

struct ExprNode {
    enum class Kind { Constant, Variable, Unary, Binary, Pow };

    Kind kind;
    double value = 0.0;      // Constant
    std::string name;        // Variable
    UnaryFn fn{};            // Unary
    BinaryOp op{};           // Binary
    int exponent = 0;        // Pow
    std::shared_ptr<const ExprNode> a, b;
};

// Node helpers. Light folding keeps derivative trees small; full
// simplification is out of scope.
namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_constant(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Constant;
    n->value = v;
    return n;
}

NodePtr make_variable(std::string name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Variable;
    n->name = std::move(name);
    return n;
}

bool const_value(const NodePtr& n, double* out) {
    if (n->kind == ExprNode::Kind::Constant) {
        if (out) *out = n->value;
        return true;
    }
    return false;
}

double apply_unary(UnaryFn fn, double x) {
    switch (fn) {
        case UnaryFn::Neg: return -x;
        case UnaryFn::Sin: return std::sin(x);
        case UnaryFn::Cos: return std::cos(x);
        case UnaryFn::Exp: return std::exp(x);
        case UnaryFn::Tanh: return std::tanh(x);
        case UnaryFn::Abs: return std::fabs(x);
        case UnaryFn::Sgn: return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    }
    return 0.0;
}

NodePtr make_unary(UnaryFn fn, NodePtr a) {
    double va = 0.0;
    if (const_value(a, &va)) return make_constant(apply_unary(fn, va));
    if (fn == UnaryFn::Neg && a->kind == ExprNode::Kind::Unary && a->fn == UnaryFn::Neg)
        return a->a;
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Unary;
    n->fn = fn;
    n->a = std::move(a);
    return n;
}

NodePtr make_binary(BinaryOp op, NodePtr a, NodePtr b) {
    double va = 0.0, vb = 0.0;
    const bool ca = const_value(a, &va);
    const bool cb = const_value(b, &vb);
    if (ca && cb) {
        switch (op) {
            case BinaryOp::Add: return make_constant(va + vb);
            case BinaryOp::Sub: return make_constant(va - vb);
            case BinaryOp::Mul: return make_constant(va * vb);
            case BinaryOp::Div:
                if (vb != 0.0) return make_constant(va / vb);
                break;  // keep the node; fails at eval time
        }
    }
    if (op == BinaryOp::Add) {
        if (ca && va == 0.0) return b;
        if (cb && vb == 0.0) return a;
    }
    if (op == BinaryOp::Sub && cb && vb == 0.0) return a;
    if (op == BinaryOp::Mul) {
        if ((ca && va == 0.0) || (cb && vb == 0.0)) return make_constant(0.0);
        if (ca && va == 1.0) return b;
        if (cb && vb == 1.0) return a;
    }
    if (op == BinaryOp::Div && cb && vb == 1.0) return a;
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Binary;
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_pow(NodePtr a, int exponent) {
    if (exponent == 0) return make_constant(1.0);
    if (exponent == 1) return a;
    double va = 0.0;
    if (const_value(a, &va)) {
        double r = 1.0;
        for (int i = 0; i < exponent; ++i) r *= va;
        return make_constant(r);
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Pow;
    n->exponent = exponent;
    n->a = std::move(a);
    return n;
}

double eval_node(const ExprNode& n, const Env& env) {
    switch (n.kind) {
        case ExprNode::Kind::Constant:
            return n.value;
        case ExprNode::Kind::Variable: {
            auto v = env.lookup(n.name);
            if (!v) throw UnboundVariableError(n.name);
            return *v;
        }
        case ExprNode::Kind::Unary:
            return apply_unary(n.fn, eval_node(*n.a, env));
        case ExprNode::Kind::Binary: {
            const double a = eval_node(*n.a, env);
            const double b = eval_node(*n.b, env);
            switch (n.op) {
                case BinaryOp::Add: return a + b;
                case BinaryOp::Sub: return a - b;
                case BinaryOp::Mul: return a * b;
                case BinaryOp::Div:
                    if (b == 0.0) throw DivisionByZeroError();
                    return a / b;
            }
            return 0.0;
        }
        case ExprNode::Kind::Pow: {
            double base = eval_node(*n.a, env);
            double r = 1.0;
            int e = n.exponent;
            while (e > 0) {
                if (e & 1) r *= base;
                base *= base;
                e >>= 1;
            }
            return r;
        }
    }
    return 0.0;
}

NodePtr diff_node(const NodePtr& n, std::string_view var);

NodePtr diff_unary(const NodePtr& n, std::string_view var) {
    const NodePtr& a = n->a;
    NodePtr da = diff_node(a, var);
    switch (n->fn) {
        case UnaryFn::Neg: return make_unary(UnaryFn::Neg, da);
        case UnaryFn::Sin: return make_binary(BinaryOp::Mul, make_unary(UnaryFn::Cos, a), da);
        case UnaryFn::Cos:
            return make_binary(BinaryOp::Mul,
                               make_unary(UnaryFn::Neg, make_unary(UnaryFn::Sin, a)), da);
        case UnaryFn::Exp: return make_binary(BinaryOp::Mul, make_unary(UnaryFn::Exp, a), da);
        case UnaryFn::Tanh: {
            // d tanh = 1 - tanh^2
            NodePtr t = make_unary(UnaryFn::Tanh, a);
            NodePtr one_minus = make_binary(BinaryOp::Sub, make_constant(1.0), make_pow(t, 2));
            return make_binary(BinaryOp::Mul, one_minus, da);
        }
        case UnaryFn::Abs: return make_binary(BinaryOp::Mul, make_unary(UnaryFn::Sgn, a), da);
        case UnaryFn::Sgn: return make_constant(0.0);
    }
    return make_constant(0.0);
}

NodePtr diff_node(const NodePtr& n, std::string_view var) {
    switch (n->kind) {
        case ExprNode::Kind::Constant:
            return make_constant(0.0);
        case ExprNode::Kind::Variable:
            return make_constant(n->name == var ? 1.0 : 0.0);
        case ExprNode::Kind::Unary:
            return diff_unary(n, var);
        case ExprNode::Kind::Binary: {
            NodePtr da = diff_node(n->a, var);
            NodePtr db = diff_node(n->b, var);
            switch (n->op) {
                case BinaryOp::Add: return make_binary(BinaryOp::Add, da, db);
                case BinaryOp::Sub: return make_binary(BinaryOp::Sub, da, db);
                case BinaryOp::Mul:
                    return make_binary(BinaryOp::Add, make_binary(BinaryOp::Mul, da, n->b),
                                       make_binary(BinaryOp::Mul, n->a, db));
                case BinaryOp::Div: {
                    NodePtr num = make_binary(BinaryOp::Sub, make_binary(BinaryOp::Mul, da, n->b),
                                              make_binary(BinaryOp::Mul, n->a, db));
                    return make_binary(BinaryOp::Div, num, make_pow(n->b, 2));
                }
            }
            return make_constant(0.0);
        }
        case ExprNode::Kind::Pow: {
            NodePtr da = diff_node(n->a, var);
            NodePtr scaled = make_binary(
                BinaryOp::Mul, make_constant(static_cast<double>(n->exponent)),
                make_pow(n->a, n->exponent - 1));
            return make_binary(BinaryOp::Mul, scaled, da);
        }
    }
    return make_constant(0.0);
}

NodePtr substitute_node(const NodePtr& n, std::string_view var, const NodePtr& replacement) {
    switch (n->kind) {
        case ExprNode::Kind::Constant:
            return n;
        case ExprNode::Kind::Variable:
            return n->name == var ? replacement : n;
        case ExprNode::Kind::Unary:
            return make_unary(n->fn, substitute_node(n->a, var, replacement));
        case ExprNode::Kind::Binary:
            return make_binary(n->op, substitute_node(n->a, var, replacement),
                               substitute_node(n->b, var, replacement));
        case ExprNode::Kind::Pow:
            return make_pow(substitute_node(n->a, var, replacement), n->exponent);
    }
    return n;
}

// Printing levels: 1 = additive, 2 = multiplicative, 3 = unary prefix,
// 4 = power, 5 = atom. A child is parenthesized when its level is below the
// context it appears in.
int node_level(const ExprNode& n) {
    switch (n.kind) {
        case ExprNode::Kind::Constant:
            return n.value < 0.0 ? 3 : 5;
        case ExprNode::Kind::Variable: return 5;
        case ExprNode::Kind::Unary: return n.fn == UnaryFn::Neg ? 3 : 5;
        case ExprNode::Kind::Binary:
            return (n.op == BinaryOp::Add || n.op == BinaryOp::Sub) ? 1 : 2;
        case ExprNode::Kind::Pow: return 4;
    }
    return 5;
}

void print_node(const ExprNode& n, std::string& out);

void print_child(const ExprNode& child, int min_level, std::string& out) {
    if (node_level(child) < min_level) {
        out += '(';
        print_node(child, out);
        out += ')';
    } else {
        print_node(child, out);
    }
}

const char* unary_name(UnaryFn fn) {
    switch (fn) {
        case UnaryFn::Neg: return "-";
        case UnaryFn::Sin: return "sin";
        case UnaryFn::Cos: return "cos";
        case UnaryFn::Exp: return "exp";
        case UnaryFn::Tanh: return "tanh";
        case UnaryFn::Abs: return "abs";
        case UnaryFn::Sgn: return "sgn";
    }
    return "?";
}

void print_node(const ExprNode& n, std::string& out) {
    switch (n.kind) {
        case ExprNode::Kind::Constant: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", n.value);
            out += buf;
            return;
        }
        case ExprNode::Kind::Variable:
            out += n.name;
            return;
        case ExprNode::Kind::Unary:
            if (n.fn == UnaryFn::Neg) {
                out += '-';
                print_child(*n.a, 3, out);
            } else {
                out += unary_name(n.fn);
                out += '(';
                print_node(*n.a, out);
                out += ')';
            }
            return;
        case ExprNode::Kind::Binary: {
            const char* sym = nullptr;
            int lhs_min = 0, rhs_min = 0;
            // The right side binds one level tighter than the operator so
            // that right-nested trees keep their parentheses; the parser is
            // left-associative and the round trip must preserve evaluation
            // order bit for bit.
            switch (n.op) {
                case BinaryOp::Add: sym = " + "; lhs_min = 1; rhs_min = 2; break;
                case BinaryOp::Sub: sym = " - "; lhs_min = 1; rhs_min = 2; break;
                case BinaryOp::Mul: sym = "*"; lhs_min = 2; rhs_min = 3; break;
                case BinaryOp::Div: sym = "/"; lhs_min = 2; rhs_min = 3; break;
            }
            print_child(*n.a, lhs_min, out);
            out += sym;
            print_child(*n.b, rhs_min, out);
            return;
        }
        case ExprNode::Kind::Pow:
            print_child(*n.a, 5, out);
            out += '^';
            out += std::to_string(n.exponent);
            return;
    }
}

void collect_node(const ExprNode& n, std::vector<std::string>& out) {
    switch (n.kind) {
        case ExprNode::Kind::Constant:
            return;
        case ExprNode::Kind::Variable: {
            for (const auto& s : out)
                if (s == n.name) return;
            out.push_back(n.name);
            return;
        }
        case ExprNode::Kind::Unary:
            collect_node(*n.a, out);
            return;
        case ExprNode::Kind::Binary:
            collect_node(*n.a, out);
            collect_node(*n.b, out);
            return;
        case ExprNode::Kind::Pow:
            collect_node(*n.a, out);
            return;
    }
}

// --- recursive-descent parser --------------------------------------------

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError("empty expression", pos_);
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ < text_.size()) throw SyntaxError("unexpected trailing input", pos_);
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool consume(char c) {
        if (peek_is(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (consume('+'))
                lhs = make_binary(BinaryOp::Add, lhs, parse_term());
            else if (consume('-'))
                lhs = make_binary(BinaryOp::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_factor();
        for (;;) {
            if (consume('*'))
                lhs = make_binary(BinaryOp::Mul, lhs, parse_factor());
            else if (consume('/'))
                lhs = make_binary(BinaryOp::Div, lhs, parse_factor());
            else
                return lhs;
        }
    }

    NodePtr parse_factor() {
        if (consume('-')) return make_unary(UnaryFn::Neg, parse_factor());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (consume('^')) {
            skip_ws();
            const std::size_t at = pos_;
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                throw SyntaxError("exponent must be a non-negative integer literal", at);
            int exponent = 0;
            auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(),
                                             exponent);
            if (ec != std::errc()) throw SyntaxError("invalid integer exponent", at);
            pos_ = static_cast<std::size_t>(ptr - text_.data());
            return make_pow(base, exponent);
        }
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!consume(')')) throw SyntaxError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr parse_number() {
        const std::size_t at = pos_;
        double value = 0.0;
        auto [ptr, ec] =
            std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
        if (ec != std::errc()) throw SyntaxError("invalid number", at);
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return make_constant(value);
    }

    NodePtr parse_name() {
        const std::size_t at = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name(text_.substr(at, pos_ - at));
        if (peek_is('(')) {
            static constexpr std::array<std::pair<const char*, UnaryFn>, 6> kFunctions = {{
                {"sin", UnaryFn::Sin},
                {"cos", UnaryFn::Cos},
                {"exp", UnaryFn::Exp},
                {"tanh", UnaryFn::Tanh},
                {"abs", UnaryFn::Abs},
                {"sgn", UnaryFn::Sgn},
            }};
            for (const auto& [fname, fn] : kFunctions) {
                if (name == fname) {
                    ++pos_;  // '('
                    NodePtr arg = parse_expr();
                    if (!consume(')')) throw SyntaxError("expected ')'", pos_);
                    return make_unary(fn, arg);
                }
            }
            throw UnknownFunctionError(name, at);
        }
        return make_variable(std::move(name));
    }
};

}  // namespace

Expr::Expr() : node_(make_constant(0.0)) {}

Expr Expr::constant(double value) { return Expr(make_constant(value)); }

Expr Expr::variable(std::string name) { return Expr(make_variable(std::move(name))); }

Expr Expr::parse(std::string_view text) { return Expr(Parser(text).parse()); }

Expr Expr::operator-() const { return Expr(make_unary(UnaryFn::Neg, node_)); }

Expr Expr::operator+(const Expr& rhs) const {
    return Expr(make_binary(BinaryOp::Add, node_, rhs.node_));
}

Expr Expr::operator-(const Expr& rhs) const {
    return Expr(make_binary(BinaryOp::Sub, node_, rhs.node_));
}

Expr Expr::operator*(const Expr& rhs) const {
    return Expr(make_binary(BinaryOp::Mul, node_, rhs.node_));
}

Expr Expr::operator/(const Expr& rhs) const {
    return Expr(make_binary(BinaryOp::Div, node_, rhs.node_));
}

Expr Expr::pow(int exponent) const {
    if (exponent < 0) throw SyntaxError("exponent must be a non-negative integer literal", 0);
    return Expr(make_pow(node_, exponent));
}

Expr Expr::apply(UnaryFn fn, const Expr& argument) {
    return Expr(make_unary(fn, argument.node_));
}

double Expr::eval(const Env& env) const { return eval_node(*node_, env); }

Expr Expr::diff(std::string_view var) const { return Expr(diff_node(node_, var)); }

Expr Expr::substitute(std::string_view var, const Expr& replacement) const {
    return Expr(substitute_node(node_, var, replacement.node_));
}

std::string Expr::str() const {
    std::string out;
    print_node(*node_, out);
    return out;
}

void Expr::collect_variables(std::vector<std::string>& out) const {
    collect_node(*node_, out);
}

bool Expr::is_constant(double* value) const { return const_value(node_, value); }

}  // namespace entsol
