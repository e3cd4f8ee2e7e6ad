#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace entsol {

/// Variable bindings for expression evaluation. A flat list with linear
/// lookup: environments here hold at most a handful of variables and are
/// reused across millions of evaluations, so this beats a hash map.
class Env {
public:
    void set(std::string_view name, double value);
    std::optional<double> lookup(std::string_view name) const;
    void clear() { slots_.clear(); }

private:
    std::vector<std::pair<std::string, double>> slots_;
};

enum class UnaryFn { Neg, Sin, Cos, Exp, Tanh, Abs, Sgn };
enum class BinaryOp { Add, Sub, Mul, Div };

struct ExprNode;  // implementation detail, defined in expr.cpp

/// Immutable expression tree over real constants, named variables, the unary
/// functions above, +, -, *, / and integer powers with non-negative literal
/// exponents. Nodes are shared, so copies and symbolic derivatives are cheap.
///
/// Grammar accepted by parse() (loosest binding first):
///   expr   := term  { ('+'|'-') term }
///   term   := factor { ('*'|'/') factor }
///   factor := '-' factor | power
///   power  := atom [ '^' unsigned-integer ]
///   atom   := number | name | name '(' expr ')' | '(' expr ')'
/// so "2+3*4" is 14 and "-2^2" is -4. Function names: sin, cos, exp, tanh,
/// abs, sgn. Any other name is a variable; unknown variables only fail at
/// evaluation time.
class Expr {
public:
    /// Constant zero.
    Expr();

    static Expr constant(double value);
    static Expr variable(std::string name);

    /// Throws SyntaxError (with byte offset) or UnknownFunctionError.
    static Expr parse(std::string_view text);

    Expr operator-() const;
    Expr operator+(const Expr& rhs) const;
    Expr operator-(const Expr& rhs) const;
    Expr operator*(const Expr& rhs) const;
    Expr operator/(const Expr& rhs) const;

    /// Integer power, exponent >= 0.
    Expr pow(int exponent) const;

    static Expr apply(UnaryFn fn, const Expr& argument);

    /// Throws UnboundVariableError or DivisionByZeroError.
    double eval(const Env& env) const;

    /// Symbolic derivative with respect to `var`. d|x|/dx is sgn(x), with
    /// sgn(0) = 0; d sgn(x)/dx is 0 everywhere.
    Expr diff(std::string_view var) const;

    /// Replace every occurrence of `var` by `replacement`.
    Expr substitute(std::string_view var, const Expr& replacement) const;

    /// Re-parseable text form: Expr::parse(e.str()) evaluates identically.
    std::string str() const;

    /// Appends the names of variables occurring in the tree (deduplicated).
    void collect_variables(std::vector<std::string>& out) const;

    /// True for a plain constant node; stores the value if requested.
    bool is_constant(double* value = nullptr) const;

private:
    using NodePtr = std::shared_ptr<const ExprNode>;

    explicit Expr(NodePtr node) : node_(std::move(node)) {}

    NodePtr node_;
};

inline Expr sin(const Expr& e) { return Expr::apply(UnaryFn::Sin, e); }
inline Expr cos(const Expr& e) { return Expr::apply(UnaryFn::Cos, e); }
inline Expr exp(const Expr& e) { return Expr::apply(UnaryFn::Exp, e); }
inline Expr tanh(const Expr& e) { return Expr::apply(UnaryFn::Tanh, e); }
inline Expr abs(const Expr& e) { return Expr::apply(UnaryFn::Abs, e); }
inline Expr sgn(const Expr& e) { return Expr::apply(UnaryFn::Sgn, e); }

}  // namespace entsol
