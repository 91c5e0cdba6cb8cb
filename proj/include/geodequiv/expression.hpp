#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geodequiv/error.hpp"
#include "geodequiv/scalar.hpp"

namespace geodequiv {

enum class Op : std::uint8_t {
    Number,
    Variable,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
};

/// One node of a postfix-ordered expression tape. Children always precede
/// their parent; the root is the last node.
struct ExprNode {
    Op op = Op::Number;
    double value = 0.0;       // literal, or the folded exponent of a constant-exponent Pow
    std::uint32_t index = 0;  // variable index
    std::int32_t lhs = -1;
    std::int32_t rhs = -1;
    bool constant_exponent = false;

    bool operator==(const ExprNode&) const = default;
};

/// Immutable scalar expression over chart coordinates (referenced by index).
///
/// Evaluation is templated on the scalar type: double for values, Dual for
/// gradients over up to kMaxDualVars seeded variables, Dual2 for value,
/// gradient and Hessian. Copies share the node tape.
class Expression {
public:
    /// The constant 0.
    Expression();

    static Expression constant(double value);
    static Expression variable(std::size_t index);

    template <class S>
    S evaluate(std::span<const S> x) const;

    double operator()(std::span<const double> x) const { return evaluate<double>(x); }

    bool is_constant() const;
    /// Sorted, de-duplicated variable indices referenced by the expression.
    std::vector<std::size_t> variables() const;
    std::size_t size() const { return nodes_->size(); }
    const std::vector<ExprNode>& nodes() const { return *nodes_; }

    /// Fully parenthesized infix text; reparses to a structurally identical tape.
    std::string to_string(std::span<const std::string> names) const;

    bool structurally_equal(const Expression& other) const { return *nodes_ == *other.nodes_; }

    friend Expression operator+(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a, const Expression& b);
    friend Expression operator*(const Expression& a, const Expression& b);
    friend Expression operator/(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a);
    friend Expression pow(const Expression& base, const Expression& exponent);
    friend Expression pow(const Expression& base, double exponent);
    friend Expression sin(const Expression& a);
    friend Expression cos(const Expression& a);
    friend Expression exp(const Expression& a);
    friend Expression log(const Expression& a);
    friend Expression sqrt(const Expression& a);
    friend Expression abs(const Expression& a);

private:
    explicit Expression(std::vector<ExprNode> nodes);
    static Expression binary(Op op, const Expression& a, const Expression& b);
    static Expression unary(Op op, const Expression& a);

    std::shared_ptr<const std::vector<ExprNode>> nodes_;
};

inline Expression operator+(const Expression& a, double b) { return a + Expression::constant(b); }
inline Expression operator+(double a, const Expression& b) { return Expression::constant(a) + b; }
inline Expression operator-(const Expression& a, double b) { return a - Expression::constant(b); }
inline Expression operator-(double a, const Expression& b) { return Expression::constant(a) - b; }
inline Expression operator*(const Expression& a, double b) { return a * Expression::constant(b); }
inline Expression operator*(double a, const Expression& b) { return Expression::constant(a) * b; }
inline Expression operator/(const Expression& a, double b) { return a / Expression::constant(b); }
inline Expression operator/(double a, const Expression& b) { return Expression::constant(a) / b; }

/// Parse infix source against a list of coordinate names.
///
/// Grammar: sum := product {(+|-) product}; product := unary {(*|/) unary};
/// unary := - unary | power; power := primary [^ unary]; primary := number |
/// name | function ( sum ) | ( sum ). "^" is right-associative and binds
/// tighter than unary minus. Functions: sin cos exp log sqrt abs.
Expression parse(std::string_view src, std::span<const std::string> names);

bool is_function_name(std::string_view name);

/// Value, gradient and Hessian with respect to all len(x) coordinates.
Dual2 eval2(const Expression& expr, std::span<const double> x);

namespace detail {

[[noreturn]] void throw_domain(const char* function, double argument);

inline bool is_small_integer(double e) {
    return std::floor(e) == e && std::abs(e) < 1e9;
}

template <class S>
S power(const S& base, const S& exponent, const ExprNode& node) {
    using std::exp;
    using std::log;
    using std::pow;
    const double b = value_of(base);
    if (node.constant_exponent) {
        const double e = node.value;
        if (is_small_integer(e)) {
            if (b == 0.0 && e < 0) throw_domain("pow", b);
            return powi(base, static_cast<long long>(e));
        }
        if (!(b > 0.0)) throw_domain("pow", b);
        return pow(base, e);
    }
    if (!(b > 0.0)) throw_domain("pow", b);
    return exp(exponent * log(base));
}

}  // namespace detail

template <class S>
S Expression::evaluate(std::span<const S> x) const {
    using std::abs;
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    const auto& nodes = *nodes_;
    std::vector<S> vals(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const ExprNode& n = nodes[i];
        switch (n.op) {
            case Op::Number: vals[i] = S(n.value); break;
            case Op::Variable: vals[i] = x[n.index]; break;
            case Op::Neg: vals[i] = -vals[n.lhs]; break;
            case Op::Add: vals[i] = vals[n.lhs] + vals[n.rhs]; break;
            case Op::Sub: vals[i] = vals[n.lhs] - vals[n.rhs]; break;
            case Op::Mul: vals[i] = vals[n.lhs] * vals[n.rhs]; break;
            case Op::Div:
                if (value_of(vals[n.rhs]) == 0.0) detail::throw_domain("division", 0.0);
                vals[i] = vals[n.lhs] / vals[n.rhs];
                break;
            case Op::Pow: vals[i] = detail::power(vals[n.lhs], vals[n.rhs], n); break;
            case Op::Sin: vals[i] = sin(vals[n.lhs]); break;
            case Op::Cos: vals[i] = cos(vals[n.lhs]); break;
            case Op::Exp: vals[i] = exp(vals[n.lhs]); break;
            case Op::Log:
                if (!(value_of(vals[n.lhs]) > 0.0)) detail::throw_domain("log", value_of(vals[n.lhs]));
                vals[i] = log(vals[n.lhs]);
                break;
            case Op::Sqrt:
                if (!(value_of(vals[n.lhs]) >= 0.0)) detail::throw_domain("sqrt", value_of(vals[n.lhs]));
                vals[i] = sqrt(vals[n.lhs]);
                break;
            case Op::Abs: vals[i] = abs(vals[n.lhs]); break;
        }
    }
    return std::move(vals.back());
}

}  // namespace geodequiv
