#include "geodequiv/expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace geodequiv {

namespace detail {

void throw_domain(const char* function, double argument) { throw DomainError(function, argument); }

}  // namespace detail

namespace {

constexpr std::array<std::pair<std::string_view, Op>, 6> kFunctions{{
    {"sin", Op::Sin},
    {"cos", Op::Cos},
    {"exp", Op::Exp},
    {"log", Op::Log},
    {"sqrt", Op::Sqrt},
    {"abs", Op::Abs},
}};

std::string_view function_name(Op op) {
    for (const auto& [name, o] : kFunctions)
        if (o == op) return name;
    return "?";
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    std::string s(buf.data(), end);
    return std::signbit(v) ? "(" + s + ")" : s;
}

bool subtree_has_variable(const std::vector<ExprNode>& nodes, std::int32_t root) {
    std::vector<std::int32_t> stack{root};
    while (!stack.empty()) {
        const auto i = stack.back();
        stack.pop_back();
        const ExprNode& n = nodes[i];
        if (n.op == Op::Variable) return true;
        if (n.lhs >= 0) stack.push_back(n.lhs);
        if (n.rhs >= 0) stack.push_back(n.rhs);
    }
    return false;
}

}  // namespace

bool is_function_name(std::string_view name) {
    return std::any_of(kFunctions.begin(), kFunctions.end(),
                       [&](const auto& f) { return f.first == name; });
}

Expression::Expression() : Expression(std::vector<ExprNode>{ExprNode{}}) {}

Expression::Expression(std::vector<ExprNode> nodes)
    : nodes_(std::make_shared<const std::vector<ExprNode>>(std::move(nodes))) {}

Expression Expression::constant(double value) {
    ExprNode n;
    n.op = Op::Number;
    n.value = value;
    return Expression(std::vector<ExprNode>{n});
}

Expression Expression::variable(std::size_t index) {
    ExprNode n;
    n.op = Op::Variable;
    n.index = static_cast<std::uint32_t>(index);
    return Expression(std::vector<ExprNode>{n});
}

Expression Expression::unary(Op op, const Expression& a) {
    const auto& an = *a.nodes_;
    if (op == Op::Neg && an.size() == 1 && an[0].op == Op::Number) return constant(-an[0].value);
    std::vector<ExprNode> nodes(an);
    ExprNode n;
    n.op = op;
    n.lhs = static_cast<std::int32_t>(an.size() - 1);
    nodes.push_back(n);
    return Expression(std::move(nodes));
}

Expression Expression::binary(Op op, const Expression& a, const Expression& b) {
    const auto& an = *a.nodes_;
    const auto& bn = *b.nodes_;
    std::vector<ExprNode> nodes;
    nodes.reserve(an.size() + bn.size() + 1);
    nodes.insert(nodes.end(), an.begin(), an.end());
    const auto offset = static_cast<std::int32_t>(an.size());
    for (ExprNode n : bn) {
        if (n.lhs >= 0) n.lhs += offset;
        if (n.rhs >= 0) n.rhs += offset;
        nodes.push_back(n);
    }
    ExprNode n;
    n.op = op;
    n.lhs = offset - 1;
    n.rhs = static_cast<std::int32_t>(nodes.size() - 1);
    if (op == Op::Pow && !subtree_has_variable(nodes, n.rhs)) {
        try {
            n.value = b.evaluate<double>(std::span<const double>{});
            n.constant_exponent = true;
        } catch (const DomainError&) {
            // Left to fail at evaluation time.
        }
    }
    nodes.push_back(n);
    return Expression(std::move(nodes));
}

Expression operator+(const Expression& a, const Expression& b) { return Expression::binary(Op::Add, a, b); }
Expression operator-(const Expression& a, const Expression& b) { return Expression::binary(Op::Sub, a, b); }
Expression operator*(const Expression& a, const Expression& b) { return Expression::binary(Op::Mul, a, b); }
Expression operator/(const Expression& a, const Expression& b) { return Expression::binary(Op::Div, a, b); }
Expression operator-(const Expression& a) { return Expression::unary(Op::Neg, a); }
Expression pow(const Expression& base, const Expression& exponent) {
    return Expression::binary(Op::Pow, base, exponent);
}
Expression pow(const Expression& base, double exponent) {
    return Expression::binary(Op::Pow, base, Expression::constant(exponent));
}
Expression sin(const Expression& a) { return Expression::unary(Op::Sin, a); }
Expression cos(const Expression& a) { return Expression::unary(Op::Cos, a); }
Expression exp(const Expression& a) { return Expression::unary(Op::Exp, a); }
Expression log(const Expression& a) { return Expression::unary(Op::Log, a); }
Expression sqrt(const Expression& a) { return Expression::unary(Op::Sqrt, a); }
Expression abs(const Expression& a) { return Expression::unary(Op::Abs, a); }

bool Expression::is_constant() const {
    return std::none_of(nodes_->begin(), nodes_->end(),
                        [](const ExprNode& n) { return n.op == Op::Variable; });
}

std::vector<std::size_t> Expression::variables() const {
    std::vector<std::size_t> out;
    for (const auto& n : *nodes_)
        if (n.op == Op::Variable) out.push_back(n.index);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string Expression::to_string(std::span<const std::string> names) const {
    const auto& nodes = *nodes_;
    std::vector<std::string> text(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const ExprNode& n = nodes[i];
        auto bin = [&](const char* sym) { return "(" + text[n.lhs] + sym + text[n.rhs] + ")"; };
        switch (n.op) {
            case Op::Number: text[i] = format_number(n.value); break;
            case Op::Variable:
                text[i] = n.index < names.size() ? names[n.index] : "x" + std::to_string(n.index + 1);
                break;
            case Op::Neg: text[i] = "(-" + text[n.lhs] + ")"; break;
            case Op::Add: text[i] = bin(" + "); break;
            case Op::Sub: text[i] = bin(" - "); break;
            case Op::Mul: text[i] = bin(" * "); break;
            case Op::Div: text[i] = bin(" / "); break;
            case Op::Pow: text[i] = bin("^"); break;
            default: text[i] = std::string(function_name(n.op)) + "(" + text[n.lhs] + ")"; break;
        }
    }
    return text.back();
}

Dual2 eval2(const Expression& expr, std::span<const double> x) {
    std::vector<Dual2> vars;
    vars.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) vars.push_back(Dual2::variable(x[i], i, x.size()));
    Dual2 r = expr.evaluate<Dual2>(vars);
    if (r.size() != x.size()) {
        // Constant expressions carry no derivative storage; widen to n.
        r = r + Dual2(0.0, x.size());
    }
    return r;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    Parser(std::string_view src, std::span<const std::string> names) : src_(src), names_(names) {}

    Expression run() {
        Expression e = parse_sum();
        skip_ws();
        if (pos_ < src_.size()) {
            throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_,
                             {"+", "-", "*", "/", "^", ")", "end of input"});
        }
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_, {std::string(1, c)});
    }

    Expression parse_sum() {
        Expression e = parse_product();
        for (;;) {
            if (accept('+')) e = e + parse_product();
            else if (accept('-')) e = e - parse_product();
            else return e;
        }
    }

    Expression parse_product() {
        Expression e = parse_unary();
        for (;;) {
            if (accept('*')) e = e * parse_unary();
            else if (accept('/')) e = e / parse_unary();
            else return e;
        }
    }

    Expression parse_unary() {
        if (accept('-')) return -parse_unary();
        return parse_power();
    }

    Expression parse_power() {
        Expression base = parse_primary();
        if (accept('^')) return pow(base, parse_unary());
        return base;
    }

    Expression parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw expected_operand();
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        if (accept('(')) {
            Expression e = parse_sum();
            expect(')');
            return e;
        }
        throw expected_operand();
    }

    ParseError expected_operand() const {
        return ParseError("expected expression", pos_, {"number", "identifier", "(", "-"});
    }

    Expression parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (ec != std::errc() || ptr != src_.data() + pos_)
            throw ParseError("malformed number", start, {"number"});
        return Expression::constant(v);
    }

    Expression parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return Expression::variable(i);
        for (const auto& [fname, op] : kFunctions) {
            if (fname == name) {
                expect('(');
                Expression arg = parse_sum();
                expect(')');
                switch (op) {
                    case Op::Sin: return sin(arg);
                    case Op::Cos: return cos(arg);
                    case Op::Exp: return exp(arg);
                    case Op::Log: return log(arg);
                    case Op::Sqrt: return sqrt(arg);
                    default: return abs(arg);
                }
            }
        }
        throw UnknownIdentifierError(std::string(name), start);
    }

    std::string_view src_;
    std::span<const std::string> names_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression parse(std::string_view src, std::span<const std::string> names) {
    return Parser(src, names).run();
}

}  // namespace geodequiv
