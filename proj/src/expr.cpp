#include "qdeform/expr.hpp"

#include "qdeform/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <utility>
#include <vector>

namespace qdeform
{

ParseError::ParseError(std::string message, std::size_t offset, std::vector<std::string> expected)
    : Error(std::move(message)), offset_(offset), expected_(std::move(expected))
{
}

ClosedFormInapplicable::ClosedFormInapplicable(int k)
    : Error("closed form inapplicable: F(" + std::to_string(k) + ") = 0"), k_(k)
{
}

using namespace expr;

namespace
{

bool is_ident_start(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_ident_char(char c)
{
    return is_ident_start(c) || (c >= '0' && c <= '9');
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string shortest(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

NodePtr make_binary(NodeKind kind, NodePtr l, NodePtr r)
{
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->lhs = std::move(l);
    node->rhs = std::move(r);
    return node;
}

NodePtr make_unary(NodeKind kind, NodePtr operand)
{
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->lhs = std::move(operand);
    return node;
}

const std::vector<std::string> kOperandStart = {"number", "identifier", "'('", "'-'"};

class Parser
{
public:
    Parser(std::string_view src, std::string_view variable) : src_(src), variable_(variable) {}

    NodePtr parse_all()
    {
        auto root = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) {
            fail("unexpected character '" + std::string(1, src_[pos_]) + "'",
                 {"operator", "end of input"});
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what, std::vector<std::string> expected) const
    {
        std::string msg = "syntax error at offset " + std::to_string(pos_) + ": " + what + "; expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            msg += (i ? ", " : "") + expected[i];
        }
        throw ParseError(msg, pos_, std::move(expected));
    }

    void skip_ws()
    {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r')) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr()
    {
        auto lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = make_binary(NodeKind::Add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = make_binary(NodeKind::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term()
    {
        auto lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = make_binary(NodeKind::Mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = make_binary(NodeKind::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_unary()
    {
        if (accept('-')) {
            return make_unary(NodeKind::Neg, parse_unary());
        }
        return parse_power();
    }

    NodePtr parse_power()
    {
        auto base = parse_primary();
        if (accept('^')) {
            return make_binary(NodeKind::Pow, base, parse_unary());
        }
        return base;
    }

    NodePtr parse_number()
    {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && is_digit(src_[look])) {
                pos_ = look;
                while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
            }
        }
        double value = 0.0;
        const char* first = src_.data() + start;
        const char* last = src_.data() + pos_;
        auto res = std::from_chars(first, last, value);
        if (res.ec != std::errc() || res.ptr != last || !std::isfinite(value)) {
            pos_ = start;
            fail("malformed or out-of-range number", {"number"});
        }
        auto node = std::make_shared<Node>();
        node->kind = NodeKind::Literal;
        // imaginary suffix, but not the start of a longer identifier
        if (pos_ < src_.size() && src_[pos_] == 'i' && !(pos_ + 1 < src_.size() && is_ident_char(src_[pos_ + 1]))) {
            ++pos_;
            node->value = complex(0.0, value);
        } else {
            node->value = complex(value, 0.0);
        }
        return node;
    }

    NodePtr parse_primary()
    {
        skip_ws();
        if (pos_ >= src_.size()) {
            fail("unexpected end of input", kOperandStart);
        }
        const char c = src_[pos_];
        if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
            return parse_number();
        }
        if (c == '(') {
            ++pos_;
            auto inner = parse_expr();
            if (!accept(')')) {
                fail("unbalanced parenthesis", {"')'", "operator"});
            }
            return inner;
        }
        if (is_ident_start(c)) {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
            const std::string name(src_.substr(start, pos_ - start));
            skip_ws();
            const bool call = pos_ < src_.size() && src_[pos_] == '(';
            if (call) {
                Function func;
                if (name == "exp") {
                    func = Function::Exp;
                } else if (name == "ln") {
                    func = Function::Ln;
                } else if (name == "sqrt") {
                    func = Function::Sqrt;
                } else {
                    pos_ = start;
                    fail("unknown function '" + name + "'", {"exp", "ln", "sqrt"});
                }
                ++pos_;
                auto arg = parse_expr();
                if (!accept(')')) {
                    fail("unbalanced parenthesis", {"')'", "operator"});
                }
                auto node = std::make_shared<Node>();
                node->kind = NodeKind::Call;
                node->func = func;
                node->lhs = std::move(arg);
                return node;
            }
            if (name == "exp" || name == "ln" || name == "sqrt") {
                fail("function '" + name + "' requires an argument", {"'('"});
            }
            auto node = std::make_shared<Node>();
            if (name == "i") {
                node->kind = NodeKind::Literal;
                node->value = complex(0.0, 1.0);
            } else if (name == variable_) {
                node->kind = NodeKind::Variable;
                node->name = name;
            } else {
                node->kind = NodeKind::Parameter;
                node->name = name;
            }
            return node;
        }
        fail("unexpected character '" + std::string(1, c) + "'", kOperandStart);
    }

    std::string_view src_;
    std::string_view variable_;
    std::size_t pos_ = 0;
};

void collect(const Node& node, std::set<std::string>& params, bool& usesVariable)
{
    switch (node.kind) {
    case NodeKind::Parameter:
        params.insert(node.name);
        break;
    case NodeKind::Variable:
        usesVariable = true;
        break;
    default:
        break;
    }
    if (node.lhs) collect(*node.lhs, params, usesVariable);
    if (node.rhs) collect(*node.rhs, params, usesVariable);
}

// Precedence levels used by the unparser.
int precedence(const Node& node)
{
    switch (node.kind) {
    case NodeKind::Add:
    case NodeKind::Sub:
        return 1;
    case NodeKind::Mul:
    case NodeKind::Div:
        return 2;
    case NodeKind::Neg:
        return 3;
    case NodeKind::Pow:
        return 4;
    case NodeKind::Literal:
        // only nonnegative real or nonnegative pure-imaginary literals print as atoms
        if ((node.value.imag() == 0.0 && !std::signbit(node.value.real())) ||
            (node.value.real() == 0.0 && !std::signbit(node.value.real()) && !std::signbit(node.value.imag()))) {
            return 5;
        }
        return 0;
    default:
        return 5;
    }
}

void unparse_into(const Node& node, std::string& out);

void unparse_child(const Node& child, int minPrec, std::string& out)
{
    if (precedence(child) < minPrec) {
        out += '(';
        unparse_into(child, out);
        out += ')';
    } else {
        unparse_into(child, out);
    }
}

void unparse_into(const Node& node, std::string& out)
{
    switch (node.kind) {
    case NodeKind::Literal: {
        const complex v = node.value;
        if (v.imag() == 0.0) {
            out += shortest(v.real());
        } else if (v.real() == 0.0 && !std::signbit(v.real())) {
            out += shortest(v.imag()) + "i";
        } else {
            out += format_complex(v);
        }
        break;
    }
    case NodeKind::Variable:
    case NodeKind::Parameter:
        out += node.name;
        break;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div: {
        const int p = precedence(node);
        static constexpr const char* ops = "+-*/";
        unparse_child(*node.lhs, p, out);
        out += ops[static_cast<int>(node.kind) - static_cast<int>(NodeKind::Add)];
        unparse_child(*node.rhs, p + 1, out);
        break;
    }
    case NodeKind::Pow:
        unparse_child(*node.lhs, 5, out);
        out += '^';
        unparse_child(*node.rhs, 3, out);
        break;
    case NodeKind::Neg:
        out += '-';
        unparse_child(*node.lhs, 4, out);
        break;
    case NodeKind::Call:
        out += node.func == Function::Exp ? "exp(" : node.func == Function::Ln ? "ln(" : "sqrt(";
        unparse_into(*node.lhs, out);
        out += ')';
        break;
    }
}

bool equal_nodes(const Node& a, const Node& b)
{
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case NodeKind::Literal:
        return a.value == b.value;
    case NodeKind::Variable:
    case NodeKind::Parameter:
        return a.name == b.name;
    case NodeKind::Call:
        return a.func == b.func && equal_nodes(*a.lhs, *b.lhs);
    case NodeKind::Neg:
        return equal_nodes(*a.lhs, *b.lhs);
    default:
        return equal_nodes(*a.lhs, *b.lhs) && equal_nodes(*a.rhs, *b.rhs);
    }
}

// Positive and negative real zero collapse to +0 so that principal
// branches of log/pow see the upper side of the cut.
complex canonical_zero_imag(complex z)
{
    return z.imag() == 0.0 ? complex(z.real(), 0.0) : z;
}

complex multiply(complex a, complex b)
{
    if (a.imag() == 0.0 && b.imag() == 0.0) return complex(a.real() * b.real(), 0.0);
    return a * b;
}

complex divide(complex a, complex b)
{
    if (b == complex(0.0, 0.0)) {
        throw EvalError(EvalError::Kind::DivisionByZero, "division by zero");
    }
    if (a.imag() == 0.0 && b.imag() == 0.0) return complex(a.real() / b.real(), 0.0);
    return a / b;
}

complex integer_power(complex base, long long k)
{
    const bool negative = k < 0;
    unsigned long long e = negative ? static_cast<unsigned long long>(-(k + 1)) + 1ULL : static_cast<unsigned long long>(k);
    complex result(1.0, 0.0);
    complex b = base;
    while (e) {
        if (e & 1ULL) result = multiply(result, b);
        e >>= 1ULL;
        if (e) b = multiply(b, b);
    }
    if (negative) {
        if (result == complex(0.0, 0.0)) {
            throw EvalError(EvalError::Kind::DivisionByZero, "zero raised to a negative power");
        }
        result = divide(complex(1.0, 0.0), result);
    }
    return result;
}

complex power(complex base, complex exponent)
{
    if (exponent.imag() == 0.0 && std::floor(exponent.real()) == exponent.real() &&
        std::fabs(exponent.real()) < 9.0e15) {
        return integer_power(base, static_cast<long long>(exponent.real()));
    }
    if (base == complex(0.0, 0.0)) {
        if (exponent.real() > 0.0) return complex(0.0, 0.0);
        throw EvalError(EvalError::Kind::Domain, "zero raised to a non-integer power with nonpositive real part");
    }
    base = canonical_zero_imag(base);
    if (base.imag() == 0.0 && base.real() > 0.0 && exponent.imag() == 0.0) {
        return complex(std::pow(base.real(), exponent.real()), 0.0);
    }
    return std::exp(exponent * std::log(base));
}

complex apply(Function func, complex arg)
{
    switch (func) {
    case Function::Exp:
        if (arg.imag() == 0.0) return complex(std::exp(arg.real()), 0.0);
        return std::exp(arg);
    case Function::Ln:
        if (arg == complex(0.0, 0.0)) throw EvalError(EvalError::Kind::Domain, "ln of zero");
        arg = canonical_zero_imag(arg);
        if (arg.imag() == 0.0 && arg.real() > 0.0) return complex(std::log(arg.real()), 0.0);
        return std::log(arg);
    case Function::Sqrt:
        if (arg == complex(0.0, 0.0)) throw EvalError(EvalError::Kind::Domain, "sqrt of zero (branch point)");
        arg = canonical_zero_imag(arg);
        if (arg.imag() == 0.0 && arg.real() > 0.0) return complex(std::sqrt(arg.real()), 0.0);
        return std::sqrt(arg);
    }
    return {};
}

complex eval_node(const Node& node, complex var, const Bindings& bindings)
{
    switch (node.kind) {
    case NodeKind::Literal:
        return node.value;
    case NodeKind::Variable:
        return var;
    case NodeKind::Parameter: {
        auto it = bindings.find(node.name);
        if (it == bindings.end()) {
            throw EvalError(EvalError::Kind::UnboundParameter, "unbound parameter '" + node.name + "'");
        }
        return it->second;
    }
    case NodeKind::Add:
        return eval_node(*node.lhs, var, bindings) + eval_node(*node.rhs, var, bindings);
    case NodeKind::Sub:
        return eval_node(*node.lhs, var, bindings) - eval_node(*node.rhs, var, bindings);
    case NodeKind::Mul:
        return multiply(eval_node(*node.lhs, var, bindings), eval_node(*node.rhs, var, bindings));
    case NodeKind::Div:
        return divide(eval_node(*node.lhs, var, bindings), eval_node(*node.rhs, var, bindings));
    case NodeKind::Pow:
        return power(eval_node(*node.lhs, var, bindings), eval_node(*node.rhs, var, bindings));
    case NodeKind::Neg:
        return -eval_node(*node.lhs, var, bindings);
    case NodeKind::Call:
        return apply(node.func, eval_node(*node.lhs, var, bindings));
    }
    return {};
}

} // namespace

Expression::Expression() : Expression(std::make_shared<Node>(Node{NodeKind::Literal, complex(0.0, 0.0), {}, {}, {}, {}}), "0", "n")
{
}

Expression::Expression(NodePtr root, std::string source, std::string variable)
    : root_(std::move(root)), source_(std::move(source)), variable_(std::move(variable))
{
    collect(*root_, free_, usesVariable_);
}

Expression parse(std::string_view source, std::string_view variable)
{
    Parser parser(source, variable);
    return Expression(parser.parse_all(), std::string(source), std::string(variable));
}

std::string unparse(const Expression& e)
{
    std::string out;
    unparse_into(e.root(), out);
    return out;
}

bool structurally_equal(const Expression& a, const Expression& b)
{
    return a.variable() == b.variable() && equal_nodes(a.root(), b.root());
}

complex evaluate(const Expression& e, complex variable, const Bindings& bindings)
{
    for (const auto& name : e.free_parameters()) {
        if (bindings.find(name) == bindings.end()) {
            throw EvalError(EvalError::Kind::UnboundParameter, "unbound parameter '" + name + "'");
        }
    }
    const complex v = eval_node(e.root(), variable, bindings);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw EvalError(EvalError::Kind::NonFinite, "expression '" + e.source() + "' is not finite");
    }
    return v;
}

complex parse_complex(std::string_view text)
{
    // no variable may appear: use a name that cannot be an identifier
    Expression e = parse(text, "#");
    if (!e.free_parameters().empty()) {
        throw ParseError("complex constant contains identifier '" + *e.free_parameters().begin() + "'", 0,
                         {"number"});
    }
    return evaluate(e, complex{}, Bindings{});
}

std::string format_complex(complex value)
{
    if (value.imag() == 0.0) return shortest(value.real());
    if (value.real() == 0.0) return shortest(value.imag()) + "i";
    std::string im = shortest(value.imag());
    if (im.front() != '-') im = "+" + im;
    return shortest(value.real()) + im + "i";
}

} // namespace qdeform
