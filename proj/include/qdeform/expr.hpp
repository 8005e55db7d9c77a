#pragma once

// Small analytic-expression language used to specify F(n), G(n) and
// moment weights W(x).
//
//   expr    := term  { ("+" | "-") term }
//   term    := unary { ("*" | "/") unary }
//   unary   := "-" unary | power
//   power   := primary [ "^" unary ]          (right-associative)
//   primary := number [ "i" ] | "i" | variable | identifier
//            | func "(" expr ")" | "(" expr ")"
//   func    := "exp" | "ln" | "sqrt"

#include <complex>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

namespace qdeform
{

using complex = std::complex<double>;

/// Parameter identifier -> value.
using Bindings = std::map<std::string, complex, std::less<>>;

namespace expr
{

enum class NodeKind { Literal, Variable, Parameter, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Function { Exp, Ln, Sqrt };

struct Node
{
    NodeKind kind;
    complex value{};   // Literal
    std::string name;  // Variable / Parameter
    Function func{};   // Call
    std::shared_ptr<const Node> lhs;  // unary operand, call argument, or left operand
    std::shared_ptr<const Node> rhs;
};

using NodePtr = std::shared_ptr<const Node>;

} // namespace expr

class Expression
{
public:
    /// The constant 0.
    Expression();
    Expression(expr::NodePtr root, std::string source, std::string variable);

    const expr::Node& root() const { return *root_; }
    const expr::NodePtr& root_ptr() const { return root_; }
    const std::string& source() const { return source_; }
    /// Name of the evaluation variable ("n" for F/G, "x" for weights).
    const std::string& variable() const { return variable_; }
    /// Parameter identifiers appearing in the tree.
    const std::set<std::string>& free_parameters() const { return free_; }

    bool depends_on_variable() const { return usesVariable_; }

private:
    expr::NodePtr root_;
    std::string source_;
    std::string variable_;
    std::set<std::string> free_;
    bool usesVariable_ = false;
};

/// Throws ParseError with the byte offset and expected-token set.
Expression parse(std::string_view source, std::string_view variable = "n");

/// Canonical text with minimal parentheses; parse(unparse(e)) is
/// structurally identical to e.
std::string unparse(const Expression& e);

bool structurally_equal(const Expression& a, const Expression& b);

complex evaluate(const Expression& e, complex variable, const Bindings& bindings);

inline complex evaluate(const Expression& e, long n, const Bindings& bindings)
{
    return evaluate(e, complex(static_cast<double>(n), 0.0), bindings);
}

/// Parses a standalone complex constant such as "0.5", "-2i" or "1.5-0.25i".
complex parse_complex(std::string_view text);

/// "a+bi" with 17 significant digits per component; parse_complex inverts it.
std::string format_complex(complex value);

} // namespace qdeform
