#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace prange {

enum class Op : unsigned char {
    Constant,
    Variable,
    Negate,
    Add,
    Subtract,
    Multiply,
    Divide,
    Power,  // integer exponent >= 0
    Sqrt,
    Cos,
    Acos,
};

/// Immutable scalar expression over a coordinate vector X.
///
/// Nodes are reference counted and may be shared between expressions (the
/// Lagrange system reuses constraint subterms heavily), but every operation
/// has plain tree semantics. An Expr is never empty: a default constructed one
/// is the constant 0.
class Expr {
public:
    struct Node;

    Expr();

    static Expr constant(double value);
    static Expr variable(std::size_t index);

    // Raw constructors; no folding happens here. Use simplify() for that.
    static Expr negate(Expr a);
    static Expr add(Expr a, Expr b);
    static Expr subtract(Expr a, Expr b);
    static Expr multiply(Expr a, Expr b);
    static Expr divide(Expr a, Expr b);
    static Expr power(Expr base, int exponent);
    static Expr sqrt(Expr a);
    static Expr cos(Expr a);
    static Expr acos(Expr a);

    Op op() const;
    double value() const;        // Constant only
    std::size_t index() const;   // Variable only
    int exponent() const;        // Power only
    std::size_t arity() const;
    Expr child(std::size_t i) const;

    bool is_constant() const { return op() == Op::Constant; }
    bool is_constant(double v) const { return is_constant() && value() == v; }

    // Identity of the underlying node, used for memoization over shared DAGs.
    const Node* id() const { return node_.get(); }

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    static Expr make(Op op, Expr a, Expr b);

    std::shared_ptr<const Node> node_;
};

Expr operator-(Expr a);
Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator+(Expr a, double b);
Expr operator-(Expr a, double b);
Expr operator*(double a, Expr b);
Expr operator*(Expr a, double b);

/// Evaluates `e` at X. Throws DomainError for a negative radicand or an
/// arccos argument outside [-1, 1], DivisionByZero for a zero divisor.
double eval(const Expr& e, std::span<const double> x);

/// Partial derivative with respect to variable `index`. The result is built
/// with the folding constructors so it stays compact.
Expr differentiate(const Expr& e, std::size_t index);

/// Constant folding and identity elimination (e+0, e*1, e*0, 0/e, --e, e^1,
/// e^0). Never changes the value where the original is defined.
Expr simplify(const Expr& e);

/// Replaces every Variable(i) with `replacement(i)`.
Expr substitute(const Expr& e, const std::function<Expr(std::size_t)>& replacement);

/// Renumbers variables: Variable(i) becomes Variable(map[i]) or, when map[i]
/// is npos, the constant `pinned[i]`.
Expr remap_variables(const Expr& e, std::span<const std::size_t> map, std::span<const double> pinned);

bool depends_on(const Expr& e, std::size_t index);

/// One past the largest variable index used, 0 for a constant expression.
std::size_t variable_extent(const Expr& e);

/// Number of distinct nodes in the DAG.
std::size_t node_count(const Expr& e);

/// Structural equality (tree semantics, constants compared exactly).
bool structurally_equal(const Expr& a, const Expr& b);

/// Infix rendering; `name` maps variable indices to identifiers.
std::string to_string(const Expr& e,
                      const std::function<std::string(std::size_t)>& name = {});

/// Parses the algebraic-constraint grammar: identifiers, decimal literals,
/// binary + - * / ^ (non-negative integer exponent), unary -, parentheses and
/// sqrt(...). Identifiers are mapped to variable indices by `resolve`, which
/// may throw to reject unknown names. Syntax errors throw ParseError.
Expr parse_expression(std::string_view text,
                      const std::function<std::size_t(std::string_view)>& resolve);

} // namespace prange
