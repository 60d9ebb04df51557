#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lyapcert/dual.hpp"
#include "lyapcert/errors.hpp"

namespace lyapcert {

enum class UnaryFunc : unsigned char { neg, sin, cos, tan, tanh, sech, exp, ln, abs, sqrt };
enum class BinaryOp : unsigned char { add, sub, mul, div, pow };

/// One node of a parsed expression. Nodes live in a flat arena in postorder
/// (children always precede their parent), which makes evaluation a single
/// linear sweep without recursion.
struct ExprNode {
    enum class Kind : unsigned char { constant, variable, unary, binary };
    Kind kind = Kind::constant;
    double value = 0.0;       // constant payload
    int var = 0;              // 1-based variable index (x1, x2, ...)
    UnaryFunc func = UnaryFunc::neg;
    BinaryOp op = BinaryOp::add;
    std::uint32_t lhs = 0;    // child indices into the arena
    std::uint32_t rhs = 0;
};

/// Immutable arithmetic expression over variables x1..xn.
///
/// Supported: + - * / ^ (right-associative, binds tightest, then unary
/// minus, then * /, then + -), and the functions sin, cos, tan, tanh, sech,
/// exp, ln, abs, sqrt. The grammar is documented in docs/grammar.ebnf.
class Expression {
public:
    /// Parses source text. If max_var > 0, variables above x<max_var> are
    /// rejected. Throws ParseError with a character offset.
    static Expression parse(std::string_view source, int max_var = 0);

    /// Evaluates at a point. The point must cover every variable referenced.
    /// A non-finite result is an EvalError, never a silent value.
    [[nodiscard]] double eval(std::span<const double> point) const;

    /// Evaluates value and exact partial derivative with respect to
    /// x<seed_var> (1-based). Derivative of a variable absent from the
    /// expression is exactly 0.
    [[nodiscard]] Dual eval_dual(std::span<const double> point, int seed_var) const;

    /// Highest variable index referenced (0 for constant expressions).
    [[nodiscard]] int max_variable() const noexcept { return max_var_; }

    /// Printable form that re-parses to a structurally identical tree.
    [[nodiscard]] std::string str() const;

    [[nodiscard]] bool same_structure(const Expression& other) const noexcept;

    [[nodiscard]] const std::vector<ExprNode>& nodes() const noexcept { return nodes_; }

private:
    std::vector<ExprNode> nodes_;
    int max_var_ = 0;

    friend class ExprParser;
};

/// Shortest decimal form of v that parses back to exactly the same double.
std::string format_double(double v);

} // namespace lyapcert
