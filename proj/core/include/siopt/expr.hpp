#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

namespace siopt::expr {

enum class UnaryOp { Abs, Negate };
enum class BinaryOp { Add, Sub, Mul, Div, Gt, Lt, Ge, Le };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

// Immutable AST node.  Comparisons evaluate to 1.0/0.0; conditionals
// evaluate both branches and select one.
struct Node {
    enum class Kind { Literal, ParamRef, SignalRef, DiffSignalRef, Unary, Binary, Conditional };

    Kind kind = Kind::Literal;
    double literal = 0.0;
    std::string name;       // ParamRef: parameter; SignalRef/Diff: positive node
    std::string neg_node;   // DiffSignalRef: negative node
    UnaryOp uop = UnaryOp::Abs;
    BinaryOp bop = BinaryOp::Add;
    NodePtr a, b, c;        // unary: a; binary: a,b; conditional: a ? b : c
};

class Expr {
public:
    Expr() = default;
    explicit Expr(NodePtr root) : root_(std::move(root)) {}

    bool empty() const { return root_ == nullptr; }
    const Node& root() const;
    const NodePtr& ptr() const { return root_; }

    // Structural equality.
    friend bool operator==(const Expr& x, const Expr& y);
    friend bool operator!=(const Expr& x, const Expr& y) { return !(x == y); }

    // Canonical fully parenthesized form; parse(to_string()) == *this.
    std::string to_string() const;

    void collect_params(std::set<std::string>& out) const;
    void collect_signals(std::set<std::string>& out) const;

private:
    NodePtr root_;
};

// Convenience constructors (tests, built-in studies).
Expr literal(double v);
Expr param_ref(std::string name);
Expr signal_ref(std::string node);
Expr diff_signal_ref(std::string pos, std::string neg);
Expr unary(UnaryOp op, Expr a);
Expr binary(BinaryOp op, Expr a, Expr b);
Expr conditional(Expr cond, Expr then_v, Expr else_v);

// Recursive-descent parser.  Precedence, loosest first: conditional,
// comparisons, +/-, *«/», unary.  v(a,b) is shorthand for v(a)-v(b).
// Numeric literals accept SPICE unit suffixes.  Throws ParseError with
// a column position on malformed input.
Expr parse(std::string_view text);

struct EvalContext {
    const std::map<std::string, double>* params = nullptr;   // parameter values
    const std::map<std::string, double>* signals = nullptr;  // node volts at one instant
};

// Deterministic evaluation; throws EvalError on unbound names and
// division by zero.
double eval(const Expr& e, const EvalContext& ctx);

} // namespace siopt::expr
