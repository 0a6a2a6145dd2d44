#include "siopt/expr.hpp"
#include "siopt/errors.hpp"
#include "siopt/units.hpp"

#include <cctype>
#include <cmath>
#include <utility>
#include <vector>

namespace siopt::expr {

const Node& Expr::root() const {
    if (!root_) throw EvalError("empty expression");
    return *root_;
}

namespace {

bool node_equal(const NodePtr& x, const NodePtr& y) {
    if (x == y) return true;
    if (!x || !y) return false;
    if (x->kind != y->kind) return false;
    switch (x->kind) {
        case Node::Kind::Literal: return x->literal == y->literal;
        case Node::Kind::ParamRef: return x->name == y->name;
        case Node::Kind::SignalRef: return x->name == y->name;
        case Node::Kind::DiffSignalRef: return x->name == y->name && x->neg_node == y->neg_node;
        case Node::Kind::Unary: return x->uop == y->uop && node_equal(x->a, y->a);
        case Node::Kind::Binary:
            return x->bop == y->bop && node_equal(x->a, y->a) && node_equal(x->b, y->b);
        case Node::Kind::Conditional:
            return node_equal(x->a, y->a) && node_equal(x->b, y->b) && node_equal(x->c, y->c);
    }
    return false;
}

const char* binary_symbol(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Le: return "<=";
    }
    return "?";
}

void print_node(const NodePtr& n, std::string& out) {
    switch (n->kind) {
        case Node::Kind::Literal:
            out += units::render(n->literal);
            return;
        case Node::Kind::ParamRef:
            out += n->name;
            return;
        case Node::Kind::SignalRef:
            out += "v(";
            out += n->name;
            out += ")";
            return;
        case Node::Kind::DiffSignalRef:
            out += "v(";
            out += n->name;
            out += ",";
            out += n->neg_node;
            out += ")";
            return;
        case Node::Kind::Unary:
            if (n->uop == UnaryOp::Abs) {
                out += "abs(";
                print_node(n->a, out);
                out += ")";
            } else {
                out += "(-";
                print_node(n->a, out);
                out += ")";
            }
            return;
        case Node::Kind::Binary:
            out += "(";
            print_node(n->a, out);
            out += " ";
            out += binary_symbol(n->bop);
            out += " ";
            print_node(n->b, out);
            out += ")";
            return;
        case Node::Kind::Conditional:
            out += "(";
            print_node(n->a, out);
            out += " ? ";
            print_node(n->b, out);
            out += " : ";
            print_node(n->c, out);
            out += ")";
            return;
    }
}

void collect(const NodePtr& n, std::set<std::string>* params, std::set<std::string>* signals) {
    if (!n) return;
    switch (n->kind) {
        case Node::Kind::Literal: return;
        case Node::Kind::ParamRef:
            if (params) params->insert(n->name);
            return;
        case Node::Kind::SignalRef:
            if (signals) signals->insert(n->name);
            return;
        case Node::Kind::DiffSignalRef:
            if (signals) {
                signals->insert(n->name);
                signals->insert(n->neg_node);
            }
            return;
        case Node::Kind::Unary:
            collect(n->a, params, signals);
            return;
        case Node::Kind::Binary:
            collect(n->a, params, signals);
            collect(n->b, params, signals);
            return;
        case Node::Kind::Conditional:
            collect(n->a, params, signals);
            collect(n->b, params, signals);
            collect(n->c, params, signals);
            return;
    }
}

double eval_node(const NodePtr& n, const EvalContext& ctx) {
    switch (n->kind) {
        case Node::Kind::Literal:
            return n->literal;
        case Node::Kind::ParamRef: {
            if (ctx.params) {
                auto it = ctx.params->find(n->name);
                if (it != ctx.params->end()) return it->second;
            }
            throw EvalError("unbound parameter '" + n->name + "'");
        }
        case Node::Kind::SignalRef: {
            if (ctx.signals) {
                auto it = ctx.signals->find(n->name);
                if (it != ctx.signals->end()) return it->second;
            }
            throw EvalError("unbound node voltage v(" + n->name + ")");
        }
        case Node::Kind::DiffSignalRef: {
            if (ctx.signals) {
                auto p = ctx.signals->find(n->name);
                auto q = ctx.signals->find(n->neg_node);
                if (p != ctx.signals->end() && q != ctx.signals->end())
                    return p->second - q->second;
            }
            throw EvalError("unbound node voltage v(" + n->name + "," + n->neg_node + ")");
        }
        case Node::Kind::Unary: {
            const double v = eval_node(n->a, ctx);
            return n->uop == UnaryOp::Abs ? std::fabs(v) : -v;
        }
        case Node::Kind::Binary: {
            const double x = eval_node(n->a, ctx);
            const double y = eval_node(n->b, ctx);
            switch (n->bop) {
                case BinaryOp::Add: return x + y;
                case BinaryOp::Sub: return x - y;
                case BinaryOp::Mul: return x * y;
                case BinaryOp::Div:
                    if (y == 0.0) throw EvalError("division by zero");
                    return x / y;
                case BinaryOp::Gt: return x > y ? 1.0 : 0.0;
                case BinaryOp::Lt: return x < y ? 1.0 : 0.0;
                case BinaryOp::Ge: return x >= y ? 1.0 : 0.0;
                case BinaryOp::Le: return x <= y ? 1.0 : 0.0;
            }
            throw EvalError("bad binary op");
        }
        case Node::Kind::Conditional: {
            // Both branches are computed; the condition selects the value.
            const double cond = eval_node(n->a, ctx);
            const double t = eval_node(n->b, ctx);
            const double f = eval_node(n->c, ctx);
            return cond != 0.0 ? t : f;
        }
    }
    throw EvalError("bad node kind");
}

} // namespace

bool operator==(const Expr& x, const Expr& y) { return node_equal(x.root_, y.root_); }

std::string Expr::to_string() const {
    if (!root_) return "";
    std::string out;
    print_node(root_, out);
    return out;
}

void Expr::collect_params(std::set<std::string>& out) const { collect(root_, &out, nullptr); }
void Expr::collect_signals(std::set<std::string>& out) const { collect(root_, nullptr, &out); }

Expr literal(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Literal;
    n->literal = v;
    return Expr(std::move(n));
}

Expr param_ref(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::ParamRef;
    n->name = std::move(name);
    return Expr(std::move(n));
}

Expr signal_ref(std::string node) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::SignalRef;
    n->name = std::move(node);
    return Expr(std::move(n));
}

Expr diff_signal_ref(std::string pos, std::string neg) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::DiffSignalRef;
    n->name = std::move(pos);
    n->neg_node = std::move(neg);
    return Expr(std::move(n));
}

Expr unary(UnaryOp op, Expr a) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Unary;
    n->uop = op;
    n->a = a.ptr();
    return Expr(std::move(n));
}

Expr binary(BinaryOp op, Expr a, Expr b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->bop = op;
    n->a = a.ptr();
    n->b = b.ptr();
    return Expr(std::move(n));
}

Expr conditional(Expr cond, Expr then_v, Expr else_v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Conditional;
    n->a = cond.ptr();
    n->b = then_v.ptr();
    n->c = else_v.ptr();
    return Expr(std::move(n));
}

double eval(const Expr& e, const EvalContext& ctx) {
    if (e.empty()) throw EvalError("empty expression");
    return eval_node(e.ptr(), ctx);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Lexer {
    std::string_view text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool consume(std::string_view s) {
        skip_ws();
        if (text.substr(pos, s.size()) == s) {
            pos += s.size();
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg + " at column " + std::to_string(pos + 1));
    }
};

class Parser {
public:
    explicit Parser(std::string_view text) : lex_{text} {}

    Expr run() {
        Expr e = parse_conditional();
        if (!lex_.eof()) lex_.fail("unexpected trailing input");
        return e;
    }

private:
    Lexer lex_;

    Expr parse_conditional() {
        Expr cond = parse_compare();
        if (lex_.consume('?')) {
            Expr t = parse_conditional();
            if (!lex_.consume(':')) lex_.fail("expected ':' in conditional");
            Expr f = parse_conditional();
            return conditional(std::move(cond), std::move(t), std::move(f));
        }
        return cond;
    }

    Expr parse_compare() {
        Expr lhs = parse_additive();
        for (;;) {
            BinaryOp op;
            if (lex_.consume(">=")) op = BinaryOp::Ge;
            else if (lex_.consume("<=")) op = BinaryOp::Le;
            else if (lex_.consume('>')) op = BinaryOp::Gt;
            else if (lex_.consume('<')) op = BinaryOp::Lt;
            else break;
            lhs = binary(op, std::move(lhs), parse_additive());
        }
        return lhs;
    }

    Expr parse_additive() {
        Expr lhs = parse_term();
        for (;;) {
            if (lex_.consume('+')) lhs = binary(BinaryOp::Add, std::move(lhs), parse_term());
            else if (lex_.consume('-')) lhs = binary(BinaryOp::Sub, std::move(lhs), parse_term());
            else break;
        }
        return lhs;
    }

    Expr parse_term() {
        Expr lhs = parse_unary();
        for (;;) {
            if (lex_.consume('*')) lhs = binary(BinaryOp::Mul, std::move(lhs), parse_unary());
            else if (lex_.consume('/')) lhs = binary(BinaryOp::Div, std::move(lhs), parse_unary());
            else break;
        }
        return lhs;
    }

    Expr parse_unary() {
        if (lex_.consume('-')) return unary(UnaryOp::Negate, parse_unary());
        if (lex_.consume('+')) return parse_unary();
        return parse_primary();
    }

    static bool ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    }

    std::string read_ident() {
        lex_.skip_ws();
        size_t start = lex_.pos;
        while (lex_.pos < lex_.text.size() && ident_char(lex_.text[lex_.pos])) ++lex_.pos;
        std::string s(lex_.text.substr(start, lex_.pos - start));
        for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    }

    Expr parse_primary() {
        lex_.skip_ws();
        if (lex_.pos >= lex_.text.size()) lex_.fail("unexpected end of expression");
        char c = lex_.text[lex_.pos];

        if (c == '(') {
            ++lex_.pos;
            Expr e = parse_conditional();
            if (!lex_.consume(')')) lex_.fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return parse_number();
        }
        if (ident_start(c)) {
            std::string name = read_ident();
            if (lex_.peek() == '(') {
                if (name == "abs") {
                    lex_.consume('(');
                    Expr a = parse_conditional();
                    if (!lex_.consume(')')) lex_.fail("expected ')' after abs argument");
                    return unary(UnaryOp::Abs, std::move(a));
                }
                if (name == "v") {
                    lex_.consume('(');
                    std::string pos_node = read_ident();
                    if (pos_node.empty()) lex_.fail("expected node name in v()");
                    if (lex_.consume(',')) {
                        std::string neg = read_ident();
                        if (neg.empty()) lex_.fail("expected node name after ',' in v()");
                        if (!lex_.consume(')')) lex_.fail("expected ')' after v(a,b)");
                        return diff_signal_ref(std::move(pos_node), std::move(neg));
                    }
                    if (!lex_.consume(')')) lex_.fail("expected ')' after v(node)");
                    return signal_ref(std::move(pos_node));
                }
                lex_.fail("unknown function '" + name + "'");
            }
            return param_ref(std::move(name));
        }
        lex_.fail(std::string("unexpected character '") + c + "'");
    }

    Expr parse_number() {
        // Longest prefix that scans as a SPICE numeric literal, including
        // a trailing unit-letter run ("840ps").
        size_t start = lex_.pos;
        size_t end = start;
        const std::string_view t = lex_.text;
        while (end < t.size() &&
               (std::isdigit(static_cast<unsigned char>(t[end])) || t[end] == '.')) ++end;
        if ((end < t.size()) && (t[end] == 'e' || t[end] == 'E')) {
            size_t e = end + 1;
            if (e < t.size() && (t[e] == '+' || t[e] == '-')) ++e;
            if (e < t.size() && std::isdigit(static_cast<unsigned char>(t[e]))) {
                ++e;
                while (e < t.size() && std::isdigit(static_cast<unsigned char>(t[e]))) ++e;
                end = e;
            }
        }
        // unit suffix letters
        while (end < t.size() && std::isalpha(static_cast<unsigned char>(t[end]))) ++end;
        double v;
        if (!units::try_parse_number(t.substr(start, end - start), v))
            lex_.fail("malformed number '" + std::string(t.substr(start, end - start)) + "'");
        lex_.pos = end;
        return literal(v);
    }
};

} // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

} // namespace siopt::expr
