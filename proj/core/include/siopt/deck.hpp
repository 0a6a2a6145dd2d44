#pragma once

#include "siopt/expr.hpp"
#include "siopt/reducer.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace siopt::deck {

// --------------------------------------------------------------------------
// Tokenizer

enum class TokKind { Word, Punct, Expr };

struct Token {
    TokKind kind = TokKind::Word;
    std::string text;   // Word: lowercased identifier/number; Expr: raw body
    int line = 1;

    bool operator==(const Token&) const = default;
};

struct Statement {
    std::vector<Token> tokens;
    int line = 1;
};

struct TokenizeOptions {
    bool strict = false;
};

// Joins continuation lines, skips comments, and emits one token vector per
// logical statement.  Quoted expressions (single-quote or backtick) become
// single Expr tokens; `par(...)` wrappers collapse to [par][Expr].
std::vector<Statement> tokenize(std::string_view text, const TokenizeOptions& opts = {});

// --------------------------------------------------------------------------
// Declarations

enum class ParamKind { Fixed, OptVariable, Derived };

struct ParamDecl {
    std::string name;
    ParamKind kind = ParamKind::Fixed;
    double init = 0.0;
    double min = 0.0, max = 0.0;    // OptVariable
    std::string opt_group;          // OptVariable, e.g. "opt1"
    expr::Expr expression;          // Derived

    bool operator==(const ParamDecl&) const = default;
};

struct MeasureSpec {
    std::string name;
    Reducer reducer = Reducer::Min;
    expr::Expr expression;
    std::optional<double> goal;

    bool operator==(const MeasureSpec&) const = default;
};

inline constexpr double kDefaultRelParamTol = 1e-4;   // RELIN
inline constexpr double kDefaultRelResultTol = 1e-5;  // RELOUT
inline constexpr double kDefaultClose = 0.1;          // fraction of bound range
inline constexpr int kDefaultMaxIters = 60;           // ITROPT

struct OptModelDecl {
    std::string name;
    double rel_param_tol = kDefaultRelParamTol;
    double rel_result_tol = kDefaultRelResultTol;
    double close = kDefaultClose;
    int max_iters = kDefaultMaxIters;

    bool operator==(const OptModelDecl&) const = default;
};

struct AnalysisDecl {
    double tstep = 0.0, tstop = 0.0;
    std::string optimize_group;     // empty: plain transient
    std::string results_measure;
    std::string model;

    bool operator==(const AnalysisDecl&) const = default;
};

enum class SourceFn { Dc, Pulse, Pwl, Prbs };

// Netlist card.  kind in {R, C, V, T}; args are value expressions
// (literals, parameter references, or quoted arithmetic).
struct ElementCard {
    char kind = 'r';
    std::string name;                 // full card name, e.g. "rwin"
    std::vector<std::string> nodes;
    SourceFn source_fn = SourceFn::Dc;   // V cards
    std::vector<expr::Expr> args;        // V: source args; R/C: value; T: z0, delay

    bool operator==(const ElementCard&) const = default;
};

// .MATERIAL/.SHAPE/.LAYERSTACK/.MODEL-W statements folded into one record.
struct StriplineGeometryDecl {
    std::string dielectric_name, metal_name;
    double er = 0.0, loss_tangent = 0.0, conductivity = 0.0;

    expr::Expr linewidth, metal_thickness, dielectric_t, total_dielectric_t, pitch;

    std::string model_name, shape_name, layerstack_name;
    std::string fsoptions;   // retained opaque
    std::string rlgcfile;    // CSV output path for computed RLGC tables

    bool operator==(const StriplineGeometryDecl&) const = default;
};

struct Deck {
    std::vector<ParamDecl> params;        // declaration order, unique names
    std::vector<MeasureSpec> measures;
    std::vector<OptModelDecl> opt_models;
    std::vector<AnalysisDecl> analyses;   // declaration order
    std::vector<ElementCard> elements;
    std::optional<StriplineGeometryDecl> geometry;

    const ParamDecl* find_param(std::string_view name) const;
    const MeasureSpec* find_measure(std::string_view name) const;
    const OptModelDecl* find_model(std::string_view name) const;

    bool operator==(const Deck&) const = default;
};

struct ParseOptions {
    bool strict = false;
};

// Parses tokenized statements into a Deck and validates cross references:
// every OPTIMIZE/RESULTS/MODEL name on an analysis must resolve.  Unknown
// statements are errors in strict mode and are skipped otherwise (the
// skipped text is reported through `warnings` when given).
Deck parse_deck(const std::vector<Statement>& statements, const ParseOptions& opts = {},
                std::vector<std::string>* warnings = nullptr);

// Convenience: tokenize + parse.
Deck parse_deck_text(std::string_view text, const ParseOptions& opts = {},
                     std::vector<std::string>* warnings = nullptr);

// Canonical form; parse_deck_text(pretty_print(d)) is structurally equal
// to d for every deck this dialect accepts.
std::string pretty_print(const Deck& d);

} // namespace siopt::deck
