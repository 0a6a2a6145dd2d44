#include "siopt/deck.hpp"
#include "siopt/errors.hpp"
#include "siopt/units.hpp"

#include <cctype>
#include <set>

namespace siopt {

std::string_view reducer_name(Reducer r) {
    switch (r) {
        case Reducer::Min: return "min";
        case Reducer::Max: return "max";
        case Reducer::Avg: return "avg";
        case Reducer::Integ: return "integ";
    }
    return "?";
}

bool reducer_from_name(std::string_view name, Reducer& out) {
    if (name == "min") out = Reducer::Min;
    else if (name == "max") out = Reducer::Max;
    else if (name == "avg") out = Reducer::Avg;
    else if (name == "integ" || name == "integral") out = Reducer::Integ;
    else return false;
    return true;
}

} // namespace siopt

namespace siopt::deck {

const ParamDecl* Deck::find_param(std::string_view name) const {
    for (const auto& p : params)
        if (p.name == name) return &p;
    return nullptr;
}
const MeasureSpec* Deck::find_measure(std::string_view name) const {
    for (const auto& m : measures)
        if (m.name == name) return &m;
    return nullptr;
}
const OptModelDecl* Deck::find_model(std::string_view name) const {
    for (const auto& m : opt_models)
        if (m.name == name) return &m;
    return nullptr;
}

namespace {

struct Cursor {
    const Statement& st;
    size_t i = 0;

    bool done() const { return i >= st.tokens.size(); }
    const Token& peek() const {
        if (done()) throw ParseError("unexpected end of statement", st.line);
        return st.tokens[i];
    }
    const Token& next() {
        const Token& t = peek();
        ++i;
        return t;
    }
    bool accept_punct(char c) {
        if (!done() && st.tokens[i].kind == TokKind::Punct && st.tokens[i].text[0] == c) {
            ++i;
            return true;
        }
        return false;
    }
    void expect_punct(char c) {
        if (!accept_punct(c))
            throw ParseError(std::string("expected '") + c + "'", st.line);
    }
    std::string expect_word(const char* what) {
        const Token& t = next();
        if (t.kind != TokKind::Word)
            throw ParseError(std::string("expected ") + what, t.line);
        return t.text;
    }
    double expect_number(const char* what) {
        const Token& t = next();
        double v;
        if (t.kind != TokKind::Word || !units::try_parse_number(t.text, v))
            throw ParseError(std::string("expected ") + what + ", got '" + t.text + "'", t.line);
        return v;
    }
};

// A value position: numeric literal, parameter reference, or quoted expression.
expr::Expr token_to_expr(const Token& t) {
    if (t.kind == TokKind::Expr) return expr::parse(t.text);
    if (t.kind != TokKind::Word)
        throw ParseError("expected a value, got '" + t.text + "'", t.line);
    double v;
    if (units::try_parse_number(t.text, v)) return expr::literal(v);
    return expr::param_ref(t.text);
}

bool is_opt_group_name(const std::string& w) {
    if (w.size() < 3 || w.compare(0, 3, "opt") != 0) return false;
    for (size_t i = 3; i < w.size(); ++i)
        if (!std::isalnum(static_cast<unsigned char>(w[i])) && w[i] != '_') return false;
    return true;
}

// Geometry statements arrive piecemeal; assembled after the last statement.
struct MaterialInfo {
    bool metal = false;
    double er = 0.0, loss_tangent = 0.0, conductivity = 0.0;
};
struct ShapeInfo {
    expr::Expr width, height;
};
struct LayerInfo {
    std::string material;
    expr::Expr thickness;
};
struct ConductorInfo {
    std::string shape, material;
    expr::Expr origin_x, origin_y;
};
struct WModelInfo {
    std::string name, layerstack, fsoptions, rlgcfile;
    std::vector<ConductorInfo> conductors;
};

struct GeoParts {
    std::map<std::string, MaterialInfo> materials;
    std::map<std::string, ShapeInfo> shapes;
    std::map<std::string, std::vector<LayerInfo>> layerstacks;
    std::vector<WModelInfo> wmodels;
    bool any = false;
};

class DeckParser {
public:
    DeckParser(const ParseOptions& opts, std::vector<std::string>* warnings)
        : opts_(opts), warnings_(warnings) {}

    Deck run(const std::vector<Statement>& statements) {
        for (const auto& st : statements) parse_statement(st);
        check_forward_references();
        assemble_geometry();
        link();
        return std::move(deck_);
    }

private:
    ParseOptions opts_;
    std::vector<std::string>* warnings_;
    Deck deck_;
    GeoParts geo_;

    void warn(const std::string& msg, int line) {
        if (opts_.strict) throw ParseError(msg, line);
        if (warnings_) warnings_->push_back("line " + std::to_string(line) + ": " + msg);
    }

    void parse_statement(const Statement& st) {
        Cursor c{st};
        const Token& head = c.peek();
        if (head.text.empty()) return;
        if (head.text[0] == '.') {
            const std::string& kw = head.text;
            c.next();
            if (kw == ".param") parse_param(c);
            else if (kw == ".meas" || kw == ".measure") parse_measure(c);
            else if (kw == ".model") parse_model(c);
            else if (kw == ".tran") parse_tran(c);
            else if (kw == ".material") parse_material(c);
            else if (kw == ".shape") parse_shape(c);
            else if (kw == ".layerstack") parse_layerstack(c);
            else if (kw == ".end") { /* accepted, no content */ }
            else warn("unknown statement '" + kw + "'", head.line);
            return;
        }
        parse_element(c);
    }

    // .PARAM name=value | name=OPTn(init, min, max) | name='expr' ...
    void parse_param(Cursor& c) {
        while (!c.done()) {
            const Token& nameTok = c.next();
            if (nameTok.kind != TokKind::Word)
                throw ParseError("expected parameter name, got '" + nameTok.text + "'",
                                 nameTok.line);
            ParamDecl p;
            p.name = nameTok.text;
            c.expect_punct('=');
            const Token& val = c.next();
            if (val.kind == TokKind::Expr) {
                p.kind = ParamKind::Derived;
                p.expression = expr::parse(val.text);
            } else if (val.kind == TokKind::Word && !c.done() && c.peek().kind == TokKind::Punct &&
                       c.peek().text == "(") {
                if (!is_opt_group_name(val.text))
                    throw ParseError("unknown function '" + val.text + "' in .PARAM", val.line);
                p.kind = ParamKind::OptVariable;
                p.opt_group = val.text;
                c.expect_punct('(');
                p.init = c.expect_number("INIT value");
                c.accept_punct(',');
                p.min = c.expect_number("MIN value");
                c.accept_punct(',');
                p.max = c.expect_number("MAX value");
                c.expect_punct(')');
                if (!(p.min < p.max))
                    throw ParseError("parameter '" + p.name + "': MIN must be < MAX",
                                     nameTok.line);
                if (p.init < p.min || p.init > p.max)
                    throw ParseError("parameter '" + p.name + "': INIT outside [MIN, MAX]",
                                     nameTok.line);
            } else if (val.kind == TokKind::Word) {
                double v;
                if (!units::try_parse_number(val.text, v))
                    throw ParseError("expected numeric value for parameter '" + p.name +
                                         "', got '" + val.text + "'",
                                     val.line);
                p.kind = ParamKind::Fixed;
                p.init = v;
            } else {
                throw ParseError("malformed .PARAM entry", val.line);
            }
            add_param(std::move(p), nameTok.line);
            c.accept_punct(',');
        }
    }

    void add_param(ParamDecl p, int line) {
        if (deck_.find_param(p.name))
            throw ParseError("duplicate parameter '" + p.name + "'", line);
        if (p.kind == ParamKind::Derived) {
            std::set<std::string> sigs;
            p.expression.collect_signals(sigs);
            if (!sigs.empty())
                throw ParseError("parameter '" + p.name + "' references node voltages", line);
        }
        deck_.params.push_back(std::move(p));
    }

    // Derived parameters may reference earlier declarations or external
    // bindings, never later declarations in the same deck.
    void check_forward_references() {
        std::map<std::string, size_t> order;
        for (size_t i = 0; i < deck_.params.size(); ++i) order[deck_.params[i].name] = i;
        for (size_t i = 0; i < deck_.params.size(); ++i) {
            const ParamDecl& p = deck_.params[i];
            if (p.kind != ParamKind::Derived) continue;
            std::set<std::string> refs;
            p.expression.collect_params(refs);
            for (const auto& r : refs) {
                auto it = order.find(r);
                if (it != order.end() && it->second >= i)
                    throw ParseError("parameter '" + p.name + "' references '" + r +
                                     "' before its declaration");
            }
        }
    }

    // .MEAS TRAN name REDUCER par('expr') [GOAL=value]
    void parse_measure(Cursor& c) {
        const std::string kind = c.expect_word("analysis kind after .MEAS");
        if (kind != "tran")
            throw ParseError("only TRAN measures are supported, got '" + kind + "'", c.st.line);
        MeasureSpec m;
        m.name = c.expect_word("measure name");
        const std::string red = c.expect_word("reducer (MIN/MAX/AVG/INTEG)");
        if (!reducer_from_name(red, m.reducer))
            throw ParseError("unknown reducer '" + red + "'", c.st.line);

        if (!c.done() && c.peek().kind == TokKind::Word && c.peek().text == "par") {
            c.next();
            const Token& e = c.next();
            if (e.kind != TokKind::Expr)
                throw ParseError("expected quoted expression after par", e.line);
            m.expression = expr::parse(e.text);
        } else if (!c.done() && c.peek().kind == TokKind::Expr) {
            m.expression = expr::parse(c.next().text);
        } else {
            throw ParseError("expected par('...') expression in .MEAS", c.st.line);
        }

        while (!c.done()) {
            const std::string key = c.expect_word("option name");
            c.expect_punct('=');
            if (key == "goal") {
                m.goal = c.expect_number("GOAL value");
            } else {
                warn("unknown .MEAS option '" + key + "'", c.st.line);
                c.next();
            }
        }
        if (deck_.find_measure(m.name))
            throw ParseError("duplicate measure '" + m.name + "'", c.st.line);
        deck_.measures.push_back(std::move(m));
    }

    // .MODEL name OPT [CLOSE=..] | .MODEL name W (field-solver statements)
    void parse_model(Cursor& c) {
        const std::string name = c.expect_word("model name");
        const std::string type = c.expect_word("model type");
        if (type == "opt") {
            OptModelDecl m;
            m.name = name;
            while (!c.done()) {
                const std::string key = c.expect_word("option name");
                c.expect_punct('=');
                if (key == "close") m.close = c.expect_number("CLOSE value");
                else if (key == "relin") m.rel_param_tol = c.expect_number("RELIN value");
                else if (key == "relout") m.rel_result_tol = c.expect_number("RELOUT value");
                else if (key == "itropt")
                    m.max_iters = static_cast<int>(c.expect_number("ITROPT value"));
                else {
                    warn("unknown .MODEL OPT option '" + key + "'", c.st.line);
                    c.next();
                }
            }
            if (m.rel_param_tol <= 0 || m.rel_result_tol <= 0 || m.close <= 0 || m.max_iters <= 0)
                throw ParseError("model '" + name + "': tolerances must be positive", c.st.line);
            if (deck_.find_model(name))
                throw ParseError("duplicate model '" + name + "'", c.st.line);
            deck_.opt_models.push_back(std::move(m));
            return;
        }
        if (type == "w") {
            parse_wmodel(c, name);
            return;
        }
        warn("unsupported model type '" + type + "'", c.st.line);
    }

    void parse_wmodel(Cursor& c, const std::string& name) {
        WModelInfo w;
        w.name = name;
        while (!c.done()) {
            c.accept_punct(',');
            if (c.done()) break;
            const std::string key = c.expect_word("W-model option");
            c.expect_punct('=');
            if (key == "conductor") {
                c.expect_punct('(');
                ConductorInfo cond;
                for (;;) {
                    c.accept_punct(',');
                    if (c.accept_punct(')')) break;
                    const std::string ck = c.expect_word("conductor option");
                    c.expect_punct('=');
                    if (ck == "shape") cond.shape = c.expect_word("shape name");
                    else if (ck == "material") cond.material = c.expect_word("material name");
                    else if (ck == "origin") {
                        c.expect_punct('(');
                        cond.origin_x = token_to_expr(c.next());
                        c.accept_punct(',');
                        cond.origin_y = token_to_expr(c.next());
                        c.expect_punct(')');
                    } else {
                        warn("unknown CONDUCTOR option '" + ck + "'", c.st.line);
                        c.next();
                    }
                }
                w.conductors.push_back(std::move(cond));
            } else if (key == "layerstack") {
                w.layerstack = c.expect_word("layerstack name");
            } else if (key == "fsoptions") {
                w.fsoptions = c.expect_word("FSOPTIONS value");
            } else if (key == "rlgcfile") {
                w.rlgcfile = c.expect_word("RLGCFILE value");
            } else if (key == "modeltype") {
                c.expect_word("MODELTYPE value");   // retained implicitly; always FIELDSOLVER
            } else {
                warn("unknown W-model option '" + key + "'", c.st.line);
                c.next();
            }
        }
        geo_.wmodels.push_back(std::move(w));
        geo_.any = true;
    }

    // .TRAN tstep tstop [LIN SWEEP] [OPTIMIZE=g RESULTS=m MODEL=mm]
    void parse_tran(Cursor& c) {
        AnalysisDecl a;
        a.tstep = c.expect_number("tstep");
        a.tstop = c.expect_number("tstop");
        if (a.tstep <= 0) throw ParseError(".TRAN tstep must be > 0", c.st.line);
        if (a.tstop <= a.tstep) throw ParseError(".TRAN tstop must be > tstep", c.st.line);
        while (!c.done()) {
            const std::string w = c.expect_word(".TRAN option");
            if (w == "lin" || w == "sweep") continue;   // accepted and dropped
            c.expect_punct('=');
            if (w == "optimize") a.optimize_group = c.expect_word("optimization group");
            else if (w == "results") a.results_measure = c.expect_word("results measure");
            else if (w == "model") a.model = c.expect_word("model name");
            else {
                warn("unknown .TRAN option '" + w + "'", c.st.line);
                c.next();
            }
        }
        const bool any = !a.optimize_group.empty() || !a.results_measure.empty() || !a.model.empty();
        const bool all = !a.optimize_group.empty() && !a.results_measure.empty() && !a.model.empty();
        if (any && !all)
            throw ParseError(".TRAN needs all of OPTIMIZE/RESULTS/MODEL or none", c.st.line);
        deck_.analyses.push_back(std::move(a));
    }

    // .MATERIAL name DIELECTRIC ER=x LOSSTANGENT=x | name METAL CONDUCTIVITY=x
    void parse_material(Cursor& c) {
        const std::string name = c.expect_word("material name");
        const std::string kind = c.expect_word("material kind");
        MaterialInfo m;
        if (kind == "dielectric") m.metal = false;
        else if (kind == "metal") m.metal = true;
        else throw ParseError("material kind must be DIELECTRIC or METAL", c.st.line);
        while (!c.done()) {
            const std::string key = c.expect_word("material option");
            c.expect_punct('=');
            if (key == "er") m.er = c.expect_number("ER value");
            else if (key == "losstangent") m.loss_tangent = c.expect_number("LOSSTANGENT value");
            else if (key == "conductivity") m.conductivity = c.expect_number("CONDUCTIVITY value");
            else {
                warn("unknown .MATERIAL option '" + key + "'", c.st.line);
                c.next();
            }
        }
        geo_.materials[name] = m;
        geo_.any = true;
    }

    // .SHAPE name RECTANGLE WIDTH=w HEIGHT=h
    void parse_shape(Cursor& c) {
        const std::string name = c.expect_word("shape name");
        const std::string kind = c.expect_word("shape kind");
        if (kind != "rectangle")
            throw ParseError("only RECTANGLE shapes are supported", c.st.line);
        ShapeInfo s;
        while (!c.done()) {
            const std::string key = c.expect_word("shape option");
            c.expect_punct('=');
            if (key == "width") s.width = token_to_expr(c.next());
            else if (key == "height") s.height = token_to_expr(c.next());
            else {
                warn("unknown .SHAPE option '" + key + "'", c.st.line);
                c.next();
            }
        }
        geo_.shapes[name] = std::move(s);
        geo_.any = true;
    }

    // .LAYERSTACK name LAYER=(material,thickness), ...
    void parse_layerstack(Cursor& c) {
        const std::string name = c.expect_word("layerstack name");
        std::vector<LayerInfo> layers;
        while (!c.done()) {
            c.accept_punct(',');
            if (c.done()) break;
            const std::string key = c.expect_word("layerstack option");
            c.expect_punct('=');
            if (key != "layer") {
                warn("unknown .LAYERSTACK option '" + key + "'", c.st.line);
                c.next();
                continue;
            }
            c.expect_punct('(');
            LayerInfo layer;
            layer.material = c.expect_word("layer material");
            c.accept_punct(',');
            layer.thickness = token_to_expr(c.next());
            c.expect_punct(')');
            layers.push_back(std::move(layer));
        }
        geo_.layerstacks[name] = std::move(layers);
        geo_.any = true;
    }

    // Element cards: R, C, V (PULSE/PWL/PRBS/DC), T (Z0=, TD=).
    void parse_element(Cursor& c) {
        const Token& head = c.next();
        const char letter = head.text[0];
        ElementCard e;
        e.kind = letter;
        e.name = head.text;
        switch (letter) {
            case 'r':
            case 'c': {
                e.nodes.push_back(c.expect_word("node"));
                e.nodes.push_back(c.expect_word("node"));
                e.args.push_back(token_to_expr(c.next()));
                break;
            }
            case 'v': {
                e.nodes.push_back(c.expect_word("node"));
                e.nodes.push_back(c.expect_word("node"));
                if (c.done()) throw ParseError("V card missing source value", head.line);
                const Token& t = c.peek();
                if (t.kind == TokKind::Word && (t.text == "pulse" || t.text == "pwl" ||
                                                t.text == "prbs" || t.text == "dc")) {
                    const std::string fn = c.next().text;
                    if (fn == "dc") {
                        e.source_fn = SourceFn::Dc;
                        e.args.push_back(token_to_expr(c.next()));
                    } else {
                        e.source_fn = fn == "pulse" ? SourceFn::Pulse
                                     : fn == "pwl" ? SourceFn::Pwl
                                                   : SourceFn::Prbs;
                        c.expect_punct('(');
                        while (!c.accept_punct(')')) {
                            if (c.accept_punct(',')) continue;
                            e.args.push_back(token_to_expr(c.next()));
                        }
                    }
                } else {
                    e.source_fn = SourceFn::Dc;
                    e.args.push_back(token_to_expr(c.next()));
                }
                break;
            }
            case 't': {
                for (int k = 0; k < 4; ++k) e.nodes.push_back(c.expect_word("node"));
                expr::Expr z0, td;
                while (!c.done()) {
                    const std::string key = c.expect_word("T-element option");
                    c.expect_punct('=');
                    if (key == "z0") z0 = token_to_expr(c.next());
                    else if (key == "td") td = token_to_expr(c.next());
                    else {
                        warn("unknown T-element option '" + key + "'", c.st.line);
                        c.next();
                    }
                }
                if (z0.empty() || td.empty())
                    throw ParseError("T element requires Z0= and TD=", head.line);
                e.args.push_back(std::move(z0));
                e.args.push_back(std::move(td));
                break;
            }
            default:
                warn(std::string("unknown element letter '") + letter + "'", head.line);
                return;
        }
        deck_.elements.push_back(std::move(e));
    }

    void assemble_geometry() {
        if (!geo_.any) return;
        StriplineGeometryDecl g;
        if (geo_.wmodels.size() > 1)
            throw ParseError("multiple W-element models are not supported");
        for (const auto& [name, m] : geo_.materials) {
            if (m.metal) {
                g.metal_name = name;
                g.conductivity = m.conductivity;
            } else {
                g.dielectric_name = name;
                g.er = m.er;
                g.loss_tangent = m.loss_tangent;
            }
        }
        if (!geo_.wmodels.empty()) {
            const WModelInfo& w = geo_.wmodels.front();
            g.model_name = w.name;
            g.layerstack_name = w.layerstack;
            g.fsoptions = w.fsoptions;
            g.rlgcfile = w.rlgcfile;
            if (w.conductors.size() != 2)
                throw LinkError("W-element model '" + w.name + "' needs exactly 2 conductors");
            const ConductorInfo& c0 = w.conductors[0];
            const ConductorInfo& c1 = w.conductors[1];
            g.shape_name = c0.shape;
            auto shape = geo_.shapes.find(c0.shape);
            if (shape == geo_.shapes.end())
                throw LinkError("W-element model references unknown shape '" + c0.shape + "'");
            g.linewidth = shape->second.width;
            g.metal_thickness = shape->second.height;
            g.dielectric_t = c0.origin_y;
            g.pitch = c1.origin_x;
            auto stack = geo_.layerstacks.find(w.layerstack);
            if (stack == geo_.layerstacks.end())
                throw LinkError("W-element model references unknown layerstack '" + w.layerstack +
                                "'");
            for (const auto& layer : stack->second) {
                if (layer.material == g.dielectric_name) {
                    g.total_dielectric_t = layer.thickness;
                    break;
                }
            }
            if (!g.dielectric_name.empty() && g.total_dielectric_t.empty())
                throw LinkError("layerstack '" + w.layerstack + "' has no dielectric layer");
        } else if (!geo_.shapes.empty()) {
            const auto& [name, s] = *geo_.shapes.begin();
            g.shape_name = name;
            g.linewidth = s.width;
            g.metal_thickness = s.height;
        }
        deck_.geometry = std::move(g);
    }

    void link() {
        for (const auto& a : deck_.analyses) {
            if (a.optimize_group.empty()) continue;
            bool found = false;
            for (const auto& p : deck_.params) {
                if (p.kind == ParamKind::OptVariable && p.opt_group == a.optimize_group) {
                    found = true;
                    break;
                }
            }
            if (!found)
                throw LinkError("no parameters declared in optimization group '" +
                                a.optimize_group + "'");
            if (!deck_.find_measure(a.results_measure))
                throw LinkError("analysis references unknown measure '" + a.results_measure + "'");
            if (!deck_.find_model(a.model))
                throw LinkError("analysis references unknown model '" + a.model + "'");
        }
    }
};

} // namespace

Deck parse_deck(const std::vector<Statement>& statements, const ParseOptions& opts,
                std::vector<std::string>* warnings) {
    return DeckParser(opts, warnings).run(statements);
}

Deck parse_deck_text(std::string_view text, const ParseOptions& opts,
                     std::vector<std::string>* warnings) {
    TokenizeOptions topts;
    topts.strict = opts.strict;
    return parse_deck(tokenize(text, topts), opts, warnings);
}

} // namespace siopt::deck
