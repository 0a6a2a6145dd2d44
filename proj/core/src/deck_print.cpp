#include "siopt/deck.hpp"
#include "siopt/units.hpp"

#include <sstream>

namespace siopt::deck {

namespace {

const char* source_fn_name(SourceFn fn) {
    switch (fn) {
        case SourceFn::Dc: return "dc";
        case SourceFn::Pulse: return "pulse";
        case SourceFn::Pwl: return "pwl";
        case SourceFn::Prbs: return "prbs";
    }
    return "?";
}

std::string value_text(const expr::Expr& e) {
    // Bare literals and parameter references print unquoted; anything
    // else re-quotes as a derived expression.
    const expr::Node& n = e.root();
    if (n.kind == expr::Node::Kind::Literal) return units::render(n.literal);
    if (n.kind == expr::Node::Kind::ParamRef) return n.name;
    return "'" + e.to_string() + "'";
}

} // namespace

std::string pretty_print(const Deck& d) {
    std::ostringstream os;
    for (const auto& p : d.params) {
        os << ".param " << p.name << "=";
        switch (p.kind) {
            case ParamKind::Fixed:
                os << units::render(p.init);
                break;
            case ParamKind::OptVariable:
                os << p.opt_group << "(" << units::render(p.init) << ", "
                   << units::render(p.min) << ", " << units::render(p.max) << ")";
                break;
            case ParamKind::Derived:
                os << "'" << p.expression.to_string() << "'";
                break;
        }
        os << "\n";
    }
    for (const auto& m : d.measures) {
        os << ".meas tran " << m.name << " " << reducer_name(m.reducer) << " par('"
           << m.expression.to_string() << "')";
        if (m.goal) os << " goal=" << units::render(*m.goal);
        os << "\n";
    }
    for (const auto& m : d.opt_models) {
        os << ".model " << m.name << " opt close=" << units::render(m.close)
           << " relin=" << units::render(m.rel_param_tol)
           << " relout=" << units::render(m.rel_result_tol) << " itropt=" << m.max_iters << "\n";
    }
    if (d.geometry) {
        const auto& g = *d.geometry;
        if (!g.dielectric_name.empty()) {
            os << ".material " << g.dielectric_name << " dielectric er=" << units::render(g.er)
               << " losstangent=" << units::render(g.loss_tangent) << "\n";
        }
        if (!g.metal_name.empty()) {
            os << ".material " << g.metal_name
               << " metal conductivity=" << units::render(g.conductivity) << "\n";
        }
        if (!g.shape_name.empty()) {
            os << ".shape " << g.shape_name << " rectangle width=" << value_text(g.linewidth)
               << " height=" << value_text(g.metal_thickness) << "\n";
        }
        if (!g.layerstack_name.empty()) {
            os << ".layerstack " << g.layerstack_name;
            os << " layer=(" << g.metal_name << "," << value_text(g.metal_thickness) << "),";
            os << " layer=(" << g.dielectric_name << "," << value_text(g.total_dielectric_t)
               << "),";
            os << " layer=(" << g.metal_name << "," << value_text(g.metal_thickness) << ")\n";
        }
        if (!g.model_name.empty()) {
            os << ".model " << g.model_name << " w modeltype=fieldsolver";
            if (!g.layerstack_name.empty()) os << ", layerstack=" << g.layerstack_name;
            if (!g.fsoptions.empty()) os << ", fsoptions=" << g.fsoptions;
            if (!g.rlgcfile.empty()) os << ", rlgcfile=" << g.rlgcfile;
            os << ",\n+ conductor=(shape=" << g.shape_name << ", origin=(0,"
               << value_text(g.dielectric_t) << "), material=" << g.metal_name << "),";
            os << "\n+ conductor=(shape=" << g.shape_name << ", origin=(" << value_text(g.pitch)
               << "," << value_text(g.dielectric_t) << "), material=" << g.metal_name << ")\n";
        }
    }
    for (const auto& e : d.elements) {
        os << e.name;
        for (const auto& node : e.nodes) os << " " << node;
        if (e.kind == 'v') {
            if (e.source_fn == SourceFn::Dc) {
                os << " dc " << value_text(e.args.at(0));
            } else {
                os << " " << source_fn_name(e.source_fn) << "(";
                for (size_t i = 0; i < e.args.size(); ++i) {
                    if (i) os << " ";
                    os << value_text(e.args[i]);
                }
                os << ")";
            }
        } else if (e.kind == 't') {
            os << " z0=" << value_text(e.args.at(0)) << " td=" << value_text(e.args.at(1));
        } else {
            for (const auto& a : e.args) os << " " << value_text(a);
        }
        os << "\n";
    }
    for (const auto& a : d.analyses) {
        os << ".tran " << units::render(a.tstep) << " " << units::render(a.tstop);
        if (!a.optimize_group.empty()) {
            os << " optimize=" << a.optimize_group << " results=" << a.results_measure
               << " model=" << a.model;
        }
        os << "\n";
    }
    return os.str();
}

} // namespace siopt::deck
