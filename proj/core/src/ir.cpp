#include "siopt/ir.hpp"
#include "siopt/errors.hpp"
#include "siopt/units.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace siopt::deck {

ParamTable::ParamTable(std::vector<IrParam> params) : params_(std::move(params)) {
    for (size_t i = 0; i < params_.size(); ++i) index_[params_[i].name] = i;
    reevaluate();
}

bool ParamTable::has(const std::string& name) const { return index_.count(name) != 0; }

double ParamTable::get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw EvalError("unknown parameter '" + name + "'");
    return params_[it->second].value;
}

void ParamTable::set(const std::string& name, double value) {
    auto it = index_.find(name);
    if (it == index_.end()) throw EvalError("unknown parameter '" + name + "'");
    IrParam& p = params_[it->second];
    if (p.kind == ParamKind::Derived)
        throw EvalError("parameter '" + name + "' is derived and cannot be set");
    p.value = value;
    reevaluate();
}

void ParamTable::set_all(const std::map<std::string, double>& values) {
    for (const auto& [k, v] : values) {
        auto it = index_.find(k);
        if (it == index_.end()) throw EvalError("unknown parameter '" + k + "'");
        IrParam& p = params_[it->second];
        if (p.kind == ParamKind::Derived)
            throw EvalError("parameter '" + k + "' is derived and cannot be set");
        p.value = v;
    }
    reevaluate();
}

void ParamTable::reevaluate() {
    std::map<std::string, double> env;
    for (auto& p : params_) {
        if (p.kind == ParamKind::Derived) {
            expr::EvalContext ctx;
            ctx.params = &env;
            p.value = expr::eval(p.expression, ctx);
        }
        env[p.name] = p.value;
    }
}

std::map<std::string, double> ParamTable::snapshot() const {
    std::map<std::string, double> out;
    for (const auto& p : params_) out[p.name] = p.value;
    return out;
}

namespace {

double resolve_dim(const expr::Expr& e, const ParamTable& table, const char* what) {
    if (e.empty()) throw LinkError(std::string("geometry is missing ") + what);
    std::set<std::string> refs;
    e.collect_params(refs);
    for (const auto& r : refs) {
        if (!table.has(r))
            throw LinkError(std::string("geometry ") + what + " references unknown parameter '" +
                            r + "'");
    }
    auto env = table.snapshot();
    expr::EvalContext ctx;
    ctx.params = &env;
    return expr::eval(e, ctx);
}

} // namespace

ScenarioIR lower_to_ir(const Deck& d) {
    ScenarioIR ir;
    for (const auto& p : d.params) {
        IrParam q;
        q.name = p.name;
        q.kind = p.kind;
        q.value = p.init;
        q.min = p.min;
        q.max = p.max;
        q.opt_group = p.opt_group;
        q.expression = p.expression;
        ir.params.push_back(std::move(q));
    }
    ParamTable table(ir.params);
    ir.params = table.params();   // derived values evaluated

    ir.measures = d.measures;
    for (const auto& a : d.analyses) {
        if (a.optimize_group.empty()) continue;
        ScenarioStage st;
        st.tstep = a.tstep;
        st.tstop = a.tstop;
        st.optimize_group = a.optimize_group;
        st.results_measure = a.results_measure;
        st.model = *d.find_model(a.model);
        ir.stages.push_back(std::move(st));
    }
    ir.simulate_only = ir.stages.empty();
    ir.elements = d.elements;

    if (d.geometry) {
        const auto& g = *d.geometry;
        channel::StriplineGeometry geo;
        geo.er = g.er;
        geo.loss_tangent = g.loss_tangent;
        geo.conductivity = g.conductivity;
        geo.linewidth = resolve_dim(g.linewidth, table, "linewidth");
        geo.metal_thickness = resolve_dim(g.metal_thickness, table, "metal thickness");
        geo.dielectric_t = resolve_dim(g.dielectric_t, table, "dielectric thickness");
        geo.pitch = resolve_dim(g.pitch, table, "pitch");
        if (!g.total_dielectric_t.empty()) {
            const double total = resolve_dim(g.total_dielectric_t, table, "total dielectric");
            const double expect = geo.total_dielectric_t();
            if (std::abs(total - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
                throw LinkError("total dielectric thickness is inconsistent with "
                                "2*dielectric_t + metal_thickness");
        }
        ir.geometry = geo;
        ir.rlgc_csv_path = g.rlgcfile;
    }
    return ir;
}

std::string dump_ir(const ScenarioIR& ir) {
    std::ostringstream os;
    os << "params:\n";
    for (const auto& p : ir.params) {
        os << "  " << p.name << " = " << units::render(p.value);
        switch (p.kind) {
            case ParamKind::Fixed: break;
            case ParamKind::OptVariable:
                os << "  [" << p.opt_group << ": min=" << units::render(p.min)
                   << " max=" << units::render(p.max) << "]";
                break;
            case ParamKind::Derived:
                os << "  [derived: " << p.expression.to_string() << "]";
                break;
        }
        os << "\n";
    }
    os << "measures:\n";
    for (const auto& m : ir.measures) {
        os << "  " << m.name << " " << reducer_name(m.reducer) << " " << m.expression.to_string();
        if (m.goal) os << " goal=" << units::render(*m.goal);
        os << "\n";
    }
    if (ir.simulate_only) {
        os << "stages: none (simulate-only)\n";
    } else {
        os << "stages:\n";
        for (size_t i = 0; i < ir.stages.size(); ++i) {
            const auto& s = ir.stages[i];
            os << "  " << (i + 1) << ": tran " << units::render(s.tstep) << " "
               << units::render(s.tstop) << " optimize=" << s.optimize_group
               << " results=" << s.results_measure << " model=" << s.model.name << "\n";
        }
    }
    os << "elements: " << ir.elements.size() << "\n";
    if (ir.geometry) {
        const auto& g = *ir.geometry;
        os << "geometry: w=" << units::render(g.linewidth) << " t=" << units::render(g.metal_thickness)
           << " h=" << units::render(g.dielectric_t) << " pitch=" << units::render(g.pitch)
           << " er=" << units::render(g.er) << " tand=" << units::render(g.loss_tangent)
           << " sigma=" << units::render(g.conductivity);
        if (!ir.rlgc_csv_path.empty()) os << " rlgcfile=" << ir.rlgc_csv_path;
        os << "\n";
    }
    return os.str();
}

} // namespace siopt::deck
