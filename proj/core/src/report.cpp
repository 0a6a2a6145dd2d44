#include "siopt/studies.hpp"
#include "siopt/errors.hpp"
#include "siopt/measures.hpp"
#include "siopt/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace siopt {

void write_waveform_csv(std::ostream& os,
                        const std::vector<std::pair<std::string, const Waveform*>>& columns) {
    if (columns.empty()) return;
    const Waveform* first = columns.front().second;
    os << "time_s";
    for (const auto& [name, w] : columns) {
        if (w->dt != first->dt || w->t0 != first->t0 || w->size() != first->size())
            throw IoError("waveform CSV columns must share one sample grid");
        os << "," << name;
    }
    os << "\n";
    for (size_t i = 0; i < first->size(); ++i) {
        os << units::render(first->time_at(i));
        for (const auto& [name, w] : columns) os << "," << units::render(w->samples[i]);
        os << "\n";
    }
}

} // namespace siopt

namespace siopt::studies {

namespace fs = std::filesystem;

// --------------------------------------------------------------------------
// helpers shared with the studies and tests

Waveform trim_waveform(const Waveform& w, double t_start) {
    if (t_start <= w.t0) return w;
    const auto skip = static_cast<size_t>(std::ceil((t_start - w.t0) / w.dt - 1e-9));
    if (skip >= w.samples.size()) throw SimError("trim removes the whole waveform");
    Waveform out;
    out.dt = w.dt;
    out.t0 = w.t0 + w.dt * static_cast<double>(skip);
    out.samples.assign(w.samples.begin() + static_cast<long>(skip), w.samples.end());
    return out;
}

std::pair<double, double> auto_center_window(const Waveform& sig, double vref,
                                             double open_width, double period, int grid) {
    auto opening_at = [&](double delay) {
        const auto win = measure::EyeMask::window_pulse(delay, open_width, period);
        return measure::windowed_opening(sig, vref, win).value;
    };
    double best_d = 0.0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        const double d = period * static_cast<double>(i) / static_cast<double>(grid);
        const double v = opening_at(d);
        if (v > best_v) {
            best_v = v;
            best_d = d;
        }
    }
    // refine around the coarse winner
    const double coarse = period / static_cast<double>(grid);
    for (int i = -4; i <= 4; ++i) {
        double d = best_d + coarse * static_cast<double>(i) / 4.0;
        d = std::fmod(d + period, period);
        const double v = opening_at(d);
        if (v > best_v) {
            best_v = v;
            best_d = d;
        }
    }
    return {best_d, best_v};
}

int count_local_maxima(const std::vector<std::pair<double, double>>& curve) {
    const size_t n = curve.size();
    if (n < 3) return 0;
    int count = 0;
    for (size_t i = 1; i + 1 < n; ++i) {
        if (!(curve[i].second > curve[i - 1].second)) continue;
        size_t j = i;
        while (j + 1 < n && curve[j + 1].second == curve[i].second) ++j;   // plateau
        if (j + 1 < n && curve[j + 1].second < curve[i].second) ++count;
        i = j;
    }
    return count;
}

// --------------------------------------------------------------------------
// configuration plumbing

namespace {

class Overrides {
public:
    explicit Overrides(const std::map<std::string, std::string>& kv) : kv_(kv) {}

    bool get(const std::string& key, double& out) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return false;
        consumed_.insert(key);
        out = units::parse_number(it->second);
        return true;
    }
    bool get(const std::string& key, int& out) {
        double v;
        if (!get(key, v)) return false;
        out = static_cast<int>(std::lround(v));
        return true;
    }
    bool get(const std::string& key, bool& out) {
        double v;
        if (!get(key, v)) return false;
        out = v != 0.0;
        return true;
    }

    void finish() const {
        std::vector<std::string> unknown;
        for (const auto& [k, v] : kv_) {
            if (!consumed_.count(k)) unknown.push_back(k);
        }
        if (!unknown.empty()) {
            std::string msg = "unknown --set key(s):";
            for (const auto& k : unknown) msg += " " + k;
            throw Error(msg);
        }
    }

private:
    const std::map<std::string, std::string>& kv_;
    std::set<std::string> consumed_;
};

void apply_model_overrides(Overrides& ov, deck::OptModelDecl& model) {
    ov.get("opt.close", model.close);
    ov.get("opt.relin", model.rel_param_tol);
    ov.get("opt.relout", model.rel_result_tol);
    ov.get("opt.itropt", model.max_iters);
}

deck::ScenarioIR load_deck_ir(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open deck '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    deck::ParseOptions opts;
    return deck::lower_to_ir(deck::parse_deck_text(ss.str(), opts));
}

const deck::IrParam* find_ir_param(const deck::ScenarioIR& ir, const std::string& name) {
    for (const auto& p : ir.params)
        if (p.name == name) return &p;
    return nullptr;
}

} // namespace

MultidropConfig::MultidropConfig() {
    auto var = [](const char* name, double init, double lo, double hi) {
        return optimize::OptVariable{name, init, lo, hi};
    };
    // the paper's eight-group .PARAM block
    variables = {
        var("series_r_drvr", 10.0, 1.0, 1000.0),
        var("series_r_primary", 10.0, 1.0, 1000.0),
        var("series_r_stub", 10.0, 1.0, 1000.0),
        var("shunt_r_drvr", 50.0, 1.0, 1000.0),
        var("shunt_r_primary", 50.0, 1.0, 1000.0),
        var("shunt_r_rcvr", 50.0, 1.0, 1000.0),
        var("z_primary", 50.0, 25.0, 100.0),
        var("z_stub", 50.0, 25.0, 100.0),
    };
}

MultidropConfig multidrop_config_from(const StudyConfig& cfg) {
    MultidropConfig mc;
    mc.seed = cfg.seed;

    if (!cfg.deck_path.empty()) {
        const deck::ScenarioIR ir = load_deck_ir(cfg.deck_path);
        for (auto& v : mc.variables) {
            if (const deck::IrParam* p = find_ir_param(ir, v.name);
                p && p->kind == deck::ParamKind::OptVariable) {
                v.init = p->value;
                v.min = p->min;
                v.max = p->max;
            }
        }
        if (const auto* p = find_ir_param(ir, "eye_mask")) mc.eye_mask = p->value;
        if (const auto* p = find_ir_param(ir, "bit_period")) mc.bit_period = p->value;
        if (const auto* p = find_ir_param(ir, "vref")) mc.vref = p->value;
        if (const auto* p = find_ir_param(ir, "vtt")) mc.topology.vtt = p->value;
        if (!ir.stages.empty()) {
            mc.model = ir.stages.front().model;
            mc.tstep = ir.stages.front().tstep;
            for (const auto& m : ir.measures) {
                if (m.name == ir.stages.front().results_measure && m.goal) mc.goal = *m.goal;
            }
        } else if (!ir.measures.empty() && ir.measures.front().goal) {
            mc.goal = *ir.measures.front().goal;
        }
    }

    Overrides ov(cfg.overrides);
    ov.get("multidrop.bit_period", mc.bit_period);
    ov.get("multidrop.eye_mask", mc.eye_mask);
    ov.get("multidrop.prbs_order", mc.prbs_order);
    ov.get("multidrop.tstep", mc.tstep);
    ov.get("multidrop.warmup_bits", mc.warmup_bits);
    ov.get("multidrop.measure_bits", mc.measure_bits);
    ov.get("multidrop.vref", mc.vref);
    ov.get("multidrop.goal", mc.goal);
    bool prune = mc.prune_enabled;
    if (ov.get("multidrop.prune", prune)) mc.prune_enabled = prune;
    ov.get("multidrop.series_short_threshold", mc.series_short_threshold);
    ov.get("multidrop.shunt_open_threshold", mc.shunt_open_threshold);
    ov.get("multidrop.hstl_requirement", mc.hstl_requirement);
    ov.get("topology.primary_segment_delay", mc.topology.primary_segment_delay);
    ov.get("topology.stub_delay", mc.topology.stub_delay);
    ov.get("topology.receiver_cap", mc.topology.receiver_cap);
    ov.get("topology.vtt", mc.topology.vtt);
    ov.get("topology.driver_series_r", mc.topology.driver_series_r);
    ov.get("topology.n_stubs", mc.topology.n_stubs);
    apply_model_overrides(ov, mc.model);
    ov.finish();
    return mc;
}

LinkwidthConfig linkwidth_config_from(const StudyConfig& cfg) {
    LinkwidthConfig lc;
    lc.seed = cfg.seed;
    lc.iterate_to_convergence = cfg.iterate_to_convergence;

    if (!cfg.deck_path.empty()) {
        const deck::ScenarioIR ir = load_deck_ir(cfg.deck_path);
        if (const deck::IrParam* p = find_ir_param(ir, "linewidth")) {
            if (p->kind == deck::ParamKind::OptVariable) {
                lc.width_init = p->value;
                lc.width_min = p->min;
                lc.width_max = p->max;
            } else {
                lc.width_init = p->value;
            }
        }
        if (ir.geometry) lc.link.geometry = *ir.geometry;
        double bit_period = 0.0;
        if (const auto* p = find_ir_param(ir, "bit_period")) {
            bit_period = p->value;
            lc.link.bit_rate = 1.0 / bit_period;
        }
        if (bit_period > 0.0) {
            if (const auto* p = find_ir_param(ir, "mask_rise"))
                lc.mask_edge_ui = p->value / bit_period;
            if (const auto* p = find_ir_param(ir, "mask_high_time"))
                lc.mask_high_ui = p->value / bit_period;
        }
        for (const auto& e : ir.elements) {
            // the hexagon mask amplitude rides on the VMASK pulse
            if (e.kind == 'v' && e.source_fn == deck::SourceFn::Pulse && !e.nodes.empty() &&
                e.nodes[0] == "mask_p" && e.args.size() >= 2 &&
                e.args[1].root().kind == expr::Node::Kind::Literal) {
                lc.mask_amplitude = e.args[1].root().literal;
            }
        }
        for (const auto& m : ir.measures) {
            if (!m.goal) continue;
            if (m.reducer == Reducer::Min) lc.goal_width = *m.goal;
            if (m.reducer == Reducer::Avg) lc.goal_delay = *m.goal;
        }
        if (!ir.stages.empty()) {
            lc.model = ir.stages.front().model;
            lc.rounds = static_cast<int>(ir.stages.size());
        }
    }

    Overrides ov(cfg.overrides);
    ov.get("lw.length", lc.length);
    ov.get("lw.width_init", lc.width_init);
    ov.get("lw.width_min", lc.width_min);
    ov.get("lw.width_max", lc.width_max);
    ov.get("lw.mask_amplitude", lc.mask_amplitude);
    ov.get("lw.mask_high_ui", lc.mask_high_ui);
    ov.get("lw.mask_edge_ui", lc.mask_edge_ui);
    ov.get("lw.bits", lc.bits);
    ov.get("lw.samples_per_bit", lc.samples_per_bit);
    ov.get("lw.prbs_order", lc.prbs_order);
    ov.get("lw.rounds", lc.rounds);
    ov.get("lw.goal_delay", lc.goal_delay);
    ov.get("lw.goal_width", lc.goal_width);
    ov.get("lw.delay_seed_grid", lc.delay_seed_grid);
    ov.get("link.card_length", lc.link.card_length);
    ov.get("link.backplane_length", lc.link.backplane_length);
    ov.get("link.bit_rate", lc.link.bit_rate);
    ov.get("link.source_r", lc.link.source_r);
    ov.get("link.load_r", lc.link.load_r);
    ov.get("link.c_pad", lc.link.connector.c_pad);
    ov.get("link.z_conn", lc.link.connector.z_conn);
    ov.get("link.delay_conn", lc.link.connector.delay_conn);
    ov.get("link.swing", lc.link.driver.swing);
    ov.get("link.edge_ui", lc.link.driver.edge_ui);
    ov.get("link.de_emphasis", lc.link.driver.de_emphasis);
    apply_model_overrides(ov, lc.model);
    ov.finish();
    return lc;
}

// --------------------------------------------------------------------------
// emission

namespace {

std::string hspice_number(double v) {
    struct Scale {
        double factor;
        const char* suffix;
    };
    static const Scale scales[] = {{1e9, "g"},  {1e6, "meg"}, {1e3, "k"},  {1.0, ""},
                                   {1e-3, "m"}, {1e-6, "u"},  {1e-9, "n"}, {1e-12, "p"},
                                   {1e-15, "f"}};
    if (v == 0.0) return "0.0000";
    const double a = std::fabs(v);
    for (const auto& s : scales) {
        if (a >= s.factor) {
            char buf[48];
            std::snprintf(buf, sizeof(buf), "%.4f%s", v / s.factor, s.suffix);
            return buf;
        }
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4e", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
}

std::string stage_table(const StageRecord& rec) {
    std::ostringstream os;
    os << "\tvalue\t%norm-sen\n";
    for (const auto& [name, value] : rec.result.values) {
        char line[160];
        double pct = 0.0;
        if (auto it = rec.result.norm_sensitivity_pct.find(name);
            it != rec.result.norm_sensitivity_pct.end())
            pct = it->second;
        std::snprintf(line, sizeof(line), ".param %-16s= %12s %12s\n", name.c_str(),
                      hspice_number(value).c_str(), hspice_number(pct).c_str());
        os << line;
    }
    os << "\niterations: " << rec.result.iterations
       << "  converged: " << (rec.result.converged ? "yes" : "no")
       << "  final measure: " << units::render(rec.result.final_measure)
       << "  err: " << units::render(rec.result.final_error) << "\n";
    if (!rec.result.failure.empty()) os << "failure: " << rec.result.failure << "\n";
    return os.str();
}

std::string stage_csv(const StageRecord& rec) {
    std::ostringstream os;
    os << "name,value,norm_sensitivity_pct\n";
    for (const auto& [name, value] : rec.result.values) {
        double pct = 0.0;
        if (auto it = rec.result.norm_sensitivity_pct.find(name);
            it != rec.result.norm_sensitivity_pct.end())
            pct = it->second;
        os << name << "," << units::render(value) << "," << units::render(pct) << "\n";
    }
    return os.str();
}

std::string eye_csv(const EyeArtifact& art) {
    std::ostringstream os;
    os << "phase_s,volts\n";
    for (const auto& [phase, volts] : art.eye.points)
        os << units::render(phase) << "," << units::render(volts) << "\n";
    return os.str();
}

std::string eye_svg(const EyeArtifact& art) {
    const double w = 800.0, h = 480.0, margin = 40.0;
    double vmin = 1e300, vmax = -1e300;
    for (const auto& [p, v] : art.eye.points) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (art.mask.kind == measure::MaskKind::HexagonHalf) {
        vmin = std::min(vmin, -art.mask.v_amplitude * 1.2);
        vmax = std::max(vmax, art.mask.v_amplitude * 1.2);
    }
    if (vmin >= vmax) {
        vmin -= 0.5;
        vmax += 0.5;
    }
    const double period = art.eye.period;
    auto X = [&](double phase) { return margin + (w - 2 * margin) * phase / period; };
    auto Y = [&](double v) { return h - margin - (h - 2 * margin) * (v - vmin) / (vmax - vmin); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    os << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";

    os << "<g fill=\"#1f77b4\" fill-opacity=\"0.35\">\n";
    for (const auto& [phase, volts] : art.eye.points) {
        os << "<circle cx=\"" << units::render(std::round(X(phase) * 100) / 100) << "\" cy=\""
           << units::render(std::round(Y(volts) * 100) / 100) << "\" r=\"1\"/>\n";
    }
    os << "</g>\n";

    // mask overlay sampled across one period; the inverse trace is drawn
    // for display only
    auto polyline = [&](double sign, const char* dash) {
        std::ostringstream p;
        p << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"" << dash
          << " points=\"";
        const int steps = 512;
        for (int i = 0; i <= steps; ++i) {
            const double phase = period * static_cast<double>(i) / steps;
            double m = art.mask.value(art.mask.delay + phase);
            if (art.mask.kind == measure::MaskKind::WindowPulse) m = m > 0 ? vmax : vmin;
            p << units::render(std::round(X(phase) * 100) / 100) << ","
              << units::render(std::round(Y(art.vref + sign * m) * 100) / 100) << " ";
        }
        p << "\"/>\n";
        return p.str();
    };
    os << polyline(+1.0, "");
    if (art.mask.kind == measure::MaskKind::HexagonHalf)
        os << polyline(-1.0, " stroke-dasharray=\"6,4\"");

    if (art.vref != 0.0) {
        os << "<line x1=\"" << X(0) << "\" y1=\"" << Y(art.vref) << "\" x2=\"" << X(period)
           << "\" y2=\"" << Y(art.vref) << "\" stroke=\"#555\" stroke-dasharray=\"2,4\"/>\n";
    }
    os << "<text x=\"" << margin << "\" y=\"20\" font-family=\"monospace\" font-size=\"13\">"
       << art.name << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

const char* prune_name(PruneState s) {
    switch (s) {
        case PruneState::Keep: return "keep";
        case PruneState::Short: return "short";
        case PruneState::Open: return "open";
    }
    return "?";
}

} // namespace

void emit_report(const StudyReport& report, const StudyConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");

    const bool want_csv = cfg.emit != StudyConfig::Emit::Svg;
    const bool want_svg = cfg.emit != StudyConfig::Emit::Csv;

    std::ostringstream sum;
    sum << "study: " << report.study << "\n";
    sum << "result: " << (report.pass ? "PASS" : "FAIL") << "\n";
    if (report.study == "multidrop") {
        sum << "baseline_opening_v: " << units::render(report.baseline_opening) << "\n";
        sum << "final_opening_v: " << units::render(report.final_opening) << "\n";
        for (size_t i = 0; i < report.receiver_openings.size(); ++i)
            sum << "receiver_" << (i + 1)
                << "_opening_v: " << units::render(report.receiver_openings[i]) << "\n";
        for (const auto& [name, st] : report.prune_history)
            sum << "prune." << name << ": " << prune_name(st) << "\n";
    }
    if (report.study == "linkwidth") {
        sum << "final_width_m: " << units::render(report.final_width) << "\n";
        sum << "final_mask_delay_s: " << units::render(report.final_mask_delay) << "\n";
        sum << "final_opening_v: " << units::render(report.final_opening) << "\n";
        sum << "feasible: " << (report.feasible ? "yes" : "no") << "\n";
        if (!report.touching_edge.empty()) sum << "touching_edge: " << report.touching_edge << "\n";
    }
    for (const auto& [name, value] : report.final_values)
        sum << "final." << name << ": " << units::render(value) << "\n";
    for (const auto& note : report.notes) sum << "note: " << note << "\n";
    write_file(dir / "summary.txt", sum.str());

    for (size_t i = 0; i < report.stages.size(); ++i) {
        const std::string base = "params_stage" + std::to_string(i + 1);
        write_file(dir / (base + ".txt"), stage_table(report.stages[i]));
        if (want_csv)
            write_file(dir / ("stage" + std::to_string(i + 1) + ".csv"),
                       stage_csv(report.stages[i]));
    }

    for (const auto& art : report.eyes) {
        if (want_csv) write_file(dir / ("eye_" + art.name + ".csv"), eye_csv(art));
        if (want_svg) write_file(dir / ("eye_" + art.name + ".svg"), eye_svg(art));
    }

    if (want_csv && !report.waveforms.empty()) {
        std::vector<std::pair<std::string, const Waveform*>> cols;
        for (const auto& [name, w] : report.waveforms) cols.emplace_back(name, &w);
        std::ostringstream os;
        write_waveform_csv(os, cols);
        write_file(dir / "waveforms.csv", os.str());
    }

    if (want_csv && !report.sweep_rows.empty()) {
        std::ostringstream os;
        os << "length_m,min_width_m,final_opening_v,feasible,at_width_cap\n";
        for (const auto& row : report.sweep_rows) {
            os << units::render(row.length) << "," << units::render(row.width) << ","
               << units::render(row.opening) << "," << (row.feasible ? 1 : 0) << ","
               << (row.at_cap ? 1 : 0) << "\n";
        }
        write_file(dir / "length_sweep.csv", os.str());
    }

    if (want_csv && !report.mask_delay_curve.empty()) {
        std::ostringstream os;
        os << "mask_delay_s,avg_opening_v\n";
        for (const auto& [d, v] : report.mask_delay_curve)
            os << units::render(d) << "," << units::render(v) << "\n";
        write_file(dir / "mask_delay_curve.csv", os.str());
    }
}

} // namespace siopt::studies
