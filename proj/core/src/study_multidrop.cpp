#include "siopt/studies.hpp"
#include "siopt/errors.hpp"
#include "siopt/measures.hpp"
#include "siopt/netlist.hpp"
#include "siopt/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace siopt::studies {

namespace {

circuit::MultidropValues values_from(const std::map<std::string, double>& m,
                                     const circuit::MultidropValues& base) {
    circuit::MultidropValues v = base;
    auto pick = [&](const char* name, double& field) {
        auto it = m.find(name);
        if (it != m.end()) field = it->second;
    };
    pick("series_r_drvr", v.series_r_drvr);
    pick("series_r_primary", v.series_r_primary);
    pick("series_r_stub", v.series_r_stub);
    pick("shunt_r_drvr", v.shunt_r_drvr);
    pick("shunt_r_primary", v.shunt_r_primary);
    pick("shunt_r_rcvr", v.shunt_r_rcvr);
    pick("z_primary", v.z_primary);
    pick("z_stub", v.z_stub);
    return v;
}

struct SimOutcome {
    std::map<std::string, Waveform> waves;
    std::vector<std::string> receivers;
    // per-receiver auto-centered opening and window delay
    std::vector<double> openings;
    std::vector<double> delays;
    double worst = 0.0;
};

class MultidropRunner {
public:
    explicit MultidropRunner(const MultidropConfig& cfg) : cfg_(cfg) {
        spec_ = cfg.topology;
        spec_.driver = circuit::default_multidrop_driver(cfg.bit_period, cfg.prbs_order,
                                                         cfg.seed);
        tstop_ = (cfg.warmup_bits + cfg.measure_bits) * cfg.bit_period;
        measure_from_ = cfg.warmup_bits * cfg.bit_period;
    }

    void set_prune(const std::map<std::string, PruneState>& prune) { spec_.prune = prune; }
    const circuit::MultidropSpec& spec() const { return spec_; }

    SimOutcome simulate(const circuit::MultidropValues& v) const {
        const circuit::MultidropNet net = circuit::build_multidrop(spec_, v);
        SimOutcome out;
        out.waves = circuit::run_transient(net.netlist, cfg_.tstep, tstop_);
        out.receivers = net.receiver_nodes;
        out.worst = std::numeric_limits<double>::infinity();
        for (const auto& node : net.receiver_nodes) {
            const Waveform trimmed = trim_waveform(out.waves.at(node), measure_from_);
            const auto [delay, opening] =
                auto_center_window(trimmed, cfg_.vref, cfg_.eye_mask, cfg_.bit_period, 32);
            out.openings.push_back(opening);
            out.delays.push_back(delay);
            out.worst = std::min(out.worst, opening);
        }
        return out;
    }

    // worst-case receiver opening as the single optimizer measure
    double objective(const std::map<std::string, double>& m,
                     const circuit::MultidropValues& base) const {
        return simulate(values_from(m, base)).worst;
    }

    Waveform trimmed(const SimOutcome& sim, const std::string& node) const {
        return trim_waveform(sim.waves.at(node), measure_from_);
    }

private:
    const MultidropConfig& cfg_;
    circuit::MultidropSpec spec_;
    double tstop_ = 0.0;
    double measure_from_ = 0.0;
};

std::map<std::string, PruneState> baseline_prune() {
    return {
        {"series_r_drvr", PruneState::Short},   {"series_r_primary", PruneState::Short},
        {"series_r_stub", PruneState::Short},   {"shunt_r_drvr", PruneState::Open},
        {"shunt_r_rcvr", PruneState::Open},
    };
}

} // namespace

StudyReport run_multidrop_study(const MultidropConfig& cfg) {
    StudyReport report;
    report.study = "multidrop";

    MultidropRunner runner(cfg);

    // 1. conventional termination: a single 50 ohm to VTT at the far end
    runner.set_prune(baseline_prune());
    circuit::MultidropValues conventional;
    conventional.shunt_r_primary = 50.0;
    conventional.z_primary = 50.0;
    conventional.z_stub = 50.0;
    const SimOutcome baseline = runner.simulate(conventional);
    report.baseline_opening = baseline.worst;

    // 2. kitchen sink: optimize all eight groups
    runner.set_prune({});
    circuit::MultidropValues base;
    optimize::Objective obj = [&](const std::map<std::string, double>& m) {
        return runner.objective(m, base);
    };
    optimize::OptStageResult stage1;
    try {
        stage1 = optimize::minimize(obj, cfg.variables, cfg.goal, cfg.model);
    } catch (const std::exception& e) {
        report.notes.push_back(std::string("stage 1 failed: ") + e.what());
        report.pass = false;
        return report;
    }
    report.stages.push_back({"kitchen_sink", stage1});
    if (!stage1.converged)
        report.notes.push_back("stage 1 did not converge; inspect the eye artifacts");

    std::map<std::string, double> values = stage1.values;

    // 3. prune elements driven to their useful extremes
    std::map<std::string, PruneState> decisions;
    if (cfg.prune_enabled) {
        decisions = optimize::prune_topology(
            values, {{optimize::ElementRole::Series, cfg.series_short_threshold,
                      cfg.shunt_open_threshold},
                     {optimize::ElementRole::Shunt, cfg.series_short_threshold,
                      cfg.shunt_open_threshold}});
        for (const auto& [name, st] : decisions) report.prune_history.emplace_back(name, st);

        // 4. re-optimize whatever survived
        runner.set_prune(decisions);
        std::vector<optimize::OptVariable> remaining;
        for (const auto& v : cfg.variables) {
            auto it = decisions.find(v.name);
            if (it != decisions.end() && it->second != PruneState::Keep) continue;
            optimize::OptVariable rv = v;
            rv.init = std::clamp(values.at(v.name), v.min, v.max);
            remaining.push_back(rv);
        }
        if (!remaining.empty()) {
            optimize::OptStageResult stage2;
            try {
                stage2 = optimize::minimize(obj, remaining, cfg.goal, cfg.model);
            } catch (const std::exception& e) {
                report.notes.push_back(std::string("stage 2 failed: ") + e.what());
                report.pass = false;
                return report;
            }
            report.stages.push_back({"pruned", stage2});
            if (!stage2.converged)
                report.notes.push_back("stage 2 did not converge; inspect the eye artifacts");
            for (const auto& [k, v] : stage2.values) values[k] = v;
        }
        for (const auto& [name, st] : decisions) {
            if (st != PruneState::Keep) values.erase(name);
        }
    }

    // 5. round to practical component values
    values = optimize::round_practical(values);
    report.final_values = values;

    // 6. final verification run
    const SimOutcome final_sim = runner.simulate(values_from(values, base));
    report.final_opening = final_sim.worst;
    report.receiver_openings = final_sim.openings;

    for (size_t i = 0; i < final_sim.receivers.size(); ++i) {
        const std::string& node = final_sim.receivers[i];
        report.waveforms[node] = runner.trimmed(final_sim, node);
        EyeArtifact art;
        art.name = node;
        art.vref = cfg.vref;
        art.mask = measure::EyeMask::window_pulse(final_sim.delays[i], cfg.eye_mask,
                                                  cfg.bit_period);
        art.eye = measure::fold_eye(report.waveforms.at(node), cfg.bit_period,
                                    final_sim.delays[i]);
        report.eyes.push_back(std::move(art));
    }

    const double worst = report.final_opening;
    report.pass = worst >= cfg.hstl_requirement &&
                  worst >= report.baseline_opening + 0.1;
    if (worst < cfg.hstl_requirement)
        report.notes.push_back("final opening " + units::render(worst) +
                               " V misses the HSTL requirement " +
                               units::render(cfg.hstl_requirement) + " V");
    return report;
}

StudyReport run_multidrop(const StudyConfig& cfg) {
    return run_multidrop_study(multidrop_config_from(cfg));
}

} // namespace siopt::studies
