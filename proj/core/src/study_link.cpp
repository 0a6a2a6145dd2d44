#include "siopt/studies.hpp"
#include "siopt/errors.hpp"
#include "siopt/measures.hpp"
#include "siopt/units.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace siopt::studies {

namespace {

channel::LinkSpec link_for(const LinkwidthConfig& cfg, double linewidth) {
    channel::LinkSpec link = cfg.link;
    link.card_length = cfg.length / 2.0;
    link.backplane_length = cfg.length;
    link.geometry = channel::scale_geometry(linewidth, cfg.link.geometry);
    return link;
}

std::vector<uint8_t> stream_bits(const LinkwidthConfig& cfg) {
    return circuit::prbs_bits(cfg.prbs_order, cfg.seed, static_cast<size_t>(cfg.bits));
}

} // namespace

measure::EyeMask link_mask(const LinkwidthConfig& cfg, double delay) {
    const double tbit = 1.0 / cfg.link.bit_rate;
    return measure::EyeMask::hexagon_half(delay, tbit, cfg.mask_amplitude, cfg.mask_high_ui,
                                          cfg.mask_edge_ui);
}

Waveform simulate_scaled_link(const LinkwidthConfig& cfg, double linewidth) {
    return channel::simulate_link(link_for(cfg, linewidth), stream_bits(cfg),
                                  cfg.samples_per_bit);
}

namespace {

class LinkRunner {
public:
    explicit LinkRunner(const LinkwidthConfig& cfg) : cfg_(cfg), bits_(stream_bits(cfg)) {}

    const Waveform& wave_for(double linewidth) const {
        if (!cache_valid_ || linewidth != cached_width_) {
            cached_wave_ = channel::simulate_link(link_for(cfg_, linewidth), bits_,
                                                  cfg_.samples_per_bit);
            cached_width_ = linewidth;
            cache_valid_ = true;
        }
        return cached_wave_;
    }

    double avg_opening(double linewidth, double delay) const {
        const auto mask = link_mask(cfg_, delay);
        return measure::masked_opening(wave_for(linewidth), mask, Reducer::Avg, 0.0).value;
    }
    double min_opening(double linewidth, double delay) const {
        const auto mask = link_mask(cfg_, delay);
        return measure::masked_opening(wave_for(linewidth), mask, Reducer::Min, 10.0).value;
    }

private:
    const LinkwidthConfig& cfg_;
    std::vector<uint8_t> bits_;
    mutable Waveform cached_wave_;
    mutable double cached_width_ = -1.0;
    mutable bool cache_valid_ = false;
};

// the paper's note: mask-delay optimization is very sensitive to its
// starting value, so seed it from a coarse sweep of one bit period
double seed_mask_delay(const LinkRunner& runner, const LinkwidthConfig& cfg, double width) {
    const double tbit = 1.0 / cfg.link.bit_rate;
    double best_d = 0.0, best_v = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.delay_seed_grid; ++i) {
        const double d = tbit * static_cast<double>(i) / cfg.delay_seed_grid;
        const double v = runner.avg_opening(width, d);
        if (v > best_v) {
            best_v = v;
            best_d = d;
        }
    }
    return best_d;
}

std::string touching_edge_of(const Waveform& w, const measure::EyeMask& mask) {
    double best = std::numeric_limits<double>::infinity();
    double best_phase = 0.0;
    for (size_t i = 0; i < w.samples.size(); ++i) {
        const double t = w.time_at(i);
        const double m = mask.value(t);
        if (m <= 0.0) continue;
        const double v = std::fabs(w.samples[i]) - m;
        if (v < best) {
            best = v;
            double tp = std::fmod(t - mask.delay, mask.period);
            if (tp < 0) tp += mask.period;
            best_phase = tp;
        }
    }
    const double center = mask.rise + mask.high_time / 2.0;
    return best_phase < center ? "leading" : "trailing";
}

} // namespace

StudyReport run_linkwidth_study(const LinkwidthConfig& cfg) {
    StudyReport report;
    report.study = "linkwidth";

    if (cfg.goal_width == 0.0 || cfg.goal_delay == 0.0)
        throw EvalError("GOAL must be nonzero; use a small value such as 1e-5 instead "
                        "to avoid division by zero");

    LinkRunner runner(cfg);
    const double tbit = 1.0 / cfg.link.bit_rate;

    double width = cfg.width_init;
    double delay = 0.0;

    optimize::OptVariable delay_var{"mask_delay", 0.0, 0.0, 2.0 * tbit};
    optimize::OptVariable width_var{"linewidth", cfg.width_init, cfg.width_min, cfg.width_max};

    const int pairs = std::max(1, (cfg.rounds + 1) / 2);
    const int max_pairs = cfg.iterate_to_convergence ? 16 : pairs;
    double prev_delay = std::numeric_limits<double>::infinity();

    for (int round = 0; round < max_pairs; ++round) {
        // (a)/(c): position the mask for the largest average opening
        delay_var.init = seed_mask_delay(runner, cfg, width);
        optimize::Objective delay_obj = [&](const std::map<std::string, double>& m) {
            return runner.avg_opening(width, m.at("mask_delay"));
        };
        optimize::OptStageResult rd;
        try {
            rd = optimize::minimize(delay_obj, {delay_var}, cfg.goal_delay, cfg.model);
        } catch (const std::exception& e) {
            report.notes.push_back(std::string("mask-delay stage failed: ") + e.what());
            break;
        }
        delay = rd.values.at("mask_delay");
        report.stages.push_back({"mask_delay_" + std::to_string(round * 2 + 1), rd});

        // (b)/(d): thinnest width whose eye still clears the mask
        width_var.init = width;
        optimize::Objective width_obj = [&](const std::map<std::string, double>& m) {
            return runner.min_opening(m.at("linewidth"), delay);
        };
        optimize::OptStageResult rw;
        try {
            rw = optimize::minimize(width_obj, {width_var}, cfg.goal_width, cfg.model);
        } catch (const std::exception& e) {
            report.notes.push_back(std::string("line-width stage failed: ") + e.what());
            break;
        }
        width = rw.values.at("linewidth");
        report.stages.push_back({"linewidth_" + std::to_string(round * 2 + 2), rw});

        if (cfg.iterate_to_convergence && round > 0 &&
            std::abs(delay - prev_delay) < 0.01 * tbit) {
            report.notes.push_back("mask-delay adjustment fell below 1% of a bit period after " +
                                   std::to_string(round + 1) + " rounds");
            break;
        }
        prev_delay = delay;
    }

    report.final_width = width;
    report.final_mask_delay = delay;
    report.final_values["linewidth"] = width;
    report.final_values["mask_delay"] = delay;

    const double final_min = runner.min_opening(width, delay);
    report.final_opening = final_min;
    report.feasible = final_min >= 0.0;
    if (!report.feasible)
        report.notes.push_back("eye violates the mask even at the width cap: "
                               "infeasible at this length");

    const Waveform& wave = runner.wave_for(width);
    const auto mask = link_mask(cfg, delay);
    report.touching_edge = touching_edge_of(wave, mask);
    report.waveforms["rx_diff"] = wave;
    EyeArtifact art;
    art.name = "rx_diff";
    art.vref = 0.0;
    art.mask = mask;
    art.eye = measure::fold_eye(wave, tbit, delay);
    report.eyes.push_back(std::move(art));

    report.pass = report.feasible;
    return report;
}

StudyReport run_linkwidth(const StudyConfig& cfg) {
    return run_linkwidth_study(linkwidth_config_from(cfg));
}

std::vector<std::pair<double, double>> sweep_mask_delay(const LinkwidthConfig& cfg,
                                                        int n_points) {
    if (n_points < 8) throw Error("mask-delay sweep needs at least 8 points");
    LinkRunner runner(cfg);
    const double tbit = 1.0 / cfg.link.bit_rate;
    std::vector<std::pair<double, double>> curve;
    curve.reserve(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double d = 2.0 * tbit * static_cast<double>(i) / n_points;
        curve.emplace_back(d, runner.avg_opening(cfg.width_init, d));
    }
    return curve;
}

StudyReport run_length_sweep(const StudyConfig& cfg, const std::vector<double>& lengths) {
    if (lengths.size() < 2) throw Error("length sweep needs at least 2 lengths");
    StudyReport report;
    report.study = "length-sweep";

    // sweep fidelity: shorter stream, coarser sampling
    LinkwidthConfig base = linkwidth_config_from(cfg);

    std::vector<std::future<StudyReport>> futures;
    futures.reserve(lengths.size());
    for (double length : lengths) {
        LinkwidthConfig lc = base;
        lc.length = length;
        if (cfg.overrides.find("lw.bits") == cfg.overrides.end()) lc.bits = 256;
        if (cfg.overrides.find("lw.samples_per_bit") == cfg.overrides.end())
            lc.samples_per_bit = 16;
        futures.push_back(std::async(std::launch::async,
                                     [lc] { return run_linkwidth_study(lc); }));
    }

    bool all_ok = true;
    for (size_t i = 0; i < lengths.size(); ++i) {
        StudyReport sub;
        try {
            sub = futures[i].get();
        } catch (const std::exception& e) {
            report.notes.push_back("length " + units::render(lengths[i]) + " failed: " +
                                   e.what());
            all_ok = false;
            SweepRow row;
            row.length = lengths[i];
            row.feasible = false;
            report.sweep_rows.push_back(row);
            continue;
        }
        SweepRow row;
        row.length = lengths[i];
        row.width = sub.final_width;
        row.opening = sub.final_opening;
        row.feasible = sub.feasible;
        row.at_cap = sub.final_width >= base.width_max * (1.0 - 1e-9);
        report.sweep_rows.push_back(row);
        all_ok = all_ok && (sub.feasible || row.at_cap);
    }

    // monotonicity annotation: width should not decrease as length grows
    bool monotone = true;
    for (size_t i = 1; i < report.sweep_rows.size(); ++i) {
        if (report.sweep_rows[i].width < report.sweep_rows[i - 1].width - 2e-6) monotone = false;
    }
    if (!monotone) report.notes.push_back("minimal width is not monotone in length");
    report.pass = all_ok && monotone;
    return report;
}

} // namespace siopt::studies
