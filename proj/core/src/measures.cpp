#include "siopt/measures.hpp"
#include "siopt/errors.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace siopt::measure {

double reduce(std::span<const double> times, std::span<const double> values, Reducer r) {
    if (values.empty()) throw EvalError("cannot reduce an empty series");
    switch (r) {
        case Reducer::Min: {
            double m = values[0];
            for (double v : values) m = std::min(m, v);
            return m;
        }
        case Reducer::Max: {
            double m = values[0];
            for (double v : values) m = std::max(m, v);
            return m;
        }
        case Reducer::Avg: {
            double s = 0.0;
            for (double v : values) s += v;
            return s / static_cast<double>(values.size());
        }
        case Reducer::Integ: {
            if (times.size() != values.size())
                throw EvalError("INTEG needs matching time and value series");
            double s = 0.0;
            for (size_t i = 1; i < values.size(); ++i)
                s += 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
            return s;
        }
    }
    throw EvalError("bad reducer");
}

namespace {

void require_coverage(const Waveform& w, const EyeMask& m, const char* what) {
    if (w.samples.size() < 2) throw SimError(std::string(what) + ": waveform is empty");
    if (w.duration() < 2.0 * m.period)
        throw SimError(std::string(what) + ": waveform must cover at least two mask periods");
}

} // namespace

MeasureResult windowed_opening(const Waveform& sig, double vref, const EyeMask& win) {
    validate(win);
    require_coverage(sig, win, "windowed_opening");
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < sig.samples.size(); ++i) {
        const double t = sig.time_at(i);
        const double v = std::fabs(sig.samples[i] - vref) + win.value(t);
        best = std::min(best, v);
    }
    MeasureResult r;
    r.name = "eye_open";
    r.value = best;
    r.reducer = Reducer::Min;
    r.samples_considered = sig.samples.size();
    return r;
}

double default_oob(Reducer r) { return r == Reducer::Min ? 10.0 : 0.0; }

MeasureResult masked_opening(const Waveform& sig_diff, const EyeMask& mask, Reducer r,
                             double oob) {
    validate(mask);
    require_coverage(sig_diff, mask, "masked_opening");
    std::vector<double> times(sig_diff.samples.size());
    std::vector<double> values(sig_diff.samples.size());
    for (size_t i = 0; i < sig_diff.samples.size(); ++i) {
        const double t = sig_diff.time_at(i);
        const double m = mask.value(t);
        times[i] = t;
        values[i] = m > 0.0 ? std::fabs(sig_diff.samples[i]) - m : oob;
    }
    MeasureResult out;
    out.name = "min_eye_opening";
    out.value = reduce(times, values, r);
    out.reducer = r;
    out.samples_considered = values.size();
    return out;
}

MeasureResult evaluate_measure(const deck::MeasureSpec& spec,
                               const std::map<std::string, Waveform>& waves,
                               const std::map<std::string, double>& params) {
    std::set<std::string> signals;
    spec.expression.collect_signals(signals);

    std::vector<const Waveform*> srcs;
    std::vector<std::string> names;
    for (const auto& s : signals) {
        auto it = waves.find(s);
        if (it == waves.end())
            throw EvalError("measure '" + spec.name + "' references unknown node '" + s + "'");
        if (!srcs.empty() &&
            (it->second.dt != srcs[0]->dt || it->second.t0 != srcs[0]->t0 ||
             it->second.size() != srcs[0]->size()))
            throw EvalError("measure '" + spec.name + "': waveform grids differ");
        srcs.push_back(&it->second);
        names.push_back(s);
    }
    if (srcs.empty()) throw EvalError("measure '" + spec.name + "' references no node voltages");

    const size_t count = srcs[0]->size();
    std::vector<double> times(count), values(count);
    std::map<std::string, double> sample;
    expr::EvalContext ctx;
    ctx.params = &params;
    ctx.signals = &sample;
    for (size_t i = 0; i < count; ++i) {
        for (size_t k = 0; k < names.size(); ++k) sample[names[k]] = srcs[k]->samples[i];
        times[i] = srcs[0]->time_at(i);
        values[i] = expr::eval(spec.expression, ctx);
    }
    MeasureResult out;
    out.name = spec.name;
    out.value = reduce(times, values, spec.reducer);
    out.reducer = spec.reducer;
    out.samples_considered = count;
    return out;
}

} // namespace siopt::measure
