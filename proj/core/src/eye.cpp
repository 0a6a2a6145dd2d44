#include "siopt/eye.hpp"
#include "siopt/errors.hpp"
#include "siopt/source.hpp"

#include <cmath>

namespace siopt::measure {

void validate(const EyeMask& m) {
    if (m.rise <= 0.0 || m.fall <= 0.0) throw SimError("mask rise/fall must be > 0");
    if (m.period <= 0.0) throw SimError("mask period must be > 0");
    if (m.high_time + m.rise + m.fall > m.period)
        throw SimError("mask high_time + rise + fall must fit within one period");
}

double EyeMask::value(double t) const {
    circuit::PulseSpec p;
    if (kind == MaskKind::WindowPulse) {
        p.v1 = v_amplitude;
        p.v2 = 0.0;
    } else {
        p.v1 = 0.0;
        p.v2 = v_amplitude;
    }
    p.delay = delay;
    p.rise = rise;
    p.fall = fall;
    p.width = high_time;
    p.period = period;
    return circuit::pulse_value(p, t);
}

bool EyeMask::in_mask(double t) const { return value(t) > 0.0; }
bool EyeMask::window_open(double t) const { return value(t) < v_amplitude / 2.0; }

EyeMask EyeMask::window_pulse(double delay, double open_width, double period, double amplitude) {
    EyeMask m;
    m.kind = MaskKind::WindowPulse;
    m.v_amplitude = amplitude;
    m.delay = delay;
    m.rise = 1e-15;
    m.fall = 1e-15;
    m.high_time = open_width;
    m.period = period;
    validate(m);
    return m;
}

EyeMask EyeMask::hexagon_half(double delay, double bit_period, double amplitude, double high_ui,
                              double edge_ui) {
    EyeMask m;
    m.kind = MaskKind::HexagonHalf;
    m.v_amplitude = amplitude;
    m.delay = delay;
    m.rise = edge_ui * bit_period;
    m.fall = edge_ui * bit_period;
    m.high_time = high_ui * bit_period;
    m.period = bit_period;
    validate(m);
    return m;
}

EyeDiagram fold_eye(const Waveform& w, double period, double offset) {
    if (w.dt <= 0.0 || w.samples.size() < 2) throw SimError("waveform is empty");
    if (period <= w.dt) throw SimError("fold period must exceed the sample interval");
    if (w.duration() < 2.0 * period)
        throw SimError("waveform too short to fold: need at least two periods");

    EyeDiagram eye;
    eye.period = period;
    eye.traces = static_cast<size_t>(std::floor(w.duration() / period));
    eye.points.reserve(w.samples.size());
    for (size_t i = 0; i < w.samples.size(); ++i) {
        double phase = std::fmod(w.time_at(i) - offset, period);
        if (phase < 0.0) phase += period;
        eye.points.emplace_back(phase, w.samples[i]);
    }
    return eye;
}

} // namespace siopt::measure
