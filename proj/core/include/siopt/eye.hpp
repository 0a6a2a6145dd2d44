#pragma once

#include "siopt/waveform.hpp"

#include <utility>
#include <vector>

namespace siopt::measure {

enum class MaskKind { WindowPulse, HexagonHalf };

// Periodic pulse-train mask.  WindowPulse sits high (v_amplitude) during
// signal transitions and drops to 0 inside the eye window; HexagonHalf is
// the top half of a hexagonal eye mask, 0 outside and v_amplitude on the
// plateau.
struct EyeMask {
    MaskKind kind = MaskKind::WindowPulse;
    double v_amplitude = 2.0;
    double delay = 0.0;
    double rise = 1e-15, fall = 1e-15;
    double high_time = 0.0;   // open-window width / mask plateau width
    double period = 0.0;

    double value(double t) const;     // PULSE semantics
    bool in_mask(double t) const;     // hexagon: value > 0
    bool window_open(double t) const; // window: value < v_amplitude/2

    // The multi-drop windowing pulse: 2 V during transitions, 0 V inside
    // an open window of `open_width` per period.
    static EyeMask window_pulse(double delay, double open_width, double period,
                                double amplitude = 2.0);
    // The serial-link mask: plateau 0.5 UI, edges 0.05 UI, 0.165 V.
    static EyeMask hexagon_half(double delay, double bit_period, double amplitude = 0.165,
                                double high_ui = 0.5, double edge_ui = 0.05);

    bool operator==(const EyeMask&) const = default;
};

void validate(const EyeMask& m);

// Folded eye: samples mapped to phase = (t - offset) mod period.
struct EyeDiagram {
    double period = 0.0;
    size_t traces = 0;
    std::vector<std::pair<double, double>> points;   // (phase, volts)
};

// Requires waveform duration >= 2 periods; no interpolation.
EyeDiagram fold_eye(const Waveform& w, double period, double offset);

} // namespace siopt::measure
