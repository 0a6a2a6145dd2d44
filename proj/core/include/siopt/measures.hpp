#pragma once

#include "siopt/deck.hpp"
#include "siopt/eye.hpp"
#include "siopt/reducer.hpp"
#include "siopt/waveform.hpp"

#include <map>
#include <span>
#include <string>

namespace siopt::measure {

struct MeasureResult {
    std::string name;
    double value = 0.0;
    Reducer reducer = Reducer::Min;
    size_t samples_considered = 0;
};

// MIN/MAX: exact extrema; AVG: arithmetic mean; INTEG: trapezoidal
// integral over t.  Throws on an empty series.
double reduce(std::span<const double> times, std::span<const double> values, Reducer r);

// min over samples of |sig(t) - vref| + win(t); the .MEAS TRAN eye_open
// MIN semantics.  Requires coverage of at least two mask periods.
MeasureResult windowed_opening(const Waveform& sig, double vref, const EyeMask& win);

// pointwise (mask(t) > 0) ? |sig(t)| - mask(t) : oob, then reduced.
// The paper's rule: oob = 10 for MIN, 0 for AVG/INTEG.
MeasureResult masked_opening(const Waveform& sig_diff, const EyeMask& mask, Reducer r,
                             double oob);
double default_oob(Reducer r);

// Deck-driven measure: evaluates the expression pointwise against the
// named node waveforms (shared t0/dt grid) and reduces.
MeasureResult evaluate_measure(const deck::MeasureSpec& spec,
                               const std::map<std::string, Waveform>& waves,
                               const std::map<std::string, double>& params);

} // namespace siopt::measure
