#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace siopt {

// Uniformly sampled voltage-vs-time series; the common currency between
// the simulators, the eye measures, and the optimizer.
struct Waveform {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> samples;

    size_t size() const { return samples.size(); }
    double time_at(size_t i) const { return t0 + dt * static_cast<double>(i); }
    double duration() const {
        return samples.size() < 2 ? 0.0 : dt * static_cast<double>(samples.size() - 1);
    }
    double end_time() const { return t0 + duration(); }

    bool operator==(const Waveform&) const = default;
};

// CSV with header `time_s,<name>...`, one row per sample, shortest
// round-trip decimals.  All waveforms must share t0/dt/length.
void write_waveform_csv(std::ostream& os,
                        const std::vector<std::pair<std::string, const Waveform*>>& columns);

} // namespace siopt
