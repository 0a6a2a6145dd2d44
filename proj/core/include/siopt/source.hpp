#pragma once

#include <cstdint>
#include <vector>

namespace siopt::circuit {

// SPICE PULSE(v1 v2 delay rise fall width period): v1 until delay, linear
// rise to v2, hold for width, linear fall back, periodic thereafter.
struct PulseSpec {
    double v1 = 0.0, v2 = 0.0;
    double delay = 0.0;
    double rise = 1e-15, fall = 1e-15;
    double width = 0.0;
    double period = 0.0;   // <= 0 means single-shot
};
double pulse_value(const PulseSpec& p, double t);

struct PwlPoint {
    double t = 0.0, v = 0.0;
};

// Maximal-length Fibonacci LFSR driving a trapezoidal bit stream.
struct PrbsSpec {
    int order = 7;             // [3, 31]
    uint32_t seed = 0x7f;      // nonzero, masked to `order` bits
    double bit_period = 0.0;
    double v_low = 0.0, v_high = 1.0;
    double rise = 1e-15, fall = 1e-15;
};

// Maximal-length sequence bits for the given order/seed.
std::vector<uint8_t> prbs_bits(int order, uint32_t seed, size_t count);
uint64_t prbs_period(int order);

class Source {
public:
    enum class Kind { Dc, Pulse, Pwl, Prbs };

    static Source dc(double volts);
    static Source pulse(const PulseSpec& p);
    static Source pwl(std::vector<PwlPoint> points);   // times strictly increasing
    static Source prbs(const PrbsSpec& p);

    Kind kind() const { return kind_; }
    double eval(double t) const;   // total over t >= 0

    const PulseSpec& pulse_spec() const { return pulse_; }
    const PrbsSpec& prbs_spec() const { return prbs_; }
    const std::vector<PwlPoint>& pwl_points() const { return pwl_; }
    double dc_volts() const { return dc_; }

private:
    Source() = default;
    Kind kind_ = Kind::Dc;
    double dc_ = 0.0;
    PulseSpec pulse_;
    std::vector<PwlPoint> pwl_;
    PrbsSpec prbs_;
    std::vector<uint8_t> prbs_bits_;   // one full LFSR period, precomputed
};

inline double eval_source(const Source& s, double t) { return s.eval(t); }

} // namespace siopt::circuit
