#include "siopt/source.hpp"
#include "siopt/errors.hpp"

#include <cmath>

namespace siopt::circuit {

double pulse_value(const PulseSpec& p, double t) {
    if (t < p.delay) return p.v1;
    double tp = t - p.delay;
    if (p.period > 0.0) tp = std::fmod(tp, p.period);
    if (tp < p.rise) return p.v1 + (p.v2 - p.v1) * (tp / p.rise);
    tp -= p.rise;
    if (tp < p.width) return p.v2;
    tp -= p.width;
    if (tp < p.fall) return p.v2 + (p.v1 - p.v2) * (tp / p.fall);
    return p.v1;
}

namespace {

// Maximal-length taps (Fibonacci form), one entry per register length.
struct TapSet {
    int a = 0, b = 0, c = 0, d = 0;
};
TapSet taps_for(int order) {
    switch (order) {
        case 3: return {3, 2};
        case 4: return {4, 3};
        case 5: return {5, 3};
        case 6: return {6, 5};
        case 7: return {7, 6};
        case 8: return {8, 6, 5, 4};
        case 9: return {9, 5};
        case 10: return {10, 7};
        case 11: return {11, 9};
        case 12: return {12, 6, 4, 1};
        case 13: return {13, 4, 3, 1};
        case 14: return {14, 5, 3, 1};
        case 15: return {15, 14};
        case 16: return {16, 15, 13, 4};
        case 17: return {17, 14};
        case 18: return {18, 11};
        case 19: return {19, 6, 2, 1};
        case 20: return {20, 17};
        case 21: return {21, 19};
        case 22: return {22, 21};
        case 23: return {23, 18};
        case 24: return {24, 23, 22, 17};
        case 25: return {25, 22};
        case 26: return {26, 6, 2, 1};
        case 27: return {27, 5, 2, 1};
        case 28: return {28, 25};
        case 29: return {29, 27};
        case 30: return {30, 6, 4, 1};
        case 31: return {31, 28};
        default:
            throw SimError("PRBS order must be in [3, 31], got " + std::to_string(order));
    }
}

// Fibonacci left-shift form: feedback from the tap positions enters at
// bit 1; the output is the register MSB.
uint32_t lfsr_step(uint32_t state, int order, const TapSet& taps) {
    auto bit = [&](int i) { return (state >> (i - 1)) & 1u; };
    uint32_t fb = bit(taps.a) ^ bit(taps.b);
    if (taps.c) fb ^= bit(taps.c);
    if (taps.d) fb ^= bit(taps.d);
    const uint32_t mask = order == 31 ? 0x7fffffffu : ((1u << order) - 1u);
    return ((state << 1) | fb) & mask;
}

} // namespace

uint64_t prbs_period(int order) {
    taps_for(order);
    return (uint64_t(1) << order) - 1;
}

std::vector<uint8_t> prbs_bits(int order, uint32_t seed, size_t count) {
    const TapSet taps = taps_for(order);
    const uint32_t mask = order == 31 ? 0x7fffffffu : ((1u << order) - 1u);
    uint32_t state = seed & mask;
    if (state == 0) throw SimError("PRBS seed must be nonzero after masking to the register width");
    std::vector<uint8_t> bits(count);
    for (size_t i = 0; i < count; ++i) {
        bits[i] = static_cast<uint8_t>((state >> (order - 1)) & 1u);
        state = lfsr_step(state, order, taps);
    }
    return bits;
}

Source Source::dc(double volts) {
    Source s;
    s.kind_ = Kind::Dc;
    s.dc_ = volts;
    return s;
}

Source Source::pulse(const PulseSpec& p) {
    if (p.rise <= 0.0 || p.fall <= 0.0) throw SimError("PULSE rise/fall must be > 0");
    Source s;
    s.kind_ = Kind::Pulse;
    s.pulse_ = p;
    return s;
}

Source Source::pwl(std::vector<PwlPoint> points) {
    for (size_t i = 1; i < points.size(); ++i) {
        if (points[i].t <= points[i - 1].t)
            throw SimError("PWL times must be strictly increasing");
    }
    Source s;
    s.kind_ = Kind::Pwl;
    s.pwl_ = std::move(points);
    return s;
}

Source Source::prbs(const PrbsSpec& p) {
    if (p.bit_period <= 0.0) throw SimError("PRBS bit period must be > 0");
    if (p.rise <= 0.0 || p.fall <= 0.0) throw SimError("PRBS rise/fall must be > 0");
    Source s;
    s.kind_ = Kind::Prbs;
    s.prbs_ = p;
    const uint64_t period = prbs_period(p.order);
    if (period > (uint64_t(1) << 22))
        throw SimError("PRBS order too large to tabulate; use order <= 22");
    s.prbs_bits_ = prbs_bits(p.order, p.seed, static_cast<size_t>(period));
    return s;
}

double Source::eval(double t) const {
    switch (kind_) {
        case Kind::Dc:
            return dc_;
        case Kind::Pulse:
            return pulse_value(pulse_, t);
        case Kind::Pwl: {
            if (pwl_.empty()) return 0.0;
            if (t <= pwl_.front().t) return pwl_.front().v;
            if (t >= pwl_.back().t) return pwl_.back().v;
            size_t lo = 0, hi = pwl_.size() - 1;
            while (hi - lo > 1) {
                size_t mid = (lo + hi) / 2;
                (pwl_[mid].t <= t ? lo : hi) = mid;
            }
            const auto& a = pwl_[lo];
            const auto& b = pwl_[hi];
            return a.v + (b.v - a.v) * (t - a.t) / (b.t - a.t);
        }
        case Kind::Prbs: {
            const size_t n = prbs_bits_.size();
            const double T = prbs_.bit_period;
            const auto k = static_cast<uint64_t>(std::floor(t / T));
            const size_t cur = static_cast<size_t>(k % n);
            const size_t prev = static_cast<size_t>((k + n - 1) % n);
            const double lv_cur = prbs_bits_[cur] ? prbs_.v_high : prbs_.v_low;
            const double lv_prev = prbs_bits_[prev] ? prbs_.v_high : prbs_.v_low;
            if (lv_cur == lv_prev) return lv_cur;
            const double edge = lv_cur > lv_prev ? prbs_.rise : prbs_.fall;
            const double phase = t - static_cast<double>(k) * T;
            if (phase >= edge) return lv_cur;
            return lv_prev + (lv_cur - lv_prev) * (phase / edge);
        }
    }
    return 0.0;
}

} // namespace siopt::circuit
