#include <doctest.h>

#include "siopt/errors.hpp"
#include "siopt/measures.hpp"

#include "oracles.hpp"

#include <random>

using namespace siopt;
using measure::EyeMask;

namespace {

// Random NRZ stream with two-pole smoothing and a delayed echo: cheap,
// deterministic inter-symbol interference.
Waveform random_isi_waveform(std::mt19937& rng, int bits, int spb, double dt, double lo,
                             double hi) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Waveform w;
    w.t0 = 0.0;
    w.dt = dt;
    w.samples.resize(static_cast<size_t>(bits) * spb);
    const double a = 0.25 + 0.5 * u(rng);       // smoothing pole
    const size_t echo = 1 + rng() % (spb * 2);  // reflection delay
    const double rho = 0.35 * u(rng);
    double s1 = lo, s2 = lo;
    for (int b = 0; b < bits; ++b) {
        const double level = u(rng) < 0.5 ? lo : hi;
        for (int i = 0; i < spb; ++i) {
            const size_t idx = static_cast<size_t>(b) * spb + i;
            s1 += a * (level - s1);
            s2 += a * (s1 - s2);
            double v = s2;
            if (idx >= echo) v += rho * (w.samples[idx - echo] - (lo + hi) / 2.0);
            w.samples[idx] = v;
        }
    }
    return w;
}

Waveform constant_wave(double value, double dt, size_t n) {
    Waveform w;
    w.dt = dt;
    w.samples.assign(n, value);
    return w;
}

} // namespace

TEST_SUITE_BEGIN("measure");

TEST_CASE("reduce examples") {
    const double times[] = {0.0, 1.0};
    const double vals[] = {1.0, 3.0};
    CHECK(measure::reduce(times, vals, Reducer::Integ) == doctest::Approx(2.0));
    CHECK(measure::reduce(times, vals, Reducer::Min) == 1.0);
    CHECK(measure::reduce(times, vals, Reducer::Max) == 3.0);
    CHECK(measure::reduce(times, vals, Reducer::Avg) == 2.0);

    const double ct[] = {0.0, 0.5, 1.0};
    const double cv[] = {4.2, 4.2, 4.2};
    CHECK(measure::reduce(ct, cv, Reducer::Avg) == doctest::Approx(4.2));
    CHECK_THROWS_AS(
        measure::reduce(std::span<const double>{}, std::span<const double>{}, Reducer::Min),
        EvalError);
}

TEST_CASE("fold_eye on a periodic square wave") {
    const double period = 1e-9;
    const int spb = 100;
    Waveform w;
    w.dt = period / spb;
    w.samples.resize(spb * 8);
    for (size_t i = 0; i < w.samples.size(); ++i)
        w.samples[i] = (i % spb) < static_cast<size_t>(spb / 2) ? 1.0 : 0.0;

    const auto eye = measure::fold_eye(w, period, 0.0);
    CHECK(eye.traces == 7);   // floor(duration / period)
    for (const auto& [phase, v] : eye.points) {
        CHECK(phase >= 0.0);
        CHECK(phase < period);
        CHECK((v == 0.0 || v == 1.0));
    }
    // doubled time base folds the same content
    const auto eye2 = measure::fold_eye(w, 2.0 * period, 0.0);
    CHECK(eye2.traces == 3);
    CHECK(eye2.points.size() == w.samples.size());

    CHECK_THROWS_AS(measure::fold_eye(w, 5e-9, 0.0), SimError);   // < 2 periods
}

TEST_CASE("windowed opening: constructed signals") {
    const double period = 1.2e-9, open_w = 840e-12, vref = 0.75;
    const double dt = 5e-12;
    const size_t n = static_cast<size_t>(4.0 * period / dt);

    // ideal +-0.4 V square about vref, window centered mid-bit
    Waveform w;
    w.dt = dt;
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const double t = dt * static_cast<double>(i);
        const auto bit = static_cast<size_t>(t / period);
        w.samples[i] = vref + (bit % 2 ? 0.4 : -0.4);
    }
    const auto win = EyeMask::window_pulse((period - open_w) / 2.0, open_w, period);
    const auto r = measure::windowed_opening(w, vref, win);
    CHECK(r.value == doctest::Approx(0.4));
    CHECK(r.samples_considered == n);

    // one sample grazing vref inside the window drives the measure to zero
    Waveform g = w;
    g.samples[static_cast<size_t>((period / 2.0) / dt)] = vref;
    CHECK(measure::windowed_opening(g, vref, win).value == doctest::Approx(0.0));

    CHECK_THROWS_AS(
        measure::windowed_opening(constant_wave(1.0, dt, 10), vref, win), SimError);
}

TEST_CASE("masked opening: flat-top arithmetic and sign semantics") {
    const double bit = 160e-12;
    const double dt = bit / 32.0;
    const size_t n = static_cast<size_t>(4.0 * bit / dt);
    // alternating-sign flat differential signal at +-0.3 V
    Waveform w;
    w.dt = dt;
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const double t = dt * static_cast<double>(i);
        w.samples[i] = static_cast<size_t>(t / bit) % 2 ? 0.3 : -0.3;
    }
    const auto mask = EyeMask::hexagon_half(0.0, bit);
    const auto r = measure::masked_opening(w, mask, Reducer::Min, 10.0);
    CHECK(r.value == doctest::Approx(0.135));   // 0.3 - 0.165 on the plateau

    // a taller mask goes negative: violations are representable
    const auto tall = EyeMask::hexagon_half(0.0, bit, 0.5);
    CHECK(measure::masked_opening(w, tall, Reducer::Min, 10.0).value < 0.0);
}

TEST_CASE("oracle equivalence on randomized ISI waveforms") {
    std::mt19937 rng(77);
    const double bit_period = 1.2e-9;
    const int spb = 240;
    const double dt = bit_period / spb;
    std::uniform_real_distribution<double> udelay(0.0, bit_period);

    for (int trial = 0; trial < 30; ++trial) {
        // windowed, single-ended about 0.75 V; start past any delay so the
        // pulse is in its periodic regime over the whole waveform
        Waveform w = random_isi_waveform(rng, 24, spb, dt, 0.3, 1.2);
        w.t0 = 2.0 * bit_period;
        const double delay = udelay(rng);
        const auto win = EyeMask::window_pulse(delay, 840e-12, bit_period);
        const double got = measure::windowed_opening(w, 0.75, win).value;
        const double want =
            oracles::windowed_min_scan(w, 0.75, delay, 840e-12, bit_period);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));

        // masked, differential about 0
        Waveform d = random_isi_waveform(rng, 24, spb, dt, -0.4, 0.4);
        d.t0 = 2.0 * bit_period;
        const double mdelay = udelay(rng);
        const auto mask = EyeMask::hexagon_half(mdelay, bit_period);
        const double mg = measure::masked_opening(d, mask, Reducer::Min, 10.0).value;
        const double mw = oracles::masked_min_scan(d, mdelay, bit_period, 0.165, 0.05, 0.5);
        CHECK(mg == doctest::Approx(mw).epsilon(1e-12));
    }
}

TEST_CASE("out-of-bounds value is neutral for MIN and zero-weight for AVG/INTEG") {
    std::mt19937 rng(5);
    const double bit = 160e-12;
    const int spb = 32;
    Waveform d = random_isi_waveform(rng, 32, spb, bit / spb, -0.4, 0.4);
    const auto mask = EyeMask::hexagon_half(40e-12, bit);

    const double a = measure::masked_opening(d, mask, Reducer::Min, 10.0).value;
    const double b = measure::masked_opening(d, mask, Reducer::Min, 1000.0).value;
    CHECK(a == b);

    // with oob = 0 the out-of-mask samples contribute exactly zero to INTEG
    const double integ = measure::masked_opening(d, mask, Reducer::Integ, 0.0).value;
    std::vector<double> times, vals;
    for (size_t i = 0; i < d.samples.size(); ++i) {
        const double t = d.time_at(i);
        const double m = mask.value(t);
        times.push_back(t);
        vals.push_back(m > 0.0 ? std::fabs(d.samples[i]) - m : 0.0);
    }
    CHECK(integ == doctest::Approx(measure::reduce(times, vals, Reducer::Integ)));
}

TEST_CASE("mask periodicity: f(d) = f(d + period) on the same grid") {
    std::mt19937 rng(11);
    const double bit = 160e-12;
    const int spb = 32;
    Waveform d = random_isi_waveform(rng, 64, spb, bit / spb, -0.4, 0.4);
    // start past both delays so every sample sees the periodic branch
    d.t0 = 4.0 * bit;
    for (double frac : {0.1, 0.37, 0.62, 0.93}) {
        const double delay = frac * bit;
        const auto m1 = EyeMask::hexagon_half(2.0 * bit + delay, bit);
        const auto m2 = EyeMask::hexagon_half(3.0 * bit + delay, bit);
        const double v1 = measure::masked_opening(d, m1, Reducer::Avg, 0.0).value;
        const double v2 = measure::masked_opening(d, m2, Reducer::Avg, 0.0).value;
        CHECK(v1 == doctest::Approx(v2).epsilon(1e-9));
    }
}

TEST_CASE("shift covariance: delaying signal and mask together changes nothing") {
    std::mt19937 rng(13);
    const double bit = 160e-12;
    const int spb = 32;
    const double dt = bit / spb;
    Waveform d = random_isi_waveform(rng, 32, spb, dt, -0.4, 0.4);
    const auto mask = EyeMask::hexagon_half(3.0 * bit + 40e-12, bit);
    const double v1 = measure::masked_opening(d, mask, Reducer::Min, 10.0).value;

    const int shift_samples = 2 * spb;   // a whole number of mask periods
    Waveform shifted = d;
    shifted.t0 = d.t0 + shift_samples * dt;
    const auto mask2 = EyeMask::hexagon_half(3.0 * bit + 40e-12 + shift_samples * dt, bit);
    const double v2 = measure::masked_opening(shifted, mask2, Reducer::Min, 10.0).value;
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-12));
}

TEST_CASE("deck-driven measure evaluation") {
    deck::MeasureSpec spec;
    spec.name = "eye_open";
    spec.reducer = Reducer::Min;
    spec.expression = expr::parse("abs(v(sig)-vref) + v(win)");

    const double dt = 1e-11;
    std::map<std::string, Waveform> waves;
    waves["sig"] = constant_wave(0.95, dt, 100);
    waves["win"] = constant_wave(0.0, dt, 100);
    const auto r = measure::evaluate_measure(spec, waves, {{"vref", 0.75}});
    CHECK(r.value == doctest::Approx(0.2));
    CHECK(r.samples_considered == 100);

    waves.erase("win");
    CHECK_THROWS_AS(measure::evaluate_measure(spec, waves, {{"vref", 0.75}}), EvalError);
}

TEST_SUITE_END();
