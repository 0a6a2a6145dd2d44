#include <doctest.h>

#include "siopt/link.hpp"

#include "oracles.hpp"

#include <complex>
#include <random>

using namespace siopt;
using channel::LinkSpec;

namespace {

LinkSpec bare_link(double card, double backplane) {
    LinkSpec link;
    link.card_length = card;
    link.backplane_length = backplane;
    link.connector = {0.0, 50.0, 0.0};   // no discontinuity
    return link;
}

std::vector<double> grid(double fmax, size_t n) {
    std::vector<double> f(n);
    for (size_t i = 0; i < n; ++i) f[i] = fmax * static_cast<double>(i) / (n - 1);
    return f;
}

} // namespace

TEST_SUITE_BEGIN("link");

TEST_CASE("zero-length matched link is the source divider at every frequency") {
    const LinkSpec link = bare_link(0.0, 0.0);
    const auto h = channel::transfer_function(link, grid(10e9, 64));
    for (const auto& v : h) CHECK(std::abs(v) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("matched lossless line: flat magnitude, linear phase, group delay") {
    LinkSpec link = bare_link(0.0, 1.0);
    link.geometry.loss_tangent = 0.0;
    link.geometry.conductivity = 1e30;
    const auto freqs = grid(5e9, 201);
    const auto h = channel::transfer_function(link, freqs);
    const auto rlgc = channel::stripline_rlgc(link.geometry);
    const double expected_delay = rlgc.delay_per_meter() * 1.0;
    for (size_t i = 1; i + 1 < freqs.size(); ++i) {
        CHECK(std::abs(h[i]) == doctest::Approx(0.5).epsilon(1e-6));
        // group delay from the phase slope
        const double dphi = std::arg(h[i + 1] / h[i]);
        const double df = freqs[i + 1] - freqs[i];
        CHECK(-dphi / (2.0 * 3.14159265358979323846 * df) ==
              doctest::Approx(expected_delay).epsilon(1e-3));
    }
}

TEST_CASE("H(0) is the dc resistance divider") {
    const LinkSpec link = bare_link(0.15, 0.30);
    const auto rlgc = channel::stripline_rlgc(link.geometry);
    const auto h = channel::transfer_function(link, {0.0});
    const double expect = 100.0 / (100.0 + 100.0 + rlgc.r0 * link.total_length());
    CHECK(h[0].real() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(h[0].imag() == 0.0);
}

TEST_CASE("monotone loss for connector-free links") {
    const LinkSpec link = bare_link(0.2, 0.6);
    const auto freqs = grid(6.25e9, 200);
    const auto h = channel::transfer_function(link, freqs);
    for (size_t i = 2; i < h.size(); ++i)
        CHECK(std::abs(h[i]) <= std::abs(h[i - 1]) + 1e-12);
}

TEST_CASE("reciprocity: swapping source and load leaves |H| unchanged") {
    LinkSpec link;
    link.card_length = 0.1;
    link.backplane_length = 0.4;
    link.source_r = 100.0;
    link.load_r = 100.0;
    const auto freqs = grid(6.25e9, 64);
    const auto h1 = channel::transfer_function(link, freqs);
    std::swap(link.source_r, link.load_r);
    const auto h2 = channel::transfer_function(link, freqs);
    for (size_t i = 0; i < h1.size(); ++i)
        CHECK(std::abs(h1[i]) == doctest::Approx(std::abs(h2[i])).epsilon(1e-12));
}

TEST_CASE("impulse response is real and causal") {
    LinkSpec link;   // with connectors
    link.card_length = 0.25;
    link.backplane_length = 0.5;
    const size_t n = 4096;
    const double dt = 160e-12 / 32.0;
    const auto ir = channel::link_impulse_response(link, n, dt);

    // energy before the line flight time (minus 2 samples) is < 0.5%
    const auto rlgc = channel::stripline_rlgc(link.geometry);
    const double arrival = rlgc.delay_per_meter() * link.total_length();
    const auto pre = static_cast<size_t>(arrival / dt) - 2;
    double pre_energy = 0.0, total = 0.0;
    for (size_t i = 0; i < ir.size(); ++i) {
        const double e = ir[i] * ir[i];
        total += e;
        if (i < pre) pre_energy += e;
    }
    CHECK(pre_energy / total < 0.005);
}

TEST_CASE("hermitian spectrum inverse transform is real to 1e-9") {
    // build the full spectrum by conjugate extension and transform by hand
    LinkSpec link;
    link.card_length = 0.25;
    link.backplane_length = 0.5;
    const size_t n = 1024;
    const double dt = 160e-12 / 16.0;
    std::vector<double> freqs(n / 2 + 1);
    for (size_t k = 0; k < freqs.size(); ++k) freqs[k] = k / (dt * n);
    auto h = channel::transfer_function(link, freqs);
    h.back() = {h.back().real(), 0.0};   // Nyquist bin is real by convention

    std::vector<std::complex<double>> full(n);
    for (size_t k = 0; k <= n / 2; ++k) full[k] = h[k];
    for (size_t k = n / 2 + 1; k < n; ++k) full[k] = std::conj(h[n - k]);
    double max_im = 0.0, max_re = 0.0;
    for (size_t i = 0; i < n; ++i) {
        std::complex<double> acc{0.0, 0.0};
        for (size_t k = 0; k < n; ++k) {
            const double ang = 2.0 * 3.14159265358979323846 * i * k / n;
            acc += full[k] * std::polar(1.0, ang);
        }
        max_im = std::max(max_im, std::fabs(acc.imag()));
        max_re = std::max(max_re, std::fabs(acc.real()));
    }
    CHECK(max_im / max_re < 1e-9);
}

TEST_CASE("all-zero bits give the flat low level") {
    LinkSpec link = bare_link(0.1, 0.2);
    std::vector<uint8_t> bits(64, 0);
    const Waveform w = channel::simulate_link(link, bits, 16);
    const auto h0 = channel::transfer_function(link, {0.0})[0].real();
    for (double v : w.samples)
        CHECK(v == doctest::Approx(-0.8 * h0).epsilon(1e-6));
}

TEST_CASE("isolated one: pulse peak decreases with length") {
    std::vector<uint8_t> bits(64, 0);
    bits[32] = 1;
    double previous = 1e9;
    for (double scale : {0.15, 0.3, 0.45, 0.6}) {
        LinkSpec link;
        link.card_length = scale / 2.0;
        link.backplane_length = scale;
        const Waveform w = channel::simulate_link(link, bits, 16);
        double peak = -1e9;
        for (double v : w.samples) peak = std::max(peak, v);
        CHECK(peak < previous);
        previous = peak;
    }
}

TEST_CASE("pulse response equals direct circular convolution with the impulse response") {
    LinkSpec link;
    link.card_length = 0.1;
    link.backplane_length = 0.3;
    const int spb = 8;
    std::vector<uint8_t> bits(32, 0);
    bits[10] = 1;
    const Waveform fast = channel::simulate_link(link, bits, spb);

    const size_t n = bits.size() * spb;
    const double tbit = 1.0 / link.bit_rate;
    const double dt = tbit / spb;
    const auto ir = channel::link_impulse_response(link, n, dt);

    // rebuild the drive exactly as simulate_link does
    std::vector<double> x(n);
    const double edge = link.driver.edge_ui * tbit;
    for (size_t i = 0; i < n; ++i) {
        const size_t k = i / spb;
        const double cur = bits[k] ? 0.8 : -0.8;
        const double prev = bits[(k + bits.size() - 1) % bits.size()] ? 0.8 : -0.8;
        const double tin = static_cast<double>(i % spb) * dt;
        x[i] = tin < edge ? prev + (cur - prev) * tin / edge : cur;
    }
    const auto y = oracles::circular_convolve(x, ir, dt);
    for (size_t i = spb; i < n; ++i)
        CHECK(fast.samples[i - spb] == doctest::Approx(y[i]).epsilon(1e-6));
}

TEST_CASE("alternating bits give the single-tone steady state") {
    LinkSpec link = bare_link(0.2, 0.4);
    link.driver.edge_ui = 0.25;
    std::vector<uint8_t> bits(64);
    for (size_t i = 0; i < bits.size(); ++i) bits[i] = i % 2;
    const int spb = 32;
    const Waveform w = channel::simulate_link(link, bits, spb);
    const double f0 = link.bit_rate / 2.0;   // 0101 fundamental
    const auto h = channel::transfer_function(link, {f0});

    // project the received waveform onto the fundamental over full periods
    const size_t n = w.samples.size() / (2 * spb) * (2 * spb);
    std::complex<double> acc{0.0, 0.0};
    for (size_t i = 0; i < n; ++i) {
        const double ang = 2.0 * 3.14159265358979323846 * f0 * w.dt * static_cast<double>(i);
        acc += w.samples[i] * std::polar(1.0, -ang);
    }
    const double measured = 2.0 * std::abs(acc) / static_cast<double>(n);

    // drive fundamental amplitude: trapezoid at half the bit rate
    std::vector<double> x(2 * spb);
    const double tbit = 1.0 / link.bit_rate;
    const double edge = link.driver.edge_ui * tbit;
    for (size_t i = 0; i < x.size(); ++i) {
        const size_t k = i / spb;
        const double cur = k % 2 ? 0.8 : -0.8;
        const double tin = static_cast<double>(i % spb) * w.dt;
        x[i] = tin < edge ? -cur + 2.0 * cur * tin / edge : cur;
    }
    std::complex<double> dacc{0.0, 0.0};
    for (size_t i = 0; i < x.size(); ++i) {
        const double ang = 2.0 * 3.14159265358979323846 * f0 * w.dt * static_cast<double>(i);
        dacc += x[i] * std::polar(1.0, -ang);
    }
    const double drive_amp = 2.0 * std::abs(dacc) / static_cast<double>(x.size());
    CHECK(measured == doctest::Approx(drive_amp * std::abs(h[0])).epsilon(1e-3));
}

TEST_CASE("bit count must be a power of two") {
    LinkSpec link;
    std::vector<uint8_t> bits(48, 0);
    CHECK_THROWS(channel::simulate_link(link, bits, 16));
}

TEST_SUITE_END();
