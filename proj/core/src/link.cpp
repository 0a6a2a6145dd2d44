#include "siopt/link.hpp"
#include "siopt/errors.hpp"
#include "siopt/units.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <ostream>

namespace siopt::channel {

namespace {

constexpr double kPi = 3.14159265358979323846;
using cplx = std::complex<double>;

struct Abcd {
    cplx a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};

    Abcd cascade(const Abcd& r) const {
        return {a * r.a + b * r.c, a * r.b + b * r.d, c * r.a + d * r.c, c * r.b + d * r.d};
    }
};

Abcd lossy_line(const RlgcModel& m, double length, double f) {
    const double w = 2.0 * kPi * f;
    const double skin = m.rs * std::sqrt(f);
    // series impedance with the sqrt(f) internal-inductance term that keeps
    // the skin-effect response close to causal
    const cplx zs(m.r(f), w * m.l + skin);
    const cplx yp(m.g(f), w * m.c);
    const cplx gamma = std::sqrt(zs * yp);
    const cplx zc = std::sqrt(zs / yp);
    const cplx th = gamma * length;
    const cplx ch = std::cosh(th);
    const cplx sh = std::sinh(th);
    return {ch, zc * sh, sh / zc, ch};
}

Abcd ideal_line(double z0, double delay, double f) {
    const double th = 2.0 * kPi * f * delay;
    const cplx j(0.0, 1.0);
    return {cplx(std::cos(th), 0.0), j * (z0 * std::sin(th)), j * (std::sin(th) / z0),
            cplx(std::cos(th), 0.0)};
}

Abcd shunt_cap(double c, double f) {
    const cplx j(0.0, 1.0);
    return {cplx(1.0, 0.0), cplx(0.0, 0.0), j * (2.0 * kPi * f * c), cplx(1.0, 0.0)};
}

Abcd connector(const ConnectorSpec& cs, double f) {
    return shunt_cap(cs.c_pad, f)
        .cascade(ideal_line(cs.z_conn, cs.delay_conn, f))
        .cascade(shunt_cap(cs.c_pad, f));
}

std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

} // namespace

std::vector<cplx> transfer_function(const LinkSpec& link, const std::vector<double>& freqs) {
    const RlgcModel rlgc = stripline_rlgc(link.geometry);
    std::vector<cplx> h(freqs.size());
    for (size_t i = 0; i < freqs.size(); ++i) {
        const double f = freqs[i];
        if (f <= 0.0) {
            // r0-only limit: lines collapse to series resistance
            const double rtot = rlgc.r0 * link.total_length();
            h[i] = cplx(link.load_r / (link.load_r + link.source_r + rtot), 0.0);
            continue;
        }
        Abcd net = lossy_line(rlgc, link.card_length, f)
                       .cascade(connector(link.connector, f))
                       .cascade(lossy_line(rlgc, link.backplane_length, f))
                       .cascade(connector(link.connector, f))
                       .cascade(lossy_line(rlgc, link.card_length, f));
        const cplx zl(link.load_r, 0.0);
        const cplx zs(link.source_r, 0.0);
        h[i] = zl / (net.a * zl + net.b + net.c * zs * zl + net.d * zs);
    }
    return h;
}

namespace {

// rfft bins 0..n/2 of x multiplied by H at bin frequencies, then inverse.
std::vector<double> apply_channel(const LinkSpec& link, std::vector<double> x, double dt) {
    const size_t n = x.size();
    const size_t nbins = n / 2 + 1;
    std::vector<double> freqs(nbins);
    for (size_t k = 0; k < nbins; ++k) freqs[k] = static_cast<double>(k) / (dt * static_cast<double>(n));
    const std::vector<cplx> h = transfer_function(link, freqs);

    std::vector<cplx> spec(nbins);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), x.data(),
                                             reinterpret_cast<fftw_complex*>(spec.data()),
                                             FFTW_ESTIMATE);
        fftw_execute(fwd);
        fftw_destroy_plan(fwd);
    }
    for (size_t k = 0; k < nbins; ++k) spec[k] *= h[k];
    // the Nyquist bin of a real signal is real by convention
    spec[nbins - 1] = cplx(spec[nbins - 1].real(), 0.0);

    std::vector<double> y(n);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_plan inv = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                             reinterpret_cast<fftw_complex*>(spec.data()),
                                             y.data(), FFTW_ESTIMATE);
        fftw_execute(inv);
        fftw_destroy_plan(inv);
    }
    const double scale = 1.0 / static_cast<double>(n);
    for (double& v : y) v *= scale;
    return y;
}

} // namespace

Waveform simulate_link(const LinkSpec& link, const std::vector<uint8_t>& bits,
                       int samples_per_bit) {
    if (bits.empty() || !is_pow2(bits.size()))
        throw SimError("bit count must be a power of two (pad by repetition)");
    if (samples_per_bit < 4) throw SimError("need at least 4 samples per bit");

    const size_t nbits = bits.size();
    const size_t spb = static_cast<size_t>(samples_per_bit);
    const size_t n = nbits * spb;
    const double tbit = 1.0 / link.bit_rate;
    const double dt = tbit / static_cast<double>(spb);

    // per-bit drive levels with optional one-tap de-emphasis; swing is the
    // differential pin swing into a matched load, so EMF levels are +-swing
    const double d = link.driver.de_emphasis;
    const double a0 = link.driver.swing;
    std::vector<double> level(nbits);
    for (size_t k = 0; k < nbits; ++k) {
        const double s = bits[k] ? 1.0 : -1.0;
        const double sp = bits[(k + nbits - 1) % nbits] ? 1.0 : -1.0;
        level[k] = a0 * (s - d * sp) / (1.0 + d);
    }

    // trapezoidal edges starting at each bit boundary
    const double edge = link.driver.edge_ui * tbit;
    std::vector<double> x(n);
    for (size_t i = 0; i < n; ++i) {
        const size_t k = i / spb;
        const double tin = static_cast<double>(i % spb) * dt;
        const double cur = level[k];
        const double prev = level[(k + nbits - 1) % nbits];
        x[i] = (tin < edge) ? prev + (cur - prev) * (tin / edge) : cur;
    }

    std::vector<double> y = apply_channel(link, std::move(x), dt);

    Waveform w;
    w.t0 = 0.0;
    w.dt = dt;
    w.samples.assign(y.begin() + static_cast<long>(spb), y.end());   // drop warm-up bit
    return w;
}

std::vector<double> link_impulse_response(const LinkSpec& link, size_t n, double dt) {
    size_t n2 = 1;
    while (n2 < n) n2 <<= 1;
    std::vector<double> x(n2, 0.0);
    x[0] = 1.0 / dt;   // unit-area impulse
    return apply_channel(link, std::move(x), dt);
}

void write_rlgc_csv(std::ostream& os, const RlgcModel& m, const std::vector<double>& freqs) {
    os << "freq_hz,r_ohm_per_m,l_h_per_m,g_s_per_m,c_f_per_m\n";
    for (double f : freqs) {
        os << units::render(f) << "," << units::render(m.r(f)) << "," << units::render(m.l) << ","
           << units::render(m.g(f)) << "," << units::render(m.c) << "\n";
    }
}

void write_transfer_csv(std::ostream& os, const std::vector<double>& freqs,
                        const std::vector<cplx>& h) {
    os << "freq_hz,mag_db,phase_rad\n";
    for (size_t i = 0; i < freqs.size(); ++i) {
        const double mag = std::abs(h[i]);
        os << units::render(freqs[i]) << ","
           << units::render(20.0 * std::log10(std::max(mag, 1e-300))) << ","
           << units::render(std::arg(h[i])) << "\n";
    }
}

} // namespace siopt::channel
