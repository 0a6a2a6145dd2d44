#pragma once

#include "siopt/stripline.hpp"
#include "siopt/waveform.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace siopt::channel {

// Shunt C, short line, shunt C: a nominal impedance discontinuity, not a
// model of any specific part.
struct ConnectorSpec {
    double c_pad = 0.4e-12;
    double z_conn = 65.0;
    double delay_conn = 50e-12;

    bool operator==(const ConnectorSpec&) const = default;
};

struct DriverSpec {
    double swing = 0.8;        // differential peak-to-peak at the EMF
    double edge_ui = 0.15;     // 20/80 edge time as a fraction of one UI
    double de_emphasis = 0.0;  // one-tap coefficient, 0 = off

    bool operator==(const DriverSpec&) const = default;
};

// Daughter card, connector, backplane, connector, daughter card.
struct LinkSpec {
    double card_length = 0.15;        // per card, two cards
    double backplane_length = 0.30;
    ConnectorSpec connector;          // two identical
    StriplineGeometry geometry;
    double source_r = 100.0;          // differential
    double load_r = 100.0;
    DriverSpec driver;
    double bit_rate = 6.25e9;

    double total_length() const { return 2.0 * card_length + backplane_length; }

    bool operator==(const LinkSpec&) const = default;
};

// H(f) = V_load / V_source_emf over the given frequency grid; H(0) uses
// the DC-resistance limit.
std::vector<std::complex<double>> transfer_function(const LinkSpec& link,
                                                    const std::vector<double>& freqs);

// Differential receive waveform for one circular pass of `bits` at
// samples_per_bit; bits.size() must be a power of two.  The first bit
// period is discarded as warm-up.
Waveform simulate_link(const LinkSpec& link, const std::vector<uint8_t>& bits,
                       int samples_per_bit = 32);

// Receive-side impulse response on a 2^ceil(log2(n)) grid, for causality
// and convolution oracles.
std::vector<double> link_impulse_response(const LinkSpec& link, size_t n, double dt);

// CSV helpers for the RLGCFILE interface and H(f) exports.
void write_rlgc_csv(std::ostream& os, const RlgcModel& m, const std::vector<double>& freqs);
void write_transfer_csv(std::ostream& os, const std::vector<double>& freqs,
                        const std::vector<std::complex<double>>& h);

} // namespace siopt::channel
