#pragma once

namespace siopt::channel {

// Edge-coupled symmetric stripline cross-section.  dielectric_t is the
// metal-to-plane spacing; the plane-to-plane cavity is
// 2*dielectric_t + metal_thickness.
struct StriplineGeometry {
    double linewidth = 101.6e-6;
    double metal_thickness = 8.89e-6;
    double dielectric_t = 122e-6;
    double pitch = 254e-6;
    double er = 3.7;
    double loss_tangent = 0.009;
    double conductivity = 57.6e6;

    double total_dielectric_t() const { return 2.0 * dielectric_t + metal_thickness; }

    bool operator==(const StriplineGeometry&) const = default;
};

// The geometry whose differential impedance is pinned to exactly 100 ohm
// by the closed-form calibration.
StriplineGeometry nominal_geometry();

void validate(const StriplineGeometry& g);

// Frequency-dependent per-unit-length line parameters, differential mode.
// Series impedance uses the smooth DC-to-skin blend
//   r(f) = sqrt(r0^2 + (rs*sqrt(f))^2)
// with the matching internal-inductance term rs*sqrt(f)/omega.
struct RlgcModel {
    double r0 = 0.0;   // ohm/m at DC (loop: both conductors)
    double rs = 0.0;   // ohm/(m*sqrt(Hz)) skin coefficient
    double l = 0.0;    // H/m
    double c = 0.0;    // F/m
    double loss_tangent = 0.0;

    double r(double f) const;
    double g(double f) const;             // 2*pi*f*c*tan(delta)
    double z_nominal() const;             // sqrt(l/c)
    double delay_per_meter() const;       // sqrt(l*c)
};

// Closed-form odd-mode estimate with a single multiplicative calibration
// constant chosen so nominal_geometry() returns exactly 100 ohm.
// Returns 2*z_odd.
double z_diff(const StriplineGeometry& g);

// Width change with the paper's impedance-preserving rule: pitch and
// dielectric thickness scale by linewidth/nominal-linewidth, metal
// thickness and materials stay fixed.
StriplineGeometry scale_geometry(double linewidth, const StriplineGeometry& nominal);

RlgcModel stripline_rlgc(const StriplineGeometry& g);

} // namespace siopt::channel
