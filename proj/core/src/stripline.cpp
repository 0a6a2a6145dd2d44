#include "siopt/stripline.hpp"
#include "siopt/errors.hpp"

#include <cmath>

namespace siopt::channel {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMu0 = 4.0e-7 * kPi;
constexpr double kC0 = 2.99792458e8;

// Single-ended thin-strip stripline impedance (Cohn-style log form) with
// an exponential odd-mode coupling correction for the adjacent conductor.
double z_odd_uncalibrated(const StriplineGeometry& g) {
    const double b = g.total_dielectric_t();
    const double weff = 0.8 * g.linewidth + g.metal_thickness;
    const double z_se = (60.0 / std::sqrt(g.er)) * std::log(4.0 * b / (0.67 * kPi * weff));
    const double s = g.pitch - g.linewidth;
    const double coupling = 1.0 - 0.347 * std::exp(-2.9 * s / b);
    return z_se * coupling;
}

double calibration() {
    static const double k = 50.0 / z_odd_uncalibrated(nominal_geometry());
    return k;
}

} // namespace

StriplineGeometry nominal_geometry() { return StriplineGeometry{}; }

void validate(const StriplineGeometry& g) {
    if (g.linewidth <= 0 || g.metal_thickness <= 0 || g.dielectric_t <= 0 || g.pitch <= 0)
        throw SimError("stripline dimensions must be positive");
    if (g.pitch <= g.linewidth)
        throw SimError("stripline pitch must exceed linewidth");
    if (g.er < 1.0) throw SimError("relative permittivity must be >= 1");
    if (g.loss_tangent < 0.0 || g.loss_tangent >= 0.1)
        throw SimError("loss tangent out of range [0, 0.1)");
    if (g.conductivity <= 0.0) throw SimError("conductivity must be positive");
}

double RlgcModel::r(double f) const { return std::hypot(r0, rs * std::sqrt(f)); }
double RlgcModel::g(double f) const { return 2.0 * kPi * f * c * loss_tangent; }
double RlgcModel::z_nominal() const { return std::sqrt(l / c); }
double RlgcModel::delay_per_meter() const { return std::sqrt(l * c); }

double z_diff(const StriplineGeometry& g) {
    validate(g);
    return 2.0 * calibration() * z_odd_uncalibrated(g);
}

StriplineGeometry scale_geometry(double linewidth, const StriplineGeometry& nominal) {
    const double scale = linewidth / nominal.linewidth;
    StriplineGeometry g = nominal;
    g.linewidth = linewidth;
    g.pitch = nominal.pitch * scale;
    g.dielectric_t = nominal.dielectric_t * scale;
    return g;
}

RlgcModel stripline_rlgc(const StriplineGeometry& g) {
    validate(g);
    RlgcModel m;
    const double w = g.linewidth;
    const double t = g.metal_thickness;
    // loop resistance: two conductors in the differential return path
    m.r0 = 2.0 / (g.conductivity * w * t);
    // surface resistance over the conductor perimeter, both conductors
    m.rs = 2.0 * std::sqrt(kPi * kMu0 / g.conductivity) / (2.0 * (w + t));
    const double zd = z_diff(g);
    const double sqrt_er = std::sqrt(g.er);
    m.c = sqrt_er / (kC0 * zd);
    m.l = zd * sqrt_er / kC0;
    m.loss_tangent = g.loss_tangent;
    return m;
}

} // namespace siopt::channel
