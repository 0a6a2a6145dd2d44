#include <doctest.h>

#include "siopt/errors.hpp"
#include "siopt/stripline.hpp"

#include <cmath>

using namespace siopt;
using channel::StriplineGeometry;

TEST_SUITE_BEGIN("stripline");

TEST_CASE("dc loop resistance from the paper constants") {
    // 1/(sigma*w*t) = 19.2 ohm/m per conductor at w=101.6um t=8.89um
    const auto m = channel::stripline_rlgc(channel::nominal_geometry());
    const double per_conductor = 1.0 / (57.6e6 * 101.6e-6 * 8.89e-6);
    CHECK(per_conductor == doctest::Approx(19.2).epsilon(2e-3));
    CHECK(m.r0 == doctest::Approx(2.0 * per_conductor).epsilon(1e-12));
    CHECK(m.r(0.0) == doctest::Approx(m.r0));
}

TEST_CASE("nominal geometry is calibrated to exactly 100 ohm") {
    CHECK(channel::z_diff(channel::nominal_geometry()) == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("dielectric loss vanishes at dc; lossless limit is lossless") {
    const auto m = channel::stripline_rlgc(channel::nominal_geometry());
    CHECK(m.g(0.0) == 0.0);
    CHECK(m.g(1e9) > 0.0);

    StriplineGeometry lossless = channel::nominal_geometry();
    lossless.loss_tangent = 0.0;
    lossless.conductivity = 1e30;
    const auto lm = channel::stripline_rlgc(lossless);
    CHECK(lm.g(5e9) == 0.0);
    CHECK(lm.r(5e9) < 1e-6);
    CHECK(lm.z_nominal() == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("impedance-preserving scaling stays within 6% over the paper bracket") {
    const auto nom = channel::nominal_geometry();
    double worst = 0.0, worst_w = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double w = 50.8e-6 + (127e-6 - 50.8e-6) * i / 10.0;
        const double dev = std::fabs(channel::z_diff(channel::scale_geometry(w, nom)) - 100.0);
        if (dev > worst) {
            worst = dev;
            worst_w = w;
        }
    }
    CHECK(worst / 100.0 <= 0.06);
    CHECK(worst_w == doctest::Approx(50.8e-6));   // worst case at the lower limit
}

TEST_CASE("width-only change deviates far more than the scaled variant") {
    const auto nom = channel::nominal_geometry();
    double worst = 0.0;
    for (double w : {50.8e-6, 127e-6}) {
        StriplineGeometry g = nom;
        g.linewidth = w;   // pitch and dielectric NOT rescaled
        worst = std::max(worst, std::fabs(channel::z_diff(g) - 100.0));
    }
    CHECK(worst / 100.0 > 0.25);
}

TEST_CASE("wider line lowers the impedance") {
    const auto nom = channel::nominal_geometry();
    StriplineGeometry wide = nom;
    wide.linewidth = 2.0 * nom.linewidth;
    wide.pitch = nom.pitch + nom.linewidth;   // keep the gap positive
    CHECK(channel::z_diff(wide) < channel::z_diff(nom));
}

TEST_CASE("scale_geometry arithmetic") {
    const auto nom = channel::nominal_geometry();
    const auto half = channel::scale_geometry(50.8e-6, nom);
    CHECK(half.pitch == doctest::Approx(127e-6));
    CHECK(half.dielectric_t == doctest::Approx(61e-6));
    CHECK(half.metal_thickness == nom.metal_thickness);
    CHECK(half.er == nom.er);

    const auto same = channel::scale_geometry(nom.linewidth, nom);
    CHECK(same == nom);

    const auto big = channel::scale_geometry(127e-6, nom);
    CHECK(big.pitch == doctest::Approx(317.5e-6));
    CHECK(big.dielectric_t == doctest::Approx(152.5e-6));
}

TEST_CASE("geometry validation") {
    StriplineGeometry g = channel::nominal_geometry();
    g.pitch = g.linewidth / 2.0;
    CHECK_THROWS_AS(channel::z_diff(g), SimError);
    g = channel::nominal_geometry();
    g.er = 0.5;
    CHECK_THROWS_AS(channel::stripline_rlgc(g), SimError);
    g = channel::nominal_geometry();
    g.loss_tangent = 0.2;
    CHECK_THROWS_AS(channel::stripline_rlgc(g), SimError);
}

TEST_CASE("rlgc derived quantities are self-consistent") {
    const auto m = channel::stripline_rlgc(channel::nominal_geometry());
    CHECK(m.z_nominal() == doctest::Approx(100.0).epsilon(1e-9));
    // propagation velocity c0/sqrt(er)
    const double v = 1.0 / m.delay_per_meter();
    CHECK(v == doctest::Approx(2.99792458e8 / std::sqrt(3.7)).epsilon(1e-9));
}

TEST_SUITE_END();
