#include <doctest.h>

#include "siopt/errors.hpp"
#include "siopt/units.hpp"

#include <cmath>
#include <random>

using namespace siopt;

TEST_SUITE_BEGIN("units");

TEST_CASE("paper anchors") {
    CHECK(units::parse_number("840ps") == doctest::Approx(840e-12).epsilon(1e-12));
    CHECK(units::parse_number("101.6um") == doctest::Approx(101.6e-6).epsilon(1e-12));
    CHECK(units::parse_number("57.6meg") == doctest::Approx(57.6e6).epsilon(1e-12));
    CHECK(units::parse_number("1meg") == 1e6);
    CHECK(units::parse_number("1f") == 1e-15);
    CHECK(units::parse_number("1.2n") == doctest::Approx(1.2e-9).epsilon(1e-12));
    CHECK(units::parse_number("0.165") == 0.165);
    CHECK(units::parse_number("1e-5") == 1e-5);
    CHECK(units::parse_number("3pF") == doctest::Approx(3e-12).epsilon(1e-12));
    CHECK(units::parse_number("1k") == 1e3);
    CHECK(units::parse_number("5m") == doctest::Approx(5e-3).epsilon(1e-12));
}

TEST_CASE("case insensitive, trailing unit letters") {
    CHECK(units::parse_number("57.6MEG") == doctest::Approx(57.6e6));
    CHECK(units::parse_number("840PS") == doctest::Approx(840e-12));
    CHECK(units::parse_number("2s") == 2.0);     // 's' is a unit, not a scale
    CHECK(units::parse_number("100ohm") == 100.0);
}

TEST_CASE("garbage rejected") {
    double v;
    CHECK_FALSE(units::try_parse_number("5meg2", v));
    CHECK_FALSE(units::try_parse_number("abc", v));
    CHECK_FALSE(units::try_parse_number("1.2.3", v));
    CHECK_FALSE(units::try_parse_number("", v));
    CHECK_FALSE(units::try_parse_number("10p s", v));
    CHECK_THROWS_AS(units::parse_number("xyz"), ParseError);
}

TEST_CASE("render round-trips exactly") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> mant(-1000.0, 1000.0);
    std::uniform_int_distribution<int> exp10(-12, 12);
    for (int i = 0; i < 2000; ++i) {
        const double x = mant(rng) * std::pow(10.0, exp10(rng));
        CHECK(units::parse_number(units::render(x)) == x);
    }
}

TEST_CASE("suffix render round-trips within 1 ulp scale") {
    const char* suffixes[] = {"meg", "k", "m", "u", "n", "p", "f"};
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> mant(-999.0, 999.0);
    for (int i = 0; i < 1000; ++i) {
        for (const char* s : suffixes) {
            const double x = mant(rng) * units::suffix_scale(s);
            const double y = units::parse_number(units::render(x, s));
            CHECK(std::fabs(y - x) <=
                  4.0 * std::fabs(x) * std::numeric_limits<double>::epsilon());
        }
    }
}

TEST_SUITE_END();
