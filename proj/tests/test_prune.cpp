#include <doctest.h>

#include "siopt/errors.hpp"
#include "siopt/prune.hpp"

using namespace siopt;
using optimize::ElementRole;
using optimize::PruneRule;

namespace {

std::vector<PruneRule> paper_rules() {
    return {{ElementRole::Series, 5.0, 500.0}, {ElementRole::Shunt, 5.0, 500.0}};
}

} // namespace

TEST_SUITE_BEGIN("prune");

TEST_CASE("the paper's first-round values prune as printed") {
    const std::map<std::string, double> values = {
        {"series_r_drvr", 1.0},      {"series_r_primary", 4.2140},
        {"series_r_stub", 13.9313},  {"shunt_r_drvr", 1000.0},
        {"shunt_r_primary", 535.8809}, {"shunt_r_rcvr", 48.9906},
        {"z_primary", 61.2177},      {"z_stub", 51.7493},
    };
    const auto d = optimize::prune_topology(values, paper_rules());
    CHECK(d.at("series_r_drvr") == PruneState::Short);
    CHECK(d.at("series_r_primary") == PruneState::Short);
    CHECK(d.at("series_r_stub") == PruneState::Keep);
    CHECK(d.at("shunt_r_drvr") == PruneState::Open);
    CHECK(d.at("shunt_r_primary") == PruneState::Open);
    CHECK(d.at("shunt_r_rcvr") == PruneState::Keep);
    CHECK(d.at("z_primary") == PruneState::Keep);
    CHECK(d.at("z_stub") == PruneState::Keep);

    int kept_variables = 0;
    for (const auto& [name, st] : d)
        if (st == PruneState::Keep) ++kept_variables;
    CHECK(kept_variables == 4);   // the second-round variable count
}

TEST_CASE("series elements never open, shunts never short") {
    const std::map<std::string, double> values = {
        {"series_r_x", 900.0},   // high series value stays in place
        {"shunt_r_x", 1.2},      // low shunt value stays in place
    };
    const auto d = optimize::prune_topology(values, paper_rules());
    CHECK(d.at("series_r_x") == PruneState::Keep);
    CHECK(d.at("shunt_r_x") == PruneState::Keep);
}

TEST_CASE("pruning is idempotent") {
    const std::map<std::string, double> values = {
        {"series_r_drvr", 1.0}, {"shunt_r_drvr", 999.0}, {"z_primary", 61.0}};
    const auto d1 = optimize::prune_topology(values, paper_rules());
    const auto d2 = optimize::prune_topology(values, paper_rules());
    CHECK(d1 == d2);
}

TEST_CASE("rule validation") {
    CHECK_THROWS_AS(
        optimize::prune_topology({{"series_r_a", 1.0}}, {{ElementRole::Series, 10.0, 10.0}}),
        EvalError);
}

TEST_CASE("E24 rounding on the paper's table values") {
    CHECK(optimize::nearest_e24(19.2114) == doctest::Approx(20.0));
    CHECK(optimize::nearest_e24(38.8936) == doctest::Approx(39.0));
    CHECK(optimize::nearest_e24(48.1519) == doctest::Approx(47.0));
    CHECK(optimize::nearest_e24(50.0) == doctest::Approx(51.0));   // 50 is not E24
    CHECK(optimize::nearest_e24(0.95) == doctest::Approx(0.91));
    CHECK(optimize::nearest_e24(1000.0) == doctest::Approx(1000.0));
    CHECK_THROWS_AS(optimize::nearest_e24(0.0), EvalError);
}

TEST_CASE("round_practical: resistors to E24, impedances to integer ohms") {
    const auto out = optimize::round_practical({{"series_r_stub", 19.2114},
                                                {"shunt_r_rcvr", 38.8936},
                                                {"z_primary", 61.8679},
                                                {"z_stub", 48.1519}});
    CHECK(out.at("series_r_stub") == doctest::Approx(20.0));
    CHECK(out.at("shunt_r_rcvr") == doctest::Approx(39.0));
    CHECK(out.at("z_primary") == doctest::Approx(62.0));
    CHECK(out.at("z_stub") == doctest::Approx(48.0));
}

TEST_SUITE_END();
