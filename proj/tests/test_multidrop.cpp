#include <doctest.h>

#include "siopt/errors.hpp"
#include "siopt/multidrop.hpp"

using namespace siopt;
using circuit::MultidropNet;
using circuit::MultidropSpec;
using circuit::MultidropValues;

namespace {

MultidropSpec spec_with_driver() {
    MultidropSpec s;
    s.driver = circuit::default_multidrop_driver(1.2e-9, 7, 0x5a);
    return s;
}

int count_prefix(const std::vector<circuit::Resistor>& rs, const std::string& prefix) {
    int n = 0;
    for (const auto& r : rs)
        if (r.name.rfind(prefix, 0) == 0) ++n;
    return n;
}

} // namespace

TEST_SUITE_BEGIN("multidrop");

TEST_CASE("kitchen sink census: eight groups over the full termination set") {
    const MultidropNet net = circuit::build_multidrop(spec_with_driver(), {});
    const auto& nl = net.netlist;
    CHECK(nl.lines.size() == 7);                               // 4 primary + 3 stubs
    CHECK(count_prefix(nl.resistors, "rser_drvr") == 1);
    CHECK(count_prefix(nl.resistors, "rsh_drvr") == 1);
    CHECK(count_prefix(nl.resistors, "rser_prim") == 3);
    CHECK(count_prefix(nl.resistors, "rser_stub") == 3);
    CHECK(count_prefix(nl.resistors, "rsh_rcvr") == 4);
    CHECK(count_prefix(nl.resistors, "rsh_primary") == 1);
    CHECK(count_prefix(nl.resistors, "rdrv_out") == 1);        // fixed driver impedance
    CHECK(net.receiver_nodes.size() == 4);
    CHECK(nl.capacitors.size() == 4);

    // grouped: 13 prunable resistors + 7 lines collapse to 8 variables
    const int prunable = static_cast<int>(nl.resistors.size()) - 1;
    CHECK(prunable == 13);
}

TEST_CASE("pruning shorts series groups and opens shunts") {
    MultidropSpec s = spec_with_driver();
    s.prune = {
        {"series_r_drvr", PruneState::Short},  {"series_r_primary", PruneState::Short},
        {"shunt_r_drvr", PruneState::Open},    {"shunt_r_primary", PruneState::Open},
    };
    const MultidropNet net = circuit::build_multidrop(s, {});
    const auto& nl = net.netlist;
    CHECK(count_prefix(nl.resistors, "rser_drvr") == 0);
    CHECK(count_prefix(nl.resistors, "rser_prim") == 0);
    CHECK(count_prefix(nl.resistors, "rsh_drvr") == 0);
    CHECK(count_prefix(nl.resistors, "rsh_primary") == 0);
    CHECK(count_prefix(nl.resistors, "rser_stub") == 3);   // kept, as in the second round
    CHECK(count_prefix(nl.resistors, "rsh_rcvr") == 4);
    CHECK(nl.lines.size() == 7);
}

TEST_CASE("inconsistent prune flags rejected") {
    MultidropSpec s = spec_with_driver();
    s.prune = {{"series_r_stub", PruneState::Open}};
    CHECK_THROWS_AS(circuit::build_multidrop(s, {}), SimError);
    s.prune = {{"shunt_r_rcvr", PruneState::Short}};
    CHECK_THROWS_AS(circuit::build_multidrop(s, {}), SimError);
    s.prune = {{"no_such_group", PruneState::Open}};
    CHECK_THROWS_AS(circuit::build_multidrop(s, {}), SimError);
}

TEST_CASE("zero stubs degenerates to a simulable point-to-point net") {
    MultidropSpec s = spec_with_driver();
    s.n_stubs = 0;
    s.prune = {
        {"series_r_drvr", PruneState::Short}, {"series_r_primary", PruneState::Short},
        {"series_r_stub", PruneState::Short}, {"shunt_r_drvr", PruneState::Open},
        {"shunt_r_rcvr", PruneState::Open},
    };
    MultidropValues v;
    v.shunt_r_primary = 50.0;   // matched far-end termination
    const MultidropNet net = circuit::build_multidrop(s, v);
    CHECK(net.receiver_nodes.size() == 1);
    CHECK(net.netlist.lines.size() == 1);
    const auto waves = circuit::run_transient(net.netlist, 5e-12, 50e-9);
    CHECK(waves.count(net.receiver_nodes[0]) == 1);
    // matched line: the receiver sees a clean full-swing waveform
    double vmax = -1e9, vmin = 1e9;
    for (double x : waves.at(net.receiver_nodes[0]).samples) {
        vmax = std::max(vmax, x);
        vmin = std::min(vmin, x);
    }
    CHECK(vmax > 1.0);
    CHECK(vmin < 0.4);
}

TEST_SUITE_END();
