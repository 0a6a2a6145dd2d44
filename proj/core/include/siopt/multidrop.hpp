#pragma once

#include "siopt/netlist.hpp"
#include "siopt/prune_state.hpp"

#include <map>
#include <string>
#include <vector>

namespace siopt::circuit {

// One-driver, four-receiver address bus: a primary path of four line
// segments chained through three split nodes, a stub at each split down
// to an intermediate receiver, and the far receiver at the end of the
// primary.  The "kitchen sink" termination set is one series and one
// shunt resistor group at the driver, three series pairs at the splits
// (continuing path and stub entry), a shunt at the far end of the
// primary, and a shunt to VTT at every receiver:
//
//   drv --[25 fixed]--[series_r_drvr]-- n0 ==z_primary== a1 --[series_r_primary]-- b1 == ...
//                          shunt_r_drvr: n0->vtt             a1 --[series_r_stub]--=z_stub=-- rcvr1
//   ... == rcvr4 with shunt_r_primary and shunt_r_rcvr to vtt, 3 pF at every rcvr
//
// Groups (element count): series_r_drvr(1) shunt_r_drvr(1) series_r_primary(3)
// series_r_stub(3) shunt_r_primary(1) shunt_r_rcvr(4) z_primary(4) z_stub(3).
struct MultidropValues {
    double series_r_drvr = 10.0;
    double series_r_primary = 10.0;
    double series_r_stub = 10.0;
    double shunt_r_drvr = 50.0;
    double shunt_r_primary = 50.0;
    double shunt_r_rcvr = 50.0;
    double z_primary = 50.0;
    double z_stub = 50.0;
};

struct MultidropSpec {
    int n_stubs = 3;                          // receivers = n_stubs + 1
    double primary_segment_delay = 300e-12;   // per segment
    double stub_delay = 150e-12;
    double receiver_cap = 3e-12;
    double vtt = 0.75;
    double driver_series_r = 25.0;
    Source driver = Source::dc(0.0);
    // group name -> Keep/Short/Open; absent means Keep
    std::map<std::string, PruneState> prune;
};

struct MultidropNet {
    Netlist netlist;
    std::string driver_node;                  // bus entry
    std::vector<std::string> receiver_nodes;  // stub receivers then far receiver
};

// Throws SimError for inconsistent prune flags (Short on a shunt group,
// Open on a series group, unknown group).
MultidropNet build_multidrop(const MultidropSpec& spec, const MultidropValues& values);

// HSTL-flavored PRBS driver used by the termination study.
Source default_multidrop_driver(double bit_period, int prbs_order, uint32_t seed);

} // namespace siopt::circuit
