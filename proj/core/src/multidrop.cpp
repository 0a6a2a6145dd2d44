#include "siopt/multidrop.hpp"
#include "siopt/errors.hpp"

namespace siopt::circuit {

namespace {

PruneState prune_of(const MultidropSpec& spec, const std::string& group) {
    auto it = spec.prune.find(group);
    return it == spec.prune.end() ? PruneState::Keep : it->second;
}

void check_prune_flags(const MultidropSpec& spec) {
    static const char* series_groups[] = {"series_r_drvr", "series_r_primary", "series_r_stub"};
    static const char* shunt_groups[] = {"shunt_r_drvr", "shunt_r_primary", "shunt_r_rcvr"};
    for (const auto& [group, state] : spec.prune) {
        bool series = false, shunt = false;
        for (const char* g : series_groups) series |= group == g;
        for (const char* g : shunt_groups) shunt |= group == g;
        if (!series && !shunt)
            throw SimError("unknown prune group '" + group + "'");
        if (series && state == PruneState::Open)
            throw SimError("series group '" + group + "' cannot be pruned open");
        if (shunt && state == PruneState::Short)
            throw SimError("shunt group '" + group + "' cannot be pruned to a short");
    }
}

} // namespace

MultidropNet build_multidrop(const MultidropSpec& spec, const MultidropValues& v) {
    check_prune_flags(spec);
    if (spec.n_stubs < 0) throw SimError("n_stubs must be >= 0");

    MultidropNet net;
    Netlist& nl = net.netlist;

    const bool short_r_drvr = prune_of(spec, "series_r_drvr") == PruneState::Short;
    const bool short_r_primary = prune_of(spec, "series_r_primary") == PruneState::Short;
    const bool short_r_stub = prune_of(spec, "series_r_stub") == PruneState::Short;
    const bool open_sh_drvr = prune_of(spec, "shunt_r_drvr") == PruneState::Open;
    const bool open_sh_primary = prune_of(spec, "shunt_r_primary") == PruneState::Open;
    const bool open_sh_rcvr = prune_of(spec, "shunt_r_rcvr") == PruneState::Open;

    nl.add_source("vdrv", "drv", "0", spec.driver);
    nl.add_source("vvtt", "vtt", "0", Source::dc(spec.vtt));

    std::string bus = "n0";
    nl.add_resistor("rdrv_out", "drv", short_r_drvr ? bus : "d1", spec.driver_series_r);
    if (!short_r_drvr) nl.add_resistor("rser_drvr", "d1", bus, v.series_r_drvr);
    if (!open_sh_drvr) nl.add_resistor("rsh_drvr", bus, "vtt", v.shunt_r_drvr);
    net.driver_node = bus;

    std::string from = bus;
    for (int k = 1; k <= spec.n_stubs; ++k) {
        const std::string a = "a" + std::to_string(k);
        const std::string b = short_r_primary ? a : "b" + std::to_string(k);
        nl.add_line("tprim" + std::to_string(k), from, a, v.z_primary,
                    spec.primary_segment_delay);
        if (!short_r_primary)
            nl.add_resistor("rser_prim" + std::to_string(k), a, b, v.series_r_primary);

        const std::string rcvr = "rcvr" + std::to_string(k);
        const std::string stub_in = short_r_stub ? a : "sin" + std::to_string(k);
        if (!short_r_stub)
            nl.add_resistor("rser_stub" + std::to_string(k), a, stub_in, v.series_r_stub);
        nl.add_line("tstub" + std::to_string(k), stub_in, rcvr, v.z_stub, spec.stub_delay);
        nl.add_capacitor("crcvr" + std::to_string(k), rcvr, "0", spec.receiver_cap);
        if (!open_sh_rcvr)
            nl.add_resistor("rsh_rcvr" + std::to_string(k), rcvr, "vtt", v.shunt_r_rcvr);
        net.receiver_nodes.push_back(rcvr);

        from = b;
    }

    const std::string far = "rcvr" + std::to_string(spec.n_stubs + 1);
    nl.add_line("tprim" + std::to_string(spec.n_stubs + 1), from, far, v.z_primary,
                spec.primary_segment_delay);
    nl.add_capacitor("crcvr" + std::to_string(spec.n_stubs + 1), far, "0", spec.receiver_cap);
    if (!open_sh_primary) nl.add_resistor("rsh_primary", far, "vtt", v.shunt_r_primary);
    if (!open_sh_rcvr)
        nl.add_resistor("rsh_rcvr" + std::to_string(spec.n_stubs + 1), far, "vtt",
                        v.shunt_r_rcvr);
    net.receiver_nodes.push_back(far);

    return net;
}

Source default_multidrop_driver(double bit_period, int prbs_order, uint32_t seed) {
    PrbsSpec p;
    p.order = prbs_order;
    p.seed = seed;
    p.bit_period = bit_period;
    p.v_low = 0.0;
    p.v_high = 1.5;
    p.rise = 200e-12;
    p.fall = 200e-12;
    return Source::prbs(p);
}

} // namespace siopt::circuit
