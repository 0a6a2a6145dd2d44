#pragma once

#include "siopt/source.hpp"
#include "siopt/waveform.hpp"

#include <map>
#include <string>
#include <vector>

namespace siopt::circuit {

// Node "0" (alias "gnd") is ground.

struct Resistor {
    std::string name, a, b;
    double ohms = 0.0;
};
struct Capacitor {
    std::string name, a, b;
    double farads = 0.0;
};
// Ideal (lossless) line; both ends referenced to ground.
struct IdealLine {
    std::string name, a, b;
    double z0 = 50.0;
    double delay = 0.0;
};
struct VSource {
    std::string name, p, n;
    Source src = Source::dc(0.0);
};

struct Netlist {
    std::vector<Resistor> resistors;
    std::vector<Capacitor> capacitors;
    std::vector<IdealLine> lines;
    std::vector<VSource> sources;

    void add_resistor(std::string name, std::string a, std::string b, double ohms);
    void add_capacitor(std::string name, std::string a, std::string b, double farads);
    void add_line(std::string name, std::string a, std::string b, double z0, double delay);
    void add_source(std::string name, std::string p, std::string n, Source src);
};

// Fixed-step transient solve: nodal conductance system with MNA source
// rows, trapezoidal capacitors, and ideal lines as characteristic-impedance
// stamps plus delayed history currents (Bergeron).  Line delays are rounded
// to integer multiples of tstep; rounding by more than 5% is an error.
// Starts from the all-zero state.  Returns every node sampled at tstep.
std::map<std::string, Waveform> run_transient(const Netlist& netlist, double tstep, double tstop);

} // namespace siopt::circuit
