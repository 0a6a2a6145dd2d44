#pragma once

#include "siopt/prune_state.hpp"

#include <map>
#include <string>
#include <vector>

namespace siopt::optimize {

enum class ElementRole { Series, Shunt };

struct PruneRule {
    ElementRole role = ElementRole::Series;
    double short_threshold = 0.0;   // series value <= this: replace with a short
    double open_threshold = 0.0;    // shunt value >= this: remove as an open
};

// Role is inferred from the group name prefix: "series_*" / "shunt_*";
// anything else (line impedances) is never pruned.  Series elements only
// prune to shorts, shunts only to opens; everything else is kept.
// Idempotent: re-pruning the same values yields the same decisions.
std::map<std::string, PruneState> prune_topology(const std::map<std::string, double>& values,
                                                 const std::vector<PruneRule>& rules);

// Snap to buildable values: resistors to the nearest E24 member,
// impedances (names starting with "z") to the nearest integer ohm.
std::map<std::string, double> round_practical(const std::map<std::string, double>& values);

double nearest_e24(double ohms);

} // namespace siopt::optimize
