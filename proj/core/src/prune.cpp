#include "siopt/prune.hpp"
#include "siopt/errors.hpp"

#include <cmath>

namespace siopt::optimize {

namespace {

const double kE24[] = {1.0, 1.1, 1.2, 1.3, 1.5, 1.6, 1.8, 2.0, 2.2, 2.4, 2.7, 3.0,
                       3.3, 3.6, 3.9, 4.3, 4.7, 5.1, 5.6, 6.2, 6.8, 7.5, 8.2, 9.1};

bool has_prefix(const std::string& s, const char* prefix) {
    return s.rfind(prefix, 0) == 0;
}

} // namespace

std::map<std::string, PruneState> prune_topology(const std::map<std::string, double>& values,
                                                 const std::vector<PruneRule>& rules) {
    const PruneRule* series_rule = nullptr;
    const PruneRule* shunt_rule = nullptr;
    for (const auto& r : rules) {
        if (!(r.short_threshold < r.open_threshold))
            throw EvalError("prune rule: short_threshold must be < open_threshold");
        (r.role == ElementRole::Series ? series_rule : shunt_rule) = &r;
    }

    std::map<std::string, PruneState> decisions;
    for (const auto& [name, value] : values) {
        PruneState st = PruneState::Keep;
        if (has_prefix(name, "series_") && series_rule && value <= series_rule->short_threshold)
            st = PruneState::Short;
        else if (has_prefix(name, "shunt_") && shunt_rule && value >= shunt_rule->open_threshold)
            st = PruneState::Open;
        decisions[name] = st;
    }
    return decisions;
}

double nearest_e24(double ohms) {
    if (ohms <= 0.0) throw EvalError("E24 rounding needs a positive value");
    const double decade = std::pow(10.0, std::floor(std::log10(ohms)));
    double best = decade;
    double best_err = std::abs(ohms - best);
    for (double scale : {decade / 10.0, decade, decade * 10.0}) {
        for (double e : kE24) {
            const double cand = e * scale;
            const double err = std::abs(ohms - cand);
            if (err < best_err) {
                best = cand;
                best_err = err;
            }
        }
    }
    return best;
}

std::map<std::string, double> round_practical(const std::map<std::string, double>& values) {
    std::map<std::string, double> out;
    for (const auto& [name, value] : values) {
        if (has_prefix(name, "z")) out[name] = std::round(value);
        else out[name] = nearest_e24(value);
    }
    return out;
}

} // namespace siopt::optimize
