#pragma once

#include "siopt/deck.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace siopt::optimize {

struct OptVariable {
    std::string name;
    double init = 0.0;
    double min = 0.0, max = 0.0;   // min < max; init within [min, max]
};

struct OptStageResult {
    std::map<std::string, double> values;
    std::map<std::string, double> norm_sensitivity_pct;   // sums to 100 when nonzero
    int iterations = 0;
    bool converged = false;
    bool at_bound = false;          // some variable sits on a bound at the optimum
    double final_error = 0.0;       // err_fun at the optimum
    double final_measure = 0.0;
    std::string failure;            // nonempty when the objective raised
};

// ERRfun = (GOAL - result) / GOAL.  A zero goal is rejected; substitute a
// small nonzero goal such as 1e-5 instead.
double err_fun(double goal, double result);

// Objective: measure value as a function of the variable assignment.
using Objective = std::function<double(const std::map<std::string, double>&)>;

// Bounded minimization of err_fun^2 by Levenberg-Marquardt on central
// finite differences (probe step = close * range, shrinking), with a
// bounded pattern-search fallback after three insufficiently improving
// steps.  Values are hard-clipped to [min, max] everywhere.  Terminates
// on relative parameter change < rel_param_tol, relative result change
// < rel_result_tol, or max_iters.  Deterministic.
OptStageResult minimize(const Objective& objective, const std::vector<OptVariable>& vars,
                        double goal, const deck::OptModelDecl& model);

// Percent-share sensitivities at the optimum: each variable perturbed by
// 1% (relative, bound-clipped, one-sided at bounds);
// raw_i = |dm/m| / |dp_i/p_i|, reported as 100 * raw_i / sum(raw).
std::map<std::string, double> normalized_sensitivity(const Objective& objective,
                                                     const std::vector<OptVariable>& vars,
                                                     const std::map<std::string, double>& optimum);

// Sequential stages with carry-over: stage k+1 starts from every value
// stage k optimized.  The objective of each stage sees the merged map of
// all shared values.  A stage failure aborts the sequence; partial
// results are returned with the failure marker set.
struct StageSpec {
    std::string name;
    std::vector<OptVariable> vars;
    double goal = 1.0;
    deck::OptModelDecl model;
    Objective objective;
};

std::vector<OptStageResult> run_sequence(const std::vector<StageSpec>& stages,
                                         std::map<std::string, double>& shared_values);

} // namespace siopt::optimize
