#include "siopt/optimizer.hpp"
#include "siopt/errors.hpp"
#include "siopt/units.hpp"

#include <algorithm>
#include <cmath>

namespace siopt::optimize {

double err_fun(double goal, double result) {
    if (goal == 0.0)
        throw EvalError("GOAL must be nonzero; use a small value such as 1e-5 instead "
                        "to avoid division by zero");
    return (goal - result) / goal;
}

namespace {

struct Workspace {
    const Objective* objective = nullptr;
    std::vector<OptVariable> vars;
    double goal = 0.0;

    // unit-cube coordinates: x_i = min_i + u_i * range_i
    std::vector<double> ranges;

    double to_x(size_t i, double u) const { return vars[i].min + u * ranges[i]; }

    std::map<std::string, double> assignment(const std::vector<double>& u) const {
        std::map<std::string, double> m;
        for (size_t i = 0; i < vars.size(); ++i) m[vars[i].name] = to_x(i, u[i]);
        return m;
    }

    // measure at u; bounds asserted before every objective call
    double measure(const std::vector<double>& u) const {
        auto values = assignment(u);
        for (size_t i = 0; i < vars.size(); ++i) {
            const double x = values[vars[i].name];
            if (x < vars[i].min - 1e-12 || x > vars[i].max + 1e-12)
                throw EvalError("internal: evaluation outside bounds for '" + vars[i].name + "'");
        }
        try {
            return (*objective)(values);
        } catch (const std::exception& e) {
            std::string detail = "objective failed at {";
            bool first = true;
            for (const auto& [k, v] : values) {
                if (!first) detail += ", ";
                detail += k + "=" + units::render(v);
                first = false;
            }
            detail += "}: ";
            detail += e.what();
            throw Error(detail);
        }
    }

    double phi_of(double m) const {
        const double e = err_fun(goal, m);
        return e * e;
    }
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// One bounded Hooke-Jeeves descent: exploratory moves per axis plus a
// pattern extrapolation, shrinking until the step falls below step_floor
// or the sweep budget runs out.  Returns true if anything improved.
bool pattern_search(const Workspace& ws, std::vector<double>& u, double& m0, double& phi0,
                    double step, double step_floor, int max_sweeps, int& sweeps_used) {
    const size_t n = u.size();
    bool improved_any = false;
    std::vector<double> base = u;
    std::vector<double> prev_base = u;

    for (int sweep = 0; sweep < max_sweeps && step >= step_floor; ++sweep) {
        ++sweeps_used;
        std::vector<double> cand = base;
        double phic = phi0;
        double mc = m0;
        bool improved = false;
        for (size_t i = 0; i < n; ++i) {
            for (double dir : {+1.0, -1.0}) {
                std::vector<double> probe = cand;
                probe[i] = clamp01(cand[i] + dir * step);
                if (probe[i] == cand[i]) continue;
                const double m = ws.measure(probe);
                const double p = ws.phi_of(m);
                if (p < phic) {
                    cand = probe;
                    phic = p;
                    mc = m;
                    improved = true;
                    break;
                }
            }
        }
        if (improved) {
            improved_any = true;
            // pattern move: keep going in the direction that just worked
            std::vector<double> pattern(n);
            bool moved = false;
            for (size_t i = 0; i < n; ++i) {
                pattern[i] = clamp01(cand[i] + (cand[i] - base[i]));
                moved |= pattern[i] != cand[i];
            }
            prev_base = base;
            base = cand;
            phi0 = phic;
            m0 = mc;
            if (moved) {
                const double mp = ws.measure(pattern);
                const double pp = ws.phi_of(mp);
                if (pp < phi0) {
                    prev_base = base;
                    base = pattern;
                    phi0 = pp;
                    m0 = mp;
                }
            }
        } else {
            step *= 0.5;
        }
    }
    u = base;
    return improved_any;
}

} // namespace

OptStageResult minimize(const Objective& objective, const std::vector<OptVariable>& vars,
                        double goal, const deck::OptModelDecl& model) {
    if (vars.empty()) throw EvalError("minimize needs at least one variable");
    err_fun(goal, 0.0);   // reject goal == 0 up front

    Workspace ws;
    ws.objective = &objective;
    ws.vars = vars;
    ws.goal = goal;
    ws.ranges.resize(vars.size());
    for (size_t i = 0; i < vars.size(); ++i) {
        const auto& v = vars[i];
        if (!(v.min < v.max))
            throw EvalError("variable '" + v.name + "': min must be < max");
        if (v.init < v.min || v.init > v.max)
            throw EvalError("variable '" + v.name + "': init outside [min, max]");
        ws.ranges[i] = v.max - v.min;
    }

    const size_t n = vars.size();
    std::vector<double> u(n);
    for (size_t i = 0; i < n; ++i) u[i] = (vars[i].init - vars[i].min) / ws.ranges[i];

    double m0 = ws.measure(u);
    double phi0 = ws.phi_of(m0);

    double fd_step = model.close;          // probe scale, fraction of range
    double lambda = 1.0;
    int insufficient = 0;
    const double step_floor = std::min(model.rel_param_tol, 1e-6) * 0.01;

    OptStageResult result;
    bool converged = false;
    int iter = 0;

    while (iter < model.max_iters && !converged) {
        ++iter;

        // central-difference gradient of err in unit-cube coordinates
        std::vector<double> grad(n, 0.0);
        double gg = 0.0;
        const double err0 = err_fun(goal, m0);
        for (size_t i = 0; i < n; ++i) {
            std::vector<double> up = u, um = u;
            up[i] = clamp01(u[i] + fd_step);
            um[i] = clamp01(u[i] - fd_step);
            const double denom = up[i] - um[i];
            if (denom <= 0.0) continue;
            const double ep = err_fun(goal, ws.measure(up));
            const double em = err_fun(goal, ws.measure(um));
            grad[i] = (ep - em) / denom;
            gg += grad[i] * grad[i];
        }

        bool accepted = false;
        std::vector<double> u_new = u;
        double m_new = m0, phi_new = phi0;

        if (gg > 0.0) {
            for (int trial = 0; trial < 8 && !accepted; ++trial) {
                std::vector<double> cand(n);
                bool moved = false;
                for (size_t i = 0; i < n; ++i) {
                    cand[i] = clamp01(u[i] - err0 * grad[i] / (lambda + gg));
                    moved |= cand[i] != u[i];
                }
                if (!moved) {
                    lambda *= 8.0;
                    continue;
                }
                const double m = ws.measure(cand);
                const double p = ws.phi_of(m);
                if (p < phi0) {
                    accepted = true;
                    u_new = cand;
                    m_new = m;
                    phi_new = p;
                    lambda = std::max(lambda / 4.0, 1e-12);
                } else {
                    lambda *= 8.0;
                }
            }
        }

        if (accepted) {
            const double rel_improve = (phi0 - phi_new) / std::max(phi0, 1e-300);
            insufficient = rel_improve < 0.01 ? insufficient + 1 : 0;

            double relpar = 0.0;
            for (size_t i = 0; i < n; ++i) {
                const double x_old = ws.to_x(i, u[i]);
                const double x_new = ws.to_x(i, u_new[i]);
                const double scale = std::max(std::abs(x_old), 0.01 * ws.ranges[i]);
                relpar = std::max(relpar, std::abs(x_new - x_old) / scale);
            }
            const double relres = std::abs(m_new - m0) / std::max(std::abs(m0), 1e-30);
            u = u_new;
            m0 = m_new;
            phi0 = phi_new;
            fd_step = std::max(fd_step * 0.9, 1e-6);
            if (relpar < model.rel_param_tol || relres < model.rel_result_tol) converged = true;
        } else {
            ++insufficient;
        }

        if (!converged && insufficient >= 3) {
            insufficient = 0;
            int sweeps = 0;
            const int budget = std::max(4, model.max_iters - iter);
            const bool moved =
                pattern_search(ws, u, m0, phi0, fd_step, step_floor, budget, sweeps);
            iter = std::min(model.max_iters, iter + sweeps);
            if (moved) {
                fd_step = std::max(fd_step * 0.5, 1e-6);
            } else {
                converged = true;   // no improvement even at the smallest step
            }
        }
    }

    result.iterations = iter;
    result.converged = converged;
    result.values = ws.assignment(u);
    result.final_measure = m0;
    result.final_error = err_fun(goal, m0);
    for (size_t i = 0; i < n; ++i) {
        if (u[i] <= 1e-12 || u[i] >= 1.0 - 1e-12) result.at_bound = true;
    }
    result.norm_sensitivity_pct = normalized_sensitivity(objective, vars, result.values);
    return result;
}

std::map<std::string, double> normalized_sensitivity(const Objective& objective,
                                                     const std::vector<OptVariable>& vars,
                                                     const std::map<std::string, double>& optimum) {
    const double m0 = objective(optimum);
    std::map<std::string, double> raw;
    double total = 0.0;
    for (const auto& v : vars) {
        const double x = optimum.at(v.name);
        double delta = 0.01 * std::abs(x);
        if (delta == 0.0) delta = 0.01 * (v.max - v.min);
        // one-sided away from the nearer bound
        if (x + delta > v.max) delta = -delta;
        if (x + delta < v.min) delta = (v.max - v.min) * 0.01;

        auto probe = optimum;
        probe[v.name] = std::clamp(x + delta, v.min, v.max);
        const double dp = probe[v.name] - x;
        if (dp == 0.0) {
            raw[v.name] = 0.0;
            continue;
        }
        const double m = objective(probe);
        const double dm_rel = std::abs(m0) > 1e-300 ? std::abs((m - m0) / m0) : std::abs(m - m0);
        const double dp_rel = std::abs(x) > 1e-300 ? std::abs(dp / x)
                                                   : std::abs(dp) / (v.max - v.min);
        raw[v.name] = dm_rel / dp_rel;
        total += raw[v.name];
    }
    std::map<std::string, double> pct;
    for (const auto& [k, r] : raw) pct[k] = total > 0.0 ? 100.0 * r / total : 0.0;
    return pct;
}

std::vector<OptStageResult> run_sequence(const std::vector<StageSpec>& stages,
                                         std::map<std::string, double>& shared_values) {
    std::vector<OptStageResult> results;
    for (const auto& stage : stages) {
        std::vector<OptVariable> vars = stage.vars;
        for (auto& v : vars) {
            auto it = shared_values.find(v.name);
            if (it != shared_values.end())
                v.init = std::clamp(it->second, v.min, v.max);   // carry-over
        }
        const Objective& inner = stage.objective;
        auto merged_objective = [&inner, &shared_values](const std::map<std::string, double>& m) {
            auto merged = shared_values;
            for (const auto& [k, v] : m) merged[k] = v;
            return inner(merged);
        };
        try {
            OptStageResult r = minimize(merged_objective, vars, stage.goal, stage.model);
            for (const auto& [k, v] : r.values) shared_values[k] = v;
            results.push_back(std::move(r));
        } catch (const std::exception& e) {
            OptStageResult r;
            r.failure = e.what();
            for (const auto& v : vars) r.values[v.name] = v.init;
            results.push_back(std::move(r));
            break;
        }
    }
    return results;
}

} // namespace siopt::optimize
