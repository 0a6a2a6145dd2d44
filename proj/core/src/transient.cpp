#include "siopt/netlist.hpp"
#include "siopt/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <queue>
#include <set>

namespace siopt::circuit {

void Netlist::add_resistor(std::string name, std::string a, std::string b, double ohms) {
    resistors.push_back({std::move(name), std::move(a), std::move(b), ohms});
}
void Netlist::add_capacitor(std::string name, std::string a, std::string b, double farads) {
    capacitors.push_back({std::move(name), std::move(a), std::move(b), farads});
}
void Netlist::add_line(std::string name, std::string a, std::string b, double z0, double delay) {
    lines.push_back({std::move(name), std::move(a), std::move(b), z0, delay});
}
void Netlist::add_source(std::string name, std::string p, std::string n, Source src) {
    sources.push_back({std::move(name), std::move(p), std::move(n), std::move(src)});
}

namespace {

bool is_ground(const std::string& node) { return node == "0" || node == "gnd"; }

class NodeMap {
public:
    // ground -> -1, others -> 0..n-1
    int index(const std::string& node) {
        if (is_ground(node)) return -1;
        auto [it, inserted] = map_.try_emplace(node, static_cast<int>(names_.size()));
        if (inserted) names_.push_back(node);
        return it->second;
    }
    int count() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::map<std::string, int> map_;
    std::vector<std::string> names_;
};

struct LineState {
    int a = -1, b = -1;
    double y = 0.0;        // 1/z0
    int delay_steps = 1;
    // per-step history of node voltage and injected Norton current
    std::vector<double> va, vb, ja, jb;
};

struct CapState {
    int a = -1, b = -1;
    double geq = 0.0;
    double v_prev = 0.0, i_prev = 0.0;
};

void check_connectivity(const Netlist& nl, const NodeMap& nodes,
                        const std::vector<std::pair<int, int>>& edges) {
    const int n = nodes.count();
    if (n == 0) return;
    std::vector<std::vector<int>> adj(n);
    std::vector<char> reached(n, 0);
    std::queue<int> frontier;
    for (const auto& [a, b] : edges) {
        if (a < 0 && b < 0) continue;
        if (a < 0 || b < 0) {
            const int x = a < 0 ? b : a;
            if (!reached[x]) {
                reached[x] = 1;
                frontier.push(x);
            }
            continue;
        }
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    while (!frontier.empty()) {
        int x = frontier.front();
        frontier.pop();
        for (int y : adj[x]) {
            if (!reached[y]) {
                reached[y] = 1;
                frontier.push(y);
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        if (!reached[i])
            throw SimError("singular nodal matrix: node '" + nodes.names()[i] +
                           "' has no path to ground");
    }
    (void)nl;
}

} // namespace

std::map<std::string, Waveform> run_transient(const Netlist& netlist, double tstep, double tstop) {
    if (tstep <= 0.0) throw SimError("tstep must be > 0");
    if (tstop <= tstep) throw SimError("tstop must be > tstep");

    NodeMap nodes;
    std::vector<std::pair<int, int>> edges;

    for (const auto& r : netlist.resistors) {
        if (r.ohms <= 0.0) throw SimError("resistor '" + r.name + "' must be > 0 ohm");
        edges.emplace_back(nodes.index(r.a), nodes.index(r.b));
    }
    for (const auto& c : netlist.capacitors) {
        if (c.farads < 0.0) throw SimError("capacitor '" + c.name + "' must be >= 0 F");
        edges.emplace_back(nodes.index(c.a), nodes.index(c.b));
    }
    for (const auto& l : netlist.lines) {
        if (l.z0 <= 0.0) throw SimError("line '" + l.name + "' must have Z0 > 0");
        if (l.delay <= 0.0) throw SimError("line '" + l.name + "' must have delay > 0");
        edges.emplace_back(nodes.index(l.a), nodes.index(l.b));
    }
    for (const auto& s : netlist.sources) {
        edges.emplace_back(nodes.index(s.p), nodes.index(s.n));
    }
    check_connectivity(netlist, nodes, edges);

    const int n = nodes.count();
    const int m = static_cast<int>(netlist.sources.size());
    const int dim = n + m;
    if (dim == 0) return {};

    const auto steps = static_cast<size_t>(std::floor(tstop / tstep + 0.5)) + 1;

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim, dim);
    auto stamp_conductance = [&](int a, int b, double g) {
        if (a >= 0) G(a, a) += g;
        if (b >= 0) G(b, b) += g;
        if (a >= 0 && b >= 0) {
            G(a, b) -= g;
            G(b, a) -= g;
        }
    };

    for (const auto& r : netlist.resistors)
        stamp_conductance(nodes.index(r.a), nodes.index(r.b), 1.0 / r.ohms);

    std::vector<CapState> caps;
    for (const auto& c : netlist.capacitors) {
        CapState st;
        st.a = nodes.index(c.a);
        st.b = nodes.index(c.b);
        st.geq = 2.0 * c.farads / tstep;   // trapezoidal companion
        stamp_conductance(st.a, st.b, st.geq);
        caps.push_back(st);
    }

    std::vector<LineState> tls;
    for (const auto& l : netlist.lines) {
        LineState st;
        st.a = nodes.index(l.a);
        st.b = nodes.index(l.b);
        st.y = 1.0 / l.z0;
        const double ratio = l.delay / tstep;
        st.delay_steps = static_cast<int>(std::lround(ratio));
        if (st.delay_steps < 1)
            throw SimError("line '" + l.name + "' delay is shorter than tstep");
        if (std::abs(st.delay_steps - ratio) > 0.05 * ratio)
            throw SimError("line '" + l.name +
                           "' delay rounds to a step multiple by more than 5%; "
                           "reduce tstep or adjust the delay");
        st.va.assign(st.delay_steps, 0.0);
        st.vb.assign(st.delay_steps, 0.0);
        st.ja.assign(st.delay_steps, 0.0);
        st.jb.assign(st.delay_steps, 0.0);
        // each end: characteristic-impedance stamp to ground
        stamp_conductance(st.a, -1, st.y);
        stamp_conductance(st.b, -1, st.y);
        tls.push_back(st);
    }

    std::vector<std::pair<int, int>> source_nodes;
    for (int k = 0; k < m; ++k) {
        const auto& s = netlist.sources[k];
        const int p = nodes.index(s.p);
        const int q = nodes.index(s.n);
        const int row = n + k;
        if (p >= 0) {
            G(p, row) += 1.0;
            G(row, p) += 1.0;
        }
        if (q >= 0) {
            G(q, row) -= 1.0;
            G(row, q) -= 1.0;
        }
        source_nodes.emplace_back(p, q);
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    if (!lu.isInvertible())
        throw SimError("singular nodal matrix: check for floating nodes or source loops");

    std::vector<std::vector<double>> history(n, std::vector<double>(steps));
    Eigen::VectorXd rhs(dim), x(dim);

    for (size_t step = 0; step < steps; ++step) {
        const double t = tstep * static_cast<double>(step);
        rhs.setZero();

        for (const auto& c : caps) {
            const double ieq = c.geq * c.v_prev + c.i_prev;
            if (c.a >= 0) rhs(c.a) += ieq;
            if (c.b >= 0) rhs(c.b) -= ieq;
        }
        for (auto& l : tls) {
            const size_t slot = step % static_cast<size_t>(l.delay_steps);
            double ja = 0.0, jb = 0.0;
            if (step >= static_cast<size_t>(l.delay_steps)) {
                // Branin history: reflected wave from the far end one delay ago
                ja = 2.0 * l.vb[slot] * l.y - l.jb[slot];
                jb = 2.0 * l.va[slot] * l.y - l.ja[slot];
            }
            if (l.a >= 0) rhs(l.a) += ja;
            if (l.b >= 0) rhs(l.b) += jb;
            l.ja[slot] = ja;   // overwritten below with this step's values
            l.jb[slot] = jb;
        }
        for (int k = 0; k < m; ++k) {
            rhs(n + k) = netlist.sources[k].src.eval(t);
        }

        x = lu.solve(rhs);

        for (int i = 0; i < n; ++i) history[i][step] = x(i);

        for (auto& l : tls) {
            const size_t slot = step % static_cast<size_t>(l.delay_steps);
            l.va[slot] = l.a >= 0 ? x(l.a) : 0.0;
            l.vb[slot] = l.b >= 0 ? x(l.b) : 0.0;
        }
        for (auto& c : caps) {
            const double va = c.a >= 0 ? x(c.a) : 0.0;
            const double vb = c.b >= 0 ? x(c.b) : 0.0;
            const double v = va - vb;
            const double ieq = c.geq * c.v_prev + c.i_prev;
            c.i_prev = c.geq * v - ieq;
            c.v_prev = v;
        }
    }

    std::map<std::string, Waveform> out;
    for (int i = 0; i < n; ++i) {
        Waveform w;
        w.t0 = 0.0;
        w.dt = tstep;
        w.samples = std::move(history[i]);
        out.emplace(nodes.names()[i], std::move(w));
    }
    return out;
}

} // namespace siopt::circuit
