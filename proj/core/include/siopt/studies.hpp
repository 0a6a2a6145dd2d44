#pragma once

#include "siopt/eye.hpp"
#include "siopt/ir.hpp"
#include "siopt/link.hpp"
#include "siopt/multidrop.hpp"
#include "siopt/optimizer.hpp"
#include "siopt/prune.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace siopt::studies {

// --------------------------------------------------------------------------
// CLI-level configuration

struct StudyConfig {
    std::string study;                               // multidrop | linkwidth | length-sweep
    std::string deck_path;                           // optional deck override
    std::map<std::string, std::string> overrides;    // dotted keys, e.g. link.backplane_length
    std::string out_dir = "si-opt-out";
    enum class Emit { Csv, Svg, Both } emit = Emit::Both;
    bool iterate_to_convergence = false;
    uint32_t seed = 0x5a;
    std::vector<double> lengths = {0.15, 0.30, 0.45, 0.60};
};

// --------------------------------------------------------------------------
// Multi-drop termination study

struct MultidropConfig {
    double bit_period = 1.2e-9;     // 840 ps window = 0.7 UI
    double eye_mask = 840e-12;
    int prbs_order = 7;
    uint32_t seed = 0x5a;
    double tstep = 5e-12;
    int warmup_bits = 13;
    int measure_bits = 127;         // one full PRBS period after warm-up
    double vref = 0.75;
    circuit::MultidropSpec topology;

    double goal = 1.0;              // maximize the worst-receiver opening
    deck::OptModelDecl model;
    bool prune_enabled = true;
    double series_short_threshold = 5.0;
    double shunt_open_threshold = 500.0;
    double hstl_requirement = 0.2;  // volts beyond VREF

    std::vector<optimize::OptVariable> variables;   // the paper's 8 groups

    MultidropConfig();
};

// Serial-link trace-width minimization study

struct LinkwidthConfig {
    channel::LinkSpec link;         // geometry field is the scaling nominal
    double length = 0.30;           // card = length/2 each, backplane = length
    double width_init = 101.6e-6;
    double width_min = 50.8e-6;
    double width_max = 127e-6;

    double mask_amplitude = 0.165;
    double mask_high_ui = 0.5;
    double mask_edge_ui = 0.05;

    int bits = 512;
    int samples_per_bit = 32;
    int prbs_order = 7;
    uint32_t seed = 0x5a;

    deck::OptModelDecl model;
    double goal_delay = 1.0;        // AVG opening, "as big as possible"
    double goal_width = 1e-5;       // small nonzero, never exactly zero
    int rounds = 4;                 // delay, width, delay, width
    bool iterate_to_convergence = false;
    int delay_seed_grid = 32;
};

// --------------------------------------------------------------------------
// Reports

struct StageRecord {
    std::string name;
    optimize::OptStageResult result;
};

struct SweepRow {
    double length = 0.0;
    double width = 0.0;
    double opening = 0.0;
    bool feasible = false;
    bool at_cap = false;
};

struct EyeArtifact {
    std::string name;
    measure::EyeDiagram eye;
    measure::EyeMask mask;
    double vref = 0.0;   // vertical reference for display; 0 for differential
};

struct StudyReport {
    std::string study;
    bool pass = false;
    std::vector<std::string> notes;

    std::vector<StageRecord> stages;
    std::map<std::string, double> final_values;

    // multidrop
    double baseline_opening = 0.0;
    double final_opening = 0.0;
    std::vector<double> receiver_openings;
    std::vector<std::pair<std::string, PruneState>> prune_history;

    // linkwidth / sweep
    double final_width = 0.0;
    double final_mask_delay = 0.0;
    bool feasible = true;
    std::string touching_edge;
    std::vector<SweepRow> sweep_rows;
    std::vector<std::pair<double, double>> mask_delay_curve;

    std::map<std::string, Waveform> waveforms;
    std::vector<EyeArtifact> eyes;
};

// --------------------------------------------------------------------------
// Study entry points

MultidropConfig multidrop_config_from(const StudyConfig& cfg);
LinkwidthConfig linkwidth_config_from(const StudyConfig& cfg);

StudyReport run_multidrop(const StudyConfig& cfg);
StudyReport run_multidrop_study(const MultidropConfig& cfg);

StudyReport run_linkwidth(const StudyConfig& cfg);
StudyReport run_linkwidth_study(const LinkwidthConfig& cfg);

StudyReport run_length_sweep(const StudyConfig& cfg, const std::vector<double>& lengths);

// (delay, AVG masked opening) over two bit periods.
std::vector<std::pair<double, double>> sweep_mask_delay(const LinkwidthConfig& cfg, int n_points);

void emit_report(const StudyReport& report, const StudyConfig& cfg);

// --------------------------------------------------------------------------
// Shared helpers (also used by the test suites)

// Drops samples before t_start but keeps absolute time in t0.
Waveform trim_waveform(const Waveform& w, double t_start);

// Best windowed opening over a delay grid plus local refinement; returns
// (delay, opening).  Exact per-sample semantics of windowed_opening.
std::pair<double, double> auto_center_window(const Waveform& sig, double vref,
                                             double open_width, double period, int grid);

// Local maxima count with plateau collapsing; endpoints excluded.
int count_local_maxima(const std::vector<std::pair<double, double>>& curve);

// The receive waveform for a width-scaled link.
Waveform simulate_scaled_link(const LinkwidthConfig& cfg, double linewidth);

measure::EyeMask link_mask(const LinkwidthConfig& cfg, double delay);

} // namespace siopt::studies
