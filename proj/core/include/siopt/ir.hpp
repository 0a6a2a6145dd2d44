#pragma once

#include "siopt/deck.hpp"
#include "siopt/stripline.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace siopt::deck {

// Executable scenario lowered from a validated Deck: numeric parameter
// table with bounds (unit suffixes expanded), measures bound to node
// names, ordered optimization stages with carry-over, geometry resolved
// against the parameter table.

struct IrParam {
    std::string name;
    ParamKind kind = ParamKind::Fixed;
    double value = 0.0;    // current value (init at lowering time)
    double min = 0.0, max = 0.0;
    std::string opt_group;
    expr::Expr expression;   // Derived: re-evaluated whenever inputs change
};

// Ordered parameter table; set() re-evaluates derived parameters in
// declaration order (forward references are rejected at parse time).
class ParamTable {
public:
    ParamTable() = default;
    explicit ParamTable(std::vector<IrParam> params);

    bool has(const std::string& name) const;
    double get(const std::string& name) const;
    void set(const std::string& name, double value);
    void set_all(const std::map<std::string, double>& values);

    const std::vector<IrParam>& params() const { return params_; }
    std::map<std::string, double> snapshot() const;

private:
    void reevaluate();
    std::vector<IrParam> params_;
    std::map<std::string, size_t> index_;
};

struct ScenarioStage {
    double tstep = 0.0, tstop = 0.0;
    std::string optimize_group;
    std::string results_measure;
    OptModelDecl model;
};

struct ScenarioIR {
    std::vector<IrParam> params;
    std::vector<MeasureSpec> measures;
    std::vector<ScenarioStage> stages;   // declaration order
    bool simulate_only = false;          // no optimization requested
    std::vector<ElementCard> elements;
    std::optional<channel::StriplineGeometry> geometry;
    std::string rlgc_csv_path;           // from RLGCFILE, empty if none
};

ScenarioIR lower_to_ir(const Deck& d);

std::string dump_ir(const ScenarioIR& ir);

} // namespace siopt::deck
