#include "siopt/deck.hpp"
#include "siopt/errors.hpp"
#include "siopt/ir.hpp"
#include "siopt/studies.hpp"
#include "siopt/units.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

int cmd_parse(const std::string& file, bool strict, bool dump_ir) {
    std::ifstream in(file);
    if (!in) {
        std::cerr << "error: cannot open '" << file << "'\n";
        return 2;
    }
    std::stringstream ss;
    ss << in.rdbuf();

    siopt::deck::ParseOptions opts;
    opts.strict = strict;
    std::vector<std::string> warnings;
    try {
        const siopt::deck::Deck deck = siopt::deck::parse_deck_text(ss.str(), opts, &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
        if (dump_ir) {
            std::cout << siopt::deck::dump_ir(siopt::deck::lower_to_ir(deck));
        } else {
            std::cout << siopt::deck::pretty_print(deck);
        }
        return 0;
    } catch (const siopt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_eval_expr(const std::string& text, const std::vector<std::string>& binds) {
    try {
        const siopt::expr::Expr e = siopt::expr::parse(text);
        std::map<std::string, double> env;
        for (const auto& b : binds) {
            const auto eq = b.find('=');
            if (eq == std::string::npos)
                throw siopt::Error("--bind expects name=value, got '" + b + "'");
            env[b.substr(0, eq)] = siopt::units::parse_number(b.substr(eq + 1));
        }
        siopt::expr::EvalContext ctx;
        ctx.params = &env;
        ctx.signals = &env;   // the same bindings serve v(name) references
        std::cout << siopt::units::render(siopt::expr::eval(e, ctx)) << "\n";
        return 0;
    } catch (const siopt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_study(siopt::studies::StudyConfig cfg) {
    try {
        siopt::studies::StudyReport report;
        if (cfg.study == "multidrop") {
            report = siopt::studies::run_multidrop(cfg);
        } else if (cfg.study == "linkwidth") {
            report = siopt::studies::run_linkwidth(cfg);
        } else if (cfg.study == "length-sweep") {
            report = siopt::studies::run_length_sweep(cfg, cfg.lengths);
            // the mask-delay curve rides along for plotting
        } else {
            std::cerr << "error: unknown study '" << cfg.study << "'\n";
            return 2;
        }
        siopt::studies::emit_report(report, cfg);
        std::cout << "study " << report.study << ": " << (report.pass ? "PASS" : "FAIL")
                  << "  (artifacts in " << cfg.out_dir << ")\n";
        for (const auto& n : report.notes) std::cout << "note: " << n << "\n";
        return report.pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"si-opt: signal-integrity channel simulation and optimization"};
    app.require_subcommand(1);

    // parse
    std::string parse_file;
    bool strict = false, dump_ir = false;
    CLI::App* parse = app.add_subcommand("parse", "Parse a deck and pretty-print it");
    parse->add_option("file", parse_file, "deck file")->required();
    parse->add_flag("--strict", strict, "reject unknown statements");
    parse->add_flag("--dump-ir", dump_ir, "dump the lowered scenario IR");

    // eval-expr
    std::string expr_text;
    std::vector<std::string> binds;
    CLI::App* ev = app.add_subcommand("eval-expr", "Evaluate a measure expression");
    ev->add_option("expr", expr_text, "expression text")->required();
    ev->add_option("--bind", binds, "name=value binding (parameters and node voltages)");

    // study
    siopt::studies::StudyConfig cfg;
    std::vector<std::string> sets;
    std::string emit = "both";
    std::vector<double> lengths;
    CLI::App* study = app.add_subcommand("study", "Run a built-in study");
    study->add_option("kind", cfg.study, "multidrop | linkwidth | length-sweep")->required();
    study->add_option("--deck", cfg.deck_path, "deck file overriding the built-in defaults");
    study->add_option("--set", sets, "config override key=value (dotted keys)");
    study->add_option("--out", cfg.out_dir, "output directory");
    study->add_option("--emit", emit, "csv | svg | both")
        ->check(CLI::IsMember({"csv", "svg", "both"}));
    study->add_flag("--iterate-to-convergence", cfg.iterate_to_convergence,
                    "loop the round schedule until the mask delay settles");
    study->add_option("--seed", cfg.seed, "PRBS seed");
    study->add_option("--lengths", lengths, "sweep lengths in meters");

    CLI11_PARSE(app, argc, argv);

    if (parse->parsed()) return cmd_parse(parse_file, strict, dump_ir);
    if (ev->parsed()) return cmd_eval_expr(expr_text, binds);

    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: --set expects key=value, got '" << s << "'\n";
            return 2;
        }
        cfg.overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
    if (!lengths.empty()) cfg.lengths = lengths;
    if (emit == "csv") cfg.emit = siopt::studies::StudyConfig::Emit::Csv;
    else if (emit == "svg") cfg.emit = siopt::studies::StudyConfig::Emit::Svg;
    else cfg.emit = siopt::studies::StudyConfig::Emit::Both;

    return cmd_study(std::move(cfg));
}
