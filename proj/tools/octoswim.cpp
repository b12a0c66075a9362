#include <CLI11.hpp>
#include <omp.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "octoswim/config.hpp"
#include "octoswim/scenario.hpp"

namespace fs = std::filesystem;
using namespace octoswim;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::string config_path;
    std::string out_dir;
    int jobs = 0;
    bool paper_presets = false;
    std::optional<double> target_k;
    std::optional<double> offset_e;
    std::optional<double> crank_a;
};

class Output {
public:
    explicit Output(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    template <class Fn>
    void write(const std::string& name, Fn&& fn) const {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        fn(out);
        if (!out) throw std::runtime_error("write failed for " + path.string());
    }

private:
    fs::path dir_;
};

ScenarioConfig load(const Options& opt, ScenarioKind kind) {
    ScenarioConfig cfg = opt.config_path.empty() ? default_scenario() : load_config(opt.config_path);
    cfg.kind = kind;
    if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
    if (opt.target_k) cfg.design.target_k = *opt.target_k;
    if (opt.offset_e) cfg.design.offset_e = *opt.offset_e;
    if (opt.crank_a) cfg.design.crank_a = *opt.crank_a;
    if (kind == ScenarioKind::steer) cfg.robot.mode = SwimMode::planar;
    validate(cfg);
    return cfg;
}

void emit_config(const Output& out, const ScenarioConfig& cfg) {
    out.write("effective_config.ini", [&](std::ostream& s) { write_config(s, cfg); });
}

int run(ScenarioKind kind, const Options& opt) {
    const ScenarioConfig cfg = load(opt, kind);
    const Output out(cfg.output_dir);
    emit_config(out, cfg);

    switch (kind) {
        case ScenarioKind::design: {
            std::vector<DesignRow> rows;
            if (opt.paper_presets) {
                rows = paper_presets();
            } else {
                rows.push_back(run_design(cfg.design));
            }
            write_design_report(std::cout, rows);
            out.write("design.csv", [&](std::ostream& s) { write_design_csv(s, rows); });
            break;
        }
        case ScenarioKind::mech: {
            const MechResult r = run_mech(cfg);
            write_mech_report(std::cout, r);
            out.write("mech.csv", [&](std::ostream& s) { write_mech_csv(s, r); });
            break;
        }
        case ScenarioKind::arm: {
            const RecurveStats r = run_arm(cfg);
            write_arm_report(std::cout, r, cfg);
            out.write("arm_frames.csv", [&](std::ostream& s) { write_arm_frames_csv(s, r); });
            out.write("arm_midlines.csv", [&](std::ostream& s) { write_arm_midlines_csv(s, r); });
            break;
        }
        case ScenarioKind::swim:
        case ScenarioKind::steer: {
            const SwimResult r = kind == ScenarioKind::swim ? run_swim(cfg) : run_steer(cfg);
            const std::string stem = to_string(kind);
            std::ostringstream report;
            write_swim_report(report, r, cfg);
            std::cout << report.str();
            out.write(stem + ".csv", [&](std::ostream& s) { write_swim_csv(s, r.series); });
            out.write(stem + "_torque.csv", [&](std::ostream& s) { write_torque_csv(s, r.torque); });
            out.write(stem + "_metrics.txt", [&](std::ostream& s) { s << report.str(); });
            break;
        }
        case ScenarioKind::sweep: {
            const int jobs = opt.jobs > 0 ? opt.jobs : omp_get_max_threads();
            const auto cells = run_sweep(cfg, jobs);
            std::size_t failed = 0;
            for (const auto& c : cells) failed += c.error.empty() ? 0 : 1;
            std::cout << "sweep: " << cells.size() << " cells, " << failed << " with errors\n";
            out.write("sweep.csv", [&](std::ostream& s) { write_sweep_csv(s, cells); });
            break;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Octopus-inspired swimming robot simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    bool schema = false;
    app.add_option("--config", opt.config_path, "INI scenario file")->check(CLI::ExistingFile);
    app.add_option("--out", opt.out_dir, "output directory (overrides [output] dir)");
    app.add_option("--jobs", opt.jobs, "concurrent sweep cells")->check(CLI::PositiveNumber);
    app.add_flag("--schema", schema, "print every config key with its default and exit");

    std::optional<ScenarioKind> kind;
    auto* design = app.add_subcommand("design", "synthesize a linkage for a travel ratio");
    design->add_flag("--paper-presets", opt.paper_presets, "report the three published geometries");
    design->add_option("--target-k", opt.target_k, "travel ratio K");
    design->add_option("--offset-e", opt.offset_e, "slider offset, mm");
    design->add_option("--crank-a", opt.crank_a, "crank length, mm");
    design->callback([&] { kind = ScenarioKind::design; });
    app.add_subcommand("mech", "one crank revolution of the left mechanism")->callback([&] { kind = ScenarioKind::mech; });
    app.add_subcommand("arm", "single arm on the bench rig, recurve analysis")->callback([&] { kind = ScenarioKind::arm; });
    app.add_subcommand("swim", "full robot swimming run")->callback([&] { kind = ScenarioKind::swim; });
    app.add_subcommand("steer", "planar run with per-side motor profiles")->callback([&] { kind = ScenarioKind::steer; });
    app.add_subcommand("sweep", "presets x incision depths x rpm grid")->callback([&] { kind = ScenarioKind::sweep; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        if (schema && e.get_exit_code() == static_cast<int>(CLI::ExitCodes::RequiredError)) {
            std::cout << config_schema();
            return 0;
        }
        app.exit(e);
        return kExitUsage;
    }
    if (schema) {
        std::cout << config_schema();
        return 0;
    }

    try {
        return run(*kind, opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NoSolution& e) {
        std::cerr << "no solution: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
