// gwcal: steady-state groundwater screening and calibration toolkit.
//
// Subcommands: scenario init, simulate, recharge, morris, calibrate.
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "gwcal/config.hpp"
#include "gwcal/pipeline.hpp"
#include "gwcal/scenario_gen.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationError = 1;
constexpr int kNumericalFailure = 2;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    unsigned jobs = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

gwcal::RunConfig prepare(const CommonArgs& args) {
    gwcal::RunConfig cfg = gwcal::load_config(args.config_path);
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.jobs != 0) cfg.jobs = args.jobs;
    if (args.seed_given) {
        cfg.morris_settings.seed = args.seed;
        cfg.morris_settings.seed_set = true;
    }
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_seed) {
    cmd->add_option("--config", args.config_path, "run configuration file")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--jobs", args.jobs,
                    "worker threads (default: machine parallelism)");
    if (with_seed)
        cmd->add_option("--seed", args.seed, "override the configured seed")
            ->each([&args](const std::string&) { args.seed_given = true; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"groundwater screening and calibration toolkit"};
    app.require_subcommand(1);

    auto* scenario = app.add_subcommand(
        "scenario", "scenario management (init writes the bundled synthetic "
                    "valley scenario)");
    scenario->require_subcommand(1);
    std::string scenario_out = "scenario";
    auto* scenario_init =
        scenario->add_subcommand("init", "write the bundled scenario files");
    scenario_init->add_option("--out", scenario_out, "target directory");

    CommonArgs sim_args, rch_args, mor_args, cal_args;
    auto* simulate =
        app.add_subcommand("simulate", "one steady-state solve plus reports");
    add_common(simulate, sim_args, false);
    auto* recharge = app.add_subcommand(
        "recharge", "weekly recharge tables from meteorological data");
    add_common(recharge, rch_args, false);
    auto* morris_cmd = app.add_subcommand(
        "morris", "elementary-effects screening over the parameter space");
    add_common(morris_cmd, mor_args, true);
    auto* calibrate_cmd = app.add_subcommand(
        "calibrate", "brute-force search, simplex refinement, uncertainty");
    add_common(calibrate_cmd, cal_args, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (scenario_init->parsed()) {
            gwcal::scenario_gen::write_synthetic_scenario(scenario_out);
            std::printf("scenario written to %s\n", scenario_out.c_str());
            return kOk;
        }
        if (simulate->parsed()) {
            const auto cfg = prepare(sim_args);
            const auto art = gwcal::pipeline::run_simulate(cfg);
            gwcal::pipeline::write_simulate_reports(cfg, art.scenario,
                                                    art.result, cfg.out_dir);
            if (!art.result.ok) {
                std::fprintf(stderr,
                             "solver did not converge after %d iterations "
                             "(max head change %.3g m); budget written for "
                             "diagnosis\n",
                             art.result.solve.iterations,
                             art.result.solve.final_residual);
                return kNumericalFailure;
            }
            std::printf("converged in %d iterations; reports in %s\n",
                        art.result.solve.iterations, cfg.out_dir.c_str());
            return kOk;
        }
        if (recharge->parsed()) {
            const auto cfg = prepare(rch_args);
            const auto art = gwcal::pipeline::run_recharge(cfg);
            gwcal::pipeline::write_recharge_reports(art, cfg.out_dir);
            std::printf("recharge tables in %s\n", cfg.out_dir.c_str());
            return kOk;
        }
        if (morris_cmd->parsed()) {
            const auto cfg = prepare(mor_args);
            const auto art = gwcal::pipeline::run_screening(cfg, cfg.jobs);
            gwcal::pipeline::write_screening_reports(art, cfg.out_dir);
            std::printf("screening reports in %s\n", cfg.out_dir.c_str());
            return kOk;
        }
        if (calibrate_cmd->parsed()) {
            const auto cfg = prepare(cal_args);
            const auto art = gwcal::pipeline::run_calibration(cfg, cfg.jobs);
            gwcal::pipeline::write_calibration_reports(cfg, art, cfg.out_dir);
            std::printf("calibration reports in %s\n", cfg.out_dir.c_str());
            return kOk;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidationError;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidationError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failure: %s\n", e.what());
        return kNumericalFailure;
    }
    return kValidationError;
}
