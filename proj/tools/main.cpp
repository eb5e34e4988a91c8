#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "pinnosc/experiment.hpp"
#include "pinnosc/report.hpp"

using namespace pinnosc;

namespace {

// Stage-coded exit values; 0 on success, 2 on config/argument problems.
enum ExitCode {
    kOk = 0,
    kConfig = 2,
    kReference = 10,
    kPinn = 11,
    kInfer = 12,
    kOscillator = 13,
    kRollout = 14,
    kEvaluate = 15,
    kReport = 16,
};

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::string cache_dir;
    long long seed = -1;
};

ExperimentConfig load(const CommonOpts& o) {
    ExperimentConfig cfg = o.config_path.empty() ? default_config("burgers")
                                                 : load_config(o.config_path);
    if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (!o.cache_dir.empty()) cfg.cache_dir = o.cache_dir;
    return cfg;
}

void add_common(CLI::App* app, CommonOpts& o) {
    app->add_option("--config", o.config_path, "experiment config file");
    app->add_option("--seed", o.seed, "override the config seed");
    app->add_option("--out", o.out_dir, "output directory");
    app->add_option("--cache", o.cache_dir,
                    "cache directory (PINNOSC_CACHE_DIR overrides)");
}

int guarded(int stage_code, const std::function<void()>& body) {
    try {
        body();
        return kOk;
    } catch (const ArgumentError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return stage_code;
    }
}

void print_metrics(const char* tag, const MetricsRow& m) {
    std::printf("%s relative_l2=%.6g explained_variance=%.6g max_error=%.6g mae=%.6g\n", tag,
                m.rel_l2, m.explained_var, m.max_err, m.mae);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"physics-informed training with neural-oscillator extrapolation"};
    app.require_subcommand(1);

    CommonOpts run_o, sweep_o, ref_o, pinn_o, osc_o, roll_o;

    auto* run = app.add_subcommand("run", "full pipeline for one configuration");
    add_common(run, run_o);

    auto* sweep = app.add_subcommand("sweep", "run an axis sweep with replicates");
    add_common(sweep, sweep_o);

    auto* report = app.add_subcommand("report", "tables and SVG figures from run records");
    std::string runs_path = "out/runs.jsonl", report_out = "out/report";
    report->add_option("--runs", runs_path, "runs.jsonl produced by run/sweep");
    report->add_option("--out", report_out, "report output directory");

    auto* solve = app.add_subcommand("solve-reference", "compute the reference grid");
    add_common(solve, ref_o);
    std::string solve_out = "reference.csv";
    solve->add_option("--grid-out", solve_out, "output CSV path");

    auto* tpinn = app.add_subcommand("train-pinn", "train the physics-informed network");
    add_common(tpinn, pinn_o);
    std::string pinn_out = "pinn.ckpt";
    tpinn->add_option("--ckpt-out", pinn_out, "checkpoint output path");

    auto* tosc = app.add_subcommand("train-oscillator", "train the sequence model");
    add_common(tosc, osc_o);
    std::string osc_grid, osc_out = "oscillator.ckpt";
    tosc->add_option("--grid", osc_grid, "training-window grid CSV (default: infer)");
    tosc->add_option("--ckpt-out", osc_out, "checkpoint output path");

    auto* roll = app.add_subcommand("rollout", "autoregressive extrapolation");
    add_common(roll, roll_o);
    std::string roll_ckpt, roll_grid, roll_out = "pred_x2.csv";
    roll->add_option("--ckpt", roll_ckpt, "oscillator checkpoint")->required();
    roll->add_option("--grid", roll_grid, "seed grid CSV")->required();
    roll->add_option("--grid-out", roll_out, "output CSV path");

    auto* eval = app.add_subcommand("evaluate", "metrics between two grid CSVs");
    std::string eval_pred, eval_ref;
    eval->add_option("--pred", eval_pred, "prediction grid CSV")->required();
    eval->add_option("--ref", eval_ref, "reference grid CSV")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed())
        return guarded(kPinn, [&] {
            ExperimentConfig cfg = load(run_o);
            RunRecord rec = cmd_run(cfg);
            print_metrics("x2", rec.metrics);
        });
    if (sweep->parsed())
        return guarded(kPinn, [&] {
            ExperimentConfig cfg = load(sweep_o);
            auto records = cmd_sweep(cfg);
            std::printf("sweep complete: %zu runs, tables under %s\n", records.size(),
                        cfg.out_dir.c_str());
        });
    if (report->parsed())
        return guarded(kReport, [&] {
            cmd_report(read_run_records(runs_path), report_out);
            std::printf("report written to %s\n", report_out.c_str());
        });
    if (solve->parsed())
        return guarded(kReference, [&] {
            ExperimentConfig cfg = load(ref_o);
            GridSolution g = reference_full(cfg, cfg.nu);
            write_grid_csv(solve_out, g);
            std::printf("reference grid (%d x %d) -> %s\n", g.k_t, g.row_width(),
                        solve_out.c_str());
        });
    if (tpinn->parsed())
        return guarded(kPinn, [&] {
            ExperimentConfig cfg = load(pinn_o);
            MlpModel m = pinn_stage(cfg, cfg.nu, cfg.seed);
            save_mlp(pinn_out, m);
            std::printf("pinn checkpoint -> %s\n", pinn_out.c_str());
        });
    if (tosc->parsed())
        return guarded(kOscillator, [&] {
            ExperimentConfig cfg = load(osc_o);
            GridSolution grid;
            if (osc_grid.empty()) {
                MlpModel m = pinn_stage(cfg, cfg.nu, cfg.seed);
                grid = infer_stage(cfg, m, cfg.nu);
            } else {
                grid = read_grid_csv(osc_grid);
            }
            OscillatorModel osc = oscillator_stage(cfg, grid, cfg.seed);
            save_oscillator(osc_out, osc);
            std::printf("oscillator checkpoint -> %s\n", osc_out.c_str());
        });
    if (roll->parsed())
        return guarded(kRollout, [&] {
            ExperimentConfig cfg = load(roll_o);
            OscillatorModel osc = load_oscillator(roll_ckpt);
            GridSolution seed_grid = read_grid_csv(roll_grid);
            RolloutOptions ro;
            ro.cold_start = cfg.rollout_cold_start;
            GridSolution pred = rollout(osc, seed_grid, cfg.horizon(), ro);
            write_grid_csv(roll_out, pred);
            std::printf("rollout grid (%d x %d) -> %s\n", pred.k_t, pred.row_width(),
                        roll_out.c_str());
        });
    if (eval->parsed())
        return guarded(kEvaluate, [&] {
            GridSolution pred = read_grid_csv(eval_pred);
            GridSolution ref = read_grid_csv(eval_ref);
            print_metrics("metrics", evaluate_grids(pred, ref));
        });
    return kConfig;
}
