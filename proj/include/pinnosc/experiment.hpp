#pragma once

#include <map>
#include <string>
#include <vector>

#include "pinnosc/checkpoint.hpp"
#include "pinnosc/config.hpp"
#include "pinnosc/metrics.hpp"

namespace pinnosc {

inline constexpr const char* kToolVersion = "pinnosc 0.1.0";

struct StageTimes {
    double reference = 0.0, pinn = 0.0, infer = 0.0, oscillator = 0.0, rollout = 0.0,
           evaluate = 0.0;
};

/// Append-only record of one end-to-end run: config snapshot, artifact paths,
/// X2 metrics and wall times per stage.
struct RunRecord {
    std::map<std::string, std::string> config;
    std::string run_id;
    std::string pinn_checkpoint, osc_checkpoint;
    std::string train_grid_csv, pred_grid_csv, ref_grid_csv;
    MetricsRow metrics;            // extrapolation window X2
    MetricsRow metrics_train;      // X1, when metrics.train_window is set
    bool has_train_metrics = false;
    MetricsRow metrics_magnitude;  // |u| for the 2-channel benchmark
    bool has_magnitude = false;
    StageTimes times;
    std::string version = kToolVersion;

    std::string to_json() const;
    static RunRecord from_json(const std::string& line);
};

/// Time axes implied by a config: k_t uniform levels on [0, t_train_end]
/// inclusive, then horizon = k_t/4 levels continuing the same spacing.
struct TimeAxes {
    std::vector<double> train, test, full;
};
TimeAxes make_time_axes(const ExperimentConfig& cfg, const DomainSpec& dom);

/// Reference solution over train+test windows; disk-cached by solver key.
GridSolution reference_full(const ExperimentConfig& cfg, double nu);
/// Trained network for (config, nu, seed); checkpoint-cached.
MlpModel pinn_stage(const ExperimentConfig& cfg, double nu, std::uint64_t seed);
/// X1 grid inferred from a trained network.
GridSolution infer_stage(const ExperimentConfig& cfg, const MlpModel& model, double nu);
OscillatorModel oscillator_stage(const ExperimentConfig& cfg, const GridSolution& seed_grid,
                                 std::uint64_t seed);

/// Full pipeline: reference -> pinn -> infer -> oscillator -> rollout ->
/// evaluate; writes artifacts under out_dir and appends to runs.jsonl.
RunRecord cmd_run(const ExperimentConfig& cfg);

/// One record per sweep point per replicate, plus aggregate CSVs under
/// out_dir. Axes: cells | delta_t | eps_gamma | nu.
std::vector<RunRecord> cmd_sweep(const ExperimentConfig& cfg);

std::vector<RunRecord> read_run_records(const std::string& path);

/// Stable content hash for cache keys.
std::string cache_key(const std::map<std::string, std::string>& fields);

}  // namespace pinnosc
