#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pinnosc/oscillator.hpp"
#include "pinnosc/pde.hpp"
#include "pinnosc/pinn.hpp"
#include "pinnosc/refsolve.hpp"

namespace pinnosc {

/// Everything needed to run one end-to-end experiment reproducibly. Defaults
/// are per benchmark; a bare config with just `benchmark = ...` reproduces the
/// shipped setup for that problem.
struct ExperimentConfig {
    std::string benchmark = "burgers";
    std::uint64_t seed = 0;
    int replicates = 1;
    int threads = 1;

    // grid
    int k_t = 80;
    int k_x = 256;

    // pinn stage
    std::vector<int> hidden_widths = {20, 20, 20, 20};
    std::string pinn_optimizer = "lbfgs";
    int pinn_adam_epochs = 0;
    double pinn_adam_lr = 1e-3;
    int pinn_lbfgs_epochs = 3500;
    CollocationCounts colloc;
    PinnLossWeights loss_weights;
    bool plateau_stop = false;

    // oscillator stage
    CellKind cell = CellKind::LEM;
    int osc_hidden = 32;
    double osc_delta_t = 0.01;
    double osc_gamma = 1.0;
    double osc_epsilon = 0.01;
    double osc_lr = 1e-3;
    int osc_epochs = 20000;
    bool osc_explicit_damping = false;
    bool rollout_cold_start = false;

    // reference solver
    SolverParams solver;

    // physical parameter (burgers family)
    double nu = 0.01 / 3.141592653589793238462643383279502884;
    // parametric study
    std::vector<double> train_nus = {0.005, 0.010, 0.015, 0.020, 0.025, 0.030, 0.035};
    double test_nu = 0.05;

    // metrics
    bool metrics_train_window = false;

    // sweep
    std::string sweep_axis;  // "cells" | "delta_t" | "eps_gamma" | "nu"
    std::vector<double> sweep_values;
    std::vector<std::string> sweep_cells = {"rnn", "lstm", "gru", "cornn", "lem"};

    // paths
    std::string out_dir = "out";
    std::string cache_dir = "cache";

    int horizon() const;  // k_t / 4 extrapolation levels (4:1 split)
    double osc_lr_for(CellKind kind) const;
    int d_in(int n_channels) const { return n_channels * k_x; }
};

/// Benchmark-dependent defaults (grid sizes, optimizer schedule, epochs,
/// learning rates) with every stated hyperparameter as the shipped value.
ExperimentConfig default_config(const std::string& benchmark);

/// Flat `key = value` text file with dotted keys and '#' comments. Keys not
/// recognized raise ArgumentError. The benchmark key is applied first so that
/// later keys override benchmark defaults.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> config_to_map(const ExperimentConfig& cfg);

/// Per-cell default learning rates (LEM/CoRNN 0.001; GRU/LSTM/RNN 0.01;
/// Schrodinger LEM 0.01).
double default_cell_lr(const std::string& benchmark, CellKind kind);

}  // namespace pinnosc
