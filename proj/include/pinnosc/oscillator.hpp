#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pinnosc/grid.hpp"
#include "pinnosc/tape.hpp"

namespace pinnosc {

enum class CellKind { CoRNN, LEM, RNN, LSTM, GRU };

CellKind cell_kind_from_string(std::string_view s);
std::string to_string(CellKind kind);

struct OscillatorConfig {
    CellKind kind = CellKind::LEM;
    int input_size = 0;   // d_in = n_channels * k_x
    int hidden_size = 32; // m
    double delta_t = 0.01;
    double gamma = 1.0;    // CoRNN stiffness
    double epsilon = 0.01; // CoRNN damping
    bool explicit_damping = false;  // ablation: damp z_{n-1} instead of z_n
    double learning_rate = 1e-3;
    int epochs = 20000;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Recurrent cell weights plus the linear readout Q [d_in x m]; parameter
/// order is fixed per cell kind (names()), which training, checkpoints and the
/// scalar oracles all rely on.
struct OscillatorModel {
    OscillatorConfig cfg;
    std::vector<std::string> names;
    std::vector<Array> params;

    static OscillatorModel init(const OscillatorConfig& cfg);

    int index_of(std::string_view name) const;
    Array& param(std::string_view name) { return params[static_cast<std::size_t>(index_of(name))]; }
    const Array& param(std::string_view name) const {
        return params[static_cast<std::size_t>(index_of(name))];
    }
    std::vector<Array*> param_ptrs();
};

/// (y, z): z is the velocity state for CoRNN, the second state for LEM, the
/// cell state for LSTM, and unused for RNN/GRU. Zero-initialized at sequence
/// start.
struct HiddenState {
    Array y, z;
};
HiddenState zero_state(const OscillatorConfig& cfg);

/// Recorded step: weights come in as tape variables (leaves for training,
/// constants for rollout), in params order.
struct CellVars {
    std::vector<Var> p;
};
struct StateVars {
    Var y, z;
};
CellVars cell_leaves(Tape& tape, OscillatorModel& model);
CellVars cell_constants(Tape& tape, const OscillatorModel& model);
StateVars cell_step_vars(Tape& tape, const OscillatorModel& model, const CellVars& vars,
                         const StateVars& state, Var u);
Var cell_readout(Tape& tape, const OscillatorModel& model, const CellVars& vars, Var y);

/// Plain-value step (one application of the discretized update).
HiddenState cell_step(const OscillatorModel& model, const HiddenState& state, const Array& u);
/// Readout omega = Q y.
Array cell_output(const OscillatorModel& model, const HiddenState& state);

/// Teacher-forced training on one sequence: inputs rows 0..k_t-2, targets rows
/// 1..k_t-1, full-length BPTT, Adam. Returns per-epoch MSE history.
std::vector<double> train_sequence(OscillatorModel& model, const GridSolution& grid);
/// Same over several sequences with a state reset between sequences (used by
/// the parametric study).
std::vector<double> train_sequences(OscillatorModel& model,
                                    std::span<const GridSolution> grids);

struct RolloutOptions {
    bool cold_start = false;  // skip the warm-up pass over the training sequence
    /// Replaces the first autoregressive input (default: the final
    /// training-level profile).
    std::optional<std::vector<double>> first_input;
};

/// Warm-up over the seed sequence, then `horizon` autoregressive steps; each
/// output feeds back as the next input. Times continue the seed spacing.
GridSolution rollout(const OscillatorModel& model, const GridSolution& seed, int horizon,
                     const RolloutOptions& opts = {});

/// The time axis rollout emits: horizon steps continuing seed spacing.
std::vector<double> continuation_times(const std::vector<double>& seed_times, int horizon);

}  // namespace pinnosc
