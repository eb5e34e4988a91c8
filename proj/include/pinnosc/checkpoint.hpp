#pragma once

#include <string>

#include "pinnosc/mlp.hpp"
#include "pinnosc/oscillator.hpp"

namespace pinnosc {

/// Versioned binary checkpoints: magic + version + typed metadata, then named
/// parameter arrays as little-endian float64 with explicit shapes. Reloading
/// reproduces the model exactly (bit-for-bit parameters and hyperparameters).
void save_mlp(const std::string& path, const MlpModel& model);
MlpModel load_mlp(const std::string& path);

void save_oscillator(const std::string& path, const OscillatorModel& model);
OscillatorModel load_oscillator(const std::string& path);

}  // namespace pinnosc
