#pragma once

#include <string>
#include <vector>

#include "pinnosc/experiment.hpp"

namespace pinnosc {

/// Emits, under out_dir: a metrics table CSV across records, per-record
/// space-time heatmaps (reference and prediction side by side, vertical marker
/// at the train/test boundary) and snapshot line plots (reference vs
/// prediction) at the benchmark's snapshot times. Figures are standalone SVG.
void cmd_report(const std::vector<RunRecord>& records, const std::string& out_dir);

/// Snapshot times used for each benchmark's figures.
std::vector<double> snapshot_times(const std::string& benchmark);

}  // namespace pinnosc
