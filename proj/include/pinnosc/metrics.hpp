#pragma once

#include <span>

#include "pinnosc/grid.hpp"

namespace pinnosc {

/// ||pred - ref||_2 / ||ref||_2 over all entries; zero reference norm is an error.
double relative_l2(std::span<const double> pred, std::span<const double> ref);
/// 1 - sum (u - uhat)^2 / sum (u - umean)^2; constant reference is an error.
double explained_variance(std::span<const double> pred, std::span<const double> ref);
double max_error(std::span<const double> pred, std::span<const double> ref);
double mean_absolute_error(std::span<const double> pred, std::span<const double> ref);

struct MetricsRow {
    double rel_l2 = 0.0;
    double explained_var = 0.0;
    double max_err = 0.0;
    double mae = 0.0;
};

/// All four metrics over paired grids (shapes must match exactly).
MetricsRow evaluate_grids(const GridSolution& pred, const GridSolution& ref);

/// Magnitude grid sqrt(re^2 + im^2) of a 2-channel solution.
GridSolution magnitude_grid(const GridSolution& g);

}  // namespace pinnosc
