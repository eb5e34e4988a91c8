#pragma once

#include <string>
#include <vector>

#include "pinnosc/array.hpp"

namespace pinnosc {

/// Solution values on a uniform space-time grid; the hand-off object between
/// the physics-informed stage and the sequence models. Row n holds the full
/// spatial profile at time level n with channels stacked: [ch0 at all x,
/// ch1 at all x, ...]. times are strictly increasing and uniformly spaced.
struct GridSolution {
    int k_t = 0;
    int k_x = 0;
    int n_channels = 1;
    std::vector<double> times;
    std::vector<double> xs;
    Array values;  // [k_t x n_channels*k_x]

    int row_width() const { return n_channels * k_x; }
    double at(int level, int channel, int ix) const {
        return values(level, channel * k_x + ix);
    }
    double& at(int level, int channel, int ix) { return values(level, channel * k_x + ix); }
    std::vector<double> row(int level) const;
    void check() const;  // invariants: spacing, finiteness, shape
};

std::vector<double> linspace(double lo, double hi, int n);

/// CSV round-trip with header `t,x,channel,value`; values printed with 17
/// significant digits so doubles survive exactly.
void write_grid_csv(const std::string& path, const GridSolution& grid);
GridSolution read_grid_csv(const std::string& path);

}  // namespace pinnosc
