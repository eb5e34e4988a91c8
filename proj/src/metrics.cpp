#include "pinnosc/metrics.hpp"

#include <cmath>

#include "pinnosc/errors.hpp"

namespace pinnosc {

namespace {
void check_pair(std::span<const double> pred, std::span<const double> ref) {
    if (pred.size() != ref.size() || ref.empty())
        throw DimensionError("metrics: pred/ref size mismatch");
}
}  // namespace

double relative_l2(std::span<const double> pred, std::span<const double> ref) {
    check_pair(pred, ref);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double d = pred[i] - ref[i];
        num += d * d;
        den += ref[i] * ref[i];
    }
    if (den == 0.0) throw ArgumentError("relative_l2: reference norm is zero");
    return std::sqrt(num) / std::sqrt(den);
}

double explained_variance(std::span<const double> pred, std::span<const double> ref) {
    check_pair(pred, ref);
    double mean = 0.0;
    for (double v : ref) mean += v;
    mean /= static_cast<double>(ref.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double d = ref[i] - pred[i];
        num += d * d;
        const double c = ref[i] - mean;
        den += c * c;
    }
    if (den == 0.0) throw ArgumentError("explained_variance: reference is constant");
    return 1.0 - num / den;
}

double max_error(std::span<const double> pred, std::span<const double> ref) {
    check_pair(pred, ref);
    double m = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i)
        m = std::max(m, std::abs(ref[i] - pred[i]));
    return m;
}

double mean_absolute_error(std::span<const double> pred, std::span<const double> ref) {
    check_pair(pred, ref);
    double s = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) s += std::abs(ref[i] - pred[i]);
    return s / static_cast<double>(ref.size());
}

MetricsRow evaluate_grids(const GridSolution& pred, const GridSolution& ref) {
    if (pred.k_t != ref.k_t || pred.k_x != ref.k_x || pred.n_channels != ref.n_channels)
        throw DimensionError("evaluate_grids: grid shape mismatch");
    MetricsRow row;
    row.rel_l2 = relative_l2(pred.values.values(), ref.values.values());
    row.explained_var = explained_variance(pred.values.values(), ref.values.values());
    row.max_err = max_error(pred.values.values(), ref.values.values());
    row.mae = mean_absolute_error(pred.values.values(), ref.values.values());
    return row;
}

GridSolution magnitude_grid(const GridSolution& g) {
    if (g.n_channels != 2) throw DimensionError("magnitude_grid: expected 2 channels");
    GridSolution out;
    out.k_t = g.k_t;
    out.k_x = g.k_x;
    out.n_channels = 1;
    out.times = g.times;
    out.xs = g.xs;
    out.values = Array({g.k_t, g.k_x});
    for (int n = 0; n < g.k_t; ++n)
        for (int i = 0; i < g.k_x; ++i)
            out.values(n, i) = std::hypot(g.at(n, 0, i), g.at(n, 1, i));
    return out;
}

}  // namespace pinnosc
