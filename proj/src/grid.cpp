#include "pinnosc/grid.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "pinnosc/errors.hpp"

namespace pinnosc {

std::vector<double> GridSolution::row(int level) const {
    const int w = row_width();
    std::vector<double> r(static_cast<std::size_t>(w));
    std::memcpy(r.data(), values.data() + static_cast<std::size_t>(level) * w,
                sizeof(double) * static_cast<std::size_t>(w));
    return r;
}

void GridSolution::check() const {
    if (k_t < 1 || k_x < 1 || n_channels < 1) throw DimensionError("grid: empty dimensions");
    if (static_cast<int>(times.size()) != k_t || static_cast<int>(xs.size()) != k_x)
        throw DimensionError("grid: axis length mismatch");
    if (values.rank() != 2 || values.dim(0) != k_t || values.dim(1) != row_width())
        throw DimensionError("grid: value shape mismatch");
    if (k_t > 1) {
        const double h = times[1] - times[0];
        for (int i = 1; i < k_t; ++i) {
            const double d = times[static_cast<std::size_t>(i)] - times[static_cast<std::size_t>(i - 1)];
            if (!(d > 0.0) || std::abs(d - h) > 1e-9 * std::max(1.0, std::abs(h)))
                throw DimensionError("grid: times not uniformly increasing");
        }
    }
    if (!values.all_finite()) throw NumericError("grid: non-finite value");
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + h * i;
    v[static_cast<std::size_t>(n - 1)] = hi;
    return v;
}

void write_grid_csv(const std::string& path, const GridSolution& grid) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ArgumentError("cannot open for writing: " + path);
    std::fprintf(f, "t,x,channel,value\n");
    for (int n = 0; n < grid.k_t; ++n)
        for (int c = 0; c < grid.n_channels; ++c)
            for (int i = 0; i < grid.k_x; ++i)
                std::fprintf(f, "%.17g,%.17g,%d,%.17g\n", grid.times[static_cast<std::size_t>(n)],
                             grid.xs[static_cast<std::size_t>(i)], c, grid.at(n, c, i));
    std::fclose(f);
}

GridSolution read_grid_csv(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "r");
    if (!f) throw ArgumentError("cannot open for reading: " + path);
    char line[256];
    if (!std::fgets(line, sizeof line, f)) {
        std::fclose(f);
        throw ArgumentError("empty grid csv: " + path);
    }
    std::vector<double> times, xs, vals;
    std::vector<int> chans;
    while (std::fgets(line, sizeof line, f)) {
        double t, x, v;
        int c;
        if (std::sscanf(line, "%lf,%lf,%d,%lf", &t, &x, &c, &v) != 4) continue;
        if (times.empty() || t != times.back()) times.push_back(t);
        if (times.size() == 1 && c == 0) xs.push_back(x);
        chans.push_back(c);
        vals.push_back(v);
    }
    std::fclose(f);
    GridSolution g;
    g.k_t = static_cast<int>(times.size());
    g.k_x = static_cast<int>(xs.size());
    if (g.k_t == 0 || g.k_x == 0) throw ArgumentError("malformed grid csv: " + path);
    g.n_channels = static_cast<int>(vals.size()) / (g.k_t * g.k_x);
    g.times = std::move(times);
    g.xs = std::move(xs);
    g.values = Array({g.k_t, g.n_channels * g.k_x}, std::move(vals));
    return g;
}

}  // namespace pinnosc
