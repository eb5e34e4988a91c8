#include "pinnosc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pinnosc {

namespace fs = std::filesystem;

namespace {

std::string color_diverging(double v) {
    // blue (-1) -> white (0) -> red (+1)
    v = std::clamp(v, -1.0, 1.0);
    int r, g, b;
    if (v < 0) {
        const double t = 1.0 + v;
        r = static_cast<int>(255 * t);
        g = static_cast<int>(255 * t);
        b = 255;
    } else {
        const double t = 1.0 - v;
        r = 255;
        g = static_cast<int>(255 * t);
        b = static_cast<int>(255 * t);
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

/// One filled space-time panel at origin (ox, oy); x axis = time.
void heatmap_panel(std::ostream& svg, const GridSolution& g, double ox, double oy, double w,
                   double h, double vmax, const std::string& title, double t_mark) {
    const double cw = w / g.k_t, chh = h / g.k_x;
    for (int n = 0; n < g.k_t; ++n)
        for (int i = 0; i < g.k_x; ++i) {
            const double v = g.n_channels == 2 ? std::hypot(g.at(n, 0, i), g.at(n, 1, i))
                                               : g.at(n, 0, i);
            svg << "<rect x='" << ox + n * cw << "' y='" << oy + (g.k_x - 1 - i) * chh
                << "' width='" << cw + 0.5 << "' height='" << chh + 0.5 << "' fill='"
                << color_diverging(v / vmax) << "'/>\n";
        }
    if (t_mark > g.times.front() && t_mark < g.times.back()) {
        const double frac = (t_mark - g.times.front()) / (g.times.back() - g.times.front());
        const double xm = ox + frac * w;
        svg << "<line x1='" << xm << "' y1='" << oy << "' x2='" << xm << "' y2='" << oy + h
            << "' stroke='black' stroke-width='2'/>\n";
    }
    svg << "<rect x='" << ox << "' y='" << oy << "' width='" << w << "' height='" << h
        << "' fill='none' stroke='black'/>\n";
    svg << "<text x='" << ox + w / 2 << "' y='" << oy - 6
        << "' text-anchor='middle' font-size='13'>" << title << "</text>\n";
}

GridSolution concat_rows(const GridSolution& a, const GridSolution& b) {
    GridSolution out = a;
    out.k_t = a.k_t + b.k_t;
    out.times.insert(out.times.end(), b.times.begin(), b.times.end());
    out.values = Array({out.k_t, a.row_width()});
    for (int n = 0; n < a.k_t; ++n)
        for (int j = 0; j < a.row_width(); ++j) out.values(n, j) = a.values(n, j);
    for (int n = 0; n < b.k_t; ++n)
        for (int j = 0; j < a.row_width(); ++j) out.values(a.k_t + n, j) = b.values(n, j);
    return out;
}

void polyline(std::ostream& svg, const std::vector<double>& xs, const std::vector<double>& ys,
              double ox, double oy, double w, double h, double ymin, double ymax,
              const std::string& color, double stroke) {
    svg << "<polyline fill='none' stroke='" << color << "' stroke-width='" << stroke
        << "' points='";
    const double xmin = xs.front(), xmax = xs.back();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double px = ox + (xs[i] - xmin) / (xmax - xmin) * w;
        const double py = oy + h - (ys[i] - ymin) / (ymax - ymin) * h;
        svg << px << "," << py << " ";
    }
    svg << "'/>\n";
}

std::vector<double> channel_row(const GridSolution& g, int level) {
    std::vector<double> v(static_cast<std::size_t>(g.k_x));
    for (int i = 0; i < g.k_x; ++i)
        v[static_cast<std::size_t>(i)] = g.n_channels == 2
                                             ? std::hypot(g.at(level, 0, i), g.at(level, 1, i))
                                             : g.at(level, 0, i);
    return v;
}

void require_file(const std::string& path, const std::string& run_id) {
    if (!fs::exists(path))
        throw ArgumentError("report: missing grid " + path + " for record " + run_id);
}

}  // namespace

std::vector<double> snapshot_times(const std::string& benchmark) {
    if (benchmark == "allen_cahn") return {0.81, 0.99};
    if (benchmark == "schrodinger") return {1.28, 1.5};
    return {0.83, 0.98};  // burgers family, euler_bernoulli
}

void cmd_report(const std::vector<RunRecord>& records, const std::string& out_dir) {
    if (records.empty()) throw ArgumentError("report: no run records");
    fs::create_directories(out_dir);

    // Metrics table.
    {
        std::FILE* f = std::fopen((out_dir + "/report_metrics.csv").c_str(), "w");
        if (!f) throw ArgumentError("report: cannot write metrics table");
        std::fprintf(f,
                     "run_id,benchmark,cell,seed,relative_l2,explained_variance,max_error,"
                     "mean_absolute_error\n");
        for (const auto& r : records)
            std::fprintf(f, "%s,%s,%s,%s,%.17g,%.17g,%.17g,%.17g\n", r.run_id.c_str(),
                         r.config.at("benchmark").c_str(),
                         r.config.at("oscillator.cell").c_str(), r.config.at("seed").c_str(),
                         r.metrics.rel_l2, r.metrics.explained_var, r.metrics.max_err,
                         r.metrics.mae);
        std::fclose(f);
    }

    for (const auto& r : records) {
        require_file(r.train_grid_csv, r.run_id);
        require_file(r.pred_grid_csv, r.run_id);
        require_file(r.ref_grid_csv, r.run_id);
        const GridSolution train = read_grid_csv(r.train_grid_csv);
        const GridSolution pred = read_grid_csv(r.pred_grid_csv);
        const GridSolution ref_x2 = read_grid_csv(r.ref_grid_csv);
        const std::string benchmark = r.config.at("benchmark");
        const double t_train_end = train.times.back();

        // Side-by-side heatmaps over the full window: both panels share the
        // PINN output on X1; they differ on X2 (reference vs rollout).
        const GridSolution pred_full = concat_rows(train, pred);
        const GridSolution ref_full = concat_rows(train, ref_x2);
        double vmax = 1e-12;
        for (double v : pred_full.values.values()) vmax = std::max(vmax, std::abs(v));
        for (double v : ref_full.values.values()) vmax = std::max(vmax, std::abs(v));
        std::ofstream svg(out_dir + "/" + r.run_id + "_heatmap.svg");
        const double W = 430, H = 260, pw = 180, ph = 200;
        svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
            << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
        heatmap_panel(svg, ref_full, 25, 30, pw, ph, vmax, "reference", t_train_end);
        heatmap_panel(svg, pred_full, 25 + pw + 30, 30, pw, ph, vmax, "prediction",
                      t_train_end);
        svg << "<text x='" << W / 2 << "' y='" << H - 8
            << "' text-anchor='middle' font-size='12'>" << r.run_id
            << " (x vertical, t horizontal; marker at t = " << t_train_end << ")</text>\n";
        svg << "</svg>\n";

        // Snapshot line plots at the benchmark's times (nearest grid level).
        for (double t : snapshot_times(benchmark)) {
            int best = 0;
            for (int n = 1; n < pred.k_t; ++n)
                if (std::abs(pred.times[static_cast<std::size_t>(n)] - t) <
                    std::abs(pred.times[static_cast<std::size_t>(best)] - t))
                    best = n;
            const auto pv = channel_row(pred, best);
            const auto rv = channel_row(ref_x2, best);
            double ymin = 1e30, ymax = -1e30;
            for (double v : pv) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
            for (double v : rv) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
            if (ymax - ymin < 1e-12) { ymax += 1.0; ymin -= 1.0; }
            const double pad = 0.08 * (ymax - ymin);
            ymin -= pad;
            ymax += pad;
            char name[64];
            std::snprintf(name, sizeof name, "_snapshot_t%.2f.svg", t);
            std::ofstream s2(out_dir + "/" + r.run_id + name);
            s2 << "<svg xmlns='http://www.w3.org/2000/svg' width='320' height='260'>\n"
               << "<rect width='100%' height='100%' fill='white'/>\n";
            polyline(s2, pred.xs, rv, 30, 30, 260, 190, ymin, ymax, "blue", 2.0);
            polyline(s2, pred.xs, pv, 30, 30, 260, 190, ymin, ymax, "red", 1.5);
            s2 << "<rect x='30' y='30' width='260' height='190' fill='none' stroke='black'/>\n";
            s2 << "<text x='160' y='20' text-anchor='middle' font-size='12'>" << r.run_id
               << " t=" << pred.times[static_cast<std::size_t>(best)]
               << " (blue reference, red prediction)</text>\n";
            s2 << "</svg>\n";
        }
    }
}

}  // namespace pinnosc
