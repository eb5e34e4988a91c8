#include "pinnosc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "pinnosc/rng.hpp"

namespace pinnosc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json metrics_json(const MetricsRow& m) {
    return json{{"relative_l2", m.rel_l2},
                {"explained_variance", m.explained_var},
                {"max_error", m.max_err},
                {"mean_absolute_error", m.mae}};
}

MetricsRow metrics_from_json(const json& j) {
    MetricsRow m;
    m.rel_l2 = j.at("relative_l2").get<double>();
    m.explained_var = j.at("explained_variance").get<double>();
    m.max_err = j.at("max_error").get<double>();
    m.mae = j.at("mean_absolute_error").get<double>();
    return m;
}

std::string resolved_cache_dir(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("PINNOSC_CACHE_DIR"); env && *env) return env;
    return cfg.cache_dir;
}

/// Reference cache key: everything the solver output depends on.
std::map<std::string, std::string> reference_key_fields(const ExperimentConfig& cfg,
                                                        double nu) {
    char nub[32];
    std::snprintf(nub, sizeof nub, "%.17g", nu);
    return {{"benchmark", cfg.benchmark},
            {"nu", nub},
            {"k_x", std::to_string(cfg.k_x)},
            {"k_t", std::to_string(cfg.k_t)},
            {"modes", std::to_string(cfg.solver.modes)},
            {"dt_max", [&] {
                 char b[32];
                 std::snprintf(b, sizeof b, "%.17g", cfg.solver.dt_max);
                 return std::string(b);
             }()}};
}

std::map<std::string, std::string> pinn_key_fields(const ExperimentConfig& cfg, double nu,
                                                   std::uint64_t seed) {
    auto kv = reference_key_fields(cfg, nu);
    kv.erase("modes");
    kv.erase("dt_max");
    kv.erase("k_x");
    kv.erase("k_t");
    kv["seed"] = std::to_string(seed);
    std::string widths;
    for (int w : cfg.hidden_widths) widths += std::to_string(w) + ",";
    kv["hidden"] = widths;
    kv["optimizer"] = cfg.pinn_optimizer;
    kv["adam_epochs"] = std::to_string(cfg.pinn_adam_epochs);
    char b[96];
    std::snprintf(b, sizeof b, "%.17g", cfg.pinn_adam_lr);
    kv["adam_lr"] = b;
    kv["lbfgs_epochs"] = std::to_string(cfg.pinn_lbfgs_epochs);
    kv["colloc"] = std::to_string(cfg.colloc.residual) + "/" +
                   std::to_string(cfg.colloc.initial) + "/" +
                   std::to_string(cfg.colloc.boundary);
    std::snprintf(b, sizeof b, "%.17g/%.17g/%.17g", cfg.loss_weights.residual,
                  cfg.loss_weights.ic, cfg.loss_weights.bc);
    kv["weights"] = b;
    kv["plateau"] = cfg.plateau_stop ? "1" : "0";
    return kv;
}

}  // namespace

std::string cache_key(const std::map<std::string, std::string>& fields) {
    std::string s;
    for (const auto& [k, v] : fields) {
        s += k;
        s += '=';
        s += v;
        s += '\n';
    }
    const std::uint64_t h = fnv1a64(s);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TimeAxes make_time_axes(const ExperimentConfig& cfg, const DomainSpec& dom) {
    TimeAxes ax;
    ax.train = linspace(0.0, dom.t_train_end, cfg.k_t);
    ax.test = continuation_times(ax.train, cfg.horizon());
    ax.full = ax.train;
    ax.full.insert(ax.full.end(), ax.test.begin(), ax.test.end());
    return ax;
}

GridSolution reference_full(const ExperimentConfig& cfg, double nu) {
    auto [spec, dom] = make_benchmark(cfg.benchmark, nu);
    const TimeAxes ax = make_time_axes(cfg, dom);
    const std::vector<double> xs = linspace(dom.x_min, dom.x_max, cfg.k_x);

    const std::string dir = resolved_cache_dir(cfg);
    fs::create_directories(dir);
    const std::string path =
        dir + "/ref_" + cache_key(reference_key_fields(cfg, nu)) + ".csv";
    if (fs::exists(path)) return read_grid_csv(path);
    GridSolution g = solve_reference(spec, dom, xs, ax.full, cfg.solver);
    write_grid_csv(path, g);
    return g;
}

MlpModel pinn_stage(const ExperimentConfig& cfg, double nu, std::uint64_t seed) {
    auto [spec, dom] = make_benchmark(cfg.benchmark, nu);
    const std::string dir = resolved_cache_dir(cfg);
    fs::create_directories(dir);
    const std::string path = dir + "/pinn_" + cache_key(pinn_key_fields(cfg, nu, seed)) + ".ckpt";
    if (fs::exists(path)) return load_mlp(path);

    std::vector<int> widths = {2};
    widths.insert(widths.end(), cfg.hidden_widths.begin(), cfg.hidden_widths.end());
    widths.push_back(spec.n_channels);
    MlpModel model = MlpModel::init(widths, seed);
    CollocationSet colloc = sample_collocation(spec, dom, cfg.colloc, seed);
    PinnTrainConfig tc;
    tc.optimizer = cfg.pinn_optimizer;
    tc.adam_epochs = cfg.pinn_adam_epochs;
    tc.adam_lr = cfg.pinn_adam_lr;
    tc.lbfgs_epochs = cfg.pinn_lbfgs_epochs;
    tc.weights = cfg.loss_weights;
    tc.plateau_stop = cfg.plateau_stop;
    tc.threads = cfg.threads;
    auto history = train_pinn(model, spec, dom, colloc, tc);
    save_mlp(path, model);
    write_loss_history(path + ".loss.csv", history);
    return model;
}

GridSolution infer_stage(const ExperimentConfig& cfg, const MlpModel& model, double nu) {
    auto [spec, dom] = make_benchmark(cfg.benchmark, nu);
    return infer_grid(model, dom, cfg.k_t, cfg.k_x, 0.0, dom.t_train_end);
}

OscillatorModel oscillator_stage(const ExperimentConfig& cfg, const GridSolution& seed_grid,
                                 std::uint64_t seed) {
    OscillatorConfig oc;
    oc.kind = cfg.cell;
    oc.input_size = seed_grid.row_width();
    oc.hidden_size = cfg.osc_hidden;
    oc.delta_t = cfg.osc_delta_t;
    oc.gamma = cfg.osc_gamma;
    oc.epsilon = cfg.osc_epsilon;
    oc.explicit_damping = cfg.osc_explicit_damping;
    oc.learning_rate = cfg.osc_lr_for(cfg.cell);
    oc.epochs = cfg.osc_epochs;
    oc.seed = seed;
    OscillatorModel model = OscillatorModel::init(oc);
    train_sequence(model, seed_grid);
    return model;
}

namespace {

GridSolution slice_rows(const GridSolution& g, int from, int count) {
    GridSolution out;
    out.k_t = count;
    out.k_x = g.k_x;
    out.n_channels = g.n_channels;
    out.xs = g.xs;
    out.times.assign(g.times.begin() + from, g.times.begin() + from + count);
    out.values = Array({count, g.row_width()});
    for (int n = 0; n < count; ++n)
        for (int j = 0; j < g.row_width(); ++j) out.values(n, j) = g.values(from + n, j);
    return out;
}

void append_record(const std::string& out_dir, const RunRecord& rec) {
    std::ofstream f(out_dir + "/runs.jsonl", std::ios::app);
    if (!f) throw ArgumentError("cannot append to " + out_dir + "/runs.jsonl");
    f << rec.to_json() << "\n";
}

}  // namespace

RunRecord cmd_run(const ExperimentConfig& cfg) {
    auto [spec, dom] = make_benchmark(cfg.benchmark, cfg.nu);
    const int horizon = cfg.horizon();
    fs::create_directories(cfg.out_dir);
    RunRecord rec;
    rec.config = config_to_map(cfg);
    rec.run_id = cfg.benchmark + "_" + to_string(cfg.cell) + "_seed" + std::to_string(cfg.seed);
    const std::string base = cfg.out_dir + "/" + rec.run_id;
    fs::create_directories(base);

    auto t0 = std::chrono::steady_clock::now();
    GridSolution ref_full = reference_full(cfg, cfg.nu);
    rec.times.reference = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    MlpModel pinn = pinn_stage(cfg, cfg.nu, cfg.seed);
    rec.times.pinn = seconds_since(t0);
    rec.pinn_checkpoint = base + "/pinn.ckpt";
    save_mlp(rec.pinn_checkpoint, pinn);

    t0 = std::chrono::steady_clock::now();
    GridSolution train_grid = infer_stage(cfg, pinn, cfg.nu);
    rec.times.infer = seconds_since(t0);
    rec.train_grid_csv = base + "/pinn_x1.csv";
    write_grid_csv(rec.train_grid_csv, train_grid);

    t0 = std::chrono::steady_clock::now();
    OscillatorModel osc = oscillator_stage(cfg, train_grid, cfg.seed);
    rec.times.oscillator = seconds_since(t0);
    rec.osc_checkpoint = base + "/oscillator.ckpt";
    save_oscillator(rec.osc_checkpoint, osc);

    t0 = std::chrono::steady_clock::now();
    RolloutOptions ro;
    ro.cold_start = cfg.rollout_cold_start;
    GridSolution pred = rollout(osc, train_grid, horizon, ro);
    rec.times.rollout = seconds_since(t0);
    rec.pred_grid_csv = base + "/pred_x2.csv";
    write_grid_csv(rec.pred_grid_csv, pred);

    t0 = std::chrono::steady_clock::now();
    GridSolution ref_x2 = slice_rows(ref_full, cfg.k_t, horizon);
    rec.ref_grid_csv = base + "/ref_x2.csv";
    write_grid_csv(rec.ref_grid_csv, ref_x2);
    rec.metrics = evaluate_grids(pred, ref_x2);
    if (cfg.metrics_train_window) {
        GridSolution ref_x1 = slice_rows(ref_full, 0, cfg.k_t);
        rec.metrics_train = evaluate_grids(train_grid, ref_x1);
        rec.has_train_metrics = true;
    }
    if (spec.n_channels == 2) {
        rec.metrics_magnitude = evaluate_grids(magnitude_grid(pred), magnitude_grid(ref_x2));
        rec.has_magnitude = true;
    }
    rec.times.evaluate = seconds_since(t0);

    append_record(cfg.out_dir, rec);
    return rec;
}

namespace {

/// Parametric-space study: one oscillator trained across sequences at the
/// training viscosities, rolled out at the held-out viscosity.
RunRecord run_parametric(const ExperimentConfig& cfg, std::uint64_t seed) {
    ExperimentConfig c = cfg;
    c.seed = seed;
    fs::create_directories(c.out_dir);
    RunRecord rec;
    rec.config = config_to_map(c);
    rec.run_id = "parametric_" + to_string(c.cell) + "_seed" + std::to_string(seed);
    const std::string base = c.out_dir + "/" + rec.run_id;
    fs::create_directories(base);

    auto t0 = std::chrono::steady_clock::now();
    std::vector<GridSolution> sequences;
    for (std::size_t i = 0; i < c.train_nus.size(); ++i) {
        MlpModel m = pinn_stage(c, c.train_nus[i], seed);
        sequences.push_back(infer_stage(c, m, c.train_nus[i]));
    }
    MlpModel test_pinn = pinn_stage(c, c.test_nu, seed);
    rec.times.pinn = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    GridSolution test_seed_grid = infer_stage(c, test_pinn, c.test_nu);
    rec.times.infer = seconds_since(t0);
    rec.train_grid_csv = base + "/pinn_x1.csv";
    write_grid_csv(rec.train_grid_csv, test_seed_grid);
    rec.pinn_checkpoint = base + "/pinn.ckpt";
    save_mlp(rec.pinn_checkpoint, test_pinn);

    t0 = std::chrono::steady_clock::now();
    OscillatorConfig oc;
    oc.kind = c.cell;
    oc.input_size = test_seed_grid.row_width();
    oc.hidden_size = c.osc_hidden;
    oc.delta_t = c.osc_delta_t;
    oc.gamma = c.osc_gamma;
    oc.epsilon = c.osc_epsilon;
    oc.explicit_damping = c.osc_explicit_damping;
    oc.learning_rate = c.osc_lr_for(c.cell);
    oc.epochs = c.osc_epochs;
    oc.seed = seed;
    OscillatorModel osc = OscillatorModel::init(oc);
    train_sequences(osc, sequences);
    rec.times.oscillator = seconds_since(t0);
    rec.osc_checkpoint = base + "/oscillator.ckpt";
    save_oscillator(rec.osc_checkpoint, osc);

    t0 = std::chrono::steady_clock::now();
    RolloutOptions ro;
    ro.cold_start = c.rollout_cold_start;
    GridSolution pred = rollout(osc, test_seed_grid, c.horizon(), ro);
    rec.times.rollout = seconds_since(t0);
    rec.pred_grid_csv = base + "/pred_x2.csv";
    write_grid_csv(rec.pred_grid_csv, pred);

    t0 = std::chrono::steady_clock::now();
    GridSolution ref = reference_full(c, c.test_nu);
    GridSolution ref_x2 = slice_rows(ref, c.k_t, c.horizon());
    rec.ref_grid_csv = base + "/ref_x2.csv";
    write_grid_csv(rec.ref_grid_csv, ref_x2);
    rec.metrics = evaluate_grids(pred, ref_x2);
    rec.times.evaluate = seconds_since(t0);

    append_record(c.out_dir, rec);
    return rec;
}

void write_sweep_tables(const ExperimentConfig& cfg, const std::vector<RunRecord>& records,
                        const std::vector<std::string>& labels) {
    fs::create_directories(cfg.out_dir);
    const std::string rows_path = cfg.out_dir + "/sweep_rows.csv";
    std::FILE* f = std::fopen(rows_path.c_str(), "w");
    if (!f) throw ArgumentError("cannot write " + rows_path);
    std::fprintf(f, "point,run_id,relative_l2,explained_variance,max_error,mae\n");
    for (std::size_t i = 0; i < records.size(); ++i)
        std::fprintf(f, "%s,%s,%.17g,%.17g,%.17g,%.17g\n", labels[i].c_str(),
                     records[i].run_id.c_str(), records[i].metrics.rel_l2,
                     records[i].metrics.explained_var, records[i].metrics.max_err,
                     records[i].metrics.mae);
    std::fclose(f);

    // Aggregate mean/std by point label.
    std::vector<std::string> uniq;
    for (const auto& l : labels)
        if (std::find(uniq.begin(), uniq.end(), l) == uniq.end()) uniq.push_back(l);
    const std::string agg_path = cfg.out_dir + "/sweep_aggregate.csv";
    f = std::fopen(agg_path.c_str(), "w");
    if (!f) throw ArgumentError("cannot write " + agg_path);
    std::fprintf(f,
                 "point,n,relative_l2_mean,relative_l2_std,explained_variance_mean,"
                 "explained_variance_std,max_error_mean,max_error_std,mae_mean,mae_std\n");
    for (const auto& l : uniq) {
        std::vector<const MetricsRow*> rows;
        for (std::size_t i = 0; i < records.size(); ++i)
            if (labels[i] == l) rows.push_back(&records[i].metrics);
        auto stat = [&](auto get) {
            double mean = 0.0;
            for (auto* r : rows) mean += get(*r);
            mean /= static_cast<double>(rows.size());
            double var = 0.0;
            for (auto* r : rows) {
                const double d = get(*r) - mean;
                var += d * d;
            }
            var = rows.size() > 1 ? var / static_cast<double>(rows.size() - 1) : 0.0;
            return std::pair<double, double>(mean, std::sqrt(var));
        };
        auto [m1, s1] = stat([](const MetricsRow& r) { return r.rel_l2; });
        auto [m2, s2] = stat([](const MetricsRow& r) { return r.explained_var; });
        auto [m3, s3] = stat([](const MetricsRow& r) { return r.max_err; });
        auto [m4, s4] = stat([](const MetricsRow& r) { return r.mae; });
        std::fprintf(f, "%s,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", l.c_str(),
                     rows.size(), m1, s1, m2, s2, m3, s3, m4, s4);
    }
    std::fclose(f);
}

}  // namespace

std::vector<RunRecord> cmd_sweep(const ExperimentConfig& cfg) {
    struct Task {
        ExperimentConfig cfg;
        std::string label;
        bool parametric = false;
        std::uint64_t seed = 0;
    };
    std::vector<Task> tasks;
    const std::string axis = cfg.sweep_axis.empty() ? "cells" : cfg.sweep_axis;
    for (int rep = 0; rep < cfg.replicates; ++rep) {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(rep);
        if (axis == "cells") {
            for (const auto& cell : cfg.sweep_cells) {
                ExperimentConfig c = cfg;
                c.cell = cell_kind_from_string(cell);
                c.seed = seed;
                tasks.push_back({std::move(c), cell, false, seed});
            }
        } else if (axis == "delta_t") {
            std::vector<double> values =
                cfg.sweep_values.empty() ? std::vector<double>{0.1, 0.3, 0.5, 0.7, 0.9}
                                         : cfg.sweep_values;
            for (const auto& cell : cfg.sweep_cells)
                for (double dt : values) {
                    ExperimentConfig c = cfg;
                    c.cell = cell_kind_from_string(cell);
                    c.osc_delta_t = dt;
                    c.seed = seed;
                    char label[64];
                    std::snprintf(label, sizeof label, "%s_dt%.3g", cell.c_str(), dt);
                    tasks.push_back({std::move(c), label, false, seed});
                }
        } else if (axis == "eps_gamma") {
            std::vector<double> values =
                cfg.sweep_values.empty() ? std::vector<double>{0.5, 1.0, 1.5}
                                         : cfg.sweep_values;
            for (double eps : values)
                for (double gamma : values) {
                    ExperimentConfig c = cfg;
                    c.cell = CellKind::CoRNN;
                    c.osc_epsilon = eps;
                    c.osc_gamma = gamma;
                    c.seed = seed;
                    char label[64];
                    std::snprintf(label, sizeof label, "eps%.3g_gamma%.3g", eps, gamma);
                    tasks.push_back({std::move(c), label, false, seed});
                }
        } else if (axis == "nu") {
            ExperimentConfig c = cfg;
            c.seed = seed;
            tasks.push_back({std::move(c), "nu_holdout", true, seed});
        } else {
            throw ArgumentError("sweep: unknown axis " + axis);
        }
    }
    if (tasks.empty()) throw ArgumentError("sweep: empty axis");

    // Shared-stage prepass: make sure cached reference grids and networks
    // exist before runs execute (possibly concurrently).
    for (const auto& t : tasks) {
        if (t.parametric) {
            for (double nu : t.cfg.train_nus) {
                (void)reference_full(t.cfg, nu);
                (void)pinn_stage(t.cfg, nu, t.seed);
            }
            (void)reference_full(t.cfg, t.cfg.test_nu);
            (void)pinn_stage(t.cfg, t.cfg.test_nu, t.seed);
        } else {
            (void)reference_full(t.cfg, t.cfg.nu);
            (void)pinn_stage(t.cfg, t.cfg.nu, t.seed);
        }
    }

    std::vector<RunRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            records[i] = tasks[i].parametric ? run_parametric(tasks[i].cfg, tasks[i].seed)
                                             : cmd_run(tasks[i].cfg);
        }
    };
    const int nt = std::max(1, std::min<int>(cfg.threads, static_cast<int>(tasks.size())));
    if (nt <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<std::string> labels;
    for (const auto& t : tasks) labels.push_back(t.label);
    write_sweep_tables(cfg, records, labels);
    return records;
}

std::string RunRecord::to_json() const {
    json j;
    j["run_id"] = run_id;
    j["version"] = version;
    j["config"] = config;
    j["pinn_checkpoint"] = pinn_checkpoint;
    j["osc_checkpoint"] = osc_checkpoint;
    j["train_grid_csv"] = train_grid_csv;
    j["pred_grid_csv"] = pred_grid_csv;
    j["ref_grid_csv"] = ref_grid_csv;
    j["metrics"] = metrics_json(metrics);
    if (has_train_metrics) j["metrics_train"] = metrics_json(metrics_train);
    if (has_magnitude) j["metrics_magnitude"] = metrics_json(metrics_magnitude);
    j["times"] = {{"reference", times.reference}, {"pinn", times.pinn},
                  {"infer", times.infer},         {"oscillator", times.oscillator},
                  {"rollout", times.rollout},     {"evaluate", times.evaluate}};
    return j.dump();
}

RunRecord RunRecord::from_json(const std::string& line) {
    const json j = json::parse(line);
    RunRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    r.pinn_checkpoint = j.at("pinn_checkpoint").get<std::string>();
    r.osc_checkpoint = j.at("osc_checkpoint").get<std::string>();
    r.train_grid_csv = j.at("train_grid_csv").get<std::string>();
    r.pred_grid_csv = j.at("pred_grid_csv").get<std::string>();
    r.ref_grid_csv = j.at("ref_grid_csv").get<std::string>();
    r.metrics = metrics_from_json(j.at("metrics"));
    if (j.contains("metrics_train")) {
        r.metrics_train = metrics_from_json(j.at("metrics_train"));
        r.has_train_metrics = true;
    }
    if (j.contains("metrics_magnitude")) {
        r.metrics_magnitude = metrics_from_json(j.at("metrics_magnitude"));
        r.has_magnitude = true;
    }
    const auto& t = j.at("times");
    r.times = {t.at("reference"), t.at("pinn"),    t.at("infer"),
               t.at("oscillator"), t.at("rollout"), t.at("evaluate")};
    return r;
}

std::vector<RunRecord> read_run_records(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ArgumentError("cannot open run records: " + path);
    std::vector<RunRecord> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        out.push_back(RunRecord::from_json(line));
    }
    return out;
}

}  // namespace pinnosc
