#include "pinnosc/pinn.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "pinnosc/optim.hpp"

namespace pinnosc {

namespace {

constexpr int kChunk = 256;

struct Chunk {
    Tape tape;
    Var objective;                 // weighted contribution to the total loss
    std::vector<Var> raw_sums;     // unweighted sq-sums feeding the report
    std::vector<Var> leaves;       // model parameters, params() order
    int term = 0;                  // 0 residual, 1 ic, 2 bc
    std::vector<double> grad_slot;
};

// Populate per-channel derivative handles from a recorded jet batch.
std::vector<FieldDerivs<Expr>> extract_derivs(Tape& tape, const PdeSpec& spec, Var out,
                                              std::span<const double> xs,
                                              std::span<const double> ts) {
    std::vector<FieldDerivs<Expr>> d(static_cast<std::size_t>(spec.n_channels));
    for (int c = 0; c < spec.n_channels; ++c) {
        Var ch = tape.col(out, c);
        auto& fd = d[static_cast<std::size_t>(c)];
        fd.u = {&tape, tape.extract(ch, 0, 0)};
        if (spec.reads(1, 0)) fd.ux = {&tape, tape.extract(ch, 1, 0)};
        if (spec.reads(2, 0)) fd.uxx = {&tape, tape.extract(ch, 2, 0)};
        if (spec.reads(4, 0)) fd.uxxxx = {&tape, tape.extract(ch, 4, 0)};
        if (spec.reads(0, 1)) fd.ut = {&tape, tape.extract(ch, 0, 1)};
        if (spec.reads(0, 2)) fd.utt = {&tape, tape.extract(ch, 0, 2)};
        if (spec.source) {
            Array src({static_cast<int>(xs.size())});
            for (std::size_t i = 0; i < xs.size(); ++i)
                src[i] = spec.source(xs[i], ts[i], c);
            fd.source = {&tape, tape.constant(src)};
        }
    }
    return d;
}

Var input_jets(Tape& tape, const JetSpecPtr& spec, std::span<const double> xs,
               std::span<const double> ts) {
    const int n = static_cast<int>(xs.size());
    const int nc = spec->count();
    const int px = spec->pos(1, 0), pt = spec->pos(0, 1);
    std::vector<double> in(static_cast<std::size_t>(n) * 2 * nc, 0.0);
    for (int p = 0; p < n; ++p) {
        double* xc = in.data() + static_cast<std::size_t>(p) * 2 * nc;
        xc[0] = xs[static_cast<std::size_t>(p)];
        xc[nc] = ts[static_cast<std::size_t>(p)];
        if (px > 0) xc[px] = 1.0;
        if (pt > 0) xc[nc + pt] = 1.0;
    }
    return tape.constant_jets({n, 2}, spec, std::move(in));
}

Var chain_add(Tape& tape, const std::vector<Var>& terms) {
    Var acc = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) acc = tape.add(acc, terms[i]);
    return acc;
}

}  // namespace

struct PinnLossEngine::Impl {
    MlpModel* model;
    const PdeSpec* spec;
    PinnLossWeights weights;
    int threads = 1;
    std::vector<Chunk> chunks;
    double res_norm = 1.0, ic_norm = 1.0, bc_norm = 1.0;
    std::vector<double> flat_grad;
    std::size_t dim = 0;

    void build_residual_chunks(const DomainSpec& domain, const CollocationSet& colloc);
    void build_ic_chunks(const CollocationSet& colloc);
    void build_bc_chunks(const DomainSpec& domain, const CollocationSet& colloc);
    void add_chunk(Chunk&& c) { chunks.push_back(std::move(c)); }
    PinnLossReport run();
};

void PinnLossEngine::Impl::build_residual_chunks(const DomainSpec& domain,
                                                 const CollocationSet& colloc) {
    (void)domain;
    const auto& pts = colloc.residual_points;
    if (pts.empty()) return;
    const int C = spec->n_channels;
    res_norm = static_cast<double>(pts.size()) * C;
    JetSpecPtr js = spec->residual_jet_spec();
    for (std::size_t base = 0; base < pts.size(); base += kChunk) {
        const std::size_t n = std::min<std::size_t>(kChunk, pts.size() - base);
        std::vector<double> xs(n), ts(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = pts[base + i].first;
            ts[i] = pts[base + i].second;
        }
        Chunk ch;
        ch.term = 0;
        Var input = input_jets(ch.tape, js, xs, ts);
        MlpVars mv = mlp_leaves(ch.tape, *model);
        for (std::size_t l = 0; l < mv.w.size(); ++l) {
            ch.leaves.push_back(mv.w[l]);
            ch.leaves.push_back(mv.b[l]);
        }
        Var out = mlp_apply(ch.tape, *model, mv, input);
        auto d = extract_derivs(ch.tape, *spec, out, xs, ts);
        auto rs = spec->residual_expr(d);
        std::vector<Var> sums;
        for (auto& r : rs)
            sums.push_back(ch.tape.sq_diff_sum(r.v, Array({static_cast<int>(n)})));
        Var total = chain_add(ch.tape, sums);
        ch.raw_sums = {total};
        ch.objective = ch.tape.affine_scalar(total, weights.residual / res_norm, 0.0);
        add_chunk(std::move(ch));
    }
}

void PinnLossEngine::Impl::build_ic_chunks(const CollocationSet& colloc) {
    const auto& xs_all = colloc.ic_points;
    if (xs_all.empty() || spec->ic_terms.empty()) return;
    const int C = spec->n_channels;
    ic_norm = static_cast<double>(xs_all.size()) * C;
    int max_t_order = 0;
    for (const auto& term : spec->ic_terms) max_t_order = std::max(max_t_order, term.t_order);
    JetSpecPtr js = JetSpec::closure({{0, max_t_order}});
    for (std::size_t base = 0; base < xs_all.size(); base += kChunk) {
        const std::size_t n = std::min<std::size_t>(kChunk, xs_all.size() - base);
        std::vector<double> xs(xs_all.begin() + static_cast<std::ptrdiff_t>(base),
                               xs_all.begin() + static_cast<std::ptrdiff_t>(base + n));
        std::vector<double> ts(n, 0.0);
        Chunk ch;
        ch.term = 1;
        Var input = input_jets(ch.tape, js, xs, ts);
        MlpVars mv = mlp_leaves(ch.tape, *model);
        for (std::size_t l = 0; l < mv.w.size(); ++l) {
            ch.leaves.push_back(mv.w[l]);
            ch.leaves.push_back(mv.b[l]);
        }
        Var out = mlp_apply(ch.tape, *model, mv, input);
        std::vector<Var> sums;
        for (const auto& term : spec->ic_terms) {
            for (int c = 0; c < C; ++c) {
                Var chv = ch.tape.col(out, c);
                Var e = ch.tape.extract(chv, 0, term.t_order);
                Array target({static_cast<int>(n)});
                for (std::size_t i = 0; i < n; ++i)
                    target[i] = term.target[static_cast<std::size_t>(c)](xs[i]);
                sums.push_back(ch.tape.sq_diff_sum(e, std::move(target)));
            }
        }
        Var total = chain_add(ch.tape, sums);
        ch.raw_sums = {total};
        ch.objective = ch.tape.affine_scalar(total, weights.ic / ic_norm, 0.0);
        add_chunk(std::move(ch));
    }
}

void PinnLossEngine::Impl::build_bc_chunks(const DomainSpec& domain,
                                           const CollocationSet& colloc) {
    const auto& ts_all = colloc.bc_points;
    if (ts_all.empty()) return;
    const int C = spec->n_channels;
    const double N = static_cast<double>(ts_all.size());
    JetSpecPtr js;
    switch (spec->bc_kind) {
        case BcKind::Dirichlet: js = JetSpec::scalar(); break;
        case BcKind::Periodic: js = JetSpec::closure({{1, 0}}); break;
        case BcKind::SimplySupported: js = JetSpec::closure({{2, 0}}); break;
    }
    // Means over (t points x 2 sides x channels) for end-value families, over
    // (t points x channels) for periodic gap families.
    bc_norm = (spec->bc_kind == BcKind::Periodic ? N : 2.0 * N) * C;
    for (std::size_t base = 0; base < ts_all.size(); base += kChunk) {
        const std::size_t n = std::min<std::size_t>(kChunk, ts_all.size() - base);
        std::vector<double> ts(ts_all.begin() + static_cast<std::ptrdiff_t>(base),
                               ts_all.begin() + static_cast<std::ptrdiff_t>(base + n));
        std::vector<double> xlo(n, domain.x_min), xhi(n, domain.x_max);
        Chunk ch;
        ch.term = 2;
        Var in_lo = input_jets(ch.tape, js, xlo, ts);
        Var in_hi = input_jets(ch.tape, js, xhi, ts);
        MlpVars mv = mlp_leaves(ch.tape, *model);
        for (std::size_t l = 0; l < mv.w.size(); ++l) {
            ch.leaves.push_back(mv.w[l]);
            ch.leaves.push_back(mv.b[l]);
        }
        Var out_lo = mlp_apply(ch.tape, *model, mv, in_lo);
        Var out_hi = mlp_apply(ch.tape, *model, mv, in_hi);
        const Array zero({static_cast<int>(n)});
        std::vector<Var> sums;
        for (int c = 0; c < C; ++c) {
            Var lo = ch.tape.col(out_lo, c);
            Var hi = ch.tape.col(out_hi, c);
            switch (spec->bc_kind) {
                case BcKind::Dirichlet: {
                    sums.push_back(ch.tape.sq_diff_sum(ch.tape.extract(lo, 0, 0), zero));
                    sums.push_back(ch.tape.sq_diff_sum(ch.tape.extract(hi, 0, 0), zero));
                    break;
                }
                case BcKind::Periodic: {
                    Var gu = ch.tape.sub(ch.tape.extract(lo, 0, 0), ch.tape.extract(hi, 0, 0));
                    Var gx = ch.tape.sub(ch.tape.extract(lo, 1, 0), ch.tape.extract(hi, 1, 0));
                    sums.push_back(ch.tape.sq_diff_sum(gu, zero));
                    sums.push_back(ch.tape.sq_diff_sum(gx, zero));
                    break;
                }
                case BcKind::SimplySupported: {
                    sums.push_back(ch.tape.sq_diff_sum(ch.tape.extract(lo, 0, 0), zero));
                    sums.push_back(ch.tape.sq_diff_sum(ch.tape.extract(hi, 0, 0), zero));
                    sums.push_back(ch.tape.sq_diff_sum(ch.tape.extract(lo, 2, 0), zero));
                    sums.push_back(ch.tape.sq_diff_sum(ch.tape.extract(hi, 2, 0), zero));
                    break;
                }
            }
        }
        Var total = chain_add(ch.tape, sums);
        ch.raw_sums = {total};
        ch.objective = ch.tape.affine_scalar(total, weights.bc / bc_norm, 0.0);
        add_chunk(std::move(ch));
    }
}

PinnLossReport PinnLossEngine::Impl::run() {
    const char* term_names[] = {"residual", "ic", "bc"};
    auto run_chunk = [&](Chunk& c) {
        c.tape.forward();
        try {
            c.tape.backward(c.objective);
        } catch (const NumericError& e) {
            throw NumericError(std::string("pinn_loss: non-finite ") +
                                   term_names[c.term] + " term",
                               e.value);
        }
        c.grad_slot.assign(dim, 0.0);
        std::size_t off = 0;
        for (Var leaf : c.leaves) {
            Array g = c.tape.grad(leaf);
            std::copy(g.data(), g.data() + g.size(), c.grad_slot.begin() +
                                                         static_cast<std::ptrdiff_t>(off));
            off += g.size();
        }
    };
    if (threads <= 1 || chunks.size() <= 1) {
        for (auto& c : chunks) run_chunk(c);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= chunks.size()) return;
                run_chunk(chunks[i]);
            }
        };
        std::vector<std::thread> pool;
        const int nt = std::min<int>(threads, static_cast<int>(chunks.size()));
        pool.reserve(static_cast<std::size_t>(nt));
        for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    // Fixed-order reduction over chunk slots: identical for any worker count.
    flat_grad.assign(dim, 0.0);
    double sums[3] = {0.0, 0.0, 0.0};
    for (auto& c : chunks) {
        sums[c.term] += c.tape.scalar_value(c.raw_sums[0]);
        for (std::size_t j = 0; j < dim; ++j) flat_grad[j] += c.grad_slot[j];
    }
    PinnLossReport rep;
    rep.residual_term = sums[0] / res_norm;
    rep.ic_term = sums[1] / ic_norm;
    rep.bc_term = sums[2] / bc_norm;
    rep.total = weights.residual * rep.residual_term + weights.ic * rep.ic_term +
                weights.bc * rep.bc_term;
    if (!std::isfinite(rep.total)) throw NumericError("pinn_loss: non-finite total", rep.total);
    return rep;
}

PinnLossEngine::PinnLossEngine(MlpModel& model, const PdeSpec& spec, const DomainSpec& domain,
                               const CollocationSet& colloc, PinnLossWeights weights,
                               int threads) {
    impl_ = std::make_unique<Impl>();
    impl_->model = &model;
    impl_->spec = &spec;
    impl_->weights = weights;
    impl_->threads = std::max(1, threads);
    impl_->dim = model.param_count();
    impl_->build_residual_chunks(domain, colloc);
    impl_->build_ic_chunks(colloc);
    impl_->build_bc_chunks(domain, colloc);
}

PinnLossEngine::~PinnLossEngine() = default;
PinnLossEngine::PinnLossEngine(PinnLossEngine&&) noexcept = default;

PinnLossReport PinnLossEngine::eval() { return impl_->run(); }
const std::vector<double>& PinnLossEngine::grad() const { return impl_->flat_grad; }
std::size_t PinnLossEngine::dim() const { return impl_->dim; }

PinnLossReport pinn_loss(MlpModel& model, const PdeSpec& spec, const DomainSpec& domain,
                         const CollocationSet& colloc, PinnLossWeights weights) {
    PinnLossEngine engine(model, spec, domain, colloc, weights, 1);
    return engine.eval();
}

PinnLossReport pinn_loss_field(const PdeSpec& spec, const DomainSpec& domain,
                               const JetField& field, const CollocationSet& colloc,
                               PinnLossWeights weights) {
    PinnLossReport rep;
    const int C = spec.n_channels;
    // Residual term.
    if (!colloc.residual_points.empty()) {
        double s = 0.0;
        for (auto [x, t] : colloc.residual_points)
            for (double r : residual_eval(spec, field, x, t)) s += r * r;
        rep.residual_term = s / (static_cast<double>(colloc.residual_points.size()) * C);
    }
    // Initial-condition terms.
    if (!colloc.ic_points.empty() && !spec.ic_terms.empty()) {
        int max_t_order = 0;
        for (const auto& term : spec.ic_terms)
            max_t_order = std::max(max_t_order, term.t_order);
        JetSpecPtr js = JetSpec::closure({{0, max_t_order}});
        double s = 0.0;
        std::vector<Jet> u;
        for (double x : colloc.ic_points) {
            const Jet jx = Jet::variable(js, x, 1, 0);
            const Jet jt = Jet::variable(js, 0.0, 0, 1);
            field.eval(jx, jt, u);
            for (const auto& term : spec.ic_terms)
                for (int c = 0; c < C; ++c) {
                    const double v =
                        u[static_cast<std::size_t>(c)].derivative(0, term.t_order) -
                        term.target[static_cast<std::size_t>(c)](x);
                    s += v * v;
                }
        }
        rep.ic_term = s / (static_cast<double>(colloc.ic_points.size()) * C);
    }
    // Boundary terms.
    if (!colloc.bc_points.empty()) {
        JetSpecPtr js;
        switch (spec.bc_kind) {
            case BcKind::Dirichlet: js = JetSpec::scalar(); break;
            case BcKind::Periodic: js = JetSpec::closure({{1, 0}}); break;
            case BcKind::SimplySupported: js = JetSpec::closure({{2, 0}}); break;
        }
        const double N = static_cast<double>(colloc.bc_points.size());
        const double norm = (spec.bc_kind == BcKind::Periodic ? N : 2.0 * N) * C;
        double s = 0.0;
        std::vector<Jet> ulo, uhi;
        for (double t : colloc.bc_points) {
            const Jet jt = Jet::variable(js, t, 0, 1);
            field.eval(Jet::variable(js, domain.x_min, 1, 0), jt, ulo);
            field.eval(Jet::variable(js, domain.x_max, 1, 0), jt, uhi);
            for (int c = 0; c < C; ++c) {
                const Jet &lo = ulo[static_cast<std::size_t>(c)],
                          &hi = uhi[static_cast<std::size_t>(c)];
                switch (spec.bc_kind) {
                    case BcKind::Dirichlet:
                        s += lo.value() * lo.value() + hi.value() * hi.value();
                        break;
                    case BcKind::Periodic: {
                        const double gu = lo.value() - hi.value();
                        const double gx = lo.derivative(1, 0) - hi.derivative(1, 0);
                        s += gu * gu + gx * gx;
                        break;
                    }
                    case BcKind::SimplySupported: {
                        const double a = lo.value(), b = hi.value();
                        const double ax = lo.derivative(2, 0), bx = hi.derivative(2, 0);
                        s += a * a + b * b + ax * ax + bx * bx;
                        break;
                    }
                }
            }
        }
        rep.bc_term = s / norm;
    }
    rep.total = weights.residual * rep.residual_term + weights.ic * rep.ic_term +
                weights.bc * rep.bc_term;
    return rep;
}

std::vector<PinnLossReport> train_pinn(MlpModel& model, const PdeSpec& spec,
                                       const DomainSpec& domain,
                                       const CollocationSet& colloc,
                                       const PinnTrainConfig& cfg) {
    PinnLossEngine engine(model, spec, domain, colloc, cfg.weights, cfg.threads);
    std::vector<PinnLossReport> history;
    auto plateau = [&]() {
        if (!cfg.plateau_stop ||
            static_cast<int>(history.size()) < cfg.plateau_window + 1)
            return false;
        const double now = history.back().total;
        const double then =
            history[history.size() - 1 - static_cast<std::size_t>(cfg.plateau_window)].total;
        return std::abs(then - now) <= cfg.plateau_rel_change * std::max(1.0, std::abs(then));
    };

    const bool use_adam = cfg.optimizer == "adam" || cfg.optimizer == "adam+lbfgs";
    const bool use_lbfgs = cfg.optimizer == "lbfgs" || cfg.optimizer == "adam+lbfgs";
    if (!use_adam && !use_lbfgs)
        throw ArgumentError("train_pinn: unknown optimizer " + cfg.optimizer);

    int epoch = 0;
    if (use_adam && cfg.adam_epochs > 0) {
        auto params = model.params();
        Adam adam({cfg.adam_lr}, params);
        for (int e = 0; e < cfg.adam_epochs; ++e) {
            PinnLossReport rep = engine.eval();
            rep.epoch = epoch++;
            history.push_back(rep);
            // Rebuild per-array gradients from the engine's flat layout.
            std::vector<Array> grads;
            std::size_t off = 0;
            for (Array* p : params) {
                Array g(p->shape());
                std::copy_n(engine.grad().begin() + static_cast<std::ptrdiff_t>(off),
                            p->size(), g.data());
                off += p->size();
                grads.push_back(std::move(g));
            }
            adam.step(grads);
            if (plateau()) return history;
        }
    }
    if (use_lbfgs && cfg.lbfgs_epochs > 0) {
        auto params = model.params();
        std::vector<double> x = flatten(params);
        PinnLossReport last;
        Lbfgs::Objective obj = [&](std::span<const double> xv, std::span<double> g) {
            unflatten(xv, params);
            last = engine.eval();
            std::copy(engine.grad().begin(), engine.grad().end(), g.begin());
            return last.total;
        };
        LbfgsConfig lc;
        lc.log = cfg.log;
        Lbfgs lbfgs(lc, x.size());
        for (int e = 0; e < cfg.lbfgs_epochs; ++e) {
            lbfgs.step(x, obj);
            unflatten(x, params);
            PinnLossReport rep = last;
            rep.epoch = epoch++;
            history.push_back(rep);
            if (plateau()) return history;
        }
    }
    return history;
}

GridSolution infer_grid(const MlpModel& model, const DomainSpec& domain, int k_t, int k_x,
                        double t0, double t1) {
    if (k_t < 2 || k_x < 2) throw ArgumentError("infer_grid: k_t and k_x must be >= 2");
    GridSolution g;
    g.k_t = k_t;
    g.k_x = k_x;
    g.n_channels = model.output_width();
    g.times = linspace(t0, t1, k_t);
    g.xs = linspace(domain.x_min, domain.x_max, k_x);
    std::vector<double> xs(static_cast<std::size_t>(k_t) * k_x),
        ts(static_cast<std::size_t>(k_t) * k_x);
    for (int n = 0; n < k_t; ++n)
        for (int i = 0; i < k_x; ++i) {
            xs[static_cast<std::size_t>(n) * k_x + i] = g.xs[static_cast<std::size_t>(i)];
            ts[static_cast<std::size_t>(n) * k_x + i] = g.times[static_cast<std::size_t>(n)];
        }
    JetBatch jb = mlp_eval_batch(model, xs, ts, JetSpec::scalar());
    g.values = Array({k_t, g.row_width()});
    for (int n = 0; n < k_t; ++n)
        for (int c = 0; c < g.n_channels; ++c)
            for (int i = 0; i < k_x; ++i) {
                const double v = jb.value(n * k_x + i, c);
                if (!std::isfinite(v))
                    throw NumericError("infer_grid: non-finite value at level " +
                                           std::to_string(n) + ", x index " + std::to_string(i),
                                       v);
                g.at(n, c, i) = v;
            }
    return g;
}

void write_loss_history(const std::string& path, const std::vector<PinnLossReport>& history) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ArgumentError("cannot open for writing: " + path);
    std::fprintf(f, "epoch,total,residual,ic,bc\n");
    for (const auto& r : history)
        std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g\n", r.epoch, r.total, r.residual_term,
                     r.ic_term, r.bc_term);
    std::fclose(f);
}

}  // namespace pinnosc
