#include "pinnosc/mlp.hpp"

#include <cmath>

#include "pinnosc/rng.hpp"

namespace pinnosc {

MlpModel MlpModel::init(std::vector<int> widths, std::uint64_t seed, Activation act) {
    if (widths.size() < 2) throw ArgumentError("mlp: need at least input and output widths");
    MlpModel m;
    m.widths = std::move(widths);
    m.activation = act;
    m.seed = seed;
    for (std::size_t l = 0; l + 1 < m.widths.size(); ++l) {
        const int in = m.widths[l], out = m.widths[l + 1];
        Rng rng = Rng::derive(seed, "mlp-init", l);
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        Array w({out, in});
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-limit, limit);
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(std::vector<int>{out});
    }
    return m;
}

std::vector<Array*> MlpModel::params() {
    std::vector<Array*> p;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        p.push_back(&weights[l]);
        p.push_back(&biases[l]);
    }
    return p;
}

std::vector<const Array*> MlpModel::params() const {
    std::vector<const Array*> p;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        p.push_back(&weights[l]);
        p.push_back(&biases[l]);
    }
    return p;
}

std::size_t MlpModel::param_count() const {
    std::size_t n = 0;
    for (const Array* a : params()) n += a->size();
    return n;
}

MlpVars mlp_leaves(Tape& tape, MlpModel& model) {
    MlpVars v;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        v.w.push_back(tape.leaf(&model.weights[l]));
        v.b.push_back(tape.leaf(&model.biases[l]));
    }
    return v;
}

MlpVars mlp_constants(Tape& tape, const MlpModel& model) {
    MlpVars v;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        v.w.push_back(tape.constant(model.weights[l]));
        v.b.push_back(tape.constant(model.biases[l]));
    }
    return v;
}

Var mlp_apply(Tape& tape, const MlpModel& model, const MlpVars& vars, Var input) {
    Var h = input;
    const std::size_t L = model.weights.size();
    for (std::size_t l = 0; l < L; ++l) {
        h = tape.affine(h, vars.w[l], vars.b[l]);
        if (l + 1 < L && model.activation == Activation::Tanh) h = tape.tanh(h);
    }
    return h;
}

double JetBatch::deriv(int p, int c, int dx, int dt) const {
    const int pos = spec->pos(dx, dt);
    if (pos < 0) throw ArgumentError("JetBatch: derivative outside support");
    return coeffs[static_cast<std::size_t>(p * channels + c) * spec->count() +
                  static_cast<std::size_t>(pos)] *
           spec->extract_factor(pos);
}

JetBatch mlp_eval_batch(const MlpModel& model, std::span<const double> xs,
                        std::span<const double> ts, JetSpecPtr spec) {
    if (xs.size() != ts.size()) throw DimensionError("mlp_eval_batch: xs/ts length mismatch");
    const int n = static_cast<int>(xs.size());
    const int nc = spec->count();
    const int px = spec->pos(1, 0), pt = spec->pos(0, 1);
    std::vector<double> in(static_cast<std::size_t>(n) * 2 * nc, 0.0);
    for (int p = 0; p < n; ++p) {
        double* xc = in.data() + static_cast<std::size_t>(p) * 2 * nc;
        double* tc = xc + nc;
        xc[0] = xs[static_cast<std::size_t>(p)];
        tc[0] = ts[static_cast<std::size_t>(p)];
        if (px > 0) xc[px] = 1.0;
        if (pt > 0) tc[pt] = 1.0;
    }
    Tape tape;
    Var input = tape.constant_jets({n, 2}, spec, std::move(in));
    MlpVars vars = mlp_constants(tape, model);
    Var out = mlp_apply(tape, model, vars, input);
    JetBatch jb;
    jb.spec = std::move(spec);
    jb.n = n;
    jb.channels = model.output_width();
    jb.coeffs = tape.values(out);
    return jb;
}

std::vector<double> mlp_forward(const MlpModel& model, double x, double t) {
    JetBatch jb = mlp_eval_batch(model, std::span(&x, 1), std::span(&t, 1), JetSpec::scalar());
    std::vector<double> out(static_cast<std::size_t>(jb.channels));
    for (int c = 0; c < jb.channels; ++c) out[static_cast<std::size_t>(c)] = jb.value(0, c);
    return out;
}

std::vector<Jet> mlp_forward_jets(const MlpModel& model, const Jet& x, const Jet& t) {
    if (!x.spec()->same(*t.spec())) throw ArgumentError("mlp_forward_jets: support mismatch");
    const JetSpecPtr& spec = x.spec();
    const int nc = spec->count();
    const int n = 1;
    std::vector<double> in(static_cast<std::size_t>(2 * nc));
    for (int c = 0; c < nc; ++c) {
        in[static_cast<std::size_t>(c)] = x.coeff(c);
        in[static_cast<std::size_t>(nc + c)] = t.coeff(c);
    }
    Tape tape;
    Var input = tape.constant_jets({n, 2}, spec, std::move(in));
    MlpVars vars = mlp_constants(tape, model);
    Var out = mlp_apply(tape, model, vars, input);
    const auto& coeffs = tape.values(out);
    std::vector<Jet> jets;
    for (int c = 0; c < model.output_width(); ++c) {
        std::vector<double> cc(coeffs.begin() + static_cast<std::ptrdiff_t>(c) * nc,
                               coeffs.begin() + static_cast<std::ptrdiff_t>(c + 1) * nc);
        jets.push_back(Jet::from_coeffs(spec, std::move(cc)));
    }
    return jets;
}

}  // namespace pinnosc
