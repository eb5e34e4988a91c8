#include "pinnosc/oscillator.hpp"

#include <cmath>

#include "pinnosc/optim.hpp"
#include "pinnosc/rng.hpp"

namespace pinnosc {

CellKind cell_kind_from_string(std::string_view s) {
    if (s == "cornn") return CellKind::CoRNN;
    if (s == "lem") return CellKind::LEM;
    if (s == "rnn") return CellKind::RNN;
    if (s == "lstm") return CellKind::LSTM;
    if (s == "gru") return CellKind::GRU;
    throw ArgumentError("unknown cell kind: " + std::string(s));
}

std::string to_string(CellKind kind) {
    switch (kind) {
        case CellKind::CoRNN: return "cornn";
        case CellKind::LEM: return "lem";
        case CellKind::RNN: return "rnn";
        case CellKind::LSTM: return "lstm";
        case CellKind::GRU: return "gru";
    }
    return "?";
}

void OscillatorConfig::validate() const {
    if (!(delta_t > 0.0 && delta_t < 1.0))
        throw ArgumentError("oscillator: delta_t must be in (0, 1)");
    if (hidden_size < 1) throw ArgumentError("oscillator: hidden size must be >= 1");
    if (input_size < 1) throw ArgumentError("oscillator: input size must be >= 1");
    if (kind == CellKind::CoRNN && !(gamma > 0.0 && epsilon > 0.0))
        throw ArgumentError("oscillator: gamma and epsilon must be positive");
}

namespace {

std::vector<std::string> param_names(CellKind kind) {
    switch (kind) {
        case CellKind::CoRNN: return {"W", "Wc", "V", "b", "Q"};
        case CellKind::LEM:
            return {"W1", "W2", "Wz", "Wy", "V1", "V2", "Vz", "Vy",
                    "b1", "b2", "bz", "by", "Q"};
        case CellKind::RNN: return {"W", "V", "b", "Q"};
        case CellKind::GRU:
            return {"Wr", "Wu", "Wh", "Vr", "Vu", "Vh", "br", "bu", "bh", "Q"};
        case CellKind::LSTM:
            return {"Wi", "Wf", "Wo", "Wg", "Vi", "Vf", "Vo", "Vg",
                    "bi", "bf", "bo", "bg", "Q"};
    }
    return {};
}

std::vector<int> param_shape(std::string_view name, int m, int d) {
    if (name == "Q") return {d, m};
    if (name[0] == 'W') return {m, m};
    if (name[0] == 'V') return {m, d};
    return {m};  // biases
}

}  // namespace

OscillatorModel OscillatorModel::init(const OscillatorConfig& cfg) {
    cfg.validate();
    OscillatorModel model;
    model.cfg = cfg;
    model.names = param_names(cfg.kind);
    const double limit = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_size));
    for (std::size_t i = 0; i < model.names.size(); ++i) {
        Rng rng = Rng::derive(cfg.seed, "osc-init", i);
        Array a(param_shape(model.names[i], cfg.hidden_size, cfg.input_size));
        for (std::size_t j = 0; j < a.size(); ++j) a[j] = rng.uniform(-limit, limit);
        model.params.push_back(std::move(a));
    }
    return model;
}

int OscillatorModel::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw ArgumentError("oscillator: no parameter named " + std::string(name));
}

std::vector<Array*> OscillatorModel::param_ptrs() {
    std::vector<Array*> p;
    for (auto& a : params) p.push_back(&a);
    return p;
}

HiddenState zero_state(const OscillatorConfig& cfg) {
    return {Array({cfg.hidden_size}), Array({cfg.hidden_size})};
}

CellVars cell_leaves(Tape& tape, OscillatorModel& model) {
    CellVars v;
    for (auto& a : model.params) v.p.push_back(tape.leaf(&a));
    return v;
}

CellVars cell_constants(Tape& tape, const OscillatorModel& model) {
    CellVars v;
    for (const auto& a : model.params) v.p.push_back(tape.constant(a));
    return v;
}

StateVars cell_step_vars(Tape& tape, const OscillatorModel& model, const CellVars& vars,
                         const StateVars& state, Var u) {
    const OscillatorConfig& c = model.cfg;
    auto P = [&](std::string_view name) {
        return vars.p[static_cast<std::size_t>(model.index_of(name))];
    };
    auto matvec = [&](std::string_view w, Var x) { return tape.affine(x, P(w), Var{}); };
    auto matvec_b = [&](std::string_view w, Var x, std::string_view b) {
        return tape.affine(x, P(w), P(b));
    };
    switch (c.kind) {
        case CellKind::CoRNN: {
            Var pre = tape.add(tape.add(matvec("W", state.y), matvec("Wc", state.z)),
                               matvec_b("V", u, "b"));
            Var act = tape.tanh(pre);
            Var zn;
            if (c.explicit_damping) {
                // fully explicit variant (ablation): damping term uses z_{n-1}
                zn = tape.add(tape.add(tape.affine_scalar(state.z, 1.0 - c.delta_t * c.epsilon, 0.0),
                                       tape.affine_scalar(act, c.delta_t, 0.0)),
                              tape.affine_scalar(state.y, -c.delta_t * c.gamma, 0.0));
            } else {
                Var num = tape.add(tape.add(state.z, tape.affine_scalar(act, c.delta_t, 0.0)),
                                   tape.affine_scalar(state.y, -c.delta_t * c.gamma, 0.0));
                zn = tape.affine_scalar(num, 1.0 / (1.0 + c.delta_t * c.epsilon), 0.0);
            }
            Var yn = tape.add(state.y, tape.affine_scalar(zn, c.delta_t, 0.0));
            return {yn, zn};
        }
        case CellKind::LEM: {
            Var g1 = tape.sigmoid(tape.add(matvec("W1", state.y), matvec_b("V1", u, "b1")));
            Var g2 = tape.sigmoid(tape.add(matvec("W2", state.y), matvec_b("V2", u, "b2")));
            Var dtn = tape.affine_scalar(g1, c.delta_t, 0.0);
            Var dtb = tape.affine_scalar(g2, c.delta_t, 0.0);
            Var zc = tape.tanh(tape.add(matvec("Wz", state.y), matvec_b("Vz", u, "bz")));
            Var zn = tape.add(tape.mul(tape.affine_scalar(dtn, -1.0, 1.0), state.z),
                              tape.mul(dtn, zc));
            Var yc = tape.tanh(tape.add(matvec("Wy", zn), matvec_b("Vy", u, "by")));
            Var yn = tape.add(tape.mul(tape.affine_scalar(dtb, -1.0, 1.0), state.y),
                              tape.mul(dtb, yc));
            return {yn, zn};
        }
        case CellKind::RNN: {
            Var yn = tape.tanh(tape.add(matvec("W", state.y), matvec_b("V", u, "b")));
            return {yn, state.z};
        }
        case CellKind::GRU: {
            Var r = tape.sigmoid(tape.add(matvec("Wr", state.y), matvec_b("Vr", u, "br")));
            Var zg = tape.sigmoid(tape.add(matvec("Wu", state.y), matvec_b("Vu", u, "bu")));
            Var h = tape.tanh(tape.add(matvec("Wh", tape.mul(r, state.y)),
                                       matvec_b("Vh", u, "bh")));
            Var yn = tape.add(tape.mul(tape.affine_scalar(zg, -1.0, 1.0), state.y),
                              tape.mul(zg, h));
            return {yn, state.z};
        }
        case CellKind::LSTM: {
            Var ig = tape.sigmoid(tape.add(matvec("Wi", state.y), matvec_b("Vi", u, "bi")));
            Var fg = tape.sigmoid(tape.add(matvec("Wf", state.y), matvec_b("Vf", u, "bf")));
            Var og = tape.sigmoid(tape.add(matvec("Wo", state.y), matvec_b("Vo", u, "bo")));
            Var gg = tape.tanh(tape.add(matvec("Wg", state.y), matvec_b("Vg", u, "bg")));
            Var cn = tape.add(tape.mul(fg, state.z), tape.mul(ig, gg));
            Var yn = tape.mul(og, tape.tanh(cn));
            return {yn, cn};
        }
    }
    throw ArgumentError("cell_step_vars: unknown cell kind");
}

Var cell_readout(Tape& tape, const OscillatorModel& model, const CellVars& vars, Var y) {
    return tape.affine(y, vars.p[static_cast<std::size_t>(model.index_of("Q"))], Var{});
}

HiddenState cell_step(const OscillatorModel& model, const HiddenState& state, const Array& u) {
    Tape tape;
    CellVars vars = cell_constants(tape, model);
    StateVars st{tape.constant(state.y), tape.constant(state.z)};
    StateVars next = cell_step_vars(tape, model, vars, st, tape.constant(u));
    HiddenState out{Array({model.cfg.hidden_size}), Array({model.cfg.hidden_size})};
    const auto &yv = tape.values(next.y), &zv = tape.values(next.z);
    for (int i = 0; i < model.cfg.hidden_size; ++i) {
        out.y(i) = yv[static_cast<std::size_t>(i)];
        out.z(i) = zv[static_cast<std::size_t>(i)];
        if (!std::isfinite(out.y(i)) || !std::isfinite(out.z(i)))
            throw NumericError("cell_step: non-finite state", out.y(i));
    }
    return out;
}

Array cell_output(const OscillatorModel& model, const HiddenState& state) {
    const Array& q = model.param("Q");
    Array om({model.cfg.input_size});
    for (int o = 0; o < model.cfg.input_size; ++o) {
        double acc = 0.0;
        for (int i = 0; i < model.cfg.hidden_size; ++i) acc += q(o, i) * state.y(i);
        om(o) = acc;
    }
    return om;
}

namespace {

std::vector<double> train_impl(OscillatorModel& model,
                               std::span<const GridSolution> grids) {
    const OscillatorConfig& cfg = model.cfg;
    cfg.validate();
    for (const auto& g : grids) {
        if (g.k_t < 2) throw ArgumentError("train_sequence: need at least 2 time levels");
        if (g.row_width() != cfg.input_size)
            throw DimensionError("train_sequence: grid width != oscillator input size");
    }
    Tape tape;
    CellVars vars = cell_leaves(tape, model);
    Var total{};
    long long entries = 0;
    for (const auto& g : grids) {
        StateVars st{tape.constant(Array({cfg.hidden_size})),
                     tape.constant(Array({cfg.hidden_size}))};
        for (int n = 0; n + 1 < g.k_t; ++n) {
            Var u = tape.constant(Array({cfg.input_size}, g.row(n)));
            st = cell_step_vars(tape, model, vars, st, u);
            Var om = cell_readout(tape, model, vars, st.y);
            Var e = tape.sq_diff_sum(om, Array({cfg.input_size}, g.row(n + 1)));
            total = total.valid() ? tape.add(total, e) : e;
            entries += cfg.input_size;
        }
    }
    Var loss = tape.affine_scalar(total, 1.0 / static_cast<double>(entries), 0.0);

    Adam adam({cfg.learning_rate}, model.param_ptrs());
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(cfg.epochs));
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        tape.forward();
        const double L = tape.scalar_value(loss);
        history.push_back(L);
        try {
            tape.backward(loss);
        } catch (const NumericError& e) {
            throw NumericError("train_sequence: non-finite loss at epoch " +
                                   std::to_string(epoch),
                               e.value);
        }
        std::vector<Array> grads;
        grads.reserve(vars.p.size());
        for (Var leaf : vars.p) grads.push_back(tape.grad(leaf));
        adam.step(grads);
    }
    return history;
}

}  // namespace

std::vector<double> train_sequence(OscillatorModel& model, const GridSolution& grid) {
    return train_impl(model, std::span(&grid, 1));
}

std::vector<double> train_sequences(OscillatorModel& model,
                                    std::span<const GridSolution> grids) {
    if (grids.empty()) throw ArgumentError("train_sequences: no sequences");
    return train_impl(model, grids);
}

std::vector<double> continuation_times(const std::vector<double>& seed_times, int horizon) {
    if (seed_times.size() < 2) throw ArgumentError("continuation_times: need >= 2 seed times");
    const double h = seed_times[1] - seed_times[0];
    const double t0 = seed_times.back();
    std::vector<double> out(static_cast<std::size_t>(horizon));
    for (int j = 1; j <= horizon; ++j) out[static_cast<std::size_t>(j - 1)] = t0 + h * j;
    return out;
}

GridSolution rollout(const OscillatorModel& model, const GridSolution& seed, int horizon,
                     const RolloutOptions& opts) {
    const OscillatorConfig& cfg = model.cfg;
    if (horizon < 1) throw ArgumentError("rollout: horizon must be >= 1");
    if (seed.row_width() != cfg.input_size)
        throw DimensionError("rollout: seed width != oscillator input size");

    Tape tape;
    CellVars vars = cell_constants(tape, model);
    StateVars st{tape.constant(Array({cfg.hidden_size})),
                 tape.constant(Array({cfg.hidden_size}))};
    if (!opts.cold_start) {
        for (int n = 0; n + 1 < seed.k_t; ++n) {
            Var u = tape.constant(Array({cfg.input_size}, seed.row(n)));
            st = cell_step_vars(tape, model, vars, st, u);
        }
    }
    std::vector<double> input =
        opts.first_input ? *opts.first_input : seed.row(seed.k_t - 1);
    if (static_cast<int>(input.size()) != cfg.input_size)
        throw DimensionError("rollout: first input width mismatch");

    GridSolution out;
    out.k_t = horizon;
    out.k_x = seed.k_x;
    out.n_channels = seed.n_channels;
    out.xs = seed.xs;
    out.times = continuation_times(seed.times, horizon);
    out.values = Array({horizon, cfg.input_size});
    for (int j = 0; j < horizon; ++j) {
        Var u = tape.constant(Array({cfg.input_size}, input));
        st = cell_step_vars(tape, model, vars, st, u);
        Var om = cell_readout(tape, model, vars, st.y);
        const auto& v = tape.values(om);
        for (int i = 0; i < cfg.input_size; ++i) {
            if (!std::isfinite(v[static_cast<std::size_t>(i)]))
                throw NumericError("rollout: non-finite output at step " + std::to_string(j),
                                   v[static_cast<std::size_t>(i)]);
            out.values(j, i) = v[static_cast<std::size_t>(i)];
            input[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

}  // namespace pinnosc
