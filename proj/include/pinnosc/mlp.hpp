#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pinnosc/array.hpp"
#include "pinnosc/jet.hpp"
#include "pinnosc/pde.hpp"
#include "pinnosc/tape.hpp"

namespace pinnosc {

enum class Activation { Tanh, Identity };  // Identity is a test hook

/// Feed-forward network for the physics-informed stage: inputs (x, t), tanh
/// hidden layers, linear output with one unit per channel.
struct MlpModel {
    std::vector<int> widths;  // e.g. {2, 20, 20, 20, 20, 1}
    Activation activation = Activation::Tanh;
    std::vector<Array> weights;  // [out x in] per layer
    std::vector<Array> biases;   // [out]
    std::uint64_t seed = 0;

    /// Glorot-style uniform init scaled by layer fan; biases zero.
    static MlpModel init(std::vector<int> widths, std::uint64_t seed,
                         Activation act = Activation::Tanh);

    int input_width() const { return widths.front(); }
    int output_width() const { return widths.back(); }
    std::vector<Array*> params();
    std::vector<const Array*> params() const;
    std::size_t param_count() const;
};

/// Recorded-forward helpers: leaves for the parameters, then the layer chain
/// applied to an input node of shape [n x 2] (any jet support).
struct MlpVars {
    std::vector<Var> w, b;
};
MlpVars mlp_leaves(Tape& tape, MlpModel& model);
MlpVars mlp_constants(Tape& tape, const MlpModel& model);
Var mlp_apply(Tape& tape, const MlpModel& model, const MlpVars& vars, Var input);

/// Batched plain evaluation at n points on a given jet support. Runs the same
/// recorded kernels as training, so values match recorded evaluation
/// bit-for-bit. Coefficients are laid out [point][channel][coeff].
struct JetBatch {
    JetSpecPtr spec;
    int n = 0;
    int channels = 0;
    std::vector<double> coeffs;

    double value(int p, int c) const {
        return coeffs[static_cast<std::size_t>(p * channels + c) * spec->count()];
    }
    double deriv(int p, int c, int dx, int dt) const;
};
JetBatch mlp_eval_batch(const MlpModel& model, std::span<const double> xs,
                        std::span<const double> ts, JetSpecPtr spec);

/// Per-channel values at one point.
std::vector<double> mlp_forward(const MlpModel& model, double x, double t);
/// Per-channel jets at one point (exact input derivatives on the support).
std::vector<Jet> mlp_forward_jets(const MlpModel& model, const Jet& x, const Jet& t);

/// JetField adapter so a network can stand in wherever a differentiable field
/// is expected (residual_eval, loss evaluation on arbitrary fields).
class MlpField : public JetField {
  public:
    explicit MlpField(const MlpModel& model) : model_(model) {}
    int channels() const override { return model_.output_width(); }
    void eval(const Jet& x, const Jet& t, std::vector<Jet>& out) const override {
        out = mlp_forward_jets(model_, x, t);
    }

  private:
    const MlpModel& model_;
};

}  // namespace pinnosc
