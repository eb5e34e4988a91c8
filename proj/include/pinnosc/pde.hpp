#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pinnosc/jet.hpp"
#include "pinnosc/tape.hpp"

namespace pinnosc {

/// Space-time extents: training hull X1 = [x_min,x_max] x [0,t_train_end],
/// extrapolation hull X2 = [x_min,x_max] x (t_train_end, t_test_end].
struct DomainSpec {
    double x_min = -1.0;
    double x_max = 1.0;
    double t_train_end = 0.8;
    double t_test_end = 1.0;
};

enum class BcKind { Dirichlet, Periodic, SimplySupported };

/// Field value and input derivatives at one point, generic over the scalar
/// algebra (double for evaluation, Expr for recorded batches). Only the
/// members named in PdeSpec::deriv_targets are populated.
template <class S>
struct FieldDerivs {
    S u{}, ux{}, uxx{}, uxxxx{}, ut{}, utt{};
    S source{};
};

/// Differentiable field u(x,t) per channel in jet arithmetic.
class JetField {
  public:
    virtual ~JetField() = default;
    virtual int channels() const = 0;
    virtual void eval(const Jet& x, const Jet& t, std::vector<Jet>& out) const = 0;
};

class ClosedFormField : public JetField {
  public:
    using Fn = std::function<Jet(const Jet& x, const Jet& t, int channel)>;
    ClosedFormField(int channels, Fn fn) : channels_(channels), fn_(std::move(fn)) {}
    int channels() const override { return channels_; }
    void eval(const Jet& x, const Jet& t, std::vector<Jet>& out) const override {
        out.resize(static_cast<std::size_t>(channels_));
        for (int c = 0; c < channels_; ++c) out[static_cast<std::size_t>(c)] = fn_(x, t, c);
    }

  private:
    int channels_;
    Fn fn_;
};

/// One initial-condition constraint: d^k/dt^k u(x, 0) = target_ch(x).
struct IcTerm {
    int t_order = 0;
    std::vector<std::function<double(double)>> target;  // per channel
};

/// One benchmark problem as data: residual operator, conditions, source and
/// (when available) the analytical solution.
struct PdeSpec {
    std::string name;
    int n_channels = 1;
    BcKind bc_kind = BcKind::Dirichlet;
    double nu = 0.0;  // physical parameter where applicable (Burgers viscosity)
    std::vector<std::pair<int, int>> deriv_targets;  // (dx, dt) the residual reads
    std::vector<IcTerm> ic_terms;
    std::function<double(double x, double t, int ch)> source;  // nullptr => zero
    std::function<double(double x, double t, int ch)> analytic;  // nullptr if none
    std::function<Jet(const Jet& x, const Jet& t, int ch)> analytic_jet;

    std::function<std::vector<double>(const std::vector<FieldDerivs<double>>&)> residual_scalar;
    std::function<std::vector<Expr>(const std::vector<FieldDerivs<Expr>>&)> residual_expr;

    bool has_analytic() const { return static_cast<bool>(analytic); }
    bool reads(int dx, int dt) const;
    JetSpecPtr residual_jet_spec() const;
};

/// Sampled training points inside X1.
struct CollocationSet {
    std::vector<std::pair<double, double>> residual_points;  // (x, t)
    std::vector<double> ic_points;                           // x at t = 0
    std::vector<double> bc_points;  // t values, applied at both spatial ends
};

struct CollocationCounts {
    int residual = 1000;
    int initial = 300;
    int boundary = 150;  // per spatial boundary
};

/// Benchmark factory. Known names: burgers, allen_cahn, schrodinger,
/// euler_bernoulli, burgers_parametric. `nu` overrides the viscosity for the
/// Burgers family.
std::pair<PdeSpec, DomainSpec> make_benchmark(const std::string& name,
                                              std::optional<double> nu = std::nullopt);

/// Residual value(s) at one point using exact jet derivatives of the field.
std::vector<double> residual_eval(const PdeSpec& spec, const JetField& field, double x,
                                  double t);

/// Uniform pseudo-random collocation; deterministic under seed.
CollocationSet sample_collocation(const PdeSpec& spec, const DomainSpec& domain,
                                  const CollocationCounts& counts, std::uint64_t seed);

/// Exact Taylor-mode derivative of a scalar field functor; order_x <= 4,
/// order_t <= 2, order_x + order_t <= 4.
double input_derivative(const std::function<Jet(const Jet&, const Jet&)>& f, double x,
                        double t, int order_x, int order_t);

}  // namespace pinnosc
