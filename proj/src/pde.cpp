#include "pinnosc/pde.hpp"

#include <cmath>
#include <numbers>

#include "pinnosc/rng.hpp"

namespace pinnosc {

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
void set_residual(PdeSpec& spec, F f) {
    spec.residual_scalar = [f](const std::vector<FieldDerivs<double>>& d) { return f(d); };
    spec.residual_expr = [f](const std::vector<FieldDerivs<Expr>>& d) { return f(d); };
}

double sech_d(double x) { return 1.0 / std::cosh(x); }

}  // namespace

bool PdeSpec::reads(int dx, int dt) const {
    for (auto [a, b] : deriv_targets)
        if (a == dx && b == dt) return true;
    return dx == 0 && dt == 0;
}

JetSpecPtr PdeSpec::residual_jet_spec() const {
    return JetSpec::closure(std::span<const std::pair<int, int>>(deriv_targets));
}

std::pair<PdeSpec, DomainSpec> make_benchmark(const std::string& name,
                                              std::optional<double> nu) {
    PdeSpec spec;
    DomainSpec dom;
    spec.name = name;
    if (name == "burgers" || name == "burgers_parametric") {
        dom = {-1.0, 1.0, 0.8, 1.0};
        spec.nu = nu.value_or(name == "burgers" ? 0.01 / kPi : 0.05);
        spec.bc_kind = BcKind::Dirichlet;
        spec.deriv_targets = {{0, 1}, {1, 0}, {2, 0}};
        spec.ic_terms = {{0, {[](double x) { return -std::sin(kPi * x); }}}};
        const double v = spec.nu;
        set_residual(spec, [v](const auto& d) {
            using R = std::decay_t<decltype(d[0].u)>;
            return std::vector<R>{d[0].ut + d[0].u * d[0].ux - v * d[0].uxx};
        });
    } else if (name == "allen_cahn") {
        dom = {-1.0, 1.0, 0.8, 1.0};
        spec.bc_kind = BcKind::Periodic;
        spec.deriv_targets = {{0, 1}, {2, 0}};
        spec.ic_terms = {
            {0, {[](double x) { return x * x * std::cos(kPi * x) * sech_d(x); }}}};
        set_residual(spec, [](const auto& d) {
            using R = std::decay_t<decltype(d[0].u)>;
            return std::vector<R>{d[0].ut - 0.0001 * d[0].uxx +
                                  5.0 * (d[0].u * d[0].u * d[0].u) - 5.0 * d[0].u};
        });
    } else if (name == "schrodinger") {
        dom = {-5.0, 5.0, 2.0 * kPi / 5.0, kPi / 2.0};
        spec.n_channels = 2;
        spec.bc_kind = BcKind::Periodic;
        spec.deriv_targets = {{0, 1}, {2, 0}};
        spec.ic_terms = {{0,
                          {[](double x) { return 2.0 * sech_d(x); },
                           [](double) { return 0.0; }}}};
        // u = a + ib; u_t - i 0.5 u_xx - i |u|^2 u = 0 split into coupled
        // real/imaginary residuals.
        set_residual(spec, [](const auto& d) {
            using R = std::decay_t<decltype(d[0].u)>;
            auto mag2 = d[0].u * d[0].u + d[1].u * d[1].u;
            R r_re = d[0].ut + 0.5 * d[1].uxx + mag2 * d[1].u;
            R r_im = d[1].ut - 0.5 * d[0].uxx - mag2 * d[0].u;
            return std::vector<R>{r_re, r_im};
        });
    } else if (name == "euler_bernoulli") {
        dom = {0.0, kPi, 0.8, 1.0};
        spec.bc_kind = BcKind::SimplySupported;
        spec.deriv_targets = {{0, 2}, {4, 0}};
        spec.ic_terms = {{0, {[](double x) { return std::sin(x); }}},
                         {1, {[](double) { return 0.0; }}}};
        spec.source = [](double x, double t, int) {
            return (1.0 - 16.0 * kPi * kPi) * std::sin(x) * std::cos(4.0 * kPi * t);
        };
        spec.analytic = [](double x, double t, int) {
            return std::sin(x) * std::cos(4.0 * kPi * t);
        };
        spec.analytic_jet = [](const Jet& x, const Jet& t, int) {
            return sin(x) * cos(t * (4.0 * kPi));
        };
        set_residual(spec, [](const auto& d) {
            using R = std::decay_t<decltype(d[0].u)>;
            return std::vector<R>{d[0].utt + d[0].uxxxx - d[0].source};
        });
    } else {
        throw ArgumentError("unknown benchmark: " + name);
    }
    return {std::move(spec), dom};
}

std::vector<double> residual_eval(const PdeSpec& spec, const JetField& field, double x,
                                  double t) {
    if (field.channels() != spec.n_channels)
        throw DimensionError("residual_eval: channel count mismatch");
    JetSpecPtr js = spec.residual_jet_spec();
    const Jet jx = Jet::variable(js, x, 1, 0);
    const Jet jt = Jet::variable(js, t, 0, 1);
    std::vector<Jet> u;
    field.eval(jx, jt, u);
    std::vector<FieldDerivs<double>> d(static_cast<std::size_t>(spec.n_channels));
    for (int c = 0; c < spec.n_channels; ++c) {
        const Jet& j = u[static_cast<std::size_t>(c)];
        auto& fd = d[static_cast<std::size_t>(c)];
        fd.u = j.value();
        if (spec.reads(1, 0)) fd.ux = j.derivative(1, 0);
        if (spec.reads(2, 0)) fd.uxx = j.derivative(2, 0);
        if (spec.reads(4, 0)) fd.uxxxx = j.derivative(4, 0);
        if (spec.reads(0, 1)) fd.ut = j.derivative(0, 1);
        if (spec.reads(0, 2)) fd.utt = j.derivative(0, 2);
        fd.source = spec.source ? spec.source(x, t, c) : 0.0;
        if (!std::isfinite(fd.u)) throw NumericError("residual_eval: non-finite field", fd.u);
    }
    auto r = spec.residual_scalar(d);
    for (double v : r)
        if (!std::isfinite(v)) throw NumericError("residual_eval: non-finite residual", v);
    return r;
}

CollocationSet sample_collocation(const PdeSpec& spec, const DomainSpec& domain,
                                  const CollocationCounts& counts, std::uint64_t seed) {
    (void)spec;
    if (counts.residual < 0 || counts.initial < 0 || counts.boundary < 0)
        throw ArgumentError("sample_collocation: negative count");
    Rng rng = Rng::derive(seed, "collocation");
    CollocationSet set;
    set.residual_points.reserve(static_cast<std::size_t>(counts.residual));
    for (int i = 0; i < counts.residual; ++i) {
        const double x = rng.uniform(domain.x_min, domain.x_max);
        const double t = rng.uniform(0.0, domain.t_train_end);
        set.residual_points.emplace_back(x, t);
    }
    for (int i = 0; i < counts.initial; ++i)
        set.ic_points.push_back(rng.uniform(domain.x_min, domain.x_max));
    for (int i = 0; i < counts.boundary; ++i)
        set.bc_points.push_back(rng.uniform(0.0, domain.t_train_end));
    return set;
}

double input_derivative(const std::function<Jet(const Jet&, const Jet&)>& f, double x,
                        double t, int order_x, int order_t) {
    if (order_x < 0 || order_x > 4 || order_t < 0 || order_t > 2 || order_x + order_t > 4)
        throw ArgumentError("input_derivative: unsupported order");
    JetSpecPtr js = JetSpec::closure({{order_x, order_t}});
    const Jet jx = Jet::variable(js, x, 1, 0);
    const Jet jt = Jet::variable(js, t, 0, 1);
    return f(jx, jt).derivative(order_x, order_t);
}

}  // namespace pinnosc
