#include "pinnosc/jet.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace pinnosc {

JetSpec::JetSpec(std::vector<std::pair<int, int>> orders) : orders_(std::move(orders)) {
    for (auto [dx, dt] : orders_) {
        max_x_ = std::max(max_x_, dx);
        max_t_ = std::max(max_t_, dt);
        max_total_ = std::max(max_total_, dx + dt);
    }
    pos_.assign(static_cast<std::size_t>((max_x_ + 1) * (max_t_ + 1)), -1);
    factor_.resize(orders_.size());
    for (int p = 0; p < count(); ++p) {
        auto [dx, dt] = orders_[static_cast<std::size_t>(p)];
        pos_[static_cast<std::size_t>(dx * (max_t_ + 1) + dt)] = p;
        double f = 1.0;
        for (int i = 2; i <= dx; ++i) f *= i;
        for (int i = 2; i <= dt; ++i) f *= i;
        factor_[static_cast<std::size_t>(p)] = f;
    }
    for (int k = 0; k < count(); ++k) {
        auto [i, j] = orders_[static_cast<std::size_t>(k)];
        for (int a = 0; a <= i; ++a)
            for (int b = 0; b <= j; ++b) {
                int p = pos(a, b), q = pos(i - a, j - b);
                if (p >= 0 && q >= 0) table_.push_back({k, p, q});
            }
    }
}

int JetSpec::pos(int dx, int dt) const {
    if (dx < 0 || dt < 0 || dx > max_x_ || dt > max_t_) return -1;
    return pos_[static_cast<std::size_t>(dx * (max_t_ + 1) + dt)];
}

std::shared_ptr<const JetSpec> JetSpec::scalar() {
    static std::shared_ptr<const JetSpec> s(new JetSpec({{0, 0}}));
    return s;
}

std::shared_ptr<const JetSpec> JetSpec::closure(std::span<const std::pair<int, int>> targets) {
    std::vector<std::pair<int, int>> orders;
    for (auto [tx, tt] : targets) {
        if (tx < 0 || tt < 0) throw ArgumentError("negative derivative order");
        for (int i = 0; i <= tx; ++i)
            for (int j = 0; j <= tt; ++j) orders.emplace_back(i, j);
    }
    orders.emplace_back(0, 0);
    std::sort(orders.begin(), orders.end(), [](auto a, auto b) {
        int ta = a.first + a.second, tb = b.first + b.second;
        return ta != tb ? ta < tb : a < b;
    });
    orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
    return std::shared_ptr<const JetSpec>(new JetSpec(std::move(orders)));
}

void jet_mul(const JetSpec& s, const double* a, const double* b, double* c) {
    std::fill(c, c + s.count(), 0.0);
    for (const auto& t : s.product_table()) c[t.k] += a[t.p] * b[t.q];
}

void jet_corr_acc(const JetSpec& s, const double* cbar, const double* other, double* abar) {
    for (const auto& t : s.product_table()) abar[t.p] += cbar[t.k] * other[t.q];
}

void jet_compose(const JetSpec& s, const double* a, const double* d, double* c) {
    const int n = s.count(), K = s.max_total();
    // Horner on the nilpotent part h = a - a[0]: r = (..(d[K] h + d[K-1]) h ..) + d[0].
    std::vector<double> h(a, a + n), r(static_cast<std::size_t>(n), 0.0),
        tmp(static_cast<std::size_t>(n));
    h[0] = 0.0;
    r[0] = d[K];
    for (int k = K - 1; k >= 0; --k) {
        jet_mul(s, r.data(), h.data(), tmp.data());
        tmp[0] += d[k];
        std::swap(r, tmp);
    }
    std::copy(r.begin(), r.end(), c);
}

namespace {

double eval_poly(const std::vector<double>& p, double x) {
    double v = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i];
    return v;
}

// Series for f with f' = g(f), g a polynomial: d[k] = P_k(f(v))/k! with
// P_{k+1} = P_k' * g.
void recurrence_series(double f0, std::vector<double> g, int K, double* d) {
    d[0] = f0;
    std::vector<double> P = g;  // P_1 = g
    double kfact = 1.0;
    for (int k = 1; k <= K; ++k) {
        kfact *= k;
        d[k] = eval_poly(P, f0) / kfact;
        if (k == K) break;
        std::vector<double> dP(P.size() - 1);
        for (std::size_t i = 1; i < P.size(); ++i) dP[i - 1] = P[i] * static_cast<double>(i);
        std::vector<double> next(dP.size() + g.size() - 1, 0.0);
        for (std::size_t i = 0; i < dP.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j) next[i + j] += dP[i] * g[j];
        P = std::move(next);
    }
}

}  // namespace

void tanh_series(double v, int K, double* d) {
    recurrence_series(std::tanh(v), {1.0, 0.0, -1.0}, K, d);  // f' = 1 - f^2
}

void sigmoid_series(double v, int K, double* d) {
    const double s = 1.0 / (1.0 + std::exp(-v));
    recurrence_series(s, {0.0, 1.0, -1.0}, K, d);  // f' = f - f^2
}

void exp_series(double v, int K, double* d) {
    const double e = std::exp(v);
    double kfact = 1.0;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) kfact *= k;
        d[k] = e / kfact;
    }
}

void sin_series(double v, int K, double* d) {
    const double cyc[4] = {std::sin(v), std::cos(v), -std::sin(v), -std::cos(v)};
    double kfact = 1.0;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) kfact *= k;
        d[k] = cyc[k % 4] / kfact;
    }
}

void cos_series(double v, int K, double* d) {
    const double cyc[4] = {std::cos(v), -std::sin(v), -std::cos(v), std::sin(v)};
    double kfact = 1.0;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) kfact *= k;
        d[k] = cyc[k % 4] / kfact;
    }
}

void cosh_series(double v, int K, double* d) {
    const double ch = std::cosh(v), sh = std::sinh(v);
    double kfact = 1.0;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) kfact *= k;
        d[k] = (k % 2 == 0 ? ch : sh) / kfact;
    }
}

void recip_series(double v, int K, double* d) {
    // f = 1/u: f^(k)/k! = (-1)^k / u^{k+1}
    double p = 1.0 / v;
    for (int k = 0; k <= K; ++k) {
        d[k] = (k % 2 == 0 ? p : -p);
        p /= v;
    }
}

Jet::Jet(JetSpecPtr spec, double value) : spec_(std::move(spec)) {
    c_.assign(static_cast<std::size_t>(spec_->count()), 0.0);
    c_[0] = value;
}

Jet Jet::variable(JetSpecPtr spec, double v, int dx, int dt) {
    Jet j(std::move(spec), v);
    int p = j.spec_->pos(dx, dt);
    if (p > 0) j.c_[static_cast<std::size_t>(p)] = 1.0;
    return j;
}

Jet Jet::from_coeffs(JetSpecPtr spec, std::vector<double> coeffs) {
    if (coeffs.size() != static_cast<std::size_t>(spec->count()))
        throw ArgumentError("jet: coefficient count mismatch");
    Jet j(std::move(spec), 0.0);
    j.c_ = std::move(coeffs);
    return j;
}

double Jet::derivative(int dx, int dt) const {
    int p = spec_->pos(dx, dt);
    if (p < 0) throw ArgumentError("derivative order outside jet support");
    return c_[static_cast<std::size_t>(p)] * spec_->extract_factor(p);
}

namespace {
void check_spec(const Jet& a, const Jet& b) {
    if (!a.spec()->same(*b.spec())) throw ArgumentError("jet support mismatch");
}
}  // namespace

Jet Jet::operator-() const {
    Jet r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
}

Jet operator+(const Jet& a, const Jet& b) {
    check_spec(a, b);
    Jet r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
    return r;
}

Jet operator-(const Jet& a, const Jet& b) {
    check_spec(a, b);
    Jet r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
    return r;
}

Jet operator*(const Jet& a, const Jet& b) {
    check_spec(a, b);
    Jet r(a.spec_, 0.0);
    jet_mul(*a.spec_, a.c_.data(), b.c_.data(), r.c_.data());
    return r;
}

Jet operator+(const Jet& a, double s) {
    Jet r = a;
    r.c_[0] += s;
    return r;
}

Jet operator*(const Jet& a, double s) {
    Jet r = a;
    for (auto& v : r.c_) v *= s;
    return r;
}

Jet Jet::compose_with(void (*series)(double, int, double*)) const {
    const int K = spec_->max_total();
    std::vector<double> d(static_cast<std::size_t>(K) + 1);
    series(c_[0], K, d.data());
    Jet r(spec_, 0.0);
    jet_compose(*spec_, c_.data(), d.data(), r.c_.data());
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    check_spec(a, b);
    return a * b.compose_with(&recip_series);
}

Jet operator/(double s, const Jet& a) { return a.compose_with(&recip_series) * s; }

Jet tanh(const Jet& a) { return a.compose_with(&tanh_series); }
Jet sigmoid(const Jet& a) { return a.compose_with(&sigmoid_series); }
Jet exp(const Jet& a) { return a.compose_with(&exp_series); }
Jet sin(const Jet& a) { return a.compose_with(&sin_series); }
Jet cos(const Jet& a) { return a.compose_with(&cos_series); }
Jet cosh(const Jet& a) { return a.compose_with(&cosh_series); }
Jet sech(const Jet& a) { return 1.0 / cosh(a); }

}  // namespace pinnosc
