#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "pinnosc/errors.hpp"

namespace pinnosc {

/// Coefficient support for truncated bivariate Taylor expansion around a point
/// (x0, t0): a jet stores one coefficient per multi-index (dx, dt) in the
/// support. The support is the downward closure of a target set of derivative
/// orders, which makes it closed under truncated multiplication: every
/// coefficient of a product of two jets on the support depends only on
/// coefficients inside the support.
///
/// Index 0 is always the constant term (0,0). Coefficients are Taylor
/// coefficients, i.e. coeff(dx,dt) = d^{dx+dt} f / (dx! dt!).
class JetSpec {
  public:
    struct ProdTerm {
        int k, p, q;  // c[k] += a[p] * b[q]
    };

    /// Trivial support {(0,0)}: plain scalar arithmetic.
    static std::shared_ptr<const JetSpec> scalar();

    /// Downward closure of the given (order_x, order_t) targets.
    static std::shared_ptr<const JetSpec> closure(std::span<const std::pair<int, int>> targets);
    static std::shared_ptr<const JetSpec> closure(std::initializer_list<std::pair<int, int>> t) {
        return closure(std::span<const std::pair<int, int>>(t.begin(), t.size()));
    }

    int count() const { return static_cast<int>(orders_.size()); }
    int max_total() const { return max_total_; }
    bool trivial() const { return orders_.size() == 1; }

    /// Position of (dx, dt) in the coefficient vector, or -1 if not in support.
    int pos(int dx, int dt) const;
    std::pair<int, int> order_at(int p) const { return orders_[static_cast<std::size_t>(p)]; }

    /// dx! * dt! — multiply a coefficient by this to get the derivative value.
    double extract_factor(int p) const { return factor_[static_cast<std::size_t>(p)]; }

    std::span<const ProdTerm> product_table() const { return table_; }

    bool same(const JetSpec& other) const { return orders_ == other.orders_; }

  private:
    explicit JetSpec(std::vector<std::pair<int, int>> orders);

    std::vector<std::pair<int, int>> orders_;  // sorted, (0,0) first
    std::vector<double> factor_;
    std::vector<ProdTerm> table_;
    std::vector<int> pos_;  // dense (max_x+1) x (max_t+1) lookup, -1 holes
    int max_x_ = 0, max_t_ = 0, max_total_ = 0;
};

using JetSpecPtr = std::shared_ptr<const JetSpec>;

// Raw kernels shared by Jet and the tape. Output must not alias inputs.
void jet_mul(const JetSpec& s, const double* a, const double* b, double* c);
/// Transposed multiplication: abar[p] += sum_k cbar[k] * other[q] over table
/// entries (k,p,q). This is the adjoint of jet_mul in its first argument.
void jet_corr_acc(const JetSpec& s, const double* cbar, const double* other, double* abar);
/// Composition c = f(a) where d[k] = f^(k)(a0)/k! for k = 0..K, K = max_total.
void jet_compose(const JetSpec& s, const double* a, const double* d, double* c);

// Scaled derivative series d[k] = f^(k)(v)/k!, k = 0..K.
void tanh_series(double v, int K, double* d);
void sigmoid_series(double v, int K, double* d);
void exp_series(double v, int K, double* d);
void sin_series(double v, int K, double* d);
void cos_series(double v, int K, double* d);
void cosh_series(double v, int K, double* d);
void recip_series(double v, int K, double* d);

/// One truncated Taylor value. Heavier than raw kernels; used for pointwise
/// field evaluation (closed-form solutions, residual checks, input_derivative).
class Jet {
  public:
    Jet() = default;
    Jet(JetSpecPtr spec, double value);

    static Jet constant(JetSpecPtr spec, double v) { return Jet(std::move(spec), v); }
    /// Value with a unit seed on (dx, dt) when that index is in the support.
    static Jet variable(JetSpecPtr spec, double v, int dx, int dt);
    static Jet from_coeffs(JetSpecPtr spec, std::vector<double> coeffs);

    const JetSpecPtr& spec() const { return spec_; }
    double value() const { return c_[0]; }
    double coeff(int p) const { return c_[static_cast<std::size_t>(p)]; }
    /// Derivative value d^{dx+dt} f / dx^{dx} dt^{dt}; throws ArgumentError if
    /// (dx, dt) is outside the support.
    double derivative(int dx, int dt) const;

    Jet operator-() const;
    friend Jet operator+(const Jet& a, const Jet& b);
    friend Jet operator-(const Jet& a, const Jet& b);
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator+(const Jet& a, double s);
    friend Jet operator+(double s, const Jet& a) { return a + s; }
    friend Jet operator-(const Jet& a, double s) { return a + (-s); }
    friend Jet operator-(double s, const Jet& a) { return -a + s; }
    friend Jet operator*(const Jet& a, double s);
    friend Jet operator*(double s, const Jet& a) { return a * s; }
    friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
    friend Jet operator/(double s, const Jet& a);

    friend Jet tanh(const Jet& a);
    friend Jet sigmoid(const Jet& a);
    friend Jet exp(const Jet& a);
    friend Jet sin(const Jet& a);
    friend Jet cos(const Jet& a);
    friend Jet cosh(const Jet& a);
    friend Jet sech(const Jet& a);

  private:
    Jet compose_with(void (*series)(double, int, double*)) const;

    JetSpecPtr spec_;
    std::vector<double> c_;
};

}  // namespace pinnosc
