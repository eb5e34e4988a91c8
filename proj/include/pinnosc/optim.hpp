#pragma once

#include <deque>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "pinnosc/array.hpp"

namespace pinnosc {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias correction. Moments live per parameter array; updates are
/// in-place and deterministic.
class Adam {
  public:
    Adam(AdamConfig cfg, std::vector<Array*> params);

    void step(const std::vector<Array>& grads);
    long long step_count() const { return t_; }

  private:
    AdamConfig cfg_;
    std::vector<Array*> params_;
    std::vector<Array> m_, v_;
    long long t_ = 0;
};

struct LbfgsConfig {
    int history = 50;
    double c1 = 1e-4;   // sufficient decrease
    double c2 = 0.9;    // curvature
    int max_trials = 25;
    double fallback_step = 1e-3;
    std::function<void(std::string_view)> log;  // line-search failure notices
};

/// Limited-memory BFGS with a strong-Wolfe line search (bracket + zoom,
/// cubic interpolation). One step() call is one outer iteration: direction by
/// two-loop recursion, line search, curvature-guarded history update. If the
/// line search fails to find a Wolfe point it falls back to a normalized
/// steepest-descent step of fixed length and keeps going.
class Lbfgs {
  public:
    /// Evaluates loss and gradient at x. Must be pure for fixed x.
    using Objective = std::function<double(std::span<const double>, std::span<double>)>;

    Lbfgs(LbfgsConfig cfg, std::size_t dim);

    /// Advance x by one accepted step; returns the accepted step length
    /// (0 when the gradient vanishes). Throws NumericError when the loss is
    /// non-finite at every trial point.
    double step(std::vector<double>& x, const Objective& f);

    double last_loss() const { return fx_; }
    const std::vector<double>& last_grad() const { return gx_; }
    /// Stored curvature pairs (for tests).
    std::size_t history_size() const { return s_.size(); }
    double pair_sy(std::size_t i) const { return sy_[i]; }

  private:
    void direction(std::vector<double>& d) const;

    LbfgsConfig cfg_;
    std::size_t dim_;
    bool primed_ = false;
    bool first_ = true;
    double fx_ = 0.0;
    std::vector<double> gx_;
    std::deque<std::vector<double>> s_, y_;
    std::deque<double> sy_;
};

std::vector<double> flatten(const std::vector<Array*>& params);
void unflatten(std::span<const double> x, const std::vector<Array*>& params);

}  // namespace pinnosc
