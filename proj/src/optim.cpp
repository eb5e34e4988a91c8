#include "pinnosc/optim.hpp"

#include <cmath>

#include "pinnosc/errors.hpp"

namespace pinnosc {

Adam::Adam(AdamConfig cfg, std::vector<Array*> params) : cfg_(cfg), params_(std::move(params)) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Array* p : params_) {
        m_.emplace_back(p->shape());
        v_.emplace_back(p->shape());
    }
}

void Adam::step(const std::vector<Array>& grads) {
    if (grads.size() != params_.size()) throw DimensionError("adam: gradient count mismatch");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params_.size(); ++k) {
        Array& p = *params_[k];
        const Array& g = grads[k];
        if (!p.same_shape(g)) throw DimensionError("adam: gradient shape mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double gi = g[i];
            if (!std::isfinite(gi)) throw NumericError("adam: non-finite gradient", gi);
            m_[k][i] = cfg_.beta1 * m_[k][i] + (1.0 - cfg_.beta1) * gi;
            v_[k][i] = cfg_.beta2 * v_[k][i] + (1.0 - cfg_.beta2) * gi * gi;
            const double mhat = m_[k][i] / bc1;
            const double vhat = v_[k][i] / bc2;
            p[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

Lbfgs::Lbfgs(LbfgsConfig cfg, std::size_t dim) : cfg_(cfg), dim_(dim) {
    gx_.assign(dim_, 0.0);
}

void Lbfgs::direction(std::vector<double>& d) const {
    d.assign(gx_.begin(), gx_.end());
    const std::size_t h = s_.size();
    std::vector<double> alpha(h);
    for (std::size_t i = h; i-- > 0;) {
        alpha[i] = dot(s_[i], d) / sy_[i];
        for (std::size_t j = 0; j < dim_; ++j) d[j] -= alpha[i] * y_[i][j];
    }
    if (h > 0) {
        const double gamma = sy_[h - 1] / dot(y_[h - 1], y_[h - 1]);
        for (auto& v : d) v *= gamma;
    }
    for (std::size_t i = 0; i < h; ++i) {
        const double beta = dot(y_[i], d) / sy_[i];
        for (std::size_t j = 0; j < dim_; ++j) d[j] += (alpha[i] - beta) * s_[i][j];
    }
    for (auto& v : d) v = -v;
}

namespace {

// Cubic minimizer of an interval with values/slopes at both ends; falls back
// to bisection when the cubic is degenerate or the minimizer leaves [a, b].
double cubic_min(double a, double fa, double da, double b, double fb, double db) {
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - da * db;
    if (disc < 0.0 || !std::isfinite(disc)) return 0.5 * (a + b);
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    double t = b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (!std::isfinite(t) || t <= lo || t >= hi) t = 0.5 * (a + b);
    return t;
}

}  // namespace

double Lbfgs::step(std::vector<double>& x, const Objective& f) {
    if (x.size() != dim_) throw DimensionError("lbfgs: dimension mismatch");
    if (!primed_) {
        fx_ = f(x, gx_);
        if (!std::isfinite(fx_)) throw NumericError("lbfgs: non-finite initial loss", fx_);
        primed_ = true;
    }
    const double gnorm = norm2(gx_);
    if (gnorm == 0.0) return 0.0;

    std::vector<double> d;
    direction(d);
    double dg0 = dot(d, gx_);
    if (dg0 >= 0.0) {  // not a descent direction; drop history and restart
        s_.clear();
        y_.clear();
        sy_.clear();
        d.assign(gx_.begin(), gx_.end());
        for (auto& v : d) v = -v;
        dg0 = -gnorm * gnorm;
    }
    // Predicted decrease below double resolution of the loss: converged.
    if (std::abs(dg0) <= 1e-16 * (1.0 + std::abs(fx_))) return 0.0;

    const std::vector<double> x0 = x;
    const std::vector<double> g0 = gx_;
    const double f0 = fx_;

    std::vector<double> gtrial(dim_);
    auto eval_at = [&](double a, double& fa, double& dga) {
        for (std::size_t j = 0; j < dim_; ++j) x[j] = x0[j] + a * d[j];
        fa = f(x, gtrial);
        dga = dot(gtrial, d);
    };

    int trials = 0;
    bool any_finite = false;
    double accepted = -1.0;

    auto wolfe_ok = [&](double fa, double dga) {
        return std::isfinite(fa) && std::abs(dga) <= -cfg_.c2 * dg0;
    };
    auto armijo_ok = [&](double a, double fa) {
        return std::isfinite(fa) && fa <= f0 + cfg_.c1 * a * dg0;
    };

    // Zoom phase keeps an interval [lo, hi] with lo satisfying Armijo.
    auto zoom = [&](double lo, double flo, double dlo, double hi, double fhi, double dhi) {
        while (trials < cfg_.max_trials) {
            double a;
            if (std::isfinite(fhi))
                a = cubic_min(lo, flo, dlo, hi, fhi, dhi);
            else
                a = 0.5 * (lo + hi);
            double fa, dga;
            eval_at(a, fa, dga);
            ++trials;
            if (std::isfinite(fa)) any_finite = true;
            if (!armijo_ok(a, fa) || fa >= flo) {
                hi = a;
                fhi = fa;
                dhi = dga;
            } else {
                if (wolfe_ok(fa, dga)) {
                    accepted = a;
                    fx_ = fa;
                    gx_ = gtrial;
                    return;
                }
                if (dga * (hi - lo) >= 0.0) {
                    hi = lo;
                    fhi = flo;
                    dhi = dlo;
                }
                lo = a;
                flo = fa;
                dlo = dga;
            }
            if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
        }
    };

    double a_prev = 0.0, f_prev = f0, d_prev = dg0;
    double a = first_ ? std::min(1.0, 1.0 / std::max(1e-12, gnorm)) : 1.0;
    while (trials < cfg_.max_trials && accepted < 0.0) {
        double fa, dga;
        eval_at(a, fa, dga);
        ++trials;
        if (std::isfinite(fa)) any_finite = true;
        if (!armijo_ok(a, fa) || (fa >= f_prev && trials > 1)) {
            zoom(a_prev, f_prev, d_prev, a, fa, dga);
            break;
        }
        if (wolfe_ok(fa, dga)) {
            accepted = a;
            fx_ = fa;
            gx_ = gtrial;
            break;
        }
        if (dga >= 0.0) {
            zoom(a, fa, dga, a_prev, f_prev, d_prev);
            break;
        }
        a_prev = a;
        f_prev = fa;
        d_prev = dga;
        a *= 2.0;
    }
    first_ = false;

    if (accepted < 0.0) {
        if (!any_finite)
            throw NumericError("lbfgs: loss not finite at any line-search trial", fx_);
        // Normalized steepest-descent fallback.
        if (cfg_.log) cfg_.log("lbfgs: line search failed, steepest-descent fallback");
        for (std::size_t j = 0; j < dim_; ++j)
            x[j] = x0[j] - cfg_.fallback_step * g0[j] / gnorm;
        fx_ = f(x, gx_);
        if (!std::isfinite(fx_))
            throw NumericError("lbfgs: non-finite loss after fallback step", fx_);
        accepted = cfg_.fallback_step;
    }

    // Curvature-guarded history update; violating pairs are skipped.
    std::vector<double> s(dim_), yv(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
        s[j] = x[j] - x0[j];
        yv[j] = gx_[j] - g0[j];
    }
    const double sy = dot(s, yv);
    if (sy > 1e-10) {
        s_.push_back(std::move(s));
        y_.push_back(std::move(yv));
        sy_.push_back(sy);
        if (static_cast<int>(s_.size()) > cfg_.history) {
            s_.pop_front();
            y_.pop_front();
            sy_.pop_front();
        }
    }
    return accepted;
}

std::vector<double> flatten(const std::vector<Array*>& params) {
    std::vector<double> x;
    for (const Array* p : params) x.insert(x.end(), p->data(), p->data() + p->size());
    return x;
}

void unflatten(std::span<const double> x, const std::vector<Array*>& params) {
    std::size_t off = 0;
    for (Array* p : params) {
        std::copy(x.begin() + static_cast<std::ptrdiff_t>(off),
                  x.begin() + static_cast<std::ptrdiff_t>(off + p->size()), p->data());
        off += p->size();
    }
}

}  // namespace pinnosc
