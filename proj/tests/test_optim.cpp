#include <doctest.h>

#include <cmath>

#include "pinnosc/optim.hpp"
#include "pinnosc/rng.hpp"

using namespace pinnosc;

namespace {

/// Direct-solve oracle: Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

}  // namespace

TEST_CASE("adam: zero gradients leave parameters unchanged") {
    Array w({3}, {1, 2, 3});
    Adam adam({0.1}, {&w});
    adam.step({Array({3})});
    CHECK(w(0) == 1.0);
    CHECK(w(1) == 2.0);
    CHECK(w(2) == 3.0);
}

TEST_CASE("adam: first-step hand evaluation") {
    // w=0, g=1, lr=0.1: bias correction gives mhat = vhat = 1, so w -> -0.1.
    Array w({1}, {0.0});
    Adam adam({0.1}, {&w});
    adam.step({Array({1}, {1.0})});
    CHECK(w(0) == doctest::Approx(-0.1).epsilon(1e-7));
}

TEST_CASE("adam: converges on (w-3)^2") {
    Array w({1}, {0.0});
    Adam adam({0.05}, {&w});
    for (int i = 0; i < 500; ++i) adam.step({Array({1}, {2.0 * (w(0) - 3.0)})});
    CHECK(std::abs(w(0) - 3.0) <= 1e-2);
}

TEST_CASE("adam: non-finite gradient raises") {
    Array w({1}, {0.0});
    Adam adam({0.1}, {&w});
    CHECK_THROWS_AS(adam.step({Array({1}, {std::nan("")})}), NumericError);
}

TEST_CASE("adam: strict decrease on a convex quadratic") {
    Array w({2}, {4.0, -3.0});
    Adam adam({0.05}, {&w});
    auto loss = [&] { return w(0) * w(0) + 2.0 * w(1) * w(1); };
    double prev = loss();
    for (int i = 0; i < 50; ++i) {
        adam.step({Array({2}, {2 * w(0), 4 * w(1)})});
        const double now = loss();
        CHECK(now < prev);
        prev = now;
    }
}

TEST_CASE("lbfgs: SPD quadratic reaches the direct solution") {
    // 0.5 w'Aw - b'w with A SPD 5x5; minimizer solves Aw = b.
    const int n = 5;
    Rng rng(3);
    std::vector<std::vector<double>> a(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = rng.uniform(-1, 1);
            a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
            a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
        }
    for (int i = 0; i < n; ++i)
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] += n;
    std::vector<double> b(static_cast<std::size_t>(n));
    for (auto& v : b) v = rng.uniform(-1, 1);
    const std::vector<double> expect = solve_dense(a, b);

    Lbfgs::Objective f = [&](std::span<const double> x, std::span<double> g) {
        double loss = 0.0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
            double ax = 0.0;
            for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) ax += a[i][j] * x[j];
            g[i] = ax - b[i];
            loss += 0.5 * x[i] * ax - b[i] * x[i];
        }
        return loss;
    };
    Lbfgs opt({}, static_cast<std::size_t>(n));
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    double prev_loss = 1e300;
    for (int it = 0; it < 10; ++it) {
        if (opt.step(x, f) == 0.0) break;  // converged: no further accepted steps
        CHECK(opt.last_loss() < prev_loss);  // strict decrease on a convex quadratic
        prev_loss = opt.last_loss();
    }
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i)
        CHECK(std::abs(x[i] - expect[i]) <= 1e-8);
}

TEST_CASE("lbfgs: rosenbrock from (-1.2, 1)") {
    Lbfgs::Objective f = [](std::span<const double> x, std::span<double> g) {
        const double a = x[0], b = x[1];
        g[0] = -400 * a * (b - a * a) - 2 * (1 - a);
        g[1] = 200 * (b - a * a);
        return 100 * (b - a * a) * (b - a * a) + (1 - a) * (1 - a);
    };
    Lbfgs opt({}, 2);
    std::vector<double> x = {-1.2, 1.0};
    int it = 0;
    for (; it < 200; ++it) {
        opt.step(x, f);
        if (opt.last_loss() < 1e-6) break;
    }
    CHECK(opt.last_loss() < 1e-6);
    CHECK(it < 200);
}

TEST_CASE("lbfgs: zero gradient leaves parameters unchanged") {
    Lbfgs::Objective f = [](std::span<const double>, std::span<double> g) {
        for (auto& v : g) v = 0.0;
        return 1.0;
    };
    Lbfgs opt({}, 3);
    std::vector<double> x = {1, 2, 3};
    const double step = opt.step(x, f);
    CHECK(step == 0.0);
    CHECK(x[0] == 1.0);
    CHECK(x[1] == 2.0);
    CHECK(x[2] == 3.0);
}

TEST_CASE("lbfgs: stored pairs satisfy the curvature condition") {
    Lbfgs::Objective f = [](std::span<const double> x, std::span<double> g) {
        double loss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            loss += std::cos(x[i]) + 0.1 * x[i] * x[i];
            g[i] = -std::sin(x[i]) + 0.2 * x[i];
        }
        return loss;
    };
    Lbfgs opt({}, 4);
    std::vector<double> x = {2.0, -1.0, 0.5, 3.0};
    for (int it = 0; it < 30; ++it) opt.step(x, f);
    CHECK(opt.history_size() > 0);
    for (std::size_t i = 0; i < opt.history_size(); ++i) CHECK(opt.pair_sy(i) > 1e-10);
}

TEST_CASE("lbfgs: identical runs give identical trajectories") {
    auto run = [](std::vector<double>* out) {
        Lbfgs::Objective f = [](std::span<const double> x, std::span<double> g) {
            double loss = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double d = x[i] - static_cast<double>(i);
                loss += d * d * d * d + x[i] * x[i];
                g[i] = 4 * d * d * d + 2 * x[i];
            }
            return loss;
        };
        Lbfgs opt({}, 3);
        std::vector<double> x = {0.3, 0.7, -0.2};
        for (int it = 0; it < 15; ++it) opt.step(x, f);
        *out = x;
    };
    std::vector<double> a, b;
    run(&a);
    run(&b);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("flatten/unflatten round-trip") {
    Array w1({2, 2}, {1, 2, 3, 4}), w2({3}, {5, 6, 7});
    std::vector<Array*> params = {&w1, &w2};
    std::vector<double> flat = flatten(params);
    REQUIRE(flat.size() == 7);
    flat[0] = 9.0;
    unflatten(flat, params);
    CHECK(w1(0, 0) == 9.0);
    CHECK(w2(2) == 7.0);
}
