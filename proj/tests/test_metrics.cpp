#include <doctest.h>

#include <cmath>

#include "pinnosc/metrics.hpp"
#include "pinnosc/rng.hpp"

using namespace pinnosc;

TEST_CASE("relative_l2: worked values") {
    const std::vector<double> ref = {1, 2, 3};
    CHECK(relative_l2(ref, ref) == 0.0);
    const std::vector<double> zero2 = {0, 0}, ref2 = {3, 4};
    CHECK(relative_l2(zero2, ref2) == doctest::Approx(1.0).epsilon(1e-15));
    const std::vector<double> pred = {1, 2, 4};
    // 1/sqrt(14) = 0.26726124191242440
    CHECK(std::abs(relative_l2(pred, ref) - 0.26726124191242440) <= 1e-12);
    CHECK_THROWS_AS(relative_l2(zero2, std::vector<double>{0, 0}), ArgumentError);
}

TEST_CASE("explained_variance: worked values") {
    const std::vector<double> ref = {1, 2, 3};
    CHECK(explained_variance(ref, ref) == 1.0);
    const std::vector<double> pred = {1, 2, 4};
    CHECK(std::abs(explained_variance(pred, ref) - 0.5) <= 1e-12);
    const std::vector<double> mean_pred = {2, 2, 2};
    CHECK(std::abs(explained_variance(mean_pred, ref)) <= 1e-12);
    CHECK_THROWS_AS(explained_variance(ref, std::vector<double>{5, 5, 5}), ArgumentError);
}

TEST_CASE("max_error and mae: worked values") {
    const std::vector<double> ref = {1, 2, 3}, pred = {1, 2, 4};
    CHECK(max_error(ref, ref) == 0.0);
    CHECK(max_error(pred, ref) == 1.0);
    CHECK(mean_absolute_error(pred, ref) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    // antisymmetric +-delta perturbation
    const std::vector<double> anti = {1 + 0.25, 2 - 0.25, 3};
    CHECK(max_error(anti, ref) == 0.25);
    // uniform offset c
    const std::vector<double> offset = {1.5, 2.5, 3.5};
    CHECK(mean_absolute_error(offset, ref) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("metrics: permutation invariance and error-scaling") {
    Rng rng(9);
    std::vector<double> ref(64), pred(64);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        ref[i] = rng.uniform(-2, 2);
        pred[i] = ref[i] + rng.uniform(-0.5, 0.5);
    }
    // identical permutation of both
    std::vector<std::size_t> perm(ref.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = (i * 7 + 3) % perm.size();
    std::vector<double> ref_p(ref.size()), pred_p(ref.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        ref_p[i] = ref[perm[i]];
        pred_p[i] = pred[perm[i]];
    }
    CHECK(relative_l2(pred_p, ref_p) == doctest::Approx(relative_l2(pred, ref)).epsilon(1e-13));
    CHECK(explained_variance(pred_p, ref_p) ==
          doctest::Approx(explained_variance(pred, ref)).epsilon(1e-13));
    CHECK(max_error(pred_p, ref_p) == max_error(pred, ref));
    CHECK(mean_absolute_error(pred_p, ref_p) ==
          doctest::Approx(mean_absolute_error(pred, ref)).epsilon(1e-13));

    // scaling the error field e = pred - ref by alpha scales max/mae/l2 by |alpha|
    const double alpha = -2.5;
    std::vector<double> scaled(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) scaled[i] = ref[i] + alpha * (pred[i] - ref[i]);
    CHECK(max_error(scaled, ref) ==
          doctest::Approx(std::abs(alpha) * max_error(pred, ref)).epsilon(1e-13));
    CHECK(mean_absolute_error(scaled, ref) ==
          doctest::Approx(std::abs(alpha) * mean_absolute_error(pred, ref)).epsilon(1e-13));
    CHECK(relative_l2(scaled, ref) ==
          doctest::Approx(std::abs(alpha) * relative_l2(pred, ref)).epsilon(1e-13));
}

TEST_CASE("explained_variance is at most 1, equal iff exact") {
    Rng rng(10);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> ref(16), pred(16);
        for (std::size_t i = 0; i < ref.size(); ++i) {
            ref[i] = rng.uniform(-1, 1);
            pred[i] = rng.uniform(-1, 1);
        }
        ref[0] += 1.0;  // ensure non-constant
        const double ev = explained_variance(pred, ref);
        CHECK(ev <= 1.0);
        if (ev == 1.0)
            for (std::size_t i = 0; i < ref.size(); ++i) CHECK(pred[i] == ref[i]);
    }
}

TEST_CASE("evaluate_grids requires matching shapes; magnitude grid") {
    GridSolution a, b;
    a.k_t = b.k_t = 2;
    a.k_x = b.k_x = 3;
    a.n_channels = b.n_channels = 1;
    a.times = b.times = {0.0, 0.1};
    a.xs = b.xs = {0, 1, 2};
    a.values = Array({2, 3}, {1, 2, 3, 4, 5, 6});
    b.values = Array({2, 3}, {1, 2, 3, 4, 5, 7});
    MetricsRow row = evaluate_grids(a, b);
    CHECK(row.max_err == 1.0);
    b.k_x = 4;
    CHECK_THROWS_AS(evaluate_grids(a, b), DimensionError);

    GridSolution c;
    c.k_t = 1;
    c.k_x = 2;
    c.n_channels = 2;
    c.times = {0.0};
    c.xs = {0, 1};
    c.values = Array({1, 4}, {3, 0, 4, 1});  // channels stacked: re = (3,0), im = (4,1)
    GridSolution mag = magnitude_grid(c);
    CHECK(mag.values(0, 0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(mag.values(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
}
