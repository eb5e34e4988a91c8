#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "pinnosc/fft.hpp"
#include "pinnosc/grid.hpp"
#include "pinnosc/pde.hpp"
#include "pinnosc/refsolve.hpp"
#include "pinnosc/rng.hpp"

using namespace pinnosc;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> benchmark_times(double t_train_end, int k_t, int horizon) {
    std::vector<double> t = linspace(0.0, t_train_end, k_t);
    const double h = t[1] - t[0];
    const double t0 = t.back();
    for (int j = 1; j <= horizon; ++j) t.push_back(t0 + h * j);
    return t;
}

/// Periodic collocation-style xs: n points, endpoint excluded.
std::vector<double> periodic_xs(double lo, double hi, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / static_cast<double>(n);
    return xs;
}

double max_row_diff(const GridSolution& a, const GridSolution& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

}  // namespace

TEST_CASE("fft matches a naive DFT and round-trips") {
    Rng rng(4);
    std::vector<std::complex<double>> a(64);
    for (auto& v : a) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    auto naive = [&](const std::vector<std::complex<double>>& in) {
        std::vector<std::complex<double>> out(in.size());
        const int n = static_cast<int>(in.size());
        for (int k = 0; k < n; ++k) {
            std::complex<double> acc{0, 0};
            for (int j = 0; j < n; ++j)
                acc += in[static_cast<std::size_t>(j)] *
                       std::polar(1.0, -2.0 * kPi * j * k / n);
            out[static_cast<std::size_t>(k)] = acc;
        }
        return out;
    };
    auto expect = naive(a);
    auto got = a;
    fft(got, false);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(got[i] - expect[i]) <= 1e-10);
    fft(got, true);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(got[i] - a[i]) <= 1e-12);
    std::vector<std::complex<double>> bad(12);
    CHECK_THROWS_AS(fft(bad, false), ArgumentError);
}

TEST_CASE("burgers: initial row, odd symmetry, self-convergence") {
    const auto times = benchmark_times(0.8, 80, 20);
    const auto xs = linspace(-1.0, 1.0, 256);
    SolverParams p;
    GridSolution g = solve_burgers(0.01 / kPi, xs, times, p);

    for (int i = 0; i < g.k_x; ++i)
        CHECK(std::abs(g.at(0, 0, i) + std::sin(kPi * g.xs[static_cast<std::size_t>(i)])) <=
              1e-12);

    // odd initial data stays odd: u(0, t) = 0 (x = 0 is grid index 127.5; use
    // a dedicated request)
    const std::vector<double> x0 = {0.0};
    GridSolution center = solve_burgers(0.01 / kPi, x0, times, p);
    for (int n = 0; n < center.k_t; ++n) CHECK(std::abs(center.at(n, 0, 0)) <= 1e-10);

    SolverParams half = p;
    half.dt_max = p.dt_max / 2;
    GridSolution g2 = solve_burgers(0.01 / kPi, xs, times, half);
    CHECK(max_row_diff(g, g2) <= 1e-8);

    CHECK_THROWS_AS(solve_burgers(0.01 / kPi, std::vector<double>{1.5}, times, p),
                    ArgumentError);
    CHECK_THROWS_AS(solve_burgers(-1.0, xs, times, p), ArgumentError);
}

TEST_CASE("allen-cahn: initial row, periodicity, energy decay, self-convergence") {
    const auto times = benchmark_times(0.8, 80, 20);
    const auto xs = linspace(-1.0, 1.0, 201);
    SolverParams p;
    GridSolution g = solve_allen_cahn(xs, times, p);
    auto ic = [](double x) { return x * x * std::cos(kPi * x) / std::cosh(x); };
    for (int i = 0; i < g.k_x; ++i)
        CHECK(std::abs(g.at(0, 0, i) - ic(g.xs[static_cast<std::size_t>(i)])) <= 1e-12);
    for (int n = 0; n < g.k_t; ++n)
        CHECK(std::abs(g.at(n, 0, 0) - g.at(n, 0, g.k_x - 1)) <= 1e-10);

    // Lyapunov energy E = sum [5e-5 u_x^2 + (5/4)(u^2-1)^2] dx nonincreasing.
    const int n_spec = 512;
    const auto xs_spec = periodic_xs(-1.0, 1.0, n_spec);
    GridSolution gs = solve_allen_cahn(xs_spec, times, p);
    auto energy = [&](int level) {
        std::vector<std::complex<double>> u(static_cast<std::size_t>(n_spec));
        for (int i = 0; i < n_spec; ++i) u[static_cast<std::size_t>(i)] = gs.at(level, 0, i);
        auto hat = u;
        fft(hat, false);
        for (int i = 0; i < n_spec; ++i) {
            const int m = i < n_spec / 2 ? i : i - n_spec;
            hat[static_cast<std::size_t>(i)] *= std::complex<double>(0.0, kPi * m);
        }
        fft(hat, true);
        const double dx = 2.0 / n_spec;
        double e = 0.0;
        for (int i = 0; i < n_spec; ++i) {
            const double uv = u[static_cast<std::size_t>(i)].real();
            const double ux = hat[static_cast<std::size_t>(i)].real();
            const double w = uv * uv - 1.0;
            e += (5e-5 * ux * ux + 1.25 * w * w) * dx;
        }
        return e;
    };
    double prev = energy(0);
    for (int n = 1; n < gs.k_t; ++n) {
        const double now = energy(n);
        CHECK(now <= prev + 1e-10);
        prev = now;
    }

    SolverParams half = p;
    half.dt_max = p.dt_max / 2;
    GridSolution g2 = solve_allen_cahn(xs, times, half);
    CHECK(max_row_diff(g, g2) <= 1e-7);
}

TEST_CASE("schrodinger: mass, symmetry, self-convergence") {
    const auto times = benchmark_times(2 * kPi / 5, 160, 40);
    SolverParams p;

    // discrete mass on the collocation-style grid
    const int n_spec = 512;
    const auto xs_spec = periodic_xs(-5.0, 5.0, n_spec);
    GridSolution gs = solve_schrodinger(xs_spec, times, p);
    auto mass = [&](int level) {
        double m = 0.0;
        const double dx = 10.0 / n_spec;
        for (int i = 0; i < n_spec; ++i) {
            const double re = gs.at(level, 0, i), im = gs.at(level, 1, i);
            m += (re * re + im * im) * dx;
        }
        return m;
    };
    const double m0 = mass(0);
    // 4 sech^2 integrates to 8 tanh(5) = 7.9992736341007610 over [-5, 5]
    CHECK(std::abs(m0 - 7.9992736341007610) <= 1e-6);
    for (int n = 1; n < gs.k_t; ++n) CHECK(std::abs(mass(n) - m0) / m0 <= 1e-8);

    // |u| even in x (even IC, symmetric equation)
    const auto xs = linspace(-5.0, 5.0, 257);
    GridSolution g = solve_schrodinger(xs, times, p);
    for (int n = 0; n < g.k_t; n += 20)
        for (int i = 0; i < 128; i += 7) {
            const int j = 256 - i;
            const double a = std::hypot(g.at(n, 0, i), g.at(n, 1, i));
            const double b = std::hypot(g.at(n, 0, j), g.at(n, 1, j));
            CHECK(std::abs(a - b) <= 1e-9);
        }

    const auto times_short = benchmark_times(2 * kPi / 5, 40, 10);
    GridSolution a = solve_schrodinger(xs, times_short, p);
    SolverParams half = p;
    half.dt_max = p.dt_max / 2;
    GridSolution b = solve_schrodinger(xs, times_short, half);
    CHECK(max_row_diff(a, b) <= 1e-7);
}

TEST_CASE("beam: closed form on the grid") {
    const auto times = benchmark_times(0.8, 80, 20);
    const auto xs = linspace(0.0, kPi, 256);
    GridSolution g = solve_beam(xs, times);
    // (pi/2, 0) -> 1; boundary 0 for all t
    CHECK(std::abs(g.at(0, 0, 128) - std::sin(g.xs[128])) <= 1e-15);
    GridSolution probe = solve_beam(std::vector<double>{kPi / 2}, std::vector<double>{0.0});
    CHECK(probe.at(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    for (int n = 0; n < g.k_t; ++n) {
        CHECK(std::abs(g.at(n, 0, 0)) <= 1e-15);
        CHECK(std::abs(g.at(n, 0, g.k_x - 1)) <= 1e-12);
    }
    // residual of the emitted grid under the beam operator
    auto [spec, dom] = make_benchmark("euler_bernoulli");
    ClosedFormField field(1, [&](const Jet& x, const Jet& t, int ch) {
        return spec.analytic_jet(x, t, ch);
    });
    Rng rng(2);
    for (int i = 0; i < 10; ++i) {
        const auto r =
            residual_eval(spec, field, rng.uniform(0.0, kPi), rng.uniform(0.0, 1.0));
        CHECK(std::abs(r[0]) <= 1e-8);
    }
}

TEST_CASE("every solver reproduces its IC row exactly at t=0") {
    const auto times = benchmark_times(0.8, 8, 2);
    for (const char* name : {"burgers", "allen_cahn", "euler_bernoulli"}) {
        auto [spec, dom] = make_benchmark(name);
        const auto xs = linspace(dom.x_min, dom.x_max, 64);
        GridSolution g = solve_reference(spec, dom, xs, times, {});
        for (int i = 0; i < g.k_x; ++i)
            CHECK(std::abs(g.at(0, 0, i) -
                           spec.ic_terms[0].target[0](g.xs[static_cast<std::size_t>(i)])) <=
                  1e-12);
    }
    auto [nls, ndom] = make_benchmark("schrodinger");
    const auto times_n = benchmark_times(2 * kPi / 5, 8, 2);
    const auto xs = linspace(-5.0, 5.0, 64);
    GridSolution g = solve_reference(nls, ndom, xs, times_n, {});
    for (int i = 0; i < g.k_x; ++i) {
        CHECK(std::abs(g.at(0, 0, i) - 2.0 / std::cosh(g.xs[static_cast<std::size_t>(i)])) <=
              1e-12);
        CHECK(g.at(0, 1, i) == 0.0);
    }
}
