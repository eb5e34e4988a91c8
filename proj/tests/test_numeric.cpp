#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pinnosc/jet.hpp"
#include "pinnosc/mlp.hpp"
#include "pinnosc/pde.hpp"
#include "pinnosc/rng.hpp"
#include "pinnosc/tape.hpp"

using namespace pinnosc;

namespace {

constexpr double kPi = std::numbers::pi;

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

}  // namespace

TEST_CASE("matmul: identity, projector, triple-loop oracle") {
    Array a({2, 2}, {1, 2, 3, 4});
    Array id = Array::identity(2);
    Array r = matmul(id, a);
    for (int i = 0; i < 4; ++i) CHECK(r[static_cast<std::size_t>(i)] == a[static_cast<std::size_t>(i)]);

    Array proj({2, 2}, {1, 0, 0, 0});
    Array v({2, 1}, {5, 7});
    Array pv = matmul(proj, v);
    CHECK(pv(0, 0) == 5.0);
    CHECK(pv(1, 0) == 0.0);

    Rng rng(7);
    Array x({3, 3}), y({3, 3});
    for (std::size_t i = 0; i < 9; ++i) {
        x[i] = rng.uniform(-2, 2);
        y[i] = rng.uniform(-2, 2);
    }
    Array z = matmul(x, y);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += x(i, k) * y(k, j);
            CHECK(std::abs(z(i, j) - acc) <= 1e-12);
        }

    CHECK_THROWS_AS(matmul(Array({2, 3}), Array({2, 2})), DimensionError);
}

TEST_CASE("array: shape/data mismatch rejected") {
    CHECK_THROWS_AS(Array({2, 2}, {1.0, 2.0}), DimensionError);
}

TEST_CASE("grad: sum of squares") {
    Array w({2}, {1, 2});
    Tape tape;
    Var wv = tape.leaf(&w);
    Var loss = tape.sum(tape.mul(wv, wv));
    tape.backward(loss);
    Array g = tape.grad(wv);
    CHECK(g(0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(g(1) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("grad: tanh closed form") {
    Array w({1}, {0.3});
    Tape tape;
    Var wv = tape.leaf(&w);
    Var loss = tape.sum(tape.tanh(wv));
    tape.backward(loss);
    // 1 - tanh^2(0.3) = 0.91513696182662920 (closed form, 30-digit check)
    CHECK(std::abs(tape.grad(wv)(0) - 0.91513696182662920) <= 1e-14);
}

TEST_CASE("grad: non-finite loss raises") {
    Array w({1}, {1e308});
    Tape tape;
    Var wv = tape.leaf(&w);
    Var big = tape.mul(wv, wv);  // overflows to inf
    Var loss = tape.sum(big);
    CHECK_THROWS_AS(tape.backward(loss), NumericError);
}

TEST_CASE("grad: unused leaves get exact zeros") {
    Array w({2}, {1, 2}), unused({3}, {4, 5, 6});
    Tape tape;
    Var wv = tape.leaf(&w);
    Var uv = tape.leaf(&unused);
    Var loss = tape.sum(tape.mul(wv, wv));
    tape.backward(loss);
    Array g = tape.grad(uv);
    for (std::size_t i = 0; i < 3; ++i) CHECK(g[i] == 0.0);
}

TEST_CASE("grad: mlp loss matches central finite differences") {
    // 20 random parameter coordinates per model, rel error <= 1e-5 at h=1e-5.
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        MlpModel model = MlpModel::init({2, 7, 5, 1}, seed);
        const std::vector<double> xs = {0.1, -0.4, 0.8}, ts = {0.2, 0.5, 0.7};
        Array target({3}, {0.3, -0.2, 0.1});

        auto loss_value = [&]() {
            Tape tape;
            Var in = tape.constant_jets(
                {3, 2}, JetSpec::scalar(),
                {xs[0], ts[0], xs[1], ts[1], xs[2], ts[2]});
            MlpVars mv = mlp_constants(tape, model);
            Var out = mlp_apply(tape, model, mv, in);
            Var loss = tape.sq_diff_sum(tape.extract(tape.col(out, 0), 0, 0), target);
            return tape.scalar_value(loss);
        };

        Tape tape;
        Var in = tape.constant_jets({3, 2}, JetSpec::scalar(),
                                    {xs[0], ts[0], xs[1], ts[1], xs[2], ts[2]});
        MlpVars mv = mlp_leaves(tape, model);
        Var out = mlp_apply(tape, model, mv, in);
        Var loss = tape.sq_diff_sum(tape.extract(tape.col(out, 0), 0, 0), target);
        tape.backward(loss);

        Rng rng(seed + 100);
        auto params = model.params();
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t pi = static_cast<std::size_t>(rng.bits() % params.size());
            Array& p = *params[pi];
            const std::size_t ei = static_cast<std::size_t>(rng.bits() % p.size());
            const double h = 1e-5, keep = p[ei];
            p[ei] = keep + h;
            const double fp = loss_value();
            p[ei] = keep - h;
            const double fm = loss_value();
            p[ei] = keep;
            const double fd = (fp - fm) / (2 * h);
            Var leaf = (pi % 2 == 0) ? mv.w[pi / 2] : mv.b[pi / 2];
            const double ad = tape.grad(leaf)[ei];
            CHECK(rel_err(fd, ad) <= 1e-5);
        }
    }
}

TEST_CASE("input_derivative: named examples") {
    auto sine = [](const Jet& x, const Jet& t) {
        (void)t;
        return sin(x);
    };
    CHECK(std::abs(input_derivative(sine, 0.0, 0.0, 1, 0) - 1.0) <= 1e-14);
    // d^4/dx^4 sin = sin; sin(0.7) = 0.64421768723769105
    CHECK(std::abs(input_derivative(sine, 0.7, 0.0, 4, 0) - 0.64421768723769105) <= 1e-12);

    auto beam = [](const Jet& x, const Jet& t) { return sin(x) * cos(t * (4.0 * kPi)); };
    const double expect = -16.0 * kPi * kPi;
    CHECK(std::abs(input_derivative(beam, kPi / 2, 0.0, 0, 2) - expect) <= 1e-10);

    CHECK_THROWS_AS(input_derivative(sine, 0.0, 0.0, 5, 0), ArgumentError);
    CHECK_THROWS_AS(input_derivative(sine, 0.0, 0.0, 0, 3), ArgumentError);
    CHECK_THROWS_AS(input_derivative(sine, 0.0, 0.0, 4, 1), ArgumentError);
}

TEST_CASE("jets: exact on degree-<=4 bivariate polynomials") {
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        double c[5][3];
        for (int i = 0; i <= 4; ++i)
            for (int j = 0; j <= 2; ++j)
                c[i][j] = (i + j <= 4) ? rng.uniform(-1, 1) : 0.0;
        auto poly = [&](const Jet& x, const Jet& t) {
            Jet acc = Jet::constant(x.spec(), 0.0);
            for (int i = 0; i <= 4; ++i)
                for (int j = 0; j <= 2; ++j) {
                    if (i + j > 4) continue;
                    Jet term = Jet::constant(x.spec(), c[i][j]);
                    for (int p = 0; p < i; ++p) term = term * x;
                    for (int p = 0; p < j; ++p) term = term * t;
                    acc = acc + term;
                }
            return acc;
        };
        const double x0 = rng.uniform(-1, 1), t0 = rng.uniform(-1, 1);
        // analytic derivative of the monomial sum
        auto analytic = [&](int dx, int dt) {
            double s = 0.0;
            for (int i = dx; i <= 4; ++i)
                for (int j = dt; j <= 2; ++j) {
                    if (i + j > 4) continue;
                    double f = c[i][j];
                    for (int p = 0; p < dx; ++p) f *= (i - p);
                    for (int p = 0; p < dt; ++p) f *= (j - p);
                    s += f * std::pow(x0, i - dx) * std::pow(t0, j - dt);
                }
            return s;
        };
        for (auto [dx, dt] : {std::pair{1, 0}, {2, 0}, {4, 0}, {0, 1}, {0, 2}, {2, 2}, {1, 1}}) {
            if (dx + dt > 4) continue;
            const double got = input_derivative(poly, x0, t0, dx, dt);
            CHECK(std::abs(got - analytic(dx, dt)) <= 1e-12);
        }
    }
}

TEST_CASE("jets: mixed chain rule on closed-form fields") {
    // Five composed fields with hand-derived derivatives, checked to 1e-9.
    const double x0 = 0.37, t0 = 0.21;

    // 1. exp(a x + b t): every derivative is a^i b^j exp(.)
    {
        const double a = 0.3, b = -0.2;
        auto f = [&](const Jet& x, const Jet& t) { return exp(x * a + t * b); };
        const double base = std::exp(a * x0 + b * t0);
        CHECK(std::abs(input_derivative(f, x0, t0, 2, 1) - a * a * b * base) <= 1e-9);
        CHECK(std::abs(input_derivative(f, x0, t0, 1, 1) - a * b * base) <= 1e-9);
        CHECK(std::abs(input_derivative(f, x0, t0, 4, 0) - a * a * a * a * base) <= 1e-9);
    }
    // 2. sin(x) cos(4 pi t): product of single-variable factors
    {
        auto f = [](const Jet& x, const Jet& t) { return sin(x) * cos(t * (4 * kPi)); };
        const double w = 4 * kPi;
        CHECK(std::abs(input_derivative(f, x0, t0, 1, 1) -
                       std::cos(x0) * (-w * std::sin(w * t0))) <= 1e-9);
        CHECK(std::abs(input_derivative(f, x0, t0, 2, 2) -
                       (-std::sin(x0)) * (-w * w * std::cos(w * t0))) <= 1e-9);
    }
    // 3. tanh(x t): chain rule through a product argument
    {
        auto f = [](const Jet& x, const Jet& t) { return tanh(x * t); };
        const double u = x0 * t0, T = std::tanh(u), s = 1 - T * T;
        // d/dx = t s ; d2/dxdt = s + x t * ds/du where ds/du = -2 T s
        const double dxdt = s + u * (-2 * T * s);
        CHECK(std::abs(input_derivative(f, x0, t0, 1, 0) - t0 * s) <= 1e-9);
        CHECK(std::abs(input_derivative(f, x0, t0, 1, 1) - dxdt) <= 1e-9);
    }
    // 4. sech(x) cos(t): sech'' = sech - 2 sech^3
    {
        auto f = [](const Jet& x, const Jet& t) { return sech(x) * cos(t); };
        const double sh = 1.0 / std::cosh(x0);
        const double sh2 = sh - 2 * sh * sh * sh;
        CHECK(std::abs(input_derivative(f, x0, t0, 2, 0) - sh2 * std::cos(t0)) <= 1e-9);
        CHECK(std::abs(input_derivative(f, x0, t0, 2, 1) - sh2 * -std::sin(t0)) <= 1e-9);
    }
    // 5. 1/(2 + sin(x) + t^2): reciprocal chain
    {
        auto f = [](const Jet& x, const Jet& t) {
            return 1.0 / (sin(x) + t * t + 2.0);
        };
        const double g = 2 + std::sin(x0) + t0 * t0;
        const double gx = std::cos(x0), gt = 2 * t0;
        // d/dx = -gx/g^2 ; d2/dxdt = 2 gx gt / g^3
        CHECK(std::abs(input_derivative(f, x0, t0, 1, 0) + gx / (g * g)) <= 1e-9);
        CHECK(std::abs(input_derivative(f, x0, t0, 1, 1) - 2 * gx * gt / (g * g * g)) <= 1e-9);
    }
}

TEST_CASE("tape: deterministic replay, bit-identical gradients") {
    auto run = [](std::vector<double>* grad_out) {
        MlpModel model = MlpModel::init({2, 9, 1}, 42);
        Tape tape;
        JetSpecPtr js = JetSpec::closure({{2, 0}});
        Var in = tape.constant_jets(
            {2, 2}, js,
            std::vector<double>(static_cast<std::size_t>(2 * 2 * js->count()), 0.1));
        MlpVars mv = mlp_leaves(tape, model);
        Var out = mlp_apply(tape, model, mv, in);
        Var loss = tape.sq_diff_sum(tape.extract(tape.col(out, 0), 2, 0), Array({2}));
        tape.backward(loss);
        for (std::size_t l = 0; l < mv.w.size(); ++l) {
            Array g = tape.grad(mv.w[l]);
            grad_out->insert(grad_out->end(), g.data(), g.data() + g.size());
        }
    };
    std::vector<double> g1, g2;
    run(&g1);
    run(&g2);
    REQUIRE(g1.size() == g2.size());
    for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g1[i] == g2[i]);
}

TEST_CASE("tape: forward() picks up in-place leaf updates") {
    Array w({1}, {2.0});
    Tape tape;
    Var wv = tape.leaf(&w);
    Var loss = tape.sum(tape.mul(wv, wv));
    CHECK(tape.scalar_value(loss) == 4.0);
    w(0) = 3.0;
    tape.forward();
    CHECK(tape.scalar_value(loss) == 9.0);
}

TEST_CASE("jet division and sigmoid round out the algebra") {
    JetSpecPtr js = JetSpec::closure({{2, 1}});
    Jet x = Jet::variable(js, 0.4, 1, 0);
    Jet t = Jet::variable(js, 0.3, 0, 1);
    Jet q = (x * x + 1.0) / (t + 2.0);
    // d/dt [ (x^2+1)/(t+2) ] = -(x^2+1)/(t+2)^2
    const double expect = -(0.4 * 0.4 + 1.0) / ((2.3) * (2.3));
    CHECK(std::abs(q.derivative(0, 1) - expect) <= 1e-12);

    Jet s = sigmoid(x);
    const double sv = 1.0 / (1.0 + std::exp(-0.4));
    CHECK(std::abs(s.value() - sv) <= 1e-15);
    CHECK(std::abs(s.derivative(1, 0) - sv * (1 - sv)) <= 1e-12);
}
