#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pinnosc/pde.hpp"
#include "pinnosc/rng.hpp"

using namespace pinnosc;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("make_benchmark: named anchors") {
    auto [burgers, bdom] = make_benchmark("burgers");
    CHECK(bdom.x_min == -1.0);
    CHECK(bdom.x_max == 1.0);
    CHECK(bdom.t_train_end == 0.8);
    CHECK(bdom.t_test_end == 1.0);
    CHECK(burgers.bc_kind == BcKind::Dirichlet);
    // u(x,0) = -sin(pi x) at x = 0.5 -> -1
    CHECK(burgers.ic_terms[0].target[0](0.5) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(burgers.nu == doctest::Approx(0.01 / kPi));

    auto [beam, edom] = make_benchmark("euler_bernoulli");
    CHECK(edom.x_max == doctest::Approx(kPi));
    CHECK(beam.analytic(kPi / 2, 0.0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(beam.bc_kind == BcKind::SimplySupported);
    CHECK(beam.ic_terms.size() == 2);  // u(x,0) = sin x and u_t(x,0) = 0

    auto [nls, sdom] = make_benchmark("schrodinger");
    CHECK(nls.n_channels == 2);
    CHECK(sdom.t_train_end == doctest::Approx(2 * kPi / 5));
    CHECK(sdom.t_test_end == doctest::Approx(kPi / 2));
    CHECK(nls.ic_terms[0].target[0](0.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(nls.ic_terms[0].target[1](0.0) == 0.0);

    auto [ac, adom] = make_benchmark("allen_cahn");
    CHECK(ac.bc_kind == BcKind::Periodic);
    CHECK(adom.t_train_end == doctest::Approx(0.8 * adom.t_test_end));

    CHECK_THROWS_AS(make_benchmark("heat"), ArgumentError);
}

TEST_CASE("make_benchmark is pure: identical outputs for identical inputs") {
    auto [a, da] = make_benchmark("burgers");
    auto [b, db] = make_benchmark("burgers");
    CHECK(a.nu == b.nu);
    CHECK(da.t_train_end == db.t_train_end);
    Rng rng(5);
    for (int i = 0; i < 10; ++i) {
        const double x = rng.uniform(-1, 1);
        CHECK(a.ic_terms[0].target[0](x) == b.ic_terms[0].target[0](x));
    }
}

TEST_CASE("residual_eval: beam analytic solution annihilates the residual") {
    auto [spec, dom] = make_benchmark("euler_bernoulli");
    ClosedFormField field(1, [&](const Jet& x, const Jet& t, int ch) {
        return spec.analytic_jet(x, t, ch);
    });
    Rng rng(17);
    for (int i = 0; i < 10; ++i) {
        const double x = rng.uniform(dom.x_min, dom.x_max);
        const double t = rng.uniform(0.0, dom.t_test_end);
        const auto r = residual_eval(spec, field, x, t);
        CHECK(std::abs(r[0]) <= 1e-8);
    }
}

TEST_CASE("residual_eval: burgers on the zero field") {
    auto [spec, dom] = make_benchmark("burgers");
    ClosedFormField zero(1, [](const Jet& x, const Jet&, int) {
        return Jet::constant(x.spec(), 0.0);
    });
    Rng rng(23);
    for (int i = 0; i < 5; ++i) {
        const auto r = residual_eval(spec, zero, rng.uniform(-1, 1), rng.uniform(0, 0.8));
        CHECK(r[0] == 0.0);
    }
}

TEST_CASE("residual_eval: allen-cahn on constant fields") {
    auto [spec, dom] = make_benchmark("allen_cahn");
    auto constant_field = [](double c) {
        return ClosedFormField(1, [c](const Jet& x, const Jet&, int) {
            return Jet::constant(x.spec(), c);
        });
    };
    auto r1 = residual_eval(spec, constant_field(1.0), 0.2, 0.3);
    CHECK(std::abs(r1[0]) <= 1e-14);  // 5*1^3 - 5*1 = 0
    auto r2 = residual_eval(spec, constant_field(0.5), 0.2, 0.3);
    CHECK(r2[0] == doctest::Approx(-1.875).epsilon(1e-14));  // 5/8 - 5/2
}

TEST_CASE("residual_eval: schrodinger couples the channels") {
    auto [spec, dom] = make_benchmark("schrodinger");
    // u = (c1, c2) constants: residual = (|u|^2 c2, -|u|^2 c1)
    const double c1 = 0.7, c2 = -0.4, m2 = c1 * c1 + c2 * c2;
    ClosedFormField field(2, [&](const Jet& x, const Jet&, int ch) {
        return Jet::constant(x.spec(), ch == 0 ? c1 : c2);
    });
    auto r = residual_eval(spec, field, 1.0, 0.1);
    CHECK(r[0] == doctest::Approx(m2 * c2).epsilon(1e-14));
    CHECK(r[1] == doctest::Approx(-m2 * c1).epsilon(1e-14));
}

TEST_CASE("sample_collocation: deterministic, counted, inside the hull") {
    auto [spec, dom] = make_benchmark("burgers");
    CollocationCounts counts{1000, 300, 150};
    CollocationSet a = sample_collocation(spec, dom, counts, 42);
    CollocationSet b = sample_collocation(spec, dom, counts, 42);
    CHECK(a.residual_points.size() == 1000);
    CHECK(a.ic_points.size() == 300);
    CHECK(a.bc_points.size() == 150);
    for (std::size_t i = 0; i < a.residual_points.size(); ++i) {
        CHECK(a.residual_points[i] == b.residual_points[i]);
        CHECK(a.residual_points[i].first >= -1.0);
        CHECK(a.residual_points[i].first <= 1.0);
        CHECK(a.residual_points[i].second >= 0.0);
        CHECK(a.residual_points[i].second <= 0.8);
    }
    for (double t : a.bc_points) {
        CHECK(t >= 0.0);
        CHECK(t <= 0.8);
    }
    CollocationSet c = sample_collocation(spec, dom, counts, 43);
    CHECK(a.residual_points[0] != c.residual_points[0]);
}

TEST_CASE("jet support of each benchmark covers its residual derivatives") {
    for (const char* name : {"burgers", "allen_cahn", "schrodinger", "euler_bernoulli"}) {
        auto [spec, dom] = make_benchmark(name);
        JetSpecPtr js = spec.residual_jet_spec();
        for (auto [dx, dt] : spec.deriv_targets) CHECK(js->pos(dx, dt) >= 0);
    }
    // burgers needs exactly {(0,0),(1,0),(0,1),(2,0)}
    auto [spec, dom] = make_benchmark("burgers");
    CHECK(spec.residual_jet_spec()->count() == 4);
    // beam support excludes mixed orders entirely
    auto [beam, bdom] = make_benchmark("euler_bernoulli");
    CHECK(beam.residual_jet_spec()->count() == 7);
    CHECK(beam.residual_jet_spec()->pos(1, 1) == -1);
}
