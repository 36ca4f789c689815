#include "gaugeclust/gauge.hpp"
#include "gaugeclust/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace gaugeclust;

namespace {

Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

Matrix diamond() {
    Matrix v(4, 2);
    v << 1, 0, -1, 0, 0, 2, 0, -2;
    return v;
}

std::vector<Gauge> test_gauges() {
    Vector w(2);
    w << 4.0, 0.25;
    Matrix tri(3, 2);
    tri << 2, 0, -1, 1.5, -0.5, -1;
    return {Gauge::l1(2), Gauge::l2(2), Gauge::linf(2), Gauge::weighted_l2(w), Gauge::polytope(diamond()),
            Gauge::polytope(tri)};
}

}  // namespace

TEST_SUITE("gauge") {

TEST_CASE("values") {
    CHECK(Gauge::l2(2).value(v2(3, 4)) == doctest::Approx(5.0));
    for (const auto& g : test_gauges()) CHECK(g.value(v2(0, 0)) == 0.0);
    CHECK(Gauge::l1(2).value(v2(2, -3)) == doctest::Approx(5.0));
    CHECK(Gauge::linf(2).value(v2(2, -3)) == doctest::Approx(3.0));

    Vector w(2);
    w << 4.0, 1.0;
    CHECK(Gauge::weighted_l2(w).value(v2(1, 1)) == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("polytope value matches bisection on hull membership") {
    const Matrix verts = diamond();
    const Gauge g = Gauge::polytope(verts);
    CHECK(g.value(v2(0, 1)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(oracle::polygon_gauge(verts, 0, 1) == doctest::Approx(0.5).epsilon(1e-12));

    SplitMix64 rng(11);
    Matrix tri(3, 2);
    tri << 2, 0, -1, 1.5, -0.5, -1;
    const Gauge t = Gauge::polytope(tri);
    for (int i = 0; i < 200; ++i) {
        double x = 6 * rng.uniform() - 3, y = 6 * rng.uniform() - 3;
        CHECK(g.value(v2(x, y)) == doctest::Approx(oracle::polygon_gauge(verts, x, y)).epsilon(1e-9));
        CHECK(t.value(v2(x, y)) == doctest::Approx(oracle::polygon_gauge(tri, x, y)).epsilon(1e-9));
    }
}

TEST_CASE("polar projection") {
    Vector p = Gauge::l2(2).polar_project(v2(3, 4));
    CHECK(p(0) == doctest::Approx(0.6));
    CHECK(p(1) == doctest::Approx(0.8));
    p = Gauge::l1(2).polar_project(v2(2, -0.5));
    CHECK(p(0) == doctest::Approx(1.0));
    CHECK(p(1) == doctest::Approx(-0.5));
    p = Gauge::linf(2).polar_project(v2(0.3, 0.2));
    CHECK(p(0) == doctest::Approx(0.3));
    CHECK(p(1) == doctest::Approx(0.2));

    // Polar of the diamond is the box [-1,1]×[-1/2,1/2], so projection is a clamp.
    const Gauge g = Gauge::polytope(diamond());
    SplitMix64 rng(5);
    for (int i = 0; i < 200; ++i) {
        double x = 6 * rng.uniform() - 3, y = 6 * rng.uniform() - 3;
        Vector q = g.polar_project(v2(x, y));
        CHECK(q(0) == doctest::Approx(std::clamp(x, -1.0, 1.0)).epsilon(1e-8));
        CHECK(q(1) == doctest::Approx(std::clamp(y, -0.5, 0.5)).epsilon(1e-8));
        CHECK(g.in_polar(q));
    }
}

TEST_CASE("linf polar projection is the l1-ball projection") {
    // Compare with a brute minimization of ‖v − w‖ over a fine grid of the ℓ1 ball.
    const Gauge g = Gauge::linf(2);
    SplitMix64 rng(9);
    for (int i = 0; i < 20; ++i) {
        Vector v = v2(4 * rng.uniform() - 2, 4 * rng.uniform() - 2);
        Vector p = g.polar_project(v);
        double best = INFINITY;
        for (int a = 0; a <= 400; ++a)
            for (int b = 0; b <= 400; ++b) {
                Vector w = v2(-1 + a / 200.0, -1 + b / 200.0);
                if (w.cwiseAbs().sum() <= 1 + 1e-12) best = std::min(best, (v - w).norm());
            }
        CHECK((v - p).norm() <= best + 1e-12);
        CHECK((v - p).norm() >= best - 0.01);
        CHECK(p.cwiseAbs().sum() <= 1 + 1e-12);
    }
}

TEST_CASE("subgradients are maximizers over the polar") {
    Vector s = Gauge::l2(2).subgradient(v2(3, 4));
    CHECK(s(0) == doctest::Approx(0.6));
    CHECK(s(1) == doctest::Approx(0.8));
    s = Gauge::l1(2).subgradient(v2(2, -3));
    CHECK(s(0) == doctest::Approx(1.0));
    CHECK(s(1) == doctest::Approx(-1.0));

    SplitMix64 rng(3);
    for (const auto& g : test_gauges()) {
        CHECK(g.subgradient(v2(0, 0)).norm() == 0.0);
        for (int i = 0; i < 100; ++i) {
            Vector z = v2(4 * rng.uniform() - 2, 4 * rng.uniform() - 2);
            Vector v = g.subgradient(z);
            CHECK(g.in_polar(v, 1e-9));
            CHECK(v.dot(z) == doctest::Approx(g.value(z)).epsilon(1e-9));
        }
    }
}

TEST_CASE("smoothed gauge") {
    const Gauge g = Gauge::l2(2);
    const SmoothingParam one(1.0);
    CHECK(g.smooth_value(one, v2(2, 0)) == doctest::Approx(1.5));
    CHECK(oracle::sampled_l2_smooth(2, 0, 1.0, 500, 720) == doctest::Approx(1.5).epsilon(1e-5));
    CHECK(g.smooth_value(one, v2(0.5, 0)) == doctest::Approx(0.125));
    CHECK(oracle::sampled_l2_smooth(0.5, 0, 1.0, 500, 720) == doctest::Approx(0.125).epsilon(1e-5));
    for (const auto& h : test_gauges()) CHECK(h.smooth_value(one, v2(0, 0)) == 0.0);

    Vector gr = g.smooth_gradient(one, v2(2, 0));
    CHECK(gr(0) == doctest::Approx(1.0));
    CHECK(gr(1) == doctest::Approx(0.0));
    gr = g.smooth_gradient(one, v2(0.5, 0));
    CHECK(gr(0) == doctest::Approx(0.5));
    CHECK(g.smooth_gradient(one, v2(0, 0)).norm() == 0.0);

    CHECK_THROWS_AS(SmoothingParam(0.0), std::invalid_argument);
    CHECK_THROWS_AS(SmoothingParam(-1.0), std::invalid_argument);
}

TEST_CASE("smoothing gap is bounded and shrinks with mu") {
    SplitMix64 rng(17);
    for (const auto& g : test_gauges()) {
        const double pn = g.norm_bounds().polar_norm;
        for (int i = 0; i < 50; ++i) {
            Vector z = v2(6 * rng.uniform() - 3, 6 * rng.uniform() - 3);
            double prev = -1.0;
            for (double mu : {1.0, 0.1, 0.01}) {
                double gap = g.value(z) - g.smooth_value(SmoothingParam(mu), z);
                CHECK(gap >= -1e-12);
                CHECK(gap <= 0.5 * mu * pn * pn + 1e-12);
                if (prev >= 0) CHECK(gap <= prev + 1e-12);
                prev = gap;
            }
        }
    }
}

TEST_CASE("smooth gradient matches central differences") {
    SplitMix64 rng(23);
    for (const auto& g : test_gauges()) {
        for (int i = 0; i < 30; ++i) {
            const double mu = 0.05 + rng.uniform();
            Matrix z = oracle::random_matrix(rng, 1, 2, 3.0);
            auto f = [&](const Matrix& m) { return g.smooth_value(SmoothingParam(mu), m.row(0)); };
            Matrix fd = oracle::fd_gradient(f, z, 1e-6);
            Vector an = g.smooth_gradient(SmoothingParam(mu), z.row(0));
            CHECK((fd.row(0) - an).norm() <= 1e-6 * std::max(1.0, an.norm()));
        }
    }
}

TEST_CASE("norm bounds") {
    auto b = Gauge::l2(2).norm_bounds();
    CHECK(b.set_norm == doctest::Approx(1.0));
    CHECK(b.polar_norm == doctest::Approx(1.0));
    b = Gauge::l1(2).norm_bounds();
    CHECK(b.set_norm == doctest::Approx(1.0));
    CHECK(b.polar_norm == doctest::Approx(std::sqrt(2.0)));
    b = Gauge::linf(2).norm_bounds();
    CHECK(b.set_norm == doctest::Approx(std::sqrt(2.0)));
    CHECK(b.polar_norm == doctest::Approx(1.0));
    b = Gauge::polytope(diamond()).norm_bounds();
    CHECK(b.set_norm == doctest::Approx(2.0));
    CHECK(b.polar_norm == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("norm equivalence, subadditivity and Lipschitz bound") {
    SplitMix64 rng(29);
    for (const auto& g : test_gauges()) {
        const auto b = g.norm_bounds();
        for (int i = 0; i < 200; ++i) {
            Vector z1 = v2(6 * rng.uniform() - 3, 6 * rng.uniform() - 3);
            Vector z2 = v2(6 * rng.uniform() - 3, 6 * rng.uniform() - 3);
            double r1 = g.value(z1), r2 = g.value(z2);
            CHECK(r1 / b.polar_norm <= z1.norm() + 1e-12);
            CHECK(z1.norm() <= b.set_norm * r1 + 1e-12);
            CHECK(g.value(z1 + z2) <= r1 + r2 + 1e-12);
            CHECK(std::abs(r1 - r2) <= b.polar_norm * (z1 - z2).norm() + 1e-12);
            CHECK(g.value(2.5 * z1) == doctest::Approx(2.5 * r1));
        }
    }
}

TEST_CASE("invalid gauges and dimensions") {
    Matrix off(3, 2);
    off << 1, 1, 2, 1, 1, 2;
    CHECK_THROWS_AS(Gauge::polytope(off), InvalidGauge);
    Matrix flat(3, 2);
    flat << -1, 0, 1, 0, 0.5, 0;
    CHECK_THROWS_AS(Gauge::polytope(flat), InvalidGauge);
    Matrix boundary(3, 2);
    boundary << 0, 0, 1, 0, 0, 1;
    CHECK_THROWS_AS(Gauge::polytope(boundary), InvalidGauge);
    Vector bad(2);
    bad << 1.0, -1.0;
    CHECK_THROWS_AS(Gauge::weighted_l2(bad), InvalidGauge);
    CHECK_THROWS_AS(Gauge::l2(0), InvalidGauge);

    Vector z3(3);
    z3 << 1, 2, 3;
    CHECK_THROWS_AS(Gauge::l2(2).value(z3), DimensionError);
}

TEST_CASE("polytope from csv") {
    auto path = std::filesystem::temp_directory_path() / "gaugeclust_test_poly.csv";
    {
        std::ofstream out(path);
        out << "x,y\n1,0\n-1,0\n0,2\n0,-2\n";
    }
    const Gauge g = Gauge::polytope_from_csv(path.string());
    CHECK(g.value(v2(0, 1)) == doctest::Approx(0.5));
    CHECK(g.vertices().rows() == 4);
    std::filesystem::remove(path);
}

}  // TEST_SUITE
