#include "gaugeclust/verify.hpp"
#include "gaugeclust/data.hpp"
#include "gaugeclust/ldca.hpp"
#include "gaugeclust/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace gaugeclust;

namespace {

DataSet line(std::initializer_list<double> pts) {
    DataSet d;
    d.points.resize(static_cast<Eigen::Index>(pts.size()), 1);
    Eigen::Index i = 0;
    for (double p : pts) d.points(i++, 0) = p;
    return d;
}

Matrix col(std::initializer_list<double> v) {
    Matrix m(static_cast<Eigen::Index>(v.size()), 1);
    Eigen::Index i = 0;
    for (double p : v) m(i++, 0) = p;
    return m;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("brute force on three centers and two points") {
    const Gauge g = Gauge::l1(1);
    BruteForceResult r = brute_force_global(line({0, 1}), 3, 1.0, g);
    CHECK(std::abs(r.value - 5.0 / 6.0) <= 1e-4);
    REQUIRE(r.x.rows() == 3);
    CHECK(std::abs(r.x(1, 0) - r.x(0, 0) - 1.0 / 6.0) <= 1e-3);
    CHECK(std::abs(r.x(2, 0) - r.x(1, 0) - 1.0 / 6.0) <= 1e-3);
    CHECK(r.x(0, 0) >= -1e-3);
    CHECK(r.x(0, 0) <= 2.0 / 3.0 + 1e-3);
    CHECK(r.rounds >= 3);
    CHECK(r.value == doctest::Approx(objective(line({0, 1}), r.x, 1.0, g)));
}

TEST_CASE("brute force small cases") {
    const Gauge g = Gauge::l1(1);
    BruteForceResult one = brute_force_global(line({1.5}), 1, 0.7, g);
    CHECK(one.value <= 1e-5);
    CHECK(one.x(0, 0) == doctest::Approx(1.5).epsilon(1e-5));

    BruteForceResult two = brute_force_global(line({0, 3, 4}), 2, 0.1, g);
    CHECK(two.value <= 2.35 + two.resolution_slack);
    CHECK(two.value == doctest::Approx(2.35).epsilon(1e-5));
    CHECK_THROWS(brute_force_global(line({0, 1}), 4, 1.0, g));
    DataSet plane;
    plane.points = Matrix::Zero(2, 2);
    CHECK_THROWS(brute_force_global(plane, 2, 1.0, Gauge::l1(2)));
}

TEST_CASE("brute force bounds solver outputs from below") {
    SplitMix64 rng(149);
    const Gauge g = Gauge::l2(1);
    for (int t = 0; t < 5; ++t) {
        DataSet a;
        a.points = oracle::random_matrix(rng, 5, 1, 2.0);
        const int k = 1 + static_cast<int>(rng.below(2));
        const double lambda = 0.05 + rng.uniform();
        BruteForceResult bf = brute_force_global(a, k, lambda, g);
        Matrix x0 = oracle::random_matrix(rng, k, 1, 2.0);
        SolveResult r = dca_solve(a, x0, ModelParams{lambda, 1e-3}, g);
        CHECK(bf.value <= objective(a, r.x, lambda, g) + bf.resolution_slack);
    }
}

TEST_CASE("center check where the centers are not optimal") {
    const DataSet a = line({0, 2});
    const Gauge g = Gauge::l1(1);
    OptimalityReport rep = check_center_optimality(a, col({0, 2}), 0.5, g);
    CHECK(rep.applicable);
    CHECK_FALSE(rep.all_pass);
    REQUIRE(rep.centers.size() == 2);
    CHECK_FALSE(rep.centers[0].pass);
    CHECK_FALSE(rep.centers[1].pass);
    CHECK(std::abs(rep.centers[0].minimizer(0) - 1.0) <= 1e-4);
    CHECK(std::string(rep.verdict()) == "necessary condition violated");
    // φ_1(x) = |x| + ½(x − 2)²: value 2 at the center, 1.5 at the minimizer.
    CHECK(rep.centers[0].phi_center == doctest::Approx(2.0));
    CHECK(rep.centers[0].gap == doctest::Approx(0.5).epsilon(1e-5));

    // Moving the first center toward the second lowers f along 2 − t + t²/2.
    for (double t : {0.1, 0.5, 0.9}) {
        double f = objective(a, col({t, 2}), 0.5, g);
        CHECK(f == doctest::Approx(2 - t + t * t / 2));
        CHECK(f < objective(a, col({0, 2}), 0.5, g));
    }
}

TEST_CASE("center check where the centers pass") {
    const Gauge g = Gauge::l1(1);
    OptimalityReport rep = check_center_optimality(line({0, 3, 4}), col({3, 4}), 0.1, g);
    CHECK(rep.applicable);
    CHECK(rep.all_pass);
    for (const auto& c : rep.centers) CHECK(c.gap >= -1e-6);
    CHECK(std::string(rep.verdict()) == "necessary condition holds");

    OptimalityReport single = check_center_optimality(line({2.0}), col({2.0}), 0.0, g);
    CHECK(single.all_pass);
    CHECK(single.centers[0].gap == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("center check needs singleton nearest sets") {
    OptimalityReport rep = check_center_optimality(line({1}), col({0, 2}), 0.5, Gauge::l1(1));
    CHECK_FALSE(rep.applicable);
    CHECK(std::string(rep.verdict()) == "not applicable");
}

TEST_CASE("center check gaps are nonnegative") {
    SplitMix64 rng(151);
    const Gauge g = Gauge::l2(2);
    for (int t = 0; t < 5; ++t) {
        DataSet a;
        a.points = oracle::random_matrix(rng, 8, 2, 2.0);
        Matrix x = oracle::random_matrix(rng, 2, 2, 2.0);
        OptimalityReport rep = check_center_optimality(a, x, 0.2, g);
        for (const auto& c : rep.centers) CHECK(c.gap >= -1e-6);
    }
}

TEST_CASE("value stability") {
    const Gauge g = Gauge::l1(1);
    DataSet a = line({0, 1, 3});
    StabilityProbe same = value_stability_probe(a, a, 2, 0.3, g);
    CHECK(same.lhs <= 2 * same.slack + 1e-12);
    CHECK(same.rhs == 0.0);
    CHECK(same.pass);

    DataSet shifted = line({0.5, 1.5, 3.5});
    StabilityProbe sh = value_stability_probe(a, shifted, 2, 0.3, g);
    CHECK(sh.rhs == doctest::Approx(std::sqrt(3.0) * std::sqrt(3 * 0.25)));
    CHECK(sh.pass);

    SplitMix64 rng(157);
    for (int t = 0; t < 10; ++t) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(5));
        DataSet p, q;
        p.points = oracle::random_matrix(rng, n, 1, 2.0);
        q.points = p.points + oracle::random_matrix(rng, n, 1, 0.5);
        CHECK(value_stability_probe(p, q, 1 + static_cast<int>(rng.below(2)), rng.uniform(), g).pass);
    }
}

TEST_CASE("descent audit") {
    SolverTrace flat;
    for (int t = 0; t < 5; ++t) flat.records.push_back({t, 3.0, 0.0, 0.0, 0.0});
    DescentAudit a = descent_audit(flat, 10, 0.1);
    CHECK(a.pass);
    CHECK(a.worst_slack == doctest::Approx(0.0));

    DataSet d = gen_laplace3(3);
    const Gauge g = Gauge::l2(2);
    ModelParams p{0.3, 0.05};
    SolveResult r = dca_solve(d, kmeanspp_init(d, 5, g, 3), p, g);
    CHECK(descent_audit(r.trace, d.n(), p.mu).pass);

    SolverTrace bad = r.trace;
    REQUIRE(bad.records.size() > 6);
    bad.records[5].f_mu = bad.records[4].f_mu + 1.0;
    DescentAudit fa = descent_audit(bad, d.n(), p.mu);
    CHECK_FALSE(fa.pass);
    CHECK(fa.first_failure == 5);

    SolverTrace empty;
    CHECK(descent_audit(empty, 1, 1.0).worst_index == -1);
}

}  // TEST_SUITE
