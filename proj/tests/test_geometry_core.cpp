#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "geodequiv/geodesic.hpp"
#include "geodequiv/metric.hpp"

using namespace geodequiv;

namespace {

MetricField parse_metric(std::vector<std::string> names, const std::vector<std::string>& upper,
                         const std::vector<std::string>& domain = {}) {
    Chart chart = Chart::with_domain(std::move(names), domain);
    std::vector<Expression> e;
    for (const auto& s : upper) e.push_back(chart.parse(s));
    return MetricField(chart, e);
}

MetricField sphere() {
    return parse_metric({"x1", "x2"}, {"1", "0", "sin(x1)^2"}, {"x1", "3.141592653589793 - x1"});
}

std::vector<double> ambient(const std::vector<double>& x) {
    return {std::sin(x[0]) * std::cos(x[1]), std::sin(x[0]) * std::sin(x[1]), std::cos(x[0])};
}

/// Gamma^k_ij from central differences of the evaluated metric.
double christoffel_fd(const MetricField& m, std::vector<double> x, std::size_t k, std::size_t i, std::size_t j) {
    const std::size_t n = m.dim();
    const double h = 1e-5;
    auto dg = [&](std::size_t l, std::size_t a, std::size_t b) {
        std::vector<double> p = x, q = x;
        p[l] += h;
        q[l] -= h;
        return (m.evaluate<double>(std::span<const double>(p))(a, b) -
                m.evaluate<double>(std::span<const double>(q))(a, b)) /
               (2 * h);
    };
    const auto inv = Cholesky<double>(m.evaluate<double>(std::span<const double>(x))).inverse();
    double s = 0.0;
    for (std::size_t l = 0; l < n; ++l) s += 0.5 * inv(k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
    return s;
}

}  // namespace

TEST_CASE("chart validation") {
    CHECK_THROWS_AS(Chart({}), Error);
    CHECK_THROWS_AS(Chart({"x", "x"}), Error);
    CHECK_THROWS_AS(Chart({"sin"}), Error);
    CHECK_THROWS_AS(Chart({"1x"}), Error);
    const Chart c = Chart::with_domain({"u", "v"}, {"u", "1 - u^2 - v^2"});
    CHECK(c.contains(std::vector<double>{0.5, 0.1}));
    CHECK(!c.contains(std::vector<double>{-0.5, 0.1}));
    CHECK(!c.contains(std::vector<double>{0.9, 0.9}));
}

TEST_CASE("metric_at: constant, exponential and indefinite entries") {
    const MetricField flat = parse_metric({"x1", "x2"}, {"1", "0", "1"});
    MetricSample s = metric_at(flat, std::vector<double>{0.3, -2.0});
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(s.values(i, j) == (i == j ? 1.0 : 0.0));
            for (std::size_t k = 0; k < 2; ++k) CHECK(s.entries(i, j).grad(k) == 0.0);
        }

    const MetricField conf = parse_metric({"x1", "x2"}, {"exp(2*x1)", "0", "exp(2*x1)"});
    s = metric_at(conf, std::vector<double>{0.0, 0.0});
    CHECK(s.values(0, 0) == 1.0);
    CHECK(s.entries(0, 0).grad(0) == 2.0);
    CHECK(s.entries(0, 0).grad(1) == 0.0);
    CHECK(s.entries(0, 0).hess(0, 0) == 4.0);
    CHECK(s.cholesky.log_det() == doctest::Approx(0.0));

    const MetricField bad = parse_metric({"x1", "x2", "x3"}, {"1 + x1^2", "0", "0", "-2", "0", "3"});
    try {
        metric_at(bad, std::vector<double>{0.5, 0.0, 0.0});
        FAIL("expected not-positive-definite");
    } catch (const NotPositiveDefiniteError& e) {
        CHECK(e.minor() == 2);
        CHECK(e.point().size() == 3);
    }
    const MetricField dom = parse_metric({"x1"}, {"1"}, {"x1"});
    CHECK_THROWS_AS(metric_at(dom, std::vector<double>{-1.0}), ChartDomainError);
}

TEST_CASE("christoffel symbols of hand-checked metrics") {
    const MetricField flat = MetricField::euclidean(Chart({"a", "b", "c"}));
    const Christoffel g0 = christoffel(flat, std::vector<double>{1, 2, 3});
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) CHECK(g0(k, i, j) == 0.0);

    const MetricField polar = parse_metric({"x1", "x2"}, {"1", "0", "x1^2"}, {"x1"});
    const Christoffel gp = christoffel(polar, std::vector<double>{2.0, 0.7});
    CHECK(gp(0, 1, 1) == doctest::Approx(-2.0));
    CHECK(gp(1, 0, 1) == doctest::Approx(0.5));
    CHECK(gp(1, 1, 0) == gp(1, 0, 1));

    const Christoffel gs = christoffel(sphere(), std::vector<double>{std::numbers::pi / 4, 0.0});
    CHECK(gs(0, 1, 1) == doctest::Approx(-0.5));
    CHECK(gs(1, 0, 1) == doctest::Approx(1.0));
}

TEST_CASE("christoffel matches finite differences on random metrics") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> c(-1.0, 1.0), pt(-1.0, 1.0);
    const std::vector<std::string> names{"x1", "x2", "x3"};
    auto num = [&] { return "(" + std::to_string(c(rng)) + ")"; };
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::string> upper;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                const std::string xi = names[i], xj = names[j];
                if (i == j)
                    upper.push_back("4 + " + num() + " * sin(" + num() + " * x1 + x2) + " + num() + " * " + xj +
                                    "^2 + 0.5 * cos(x3 * " + num() + ")");
                else
                    upper.push_back("0.4 * " + num() + " * cos(" + xi + " + " + num() + " * " + xj + ")");
            }
        const MetricField m = parse_metric(names, upper);
        const std::vector<double> x{pt(rng), pt(rng), pt(rng)};
        const Christoffel g = christoffel(m, x);
        for (std::size_t k = 0; k < 3; ++k)
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j) {
                    CHECK(g(k, i, j) == g(k, j, i));
                    CHECK(std::abs(g(k, i, j) - christoffel_fd(m, x, k, i, j)) <= 1e-6 * (1 + std::abs(g(k, i, j))));
                }
    }
}

TEST_CASE("euclidean geodesic is a straight line") {
    const MetricField flat = MetricField::euclidean(Chart({"x1", "x2"}));
    const Trajectory t = integrate_geodesic(flat, {{0, 0}, {1, 0}}, 1.0);
    CHECK(t.status() == TrajectoryStatus::Completed);
    CHECK(t.back().t == 1.0);
    CHECK(t.back().phase.x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(t.back().phase.x[1]) < 1e-14);
    CHECK(t.back().phase.xi[0] == 1.0);
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.samples()[i].t > t.samples()[i - 1].t);
}

TEST_CASE("equatorial great circle closes after 2 pi") {
    const double pi = std::numbers::pi;
    const Trajectory t = integrate_geodesic(sphere(), {{pi / 2, 0.0}, {0.0, 1.0}}, 2 * pi);
    CHECK(std::abs(t.back().phase.x[0] - pi / 2) < 1e-6);
    CHECK(std::abs(t.back().phase.x[1] - 2 * pi) < 1e-6);
    CHECK(t.max_energy_drift() <= 1e-8);
}

TEST_CASE("energy drift stays within tolerance on a non-trivial metric") {
    const MetricField m = parse_metric({"x1", "x2", "x3"},
                                       {"2 + sin(x2)", "0.3*cos(x1)", "0.1*x3", "3 + cos(x1*x3)", "0.2*sin(x2)",
                                        "2.5 + 0.5*sin(x1 + x2)"});
    const Trajectory t = integrate_geodesic(m, {{0.1, 0.2, 0.3}, {0.5, -0.3, 0.8}}, 10.0);
    CHECK(t.status() == TrajectoryStatus::Completed);
    CHECK(t.max_energy_drift() <= 1e-8);
    GeodesicOptions loose;
    loose.atol = loose.rtol = 1e-3;
    loose.energy_tol = 1e-14;
    CHECK_THROWS_AS(integrate_geodesic(m, {{0.1, 0.2, 0.3}, {0.5, -0.3, 0.8}}, 10.0, loose), EnergyDriftError);
}

TEST_CASE("zero tangent and chart exit") {
    const MetricField m = parse_metric({"x1", "x2"}, {"1", "0", "1"}, {"1 - x1^2 - x2^2"});
    CHECK_THROWS_AS(integrate_geodesic(m, {{0, 0}, {0, 0}}, 1.0), ZeroTangentError);
    const Trajectory t = integrate_geodesic(m, {{0, 0}, {1, 0}}, 5.0);
    CHECK(t.left_chart());
    CHECK(t.back().phase.x[0] < 1.0);
    CHECK(t.back().phase.x[0] > 1.0 - 1e-6);
}

TEST_CASE("arclength stop lands on the requested length") {
    GeodesicOptions o;
    o.arclength_stop = 1.25;
    const Trajectory t = integrate_geodesic(sphere(), {{1.2, 0.3}, {0.6, 2.0}}, 100.0, o);
    CHECK(t.status() == TrajectoryStatus::ArclengthReached);
    const auto cum = cumulative_arclength(t, t.metric());
    CHECK(cum.back() == doctest::Approx(1.25).epsilon(1e-10));
}

TEST_CASE("arclength reparametrization") {
    const MetricField flat = MetricField::euclidean(Chart({"x1", "x2"}));
    const Trajectory line = integrate_geodesic(flat, {{0, 0}, {3, 4}}, 1.0);
    const Curve c = arclength_reparam(line, flat, 11);
    for (std::size_t k = 0; k < c.size(); ++k) {
        CHECK(c[k][0] == doctest::Approx(0.3 * k).epsilon(1e-10));
        CHECK(c[k][1] == doctest::Approx(0.4 * k).epsilon(1e-10));
    }

    const MetricField s = sphere();
    const PhasePoint p{{1.1, 0.2}, {0.4, 0.9}};
    const Trajectory t1 = integrate_geodesic(s, p, 2.0);
    const Trajectory t2 = integrate_geodesic(s, {p.x, {0.8, 1.8}}, 1.0);
    const Curve a = arclength_reparam(t1, s, 256), b = arclength_reparam(t2, s, 256);
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t i = 0; i < 2; ++i) worst = std::max(worst, std::abs(a[k][i] - b[k][i]));
    CHECK(worst <= 1e-9);

    // Equal central angles along a great circle.
    std::vector<double> angles;
    for (std::size_t k = 0; k + 1 < a.size(); ++k) {
        const auto u = ambient(a[k]), v = ambient(a[k + 1]);
        double cr[3] = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
        const double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        angles.push_back(std::atan2(std::sqrt(cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]), dot));
    }
    const double len = std::sqrt(s.inner(p.x, p.xi, p.xi)) * 2.0;
    for (double ang : angles) CHECK(ang == doctest::Approx(len / 255).epsilon(1e-8));
}

TEST_CASE("curve distance") {
    Curve a, b;
    for (int k = 0; k <= 10; ++k) {
        a.push_back({0.1 * k, 0.0});
        b.push_back({0.1 * k, 0.1});
    }
    CHECK(curve_distance(a, a) == 0.0);
    CHECK(curve_distance(a, b) == doctest::Approx(0.1));
    CHECK(curve_distance_serial(a, b) == doctest::Approx(0.1));
    // Polyline interpolation, not vertex matching.
    Curve coarse{{0.0, 0.0}, {1.0, 0.0}};
    CHECK(curve_distance(a, coarse) == 0.0);
    CHECK(curve_distance(coarse, Curve{{0.0, 0.0}, {0.5, 0.0}}) == doctest::Approx(0.5));

    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    Curve r1, r2;
    for (int k = 0; k < 500; ++k) {
        r1.push_back({nd(rng), nd(rng), nd(rng)});
        r2.push_back({nd(rng), nd(rng), nd(rng)});
    }
    CHECK(curve_distance(r1, r2) == curve_distance_serial(r1, r2));
}

TEST_CASE("trajectory export") {
    const MetricField flat = MetricField::euclidean(Chart({"x1", "x2"}));
    const Trajectory t = integrate_geodesic(flat, {{0, 0}, {1, 0.5}}, 0.5);
    std::ostringstream os;
    write_trajectory_csv(os, t);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "t,x1,x2,xi1,xi2");
    std::size_t rows = 0;
    for (std::string line; std::getline(is, line);) ++rows;
    CHECK(rows == t.size());
    const auto j = trajectory_json(t);
    CHECK(j.size() == t.size());
    CHECK(j.back()["x"][1].get<double>() == doctest::Approx(0.25));
}
