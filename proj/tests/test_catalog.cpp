#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "geodequiv/catalog.hpp"
#include "geodequiv/coincidence.hpp"
#include "geodequiv/phase.hpp"

using namespace geodequiv;

namespace {

const EllipsoidSpec kE3{{1.0, 2.0, 3.0}};

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

std::vector<double> random_nu(const EllipsoidSpec& spec, SplitMix64& rng) {
    std::vector<double> nu;
    for (const auto& [lo, hi] : ellipsoid_box(spec, 0.01)) nu.push_back(rng.uniform(lo, hi));
    return nu;
}

double constraint(const EllipsoidSpec& spec, const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * x[i] / spec.a[i];
    return s;
}

}  // namespace

TEST_CASE("ellipsoid spec validation") {
    CHECK_NOTHROW(kE3.validate());
    auto check = [](std::vector<double> a) { EllipsoidSpec{std::move(a)}.validate(); };
    CHECK_THROWS_AS(check({2.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(check({0.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(check({1.0}), ConfigError);
    CHECK_THROWS_AS(check({1.0, 1.0}), ConfigError);
}

TEST_CASE("elliptic_to_cartesian lands on the ellipsoid") {
    const EllipsoidSpec e2{{1.0, 4.0}};
    const std::vector<double> nu{2.0};
    const auto x = elliptic_to_cartesian(e2, nu);
    CHECK(std::abs(constraint(e2, x) - 1.0) <= 1e-12);
    CHECK(x[0] == doctest::Approx(std::sqrt(1.0 * (1.0 - 2.0) / (1.0 - 4.0))));

    SplitMix64 rng(3);
    for (int t = 0; t < 200; ++t) {
        const auto y = elliptic_to_cartesian(kE3, random_nu(kE3, rng));
        CHECK(std::abs(constraint(kE3, y) - 1.0) <= 1e-12);
    }
    // Coordinate-plane limit.
    const std::vector<double> near{1.0 + 1e-12, 2.5};
    CHECK(elliptic_to_cartesian(kE3, near)[0] < 1e-5);

    const std::vector<double> bad{0.5, 2.5};
    CHECK_THROWS_AS(elliptic_to_cartesian(kE3, bad), ConfigError);
}

TEST_CASE("ellipsoid metrics equal the ambient pullbacks") {
    SplitMix64 rng(11);
    for (const EllipsoidSpec& spec : {kE3, EllipsoidSpec{{1.0, 4.0}}, EllipsoidSpec{{0.5, 1.0, 1.7, 3.0}}}) {
        const MetricPair pair = ellipsoid_pair(spec);
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            const auto nu = random_nu(spec, rng);
            const AmbientPullback amb = ellipsoid_ambient_pullback(spec, nu);
            const auto g = pair.g().evaluate<double>(nu);
            const auto gb = pair.gbar().evaluate<double>(nu);
            const std::size_t d = nu.size();
            double scale = 0.0, scale_b = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                scale = std::max(scale, std::abs(amb.g(i, i)));
                scale_b = std::max(scale_b, std::abs(amb.gbar(i, i)));
            }
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    worst = std::max(worst, std::abs(g(i, j) - amb.g(i, j)) / scale);
                    worst = std::max(worst, std::abs(gb(i, j) - amb.gbar(i, j)) / scale_b);
                }
        }
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("unfolded chart is the pullback of the box chart") {
    const MetricPair box = ellipsoid_pair(kE3);
    const MetricPair unf = ellipsoid_pair_unfolded(kE3);
    SplitMix64 rng(5);
    for (int t = 0; t < 100; ++t) {
        const std::vector<double> th{rng.uniform(0.05, 1.5), rng.uniform(0.05, 1.5)};
        const auto nu = unfolded_to_box(kE3, th);
        const auto gb = box.g().evaluate<double>(nu);
        const auto gbb = box.gbar().evaluate<double>(nu);
        const auto gu = unf.g().evaluate<double>(th);
        const auto gub = unf.gbar().evaluate<double>(th);
        for (std::size_t q = 0; q < 2; ++q) {
            const double w = kE3.a[q + 1] - kE3.a[q];
            const double dnu = w * std::sin(2.0 * th[q]);
            CHECK(rel(gu(q, q), gb(q, q) * dnu * dnu) <= 1e-10);
            CHECK(rel(gub(q, q), gbb(q, q) * dnu * dnu) <= 1e-10);
        }
    }
    // Coordinate planes are regular points of the unfolded chart.
    const std::vector<double> edge{0.0, std::numbers::pi / 2};
    CHECK(unf.chart().contains(edge));
    CHECK_NOTHROW(metric_at(unf.g(), edge));
}

TEST_CASE("ellipsoid pair eigenvalues are rho and pairwise distinct") {
    const MetricPair pair = ellipsoid_pair(kE3);
    SplitMix64 rng(8);
    for (int t = 0; t < 50; ++t) {
        const auto nu = random_nu(kE3, rng);
        const EigenProfile prof = eigen_profile(pair, nu);
        CHECK(prof.m == 2);
        CHECK(prof.strictly_nonproportional);
        std::vector<double> rho;
        for (double v : nu) rho.push_back(6.0 / (v * nu[0] * nu[1]));
        std::sort(rho.begin(), rho.end());
        for (std::size_t i = 0; i < 2; ++i) CHECK(rel(prof.values[i], rho[i]) <= 1e-10);
    }
}

TEST_CASE("catalog lookup") {
    for (const char* name : {"flat", "flat:3", "sphere", "lc-2d", "lc-a", "lc-b", "lc-c", "lc-m1", "lc-revolution",
                             "ellipsoid:1,2,3", "ellipsoid-box:1,2,3", "falsify:perturbed-lc",
                             "falsify:perturbed-lc:0.05", "falsify:random-conformal"}) {
        INFO(name);
        const CatalogEntry e = lookup(name);
        CHECK(e.box.size() == e.pair.dim());
        CHECK_NOTHROW(sample_phase_points(e.pair.g(), e.box, 5, 1));
    }
    CHECK(lookup("flat:3").pair.dim() == 3);
    CHECK_FALSE(lookup("falsify:perturbed-lc").equivalent);
    CHECK(lookup("falsify:perturbed-lc:0").equivalent);
    CHECK_FALSE(lookup("falsify:random-conformal").equivalent);
    CHECK(lookup("lc-revolution").killing.size() == 2);
    CHECK_THROWS_AS(lookup("nope"), ConfigError);
    CHECK_THROWS_AS(lookup("ellipsoid:3,2,1"), ConfigError);
    CHECK_THROWS_AS(lookup("ellipsoid:1,x"), ConfigError);
    CHECK_THROWS_AS(lookup("flat:2.5"), ConfigError);
    CHECK(!builtin_listing().empty());
}

TEST_CASE("falsification pairs differ from the base pair") {
    const MetricPair base = lookup("lc-2d").pair;
    const MetricPair zero = falsification_pair(FalsifyKind::PerturbedLC, 0.0);
    const MetricPair pert = falsification_pair(FalsifyKind::PerturbedLC, 0.1);
    const MetricPair conf = falsification_pair(FalsifyKind::RandomConformal);
    const std::vector<double> x{0.7, -1.2};
    const auto gb = base.gbar().evaluate<double>(x);
    CHECK(zero.gbar().evaluate<double>(x)(0, 0) == doctest::Approx(gb(0, 0)).epsilon(1e-15));
    CHECK(pert.gbar().evaluate<double>(x)(0, 0) ==
          doctest::Approx(gb(0, 0) * (1.0 + 0.1 * std::sin(x[0] * x[1]))).epsilon(1e-14));
    CHECK(conf.gbar().evaluate<double>(x)(1, 1) ==
          doctest::Approx(std::exp(x[0]) * base.g().evaluate<double>(x)(1, 1)).epsilon(1e-14));
}

TEST_CASE("sampling is deterministic and lands on the unit g-sphere") {
    const CatalogEntry e = lookup("lc-a");
    const auto a = sample_phase_points(e.pair.g(), e.box, 20, 42);
    const auto b = sample_phase_points(e.pair.g(), e.box, 20, 42);
    const auto c = sample_phase_points(e.pair.g(), e.box, 20, 43);
    CHECK(a.front().x == b.front().x);
    CHECK(a.back().xi == b.back().xi);
    CHECK(a.front().x != c.front().x);
    for (const auto& p : a) CHECK(std::abs(e.pair.g().inner(p.x, p.xi, p.xi) - 1.0) <= 1e-12);
    SplitMix64 r(0);
    CHECK(r.next() == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("geodesic coincidence separates equivalent and conformal pairs") {
    for (const char* name : {"lc-a", "ellipsoid:1,2,3", "sphere"}) {
        INFO(name);
        const CatalogEntry e = lookup(name);
        for (const auto& r : coincidence_batch(e.pair, sample_phase_points(e.pair.g(), e.box, 3, 13), 5.0))
            CHECK(r.distance <= 1e-5);
    }
    const CatalogEntry bad = lookup("falsify:random-conformal");
    double worst = 0.0;
    for (const auto& r : coincidence_batch(bad.pair, sample_phase_points(bad.pair.g(), bad.box, 3, 13), 5.0))
        worst = std::max(worst, r.distance);
    CHECK(worst > 1e-2);
}
