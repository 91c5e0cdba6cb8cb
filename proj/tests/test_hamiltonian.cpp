#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geodequiv/parallel.hpp"
#include "geodequiv/phase.hpp"
#include "support.hpp"

using namespace geodequiv;
using namespace testing_support;

namespace {

MetricPair generic_pair() {
    return pair_of({"x", "y"}, {"2 + sin(x)*cos(y)", "0.3*x", "1.5 + 0.2*y^2"},
                   {"1 + 0.5*cos(x + y)", "0.1*sin(y)", "3 + x*y/4"});
}

}  // namespace

TEST_CASE("legendre examples and round trip") {
    const CatalogEntry flat = lookup("flat");
    const CanonicalPoint c = legendre(flat.pair.g(), PhasePoint{{0.1, 0.2}, {0.3, -0.4}});
    CHECK(c.p == std::vector<double>{0.3, -0.4});
    const MetricPair d = pair_of({"x", "y"}, {"2", "0", "1"}, {"2", "0", "1"});
    CHECK(legendre(d.g(), PhasePoint{{0.0, 0.0}, {1.0, 1.0}}).p == std::vector<double>{2.0, 1.0});

    const MetricPair gp = generic_pair();
    for (const auto& p : sample_phase_points(gp.g(), Box(2, {-1.0, 1.0}), 50, 2)) {
        const PhasePoint back = inverse_legendre(gp.g(), legendre(gp.g(), p));
        for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(back.xi[i] - p.xi[i]) <= 1e-12);
    }
}

TEST_CASE("canonical brackets and sign convention") {
    const CatalogEntry flat = lookup("flat");
    const MetricField& g = flat.pair.g();
    const PhasePoint p{{0.3, 0.1}, {0.5, 0.7}};
    const PhaseFunction p1 = momentum_function(g, 0), x1 = coordinate_function(2, 0), x2 = coordinate_function(2, 1);
    CHECK(poisson_bracket(p1, x1, g, p) == 1.0);
    CHECK(poisson_bracket(x1, p1, g, p) == -1.0);
    CHECK(poisson_bracket(p1, x2, g, p) == 0.0);
    const PhaseFunction H = hamiltonian(g);
    CHECK(poisson_bracket(H, H, g, p) == 0.0);
    // {H, x^1} = dx^1/dt = xi^1.
    CHECK(poisson_bracket(H, x1, g, p) == doctest::Approx(0.5));
}

TEST_CASE("bracket algebra at random points") {
    const MetricPair gp = generic_pair();
    const MetricField& g = gp.g();
    const PhaseFunction H = hamiltonian(g), F = integral_function(gp, 0), K = painleve_function(gp);
    const PhaseFunction x1 = coordinate_function(2, 0);
    const PhaseFunction GK = F * K;
    for (const auto& p : sample_phase_points(g, Box(2, {-1.0, 1.0}), 100, 3)) {
        const double fg = poisson_bracket(H, F, g, p), gf = poisson_bracket(F, H, g, p);
        CHECK(std::abs(fg + gf) <= 1e-12 * std::max(1.0, std::abs(fg)));
        CHECK(poisson_bracket(F, F, g, p) == 0.0);
        const double lhs = poisson_bracket(x1, GK, g, p);
        const double rhs = poisson_bracket(x1, F, g, p) * K(p) + F(p) * poisson_bracket(x1, K, g, p);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("phase gradients match finite differences") {
    const MetricPair gp = generic_pair();
    for (const PhaseFunction& f : {integral_function(gp, 0), integral_function(gp, 1), painleve_function(gp)}) {
        for (const auto& p : sample_phase_points(gp.g(), Box(2, {-1.0, 1.0}), 20, 4)) {
            const PhaseGradient gr = f.gradient(p);
            CHECK(gr.value == doctest::Approx(f(p)).epsilon(1e-14));
            const double h = 1e-6;
            for (std::size_t i = 0; i < 2; ++i) {
                PhasePoint a = p, b = p;
                a.x[i] += h;
                b.x[i] -= h;
                const double fd = (f(a) - f(b)) / (2 * h);
                CHECK(std::abs(fd - gr.dx[i]) <= 1e-6 * std::max(1.0, std::abs(fd)));
                a = p;
                b = p;
                a.xi[i] += h;
                b.xi[i] -= h;
                const double fdv = (f(a) - f(b)) / (2 * h);
                CHECK(std::abs(fdv - gr.dxi[i]) <= 1e-6 * std::max(1.0, std::abs(fdv)));
            }
        }
    }
}

TEST_CASE("integrals commute with the Hamiltonian on equivalent pairs") {
    for (const auto& name : equivalent_names()) {
        INFO(name);
        const CatalogEntry e = lookup(name);
        const PhaseFunction H = hamiltonian(e.pair.g());
        for (const auto& p : sample_phase_points(e.pair.g(), e.box, 100, 5))
            for (std::size_t k = 0; k < e.pair.dim(); ++k)
                CHECK(normalized_bracket(H, integral_function(e.pair, k), e.pair.g(), p) <= 1e-8);
    }
}

TEST_CASE("involution matrix") {
    const CatalogEntry e = lookup("lc-c");
    const auto pts = sample_phase_points(e.pair.g(), e.box, 100, 6);
    const SquareTable m = involution_matrix(e.pair, pts);
    const SquareTable s = involution_matrix_serial(e.pair, pts);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(m[j][j] == 0.0);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(m[j][k] == m[k][j]);
            CHECK(m[j][k] <= 1e-8);
            CHECK(m[j][k] == s[j][k]);
        }
    }
    const MetricPair gp = generic_pair();
    const SquareTable bad = involution_matrix(gp, sample_phase_points(gp.g(), Box(2, {-1.0, 1.0}), 50, 7));
    CHECK(bad[0][1] > 1e-3);
}

TEST_CASE("conservation drift") {
    const CatalogEntry e = lookup("lc-a");
    const auto pts = sample_phase_points(e.pair.g(), e.box, 3, 8);
    for (const auto& p : pts) {
        const Trajectory t = integrate_geodesic(e.pair.g(), p, 10.0);
        CHECK(conservation_drift(hamiltonian(e.pair.g()), t) <= 1e-8);
    }
    const MetricPair gp = generic_pair();
    const Trajectory t = integrate_geodesic(gp.g(), PhasePoint{{0.1, 0.2}, {0.6, 0.3}}, 3.0);
    CHECK(conservation_drift(integral_function(gp, 0), t) > 1e-2);
}

TEST_CASE("independence rank") {
    const CatalogEntry flat = lookup("flat:3");
    const auto fp = sample_phase_points(flat.pair.g(), flat.box, 10, 9);
    CHECK(independence_rank(flat.pair, fp) == 1);
    for (const char* name : {"lc-2d", "lc-a", "lc-b", "lc-c", "lc-m1", "ellipsoid:1,2,3"}) {
        INFO(name);
        const CatalogEntry e = lookup(name);
        const auto pts = sample_phase_points(e.pair.g(), e.box, 20, 10);
        const std::size_t m = eigen_profile(e.pair, pts.front().x).m;
        const std::size_t r = independence_rank(e.pair, pts);
        CHECK(r >= m);
        CHECK(r == independence_rank_serial(e.pair, pts));
    }
    const CatalogEntry ell = lookup("ellipsoid:1,2,3");
    CHECK(independence_rank(ell.pair, sample_phase_points(ell.pair.g(), ell.box, 5, 11)) == 2);
}

TEST_CASE("kernels agree under different worker counts") {
    const CatalogEntry e = lookup("lc-b");
    const auto pts = sample_phase_points(e.pair.g(), e.box, 40, 12);
    const int saved = worker_count();
    set_worker_count(1);
    const SquareTable one = involution_matrix(e.pair, pts);
    set_worker_count(4);
    const SquareTable four = involution_matrix(e.pair, pts);
    set_worker_count(saved);
    CHECK(one == four);
}
