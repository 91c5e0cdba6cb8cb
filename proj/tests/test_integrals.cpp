#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "geodequiv/phase.hpp"
#include "support.hpp"

using namespace geodequiv;
using namespace testing_support;

TEST_CASE("g_operator examples") {
    const MetricPair same = pair_of({"x", "y"}, {"1 + x^2", "0.3", "2"}, {"1 + x^2", "0.3", "2"});
    const std::vector<double> x{0.4, -0.2};
    const auto G = g_operator(same, x);
    CHECK(G(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(G(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(G(0, 1)) < 1e-15);
    CHECK(std::abs(G(1, 0)) < 1e-15);

    const MetricPair d = pair_of({"x", "y"}, {"1", "0", "1"}, {"2", "0", "3"});
    const auto D = g_operator(d, x);
    CHECK(D(0, 0) == 2.0);
    CHECK(D(1, 1) == 3.0);
    CHECK(D(0, 1) == 0.0);
}

TEST_CASE("char_coeffs examples and sign") {
    SquareMatrix<double> I2(2);
    I2(0, 0) = I2(1, 1) = 1.0;
    CHECK(char_coeffs(I2) == std::vector<double>{1.0, -2.0, 1.0});
    SquareMatrix<double> D(2);
    D(0, 0) = 2.0;
    D(1, 1) = 3.0;
    CHECK(char_coeffs(D) == std::vector<double>{1.0, -5.0, 6.0});
    SquareMatrix<double> I3(3);
    for (std::size_t i = 0; i < 3; ++i) I3(i, i) = 1.0;
    const auto c3 = char_coeffs(I3);
    CHECK(c3[0] == -1.0);
    CHECK(c3 == std::vector<double>{-1.0, 3.0, -3.0, 1.0});
}

TEST_CASE("char_coeffs of c*E is the binomial expansion") {
    for (std::size_t n = 1; n <= 6; ++n) {
        const double c = 1.7;
        SquareMatrix<double> G(n);
        for (std::size_t i = 0; i < n; ++i) G(i, i) = c;
        const auto coeffs = char_coeffs(G);
        // det(cE - mu E) = (c - mu)^n = sum_i binom(n,i) (-mu)^(n-i) c^i.
        double binom = 1.0;
        for (std::size_t i = 0; i <= n; ++i) {
            const double sign = ((n - i) % 2 == 0) ? 1.0 : -1.0;
            const double expect = sign * binom * std::pow(c, static_cast<double>(i));
            CHECK(std::abs(coeffs[i] - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
            binom = binom * static_cast<double>(n - i) / static_cast<double>(i + 1);
        }
    }
}

TEST_CASE("char_coeffs match the eigenvalue product") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 5;
        const Eigen::MatrixXd A = random_spd(n, rng), B = random_spd(n, rng);
        const Eigen::MatrixXd G = A.llt().solve(B);
        const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, A);
        // prod (lambda_i - mu) expanded with the sign (-1)^n on mu^n.
        std::vector<double> poly{1.0};
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            const double lam = es.eigenvalues()(i);
            std::vector<double> next(poly.size() + 1, 0.0);
            for (std::size_t k = 0; k < poly.size(); ++k) {
                next[k] -= poly[k];
                next[k + 1] += lam * poly[k];
            }
            poly = next;
        }
        const auto c = char_coeffs(to_square(G));
        CHECK(c[0] == -1.0);
        for (std::size_t k = 0; k <= n; ++k) CHECK(std::abs(c[k] - poly[k]) <= 1e-9 * std::max(1.0, std::abs(poly[k])));
    }
}

TEST_CASE("s_matrix examples and naive sum") {
    const MetricPair same2 = pair_of({"x", "y"}, {"2", "0.5", "1"}, {"2", "0.5", "1"});
    const std::vector<double> x2{0.0, 0.0};
    const auto S1 = s_matrix(same2, x2, 1);
    CHECK(S1(0, 0) == doctest::Approx(-1.0));
    CHECK(S1(1, 1) == doctest::Approx(-1.0));
    CHECK(std::abs(S1(0, 1)) < 1e-14);
    const MetricPair same3 = pair_of({"x", "y", "z"}, {"1", "0", "0", "1", "0", "1"}, {"1", "0", "0", "1", "0", "1"});
    const std::vector<double> x3{0.0, 0.0, 0.0};
    const auto S2 = s_matrix(same3, x3, 2);
    for (std::size_t i = 0; i < 3; ++i) CHECK(S2(i, i) == -1.0);
    CHECK(s_matrix(same3, x3, 0)(0, 0) == -1.0);

    SplitMix64 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 4;
        const Eigen::MatrixXd G = random_spd(n, rng).llt().solve(random_spd(n, rng));
        const SquareMatrix<double> Gs = to_square(G);
        const auto c = char_coeffs(Gs);
        for (std::size_t k = 0; k < n; ++k) {
            Eigen::MatrixXd naive = Eigen::MatrixXd::Zero(n, n);
            for (std::size_t i = 0; i <= k; ++i) {
                Eigen::MatrixXd pw = Eigen::MatrixXd::Identity(n, n);
                for (std::size_t r = 0; r < k - i; ++r) pw = pw * G;
                naive += c[i] * pw;
            }
            const Eigen::MatrixXd got = to_eigen(s_matrix(Gs, std::span<const double>(c), k));
            CHECK((got - naive).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, naive.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("integral_Ik examples") {
    const MetricPair same = pair_of({"x", "y"}, {"1 + x^2", "0.3", "2"}, {"1 + x^2", "0.3", "2"});
    const PhasePoint p{{0.4, -0.2}, {0.7, 1.3}};
    const double e = same.g().inner(p.x, p.xi, p.xi);
    CHECK(integral_Ik(same, p, 1) == doctest::Approx(-e).epsilon(1e-14));
    CHECK(painleve_I0(same, p) == doctest::Approx(e).epsilon(1e-14));

    const MetricPair twice = pair_of({"x", "y"}, {"1 + x^2", "0.3", "2"}, {"2 + 2*x^2", "0.6", "4"});
    CHECK(integral_Ik(twice, p, 0) == doctest::Approx(std::pow(0.25, 2.0 / 3.0) * 2.0 * e).epsilon(1e-13));

    CHECK_THROWS_AS(integral_Ik(same, PhasePoint{{0.4, -0.2}, {0.0, 0.0}}, 0), ZeroTangentError);
}

TEST_CASE("integral identities on the catalog") {
    SplitMix64 rng(99);
    for (const auto& name : equivalent_names()) {
        INFO(name);
        const CatalogEntry e = lookup(name);
        const std::size_t n = e.pair.dim();
        for (const auto& p : sample_phase_points(e.pair.g(), e.box, 100, rng.next())) {
            const auto I = all_integrals(e.pair, p);
            const double en = e.pair.g().inner(p.x, p.xi, p.xi);
            // Energy identity.
            CHECK(std::abs(I[n - 1] + en) <= 1e-10 * en);
            // I_0 versus the Painleve integral.
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            CHECK(rel(I[0], sign * painleve_I0(e.pair, p)) <= 1e-12);
            // Quadratic in xi.
            const double lam = 1.9;
            PhasePoint q = p;
            for (auto& v : q.xi) v *= lam;
            const auto Iq = all_integrals(e.pair, q);
            for (std::size_t k = 0; k < n; ++k)
                CHECK(std::abs(Iq[k] - lam * lam * I[k]) <= 1e-12 * std::max(1.0, std::abs(Iq[k])));
            CHECK(g_operator_max_imag(e.pair, p.x) <= 1e-10);
        }
    }
}

TEST_CASE("eigen_profile examples") {
    const MetricPair same = pair_of({"x", "y", "z"}, {"1", "0", "0", "1", "0", "1"}, {"1", "0", "0", "1", "0", "1"});
    const std::vector<double> x{0.0, 0.0, 0.0};
    const EigenProfile a = eigen_profile(same, x);
    CHECK(a.m == 1);
    CHECK(a.multiplicities == std::vector<std::size_t>{3});
    CHECK_FALSE(a.strictly_nonproportional);

    const MetricPair d = pair_of({"x", "y", "z"}, {"1", "0", "0", "1", "0", "1"}, {"1", "0", "0", "1", "0", "4"});
    const EigenProfile b = eigen_profile(d, x, 1e-8);
    CHECK(b.m == 2);
    CHECK(b.multiplicities == std::vector<std::size_t>{2, 1});
    CHECK(b.values.back() == doctest::Approx(4.0));

    const CatalogEntry ell = lookup("ellipsoid-box:1,4");
    const std::vector<double> nu{2.5};
    CHECK(eigen_profile(ell.pair, nu).m == 1);  // n - 1 = 1 coordinate
    const CatalogEntry lc = lookup("lc-a");
    const std::vector<double> y{0.3, 0.2, -0.4};
    const EigenProfile c = eigen_profile(lc.pair, y);
    CHECK(c.m == 2);
    CHECK(c.multiplicities == std::vector<std::size_t>{2, 1});  // rho decreases with phi
}

TEST_CASE("transfer_killing") {
    const CatalogEntry sph = lookup("sphere");
    const MetricPair same(sph.pair.g(), sph.pair.g());
    const Expression s = sin(Expression::variable(0));
    const PhaseFunction f = transfer_killing(same, {Expression::constant(0.0), s * s});
    const PhasePoint p{{1.1, 0.3}, {0.4, -0.8}};
    CHECK(f(p) == doctest::Approx(std::sin(1.1) * std::sin(1.1) * -0.8).epsilon(1e-14));
    const PhaseFunction zero =
        transfer_killing(same, {Expression::constant(0.0), Expression::constant(0.0)});
    CHECK(zero(p) == 0.0);

    const CatalogEntry rev = lookup("lc-revolution");
    const PhaseFunction k = transfer_killing(rev.pair, rev.killing);
    for (const auto& q : sample_phase_points(rev.pair.g(), rev.box, 5, 21)) {
        const Trajectory t = integrate_geodesic(rev.pair.g(), q, 10.0);
        CHECK(conservation_drift(k, t) <= 1e-6);
    }
}

TEST_CASE("conservation along geodesics and the 2D criterion") {
    for (const char* name : {"lc-2d", "lc-a", "lc-b", "ellipsoid:1,2,3"}) {
        INFO(name);
        const CatalogEntry e = lookup(name);
        for (const auto& q : sample_phase_points(e.pair.g(), e.box, 3, 5)) {
            const Trajectory t = integrate_geodesic(e.pair.g(), q, 10.0);
            for (std::size_t k = 0; k < e.pair.dim(); ++k) CHECK(conservation_drift(integral_function(e.pair, k), t) <= 1e-6);
        }
    }
    const CatalogEntry bad = lookup("falsify:perturbed-lc");
    double worst = 0.0;
    for (const auto& q : sample_phase_points(bad.pair.g(), bad.box, 5, 5)) {
        const Trajectory t = integrate_geodesic(bad.pair.g(), q, 10.0);
        worst = std::max(worst, conservation_drift(painleve_function(bad.pair), t));
    }
    CHECK(worst > 1e-2);
}
