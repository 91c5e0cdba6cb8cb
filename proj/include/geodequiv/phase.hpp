#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "geodequiv/geodesic.hpp"
#include "geodequiv/integrals.hpp"

namespace geodequiv {

struct CanonicalPoint {
    std::vector<double> x;
    std::vector<double> p;
};

/// p_i = g_ij xi^j.
CanonicalPoint legendre(const MetricField& g, const PhasePoint& pt);
/// xi = g^{-1} p.
PhasePoint inverse_legendre(const MetricField& g, const CanonicalPoint& cp);

/// Value and gradient of a phase function in (x, xi) coordinates.
struct PhaseGradient {
    double value = 0.0;
    std::vector<double> dx;
    std::vector<double> dxi;
};

/// Scalar function of (x, xi) evaluated both in doubles and in first-order
/// duals, so gradients are exact to rounding.
class PhaseFunction {
public:
    using DoubleFn = std::function<double(std::span<const double>, std::span<const double>)>;
    using DualFn = std::function<Dual(std::span<const Dual>, std::span<const Dual>)>;

    PhaseFunction(std::size_t dim, DoubleFn f, DualFn df) : n_(dim), f_(std::move(f)), df_(std::move(df)) {}

    /// Wraps a generic callable invocable with double and Dual spans.
    template <class F>
    static PhaseFunction from_generic(std::size_t dim, F f) {
        return PhaseFunction(
            dim, [f](std::span<const double> x, std::span<const double> xi) { return f(x, xi); },
            [f](std::span<const Dual> x, std::span<const Dual> xi) { return f(x, xi); });
    }

    std::size_t dim() const { return n_; }
    double operator()(std::span<const double> x, std::span<const double> xi) const { return f_(x, xi); }
    double operator()(const PhasePoint& p) const { return f_(p.x, p.xi); }
    PhaseGradient gradient(std::span<const double> x, std::span<const double> xi) const;
    PhaseGradient gradient(const PhasePoint& p) const { return gradient(p.x, p.xi); }

    friend PhaseFunction operator*(const PhaseFunction& a, const PhaseFunction& b);
    friend PhaseFunction operator+(const PhaseFunction& a, const PhaseFunction& b);
    friend PhaseFunction operator*(double s, const PhaseFunction& a);

private:
    std::size_t n_;
    DoubleFn f_;
    DualFn df_;
};

/// H = 1/2 g(xi, xi).
PhaseFunction hamiltonian(const MetricField& g);
PhaseFunction integral_function(const MetricPair& pair, std::size_t k);
PhaseFunction painleve_function(const MetricPair& pair);
/// Transfer of a linear integral sum a_i xi^i of the gbar-flow to the g-flow.
PhaseFunction transfer_killing(const MetricPair& pair, std::vector<Expression> a);
PhaseFunction coordinate_function(std::size_t dim, std::size_t i);
/// Canonical momentum p_i = g_ij xi^j.
PhaseFunction momentum_function(const MetricField& g, std::size_t i);

/// Gradients with respect to canonical coordinates (x, p), chain-ruled
/// through xi = g^{-1}(x) p.
struct CanonicalGradient {
    std::vector<double> dx;
    std::vector<double> dp;
    double norm() const;
};

CanonicalGradient canonical_gradient(const PhaseFunction& f, const MetricJet& jet, const PhasePoint& p);

/// {F,G} = sum_i (dF/dp_i dG/dx^i - dF/dx^i dG/dp_i). With this order
/// {p_1, x^1} = +1.
double poisson_bracket(const PhaseFunction& f, const PhaseFunction& h, const MetricField& g, const PhasePoint& p);

/// |{F,G}| / (1 + |dF| |dG|) with canonical gradient norms.
double normalized_bracket(const PhaseFunction& f, const PhaseFunction& h, const MetricField& g, const PhasePoint& p);

inline constexpr double kDefaultDriftFloor = 1e-12;

/// max_t |F(t) - F(0)| / max(|F(0)|, floor).
double conservation_drift(const PhaseFunction& f, const Trajectory& traj, double floor = kDefaultDriftFloor);

using SquareTable = std::vector<std::vector<double>>;

/// Entry (j,k): max over points of |{I_j, I_k}| / (1 + |dI_j| |dI_k|).
/// Symmetric with an exactly zero diagonal.
SquareTable involution_matrix(const MetricPair& pair, const std::vector<PhasePoint>& points);
SquareTable involution_matrix_serial(const MetricPair& pair, const std::vector<PhasePoint>& points);

inline constexpr double kRankTol = 1e-8;

/// Numerical rank of (dI_0, ..., dI_{n-1}) at one point; rows are
/// normalized before the SVD and singular values above tol * sigma_max count.
std::size_t differential_rank(const MetricPair& pair, const PhasePoint& p, double tol = kRankTol);
/// Maximum of differential_rank over the points.
std::size_t independence_rank(const MetricPair& pair, const std::vector<PhasePoint>& points, double tol = kRankTol);
std::size_t independence_rank_serial(const MetricPair& pair, const std::vector<PhasePoint>& points,
                                     double tol = kRankTol);

}  // namespace geodequiv
