#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "geodequiv/geodesic.hpp"
#include "geodequiv/metric.hpp"

namespace geodequiv {

/// Two metrics on one chart.
class MetricPair {
public:
    MetricPair(MetricField g, MetricField gbar);

    const Chart& chart() const { return g_.chart(); }
    std::size_t dim() const { return g_.dim(); }
    const MetricField& g() const { return g_; }
    const MetricField& gbar() const { return gbar_; }

private:
    MetricField g_;
    MetricField gbar_;
};

/// Both metrics evaluated at one point, with Cholesky log-determinants.
template <class S>
struct PairValues {
    SquareMatrix<S> g;
    SquareMatrix<S> gbar;
    Cholesky<S> chol_g;
    S log_det_g;
    S log_det_gbar;
};

template <class S>
PairValues<S> evaluate_pair(const MetricPair& pair, std::span<const S> x, std::span<const double> point = {}) {
    SquareMatrix<S> g = pair.g().evaluate<S>(x);
    SquareMatrix<S> gbar = pair.gbar().evaluate<S>(x);
    Cholesky<S> cg(g, point);
    Cholesky<S> cb(gbar, point);
    S lg = cg.log_det();
    S lb = cb.log_det();
    return PairValues<S>{std::move(g), std::move(gbar), std::move(cg), std::move(lg), std::move(lb)};
}

/// det(G - mu E) = c_0 mu^n + ... + c_n by the Faddeev-LeVerrier recurrence,
/// with c_0 = (-1)^n exactly.
template <class S>
std::vector<S> char_coeffs(const SquareMatrix<S>& G) {
    const std::size_t n = G.size();
    // a[j]: coefficient of lambda^j in det(lambda E - G).
    std::vector<S> a(n + 1, S(0.0));
    a[n] = S(1.0);
    SquareMatrix<S> M(n);
    for (std::size_t k = 1; k <= n; ++k) {
        SquareMatrix<S> next = G * M;
        for (std::size_t i = 0; i < n; ++i) next(i, i) = next(i, i) + a[n - k + 1];
        M = std::move(next);
        a[n - k] = -trace(G * M) / S(static_cast<double>(k));
    }
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    std::vector<S> c(n + 1);
    for (std::size_t i = 0; i <= n; ++i) c[i] = S(sign) * a[n - i];
    c[0] = S(sign);
    return c;
}

/// S_k = sum_{i<=k} c_i G^{k-i} by Horner accumulation.
template <class S>
SquareMatrix<S> s_matrix(const SquareMatrix<S>& G, std::span<const S> c, std::size_t k) {
    const std::size_t n = G.size();
    SquareMatrix<S> s(n);
    for (std::size_t i = 0; i < n; ++i) s(i, i) = c[0];
    for (std::size_t i = 1; i <= k; ++i) {
        s = s * G;
        for (std::size_t j = 0; j < n; ++j) s(j, j) = s(j, j) + c[i];
    }
    return s;
}

/// G = g^{-1} gbar.
template <class S>
SquareMatrix<S> g_operator(const PairValues<S>& v) {
    return v.chol_g.solve(v.gbar);
}

/// I_0, ..., I_{n-1} at (x, xi).
template <class S>
std::vector<S> integrals(const MetricPair& pair, std::span<const S> x, std::span<const S> xi) {
    using std::exp;
    const std::size_t n = pair.dim();
    const PairValues<S> v = evaluate_pair(pair, x);
    const SquareMatrix<S> G = g_operator(v);
    const std::vector<S> c = char_coeffs(G);
    const S dlog = v.log_det_g - v.log_det_gbar;
    std::vector<S> out(n);
    SquareMatrix<S> s(n);
    for (std::size_t i = 0; i < n; ++i) s(i, i) = c[0];
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            s = s * G;
            for (std::size_t j = 0; j < n; ++j) s(j, j) = s(j, j) + c[k];
        }
        const std::vector<S> sxi = mat_vec(s, xi);
        const S factor = exp(dlog * S(static_cast<double>(k + 2) / static_cast<double>(n + 1)));
        out[k] = factor * bilinear(v.gbar, std::span<const S>(sxi), xi);
    }
    return out;
}

/// (det g / det gbar)^{2/(n+1)} gbar(xi, xi).
template <class S>
S painleve(const MetricPair& pair, std::span<const S> x, std::span<const S> xi) {
    using std::exp;
    const PairValues<S> v = evaluate_pair(pair, x);
    const S factor = exp((v.log_det_g - v.log_det_gbar) * S(2.0 / static_cast<double>(pair.dim() + 1)));
    return factor * bilinear(v.gbar, xi, xi);
}

/// (det g / det gbar)^{1/(n+1)} sum a_i(x) xi^i.
template <class S>
S killing_transfer(const MetricPair& pair, const std::vector<Expression>& a, std::span<const S> x,
                   std::span<const S> xi) {
    using std::exp;
    const PairValues<S> v = evaluate_pair(pair, x);
    S lin(0.0);
    for (std::size_t i = 0; i < a.size(); ++i) lin = lin + a[i].evaluate<S>(x) * xi[i];
    return exp((v.log_det_g - v.log_det_gbar) * S(1.0 / static_cast<double>(pair.dim() + 1))) * lin;
}

// Double-valued entry points.

SquareMatrix<double> g_operator(const MetricPair& pair, std::span<const double> x);
std::vector<double> char_coeffs(const SquareMatrix<double>& G);
SquareMatrix<double> s_matrix(const MetricPair& pair, std::span<const double> x, std::size_t k);
/// Throws ZeroTangentError for xi = 0 and ChartDomainError outside the chart.
double integral_Ik(const MetricPair& pair, const PhasePoint& p, std::size_t k);
std::vector<double> all_integrals(const MetricPair& pair, const PhasePoint& p);
double painleve_I0(const MetricPair& pair, const PhasePoint& p);

struct EigenProfile {
    std::vector<double> values;  // ascending
    std::vector<std::size_t> multiplicities;
    std::size_t m = 0;
    bool strictly_nonproportional = false;
};

inline constexpr double kDefaultClusterTol = 1e-8;

/// Common eigenvalues of g and gbar, clustered when the gap is below
/// tau * (1 + |rho|).
EigenProfile eigen_profile(const MetricPair& pair, std::span<const double> x, double tau = kDefaultClusterTol);

/// Largest |imaginary part| among eigenvalues of G computed by a general
/// (non-symmetric) eigensolver.
double g_operator_max_imag(const MetricPair& pair, std::span<const double> x);

void require_nonzero(std::span<const double> xi);

}  // namespace geodequiv
