#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "geodequiv/integrals.hpp"
#include "geodequiv/phase.hpp"

namespace geodequiv {

namespace detail {
template <class T>
T make_constant(double v, const T*) {
    return T(v);
}
inline Expression make_constant(double v, const Expression*) { return Expression::constant(v); }
}  // namespace detail

/// sigma_k(vals) by the Newton-triangle recurrence; sigma_0 = 1.
template <class T>
T elementary_symmetric(const std::vector<T>& vals, std::size_t k) {
    const T* tag = nullptr;
    if (k > vals.size()) return detail::make_constant(0.0, tag);
    std::vector<T> e(k + 1, detail::make_constant(0.0, tag));
    e[0] = detail::make_constant(1.0, tag);
    for (std::size_t i = 0; i < vals.size(); ++i)
        for (std::size_t j = std::min(k, i + 1); j >= 1; --j) e[j] = e[j] + vals[i] * e[j - 1];
    return e[k];
}

/// Pi_i = (phi_i - phi_1)...(phi_i - phi_{i-1}) (phi_{i+1} - phi_i)...(phi_m - phi_i).
template <class T>
std::vector<T> pi_factors(const std::vector<T>& phi) {
    const T* tag = nullptr;
    const std::size_t m = phi.size();
    std::vector<T> pi(m, detail::make_constant(1.0, tag));
    for (std::size_t i = 0; i < m; ++i) {
        bool first = true;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            T d = j < i ? phi[i] - phi[j] : phi[j] - phi[i];
            pi[i] = first ? d : pi[i] * d;
            first = false;
        }
    }
    return pi;
}

/// Levi-Civita normal form: blocks of sizes k_1..k_m over consecutive
/// coordinates, eigenvalue functions phi_i and positive-definite forms A_i.
struct LCSpec {
    std::vector<std::string> coordinates;
    std::vector<std::size_t> sizes;
    /// Constant when the block has more than one coordinate, otherwise a
    /// function of the block's single coordinate.
    std::vector<Expression> phi;
    /// Packed upper triangle of A_i in block-local order, written in the
    /// global coordinate names but referencing only the block's coordinates.
    std::vector<std::vector<Expression>> blocks;
    /// Extra domain predicates (point inside iff all > 0).
    std::vector<Expression> domain;

    std::size_t dim() const { return coordinates.size(); }
    std::size_t m() const { return sizes.size(); }
    std::size_t offset(std::size_t block) const;
    /// Structural checks; throws ConfigError.
    void validate() const;
    /// Chart with the extra predicates plus 0 < phi_1 < ... < phi_m.
    Chart chart() const;
};

/// Parse an LCSpec from DSL strings.
LCSpec make_lc_spec(std::vector<std::string> coordinates, std::vector<std::size_t> sizes,
                    const std::vector<std::string>& phi, const std::vector<std::vector<std::string>>& blocks,
                    const std::vector<std::string>& domain = {});

/// phi_i, Pi_i and A_i evaluated at x.
template <class S>
struct LCValues {
    std::vector<S> phi;
    std::vector<S> pi;
    std::vector<SquareMatrix<S>> A;
};

template <class S>
LCValues<S> evaluate_lc(const LCSpec& spec, std::span<const S> x) {
    LCValues<S> v;
    for (const auto& p : spec.phi) v.phi.push_back(p.evaluate<S>(x));
    v.pi = pi_factors(v.phi);
    for (std::size_t b = 0; b < spec.m(); ++b) {
        const std::size_t k = spec.sizes[b];
        SquareMatrix<S> a(k);
        std::size_t idx = 0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i; j < k; ++j, ++idx) {
                a(i, j) = spec.blocks[b][idx].evaluate<S>(x);
                a(j, i) = a(i, j);
            }
        v.A.push_back(std::move(a));
    }
    return v;
}

/// L_1..L_m with L_k = sum_i sigma_{k-1}(phi without phi_i) Pi_i A_i(xi_i, xi_i).
template <class S>
std::vector<S> lc_integrals(const LCSpec& spec, std::span<const S> x, std::span<const S> xi) {
    const LCValues<S> v = evaluate_lc(spec, x);
    const std::size_t m = spec.m();
    std::vector<S> quad(m);
    for (std::size_t b = 0; b < m; ++b) {
        const auto sub = xi.subspan(spec.offset(b), spec.sizes[b]);
        quad[b] = v.pi[b] * bilinear(v.A[b], sub, sub);
    }
    std::vector<S> out(m, S(0.0));
    for (std::size_t k = 1; k <= m; ++k)
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<S> rest;
            for (std::size_t j = 0; j < m; ++j)
                if (j != i) rest.push_back(v.phi[j]);
            out[k - 1] = out[k - 1] + elementary_symmetric<S>(rest, k - 1) * quad[i];
        }
    return out;
}

/// Pi_i at x; throws ChartDomainError when 0 < phi_1 < ... < phi_m fails.
std::vector<double> pi_factors(const LCSpec& spec, std::span<const double> x);

/// g = sum Pi_i A_i, gbar = sum rho^i Pi_i A_i with rho^i = 1/(phi_1...phi_m phi_i).
MetricPair build_pair(const LCSpec& spec);

/// g_c = (1/prod(phi_j + c)) sum (1/(phi_i + c)) Pi_i A_i; c >= 0.
MetricField gc_metric(const LCSpec& spec, double c);

std::vector<double> rho_from_phi(std::span<const double> phi);
/// phi_i = (1/rho^i) (rho^1...rho^m)^{1/(m+1)}.
std::vector<double> phi_from_rho(std::span<const double> rho);

std::vector<double> lc_integrals(const LCSpec& spec, const PhasePoint& p);
PhaseFunction lc_integral_function(const LCSpec& spec, std::size_t k);  // k in 1..m

/// I_k = sign * C_k * sum_{j=0}^{m-1} B_{k-j} L_{m-j}.
struct Decomposition {
    std::size_t k = 0;
    double sign = 1.0;  // (-1)^(n+k)
    Expression C;
    /// coeff[j] multiplies L_{m-j}; equals B_{k-j} (zero for k-j < 0).
    std::vector<Expression> coeff;
};

Decomposition decompose_Ik(const LCSpec& spec, std::size_t k);
double evaluate_decomposition(const Decomposition& d, const LCSpec& spec, const PhasePoint& p);

/// Throws ConfigError at x when the ordering or the definiteness of some
/// A_i fails (the sample-based construction check).
void check_spec_at(const LCSpec& spec, std::span<const double> x);

}  // namespace geodequiv
