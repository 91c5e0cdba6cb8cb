#include "geodequiv/levi_civita.hpp"

#include <cmath>
#include <numeric>

namespace geodequiv {

namespace {

bool references_only(const Expression& e, std::size_t lo, std::size_t hi) {
    for (auto v : e.variables())
        if (v < lo || v >= hi) return false;
    return true;
}

}  // namespace

std::size_t LCSpec::offset(std::size_t block) const {
    return std::accumulate(sizes.begin(), sizes.begin() + static_cast<std::ptrdiff_t>(block), std::size_t{0});
}

void LCSpec::validate() const {
    if (coordinates.empty()) throw ConfigError("Levi-Civita spec: no coordinates");
    if (sizes.empty()) throw ConfigError("Levi-Civita spec: no blocks");
    if (std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) != coordinates.size())
        throw ConfigError("Levi-Civita spec: block sizes must add up to the number of coordinates");
    if (phi.size() != m()) throw ConfigError("Levi-Civita spec: need one phi per block");
    if (blocks.size() != m()) throw ConfigError("Levi-Civita spec: need one A block per block size");
    for (std::size_t b = 0; b < m(); ++b) {
        const std::size_t k = sizes[b], lo = offset(b);
        if (k == 0) throw ConfigError("Levi-Civita spec: block sizes must be positive");
        if (k > 1 && !phi[b].is_constant())
            throw ConfigError("Levi-Civita spec: phi_" + std::to_string(b + 1) +
                              " must be constant on a block of size > 1");
        if (k == 1 && !references_only(phi[b], lo, lo + 1))
            throw ConfigError("Levi-Civita spec: phi_" + std::to_string(b + 1) +
                              " may depend only on its block's coordinate");
        if (blocks[b].size() != k * (k + 1) / 2)
            throw ConfigError("Levi-Civita spec: block " + std::to_string(b + 1) + " needs " +
                              std::to_string(k * (k + 1) / 2) + " entries");
        for (const auto& e : blocks[b])
            if (!references_only(e, lo, lo + k))
                throw ConfigError("Levi-Civita spec: A_" + std::to_string(b + 1) +
                                  " may depend only on its block's coordinates");
    }
}

Chart LCSpec::chart() const {
    std::vector<Expression> preds = domain;
    preds.push_back(phi[0]);
    for (std::size_t i = 0; i + 1 < m(); ++i) preds.push_back(phi[i + 1] - phi[i]);
    return Chart(coordinates, preds);
}

LCSpec make_lc_spec(std::vector<std::string> coordinates, std::vector<std::size_t> sizes,
                    const std::vector<std::string>& phi, const std::vector<std::vector<std::string>>& blocks,
                    const std::vector<std::string>& domain) {
    LCSpec s;
    s.coordinates = std::move(coordinates);
    s.sizes = std::move(sizes);
    for (const auto& p : phi) s.phi.push_back(parse(p, s.coordinates));
    for (const auto& b : blocks) {
        std::vector<Expression> entries;
        for (const auto& e : b) entries.push_back(parse(e, s.coordinates));
        s.blocks.push_back(std::move(entries));
    }
    for (const auto& d : domain) s.domain.push_back(parse(d, s.coordinates));
    s.validate();
    return s;
}

std::vector<double> pi_factors(const LCSpec& spec, std::span<const double> x) {
    std::vector<double> phi;
    for (const auto& p : spec.phi) phi.push_back(p(x));
    if (!(phi[0] > 0.0)) throw ChartDomainError("phi_1 must be positive");
    for (std::size_t i = 0; i + 1 < phi.size(); ++i)
        if (!(phi[i + 1] > phi[i])) throw ChartDomainError("phi values must be strictly increasing");
    return pi_factors(phi);
}

namespace {

/// Block-diagonal metric with per-block scalar weights.
MetricField weighted_blocks(const LCSpec& spec, const std::vector<Expression>& weight) {
    const std::size_t n = spec.dim();
    std::vector<Expression> upper(n * (n + 1) / 2, Expression::constant(0.0));
    for (std::size_t b = 0; b < spec.m(); ++b) {
        const std::size_t k = spec.sizes[b], lo = spec.offset(b);
        std::size_t idx = 0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i; j < k; ++j, ++idx)
                upper[MetricField::packed_index(lo + i, lo + j, n)] = weight[b] * spec.blocks[b][idx];
    }
    return MetricField(spec.chart(), std::move(upper));
}

Expression product(const std::vector<Expression>& v) {
    Expression r = v.front();
    for (std::size_t i = 1; i < v.size(); ++i) r = r * v[i];
    return r;
}

}  // namespace

MetricPair build_pair(const LCSpec& spec) {
    spec.validate();
    const std::vector<Expression> pi = pi_factors(spec.phi);
    const Expression prod = product(spec.phi);
    std::vector<Expression> wbar;
    for (std::size_t b = 0; b < spec.m(); ++b) wbar.push_back(pi[b] / (prod * spec.phi[b]));
    return MetricPair(weighted_blocks(spec, pi), weighted_blocks(spec, wbar));
}

MetricField gc_metric(const LCSpec& spec, double c) {
    spec.validate();
    if (!(c >= 0.0)) throw Error("gc_metric: c must be non-negative");
    const std::vector<Expression> pi = pi_factors(spec.phi);
    std::vector<Expression> shifted;
    for (const auto& p : spec.phi) shifted.push_back(p + c);
    const Expression prod = product(shifted);
    std::vector<Expression> w;
    for (std::size_t b = 0; b < spec.m(); ++b) w.push_back(pi[b] / (prod * shifted[b]));
    return weighted_blocks(spec, w);
}

std::vector<double> rho_from_phi(std::span<const double> phi) {
    double prod = 1.0;
    for (double p : phi) prod *= p;
    std::vector<double> rho;
    for (double p : phi) rho.push_back(1.0 / (prod * p));
    return rho;
}

std::vector<double> phi_from_rho(std::span<const double> rho) {
    double prod = 1.0;
    for (double r : rho) prod *= r;
    const double root = std::pow(prod, 1.0 / static_cast<double>(rho.size() + 1));
    std::vector<double> phi;
    for (double r : rho) phi.push_back(root / r);
    return phi;
}

std::vector<double> lc_integrals(const LCSpec& spec, const PhasePoint& p) {
    pi_factors(spec, p.x);  // ordering check
    return lc_integrals<double>(spec, p.x, p.xi);
}

PhaseFunction lc_integral_function(const LCSpec& spec, std::size_t k) {
    if (k < 1 || k > spec.m()) throw Error("Levi-Civita integral index must be in 1..m");
    return PhaseFunction::from_generic(spec.dim(), [spec, k](auto x, auto xi) {
        using S = std::remove_const_t<typename decltype(x)::value_type>;
        return lc_integrals<S>(spec, x, xi)[k - 1];
    });
}

Decomposition decompose_Ik(const LCSpec& spec, std::size_t k) {
    const std::size_t n = spec.dim(), m = spec.m();
    if (k >= n) throw Error("decompose_Ik: k must be below the dimension");
    Decomposition d;
    d.k = k;
    d.sign = ((n + k) % 2 == 0) ? 1.0 : -1.0;

    std::vector<Expression> inverse_multiset;
    std::vector<Expression> c_factors;
    for (std::size_t b = 0; b < m; ++b)
        for (std::size_t r = 1; r < spec.sizes[b]; ++r) {
            inverse_multiset.push_back(1.0 / spec.phi[b]);
            c_factors.push_back(spec.phi[b]);
        }
    d.C = c_factors.empty() ? Expression::constant(1.0)
                            : pow(product(c_factors), static_cast<double>(k + 2) / static_cast<double>(n + 1));
    for (std::size_t j = 0; j < m; ++j)
        d.coeff.push_back(j <= k ? elementary_symmetric(inverse_multiset, k - j) : Expression::constant(0.0));
    return d;
}

double evaluate_decomposition(const Decomposition& d, const LCSpec& spec, const PhasePoint& p) {
    const std::vector<double> L = lc_integrals(spec, p);
    const std::size_t m = spec.m();
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) sum += d.coeff[j](p.x) * L[m - 1 - j];
    return d.sign * d.C(p.x) * sum;
}

void check_spec_at(const LCSpec& spec, std::span<const double> x) {
    try {
        pi_factors(spec, x);
        const LCValues<double> v = evaluate_lc<double>(spec, x);
        for (const auto& a : v.A) Cholesky<double> chol(a, x);
    } catch (const ChartDomainError& e) {
        throw ConfigError(std::string("Levi-Civita spec: ") + e.what());
    } catch (const NotPositiveDefiniteError& e) {
        throw ConfigError(std::string("Levi-Civita spec: block form not positive definite: ") + e.what());
    }
}

}  // namespace geodequiv
