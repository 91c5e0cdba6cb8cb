#include "geodequiv/sampling.hpp"

#include <cmath>
#include <numbers>

namespace geodequiv {

double SplitMix64::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> unit_direction(const MetricField& g, std::span<const double> x, SplitMix64& rng) {
    const std::size_t n = g.dim();
    const MetricSample s = metric_at(g, x);
    std::vector<double> z(n);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (auto& v : z) {
            v = rng.normal();
            norm += v * v;
        }
    } while (norm < 1e-24);
    norm = std::sqrt(norm);
    for (auto& v : z) v /= norm;
    // Solve L^T xi = z so that g(xi, xi) = |z|^2 = 1.
    const auto& L = s.cholesky.factor();
    std::vector<double> xi(z);
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) xi[i] -= L(k, i) * xi[k];
        xi[i] /= L(i, i);
    }
    return xi;
}

std::vector<PhasePoint> sample_phase_points(const MetricField& g, const Box& box, std::size_t count,
                                            std::uint64_t seed) {
    const std::size_t n = g.dim();
    if (box.size() != n) throw Error("sampling box dimension does not match the chart");
    SplitMix64 rng(seed);
    std::vector<PhasePoint> out;
    out.reserve(count);
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (++attempts > 1000 * (count + 10)) throw Error("could not sample admissible points in the box");
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(box[i].first, box[i].second);
        if (!g.chart().contains(x)) continue;
        try {
            std::vector<double> xi = unit_direction(g, x, rng);
            out.push_back({std::move(x), std::move(xi)});
        } catch (const NotPositiveDefiniteError&) {
            continue;
        }
    }
    return out;
}

}  // namespace geodequiv
