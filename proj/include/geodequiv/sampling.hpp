#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "geodequiv/geodesic.hpp"
#include "geodequiv/metric.hpp"

namespace geodequiv {

/// splitmix64 generator: tiny state, identical streams on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal by Box-Muller.
    double normal();

private:
    std::uint64_t state_;
};

using Box = std::vector<std::pair<double, double>>;

/// x uniform in the box (rejecting points outside the chart or where the
/// metric is not positive definite), xi uniform on the unit g-sphere.
std::vector<PhasePoint> sample_phase_points(const MetricField& g, const Box& box, std::size_t count,
                                            std::uint64_t seed);

/// Unit g-sphere direction at x.
std::vector<double> unit_direction(const MetricField& g, std::span<const double> x, SplitMix64& rng);

}  // namespace geodequiv
