#pragma once

#include <cstddef>
#include <vector>

#include "geodequiv/geodesic.hpp"
#include "geodequiv/integrals.hpp"

namespace geodequiv {

struct CoincidenceResult {
    /// Symmetric curve distance between the two geodesics as point sets.
    double distance = 0.0;
    /// Common g-arc-length actually compared (shorter than requested when a
    /// geodesic leaves the chart).
    double arclength = 0.0;
    bool left_chart = false;
    Trajectory g_traj;
    Trajectory gbar_traj;
};

/// The g-geodesic from (x, xi) and the gbar-geodesic from (x, xi |xi|_g / |xi|_gbar),
/// both cut at the same g-arc-length and sampled at equal g-arc-length spacing.
CoincidenceResult geodesic_coincidence(const MetricPair& pair, const PhasePoint& p, double arclength,
                                       std::size_t samples = kDefaultCurveSamples, const GeodesicOptions& opts = {});

/// Distances for many start points, in parallel over the points.
std::vector<CoincidenceResult> coincidence_batch(const MetricPair& pair, const std::vector<PhasePoint>& starts,
                                                 double arclength, std::size_t samples = kDefaultCurveSamples,
                                                 const GeodesicOptions& opts = {});

}  // namespace geodequiv
