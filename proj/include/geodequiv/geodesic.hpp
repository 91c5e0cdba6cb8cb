#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "geodequiv/metric.hpp"

namespace geodequiv {

struct PhasePoint {
    std::vector<double> x;
    std::vector<double> xi;
};

struct TrajectorySample {
    double t = 0.0;
    PhasePoint phase;
};

struct GeodesicOptions {
    double atol = 1e-10;
    double rtol = 1e-10;
    double energy_tol = 1e-8;
    double initial_step = 1e-2;
    double max_step = std::numeric_limits<double>::infinity();
    double min_step = 1e-13;
    std::size_t max_steps = 2'000'000;
    /// Stop as soon as the arc length reaches this value (located by a
    /// secant iteration on the final step).
    std::optional<double> arclength_stop;
    /// Metric measuring arclength_stop; the integrated metric when unset.
    std::optional<MetricField> arclength_metric;
};

enum class TrajectoryStatus { Completed, ArclengthReached, LeftChart };

class Trajectory {
public:
    Trajectory(MetricField metric, std::vector<TrajectorySample> samples, TrajectoryStatus status,
               double max_energy_drift)
        : metric_(std::move(metric)),
          samples_(std::move(samples)),
          status_(status),
          max_energy_drift_(max_energy_drift) {}

    const MetricField& metric() const { return metric_; }
    const std::vector<TrajectorySample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    TrajectoryStatus status() const { return status_; }
    bool left_chart() const { return status_ == TrajectoryStatus::LeftChart; }
    /// max |g(xi,xi)(t) - g(xi,xi)(0)| / g(xi,xi)(0) over accepted steps.
    double max_energy_drift() const { return max_energy_drift_; }
    const TrajectorySample& back() const { return samples_.back(); }

private:
    MetricField metric_;
    std::vector<TrajectorySample> samples_;
    TrajectoryStatus status_;
    double max_energy_drift_;
};

/// Adaptive Dormand-Prince 5(4) integration of x'' = -Gamma(x)(x', x').
///
/// Leaving the chart is a soft failure reported through the status. Throws
/// ZeroTangentError for xi = 0, IntegrationError on step-size underflow and
/// EnergyDriftError when the relative energy drift exceeds opts.energy_tol.
Trajectory integrate_geodesic(const MetricField& metric, const PhasePoint& p0, double t_end,
                              const GeodesicOptions& opts = {});

using Curve = std::vector<std::vector<double>>;

inline constexpr std::size_t kDefaultCurveSamples = 256;

/// Base points at equal arc-length spacing under `metric` (both endpoints
/// included). Points between stored samples come from re-integrating the
/// flow over the partial step, so they carry integrator accuracy.
Curve arclength_reparam(const Trajectory& traj, const MetricField& metric,
                        std::size_t count = kDefaultCurveSamples);

/// Cumulative g-arc-length at each trajectory sample.
std::vector<double> cumulative_arclength(const Trajectory& traj, const MetricField& metric);

/// max over points of c1 of the chart-Euclidean distance to the polyline c2.
double curve_distance(const Curve& c1, const Curve& c2);
/// Integrates one geodesic per start point in parallel; results keep the
/// input order. The exception of the lowest failing index is rethrown.
std::vector<Trajectory> integrate_geodesics(const MetricField& metric, const std::vector<PhasePoint>& starts,
                                            double t_end, const GeodesicOptions& opts = {});
std::vector<Trajectory> integrate_geodesics_serial(const MetricField& metric, const std::vector<PhasePoint>& starts,
                                                   double t_end, const GeodesicOptions& opts = {});

/// Single-threaded reference implementation of curve_distance.
double curve_distance_serial(const Curve& c1, const Curve& c2);
/// max(curve_distance(a,b), curve_distance(b,a)).
double symmetric_curve_distance(const Curve& a, const Curve& b);

/// CSV with header t,x1..xn,xi1..xin.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// [{"t":..,"x":[..],"xi":[..]}, ...]
nlohmann::json trajectory_json(const Trajectory& traj);

}  // namespace geodequiv
