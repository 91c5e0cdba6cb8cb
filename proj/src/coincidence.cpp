#include "geodequiv/coincidence.hpp"

#include <cmath>
#include <exception>
#include <optional>

#include "geodequiv/parallel.hpp"

namespace geodequiv {

namespace {

double g_length(const Trajectory& t, const MetricField& g) { return cumulative_arclength(t, g).back(); }

}  // namespace

CoincidenceResult geodesic_coincidence(const MetricPair& pair, const PhasePoint& p, double arclength,
                                       std::size_t samples, const GeodesicOptions& opts) {
    require_nonzero(p.xi);
    if (!(arclength > 0.0)) throw Error("geodesic_coincidence: arc length must be positive");
    const double ng = std::sqrt(pair.g().inner(p.x, p.xi, p.xi));
    const double nb = std::sqrt(pair.gbar().inner(p.x, p.xi, p.xi));
    PhasePoint pb = p;
    for (auto& v : pb.xi) v *= ng / nb;

    GeodesicOptions o = opts;
    o.arclength_metric = pair.g();
    // Time horizons generous enough for the arc-length stop to trigger first.
    const double horizon_g = 2.0 * arclength / ng;
    const double horizon_b = 2.0 * arclength / ng * 1e3;

    double target = arclength;
    bool left = false;
    for (int round = 0; round < 3; ++round) {
        o.arclength_stop = target;
        Trajectory tg = integrate_geodesic(pair.g(), p, horizon_g, o);
        double len = target;
        if (tg.left_chart()) {
            left = true;
            len = g_length(tg, pair.g());
        }
        o.arclength_stop = len;
        Trajectory tb = integrate_geodesic(pair.gbar(), pb, horizon_b, o);
        if (tb.left_chart()) {
            left = true;
            const double lb = g_length(tb, pair.g());
            if (lb < len * (1.0 - 1e-12)) {
                target = lb;
                continue;
            }
        }
        if (tg.status() == TrajectoryStatus::Completed || tb.status() == TrajectoryStatus::Completed)
            throw IntegrationError("geodesic_coincidence: time horizon reached before the arc-length stop");
        const Curve cg = arclength_reparam(tg, pair.g(), samples);
        const Curve cb = arclength_reparam(tb, pair.g(), samples);
        return {symmetric_curve_distance(cg, cb), len, left, std::move(tg), std::move(tb)};
    }
    throw IntegrationError("geodesic_coincidence: could not match arc lengths at the chart boundary");
}

std::vector<CoincidenceResult> coincidence_batch(const MetricPair& pair, const std::vector<PhasePoint>& starts,
                                                 double arclength, std::size_t samples, const GeodesicOptions& opts) {
    const auto m = static_cast<std::ptrdiff_t>(starts.size());
    std::vector<std::optional<CoincidenceResult>> slots(starts.size());
    std::vector<std::exception_ptr> errors(starts.size());
#pragma omp parallel for num_threads(worker_count()) schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < m; ++k) {
        try {
            slots[k].emplace(geodesic_coincidence(pair, starts[k], arclength, samples, opts));
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<CoincidenceResult> out;
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace geodequiv
