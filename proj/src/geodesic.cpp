#include "geodequiv/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>

#include <omp.h>

#include "geodequiv/format.hpp"
#include "geodequiv/parallel.hpp"

namespace geodequiv {

namespace {

// Dormand-Prince 5(4) tableau. The flow is autonomous, so the nodes c_i are not needed.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

/// Raised when a stage leaves the region where the vector field is defined.
struct StageFailure {};

/// Geodesic spray on (x, xi), optionally augmented with s' = |xi|_arc.
class FlowRhs {
public:
    FlowRhs(const MetricField& dynamics, const MetricField* arc) : dyn_(dynamics), arc_(arc), n_(dynamics.dim()) {}

    std::size_t state_size() const { return 2 * n_ + (arc_ ? 1 : 0); }
    std::size_t dim() const { return n_; }

    void operator()(std::span<const double> y, std::span<double> dy) const {
        const auto x = y.subspan(0, n_);
        const auto xi = y.subspan(n_, n_);
        for (double v : y)
            if (!std::isfinite(v)) throw StageFailure{};
        if (!dyn_.chart().contains(x)) throw StageFailure{};
        try {
            const MetricJet jet = metric_jet(dyn_, x);
            const auto acc = geodesic_acceleration(jet, xi);
            for (std::size_t i = 0; i < n_; ++i) {
                dy[i] = xi[i];
                dy[n_ + i] = acc[i];
            }
            if (arc_) {
                const double e = (arc_ == &dyn_) ? bilinear(jet.g, xi, xi) : arc_->inner(x, xi, xi);
                dy[2 * n_] = std::sqrt(std::max(e, 0.0));
            }
        } catch (const NotPositiveDefiniteError&) {
            throw StageFailure{};
        } catch (const DomainError&) {
            throw StageFailure{};
        }
    }

private:
    const MetricField& dyn_;
    const MetricField* arc_;
    std::size_t n_;
};

struct StepResult {
    std::vector<double> y;
    std::vector<double> k7;  // f(y) at the new point (first-same-as-last)
    double err = 0.0;
};

StepResult dopri_step(const FlowRhs& f, std::span<const double> y, std::span<const double> k1, double h,
                      double atol, double rtol) {
    const std::size_t m = y.size();
    std::vector<double> k2(m), k3(m), k4(m), k5(m), k6(m), tmp(m);
    auto stage = [&](auto&& combine, std::vector<double>& out) {
        for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * combine(i);
        f(tmp, out);
    };
    stage([&](std::size_t i) { return a21 * k1[i]; }, k2);
    stage([&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; }, k3);
    stage([&](std::size_t i) { return a41 * k1[i] + a42 * k2[i] + a43 * k3[i]; }, k4);
    stage([&](std::size_t i) { return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]; }, k5);
    stage([&](std::size_t i) { return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]; },
          k6);
    StepResult r;
    r.y.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        r.y[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    r.k7.resize(m);
    f(r.y, r.k7);
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * r.k7[i]);
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(r.y[i]));
        sum += (e / sc) * (e / sc);
    }
    r.err = std::sqrt(sum / static_cast<double>(m));
    if (!std::isfinite(r.err)) r.err = std::numeric_limits<double>::infinity();
    return r;
}

double energy(const MetricField& metric, std::span<const double> x, std::span<const double> xi) {
    return metric.inner(x, xi, xi);
}

PhasePoint split(std::span<const double> y, std::size_t n) {
    return PhasePoint{std::vector<double>(y.begin(), y.begin() + n),
                      std::vector<double>(y.begin() + n, y.begin() + 2 * n)};
}

}  // namespace

Trajectory integrate_geodesic(const MetricField& metric, const PhasePoint& p0, double t_end,
                              const GeodesicOptions& opts) {
    const std::size_t n = metric.dim();
    if (p0.x.size() != n || p0.xi.size() != n) throw Error("phase point dimension does not match the chart");
    if (!(t_end > 0.0)) throw Error("t_end must be positive");
    if (std::all_of(p0.xi.begin(), p0.xi.end(), [](double v) { return v == 0.0; }))
        throw ZeroTangentError("initial tangent vector is zero");
    if (!metric.chart().contains(p0.x)) throw ChartDomainError("initial point outside chart domain");
    metric_at(metric, p0.x);  // definiteness check at the start point

    const bool track_arc = opts.arclength_stop.has_value();
    const MetricField* arc_metric = opts.arclength_metric ? &*opts.arclength_metric : &metric;
    const FlowRhs f(metric, track_arc ? arc_metric : nullptr);
    std::vector<double> y(f.state_size(), 0.0);
    std::copy(p0.x.begin(), p0.x.end(), y.begin());
    std::copy(p0.xi.begin(), p0.xi.end(), y.begin() + n);
    std::vector<double> k1(y.size());
    f(y, k1);

    const double e0 = energy(metric, p0.x, p0.xi);
    double max_drift = 0.0;
    std::vector<TrajectorySample> samples{{0.0, p0}};
    TrajectoryStatus status = TrajectoryStatus::Completed;

    double t = 0.0;
    double h = std::min({opts.initial_step, opts.max_step, t_end});
    std::size_t steps = 0;
    while (t_end - t > 1e-14 * t_end) {
        if (++steps > opts.max_steps) throw IntegrationError("maximum number of steps exceeded");
        const bool last = h >= t_end - t;
        if (last) h = t_end - t;
        StepResult step;
        try {
            step = dopri_step(f, y, k1, h, opts.atol, opts.rtol);
        } catch (const StageFailure&) {
            h *= 0.25;
            if (h < opts.min_step * std::max(1.0, std::abs(t))) {
                status = TrajectoryStatus::LeftChart;
                break;
            }
            continue;
        }
        if (step.err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(step.err, -0.2));
            if (h < opts.min_step * std::max(1.0, std::abs(t))) throw IntegrationError("step-size underflow");
            continue;
        }

        double h_taken = h;
        bool arc_done = false;
        if (track_arc && step.y[2 * n] >= *opts.arclength_stop) {
            // Secant iteration on the step length for s(t + h) = target.
            const double target = *opts.arclength_stop;
            double ha = 0.0, fa = y[2 * n] - target;
            double hb = h, fb = step.y[2 * n] - target;
            for (int it = 0; it < 60 && std::abs(fb) > 1e-15 * std::max(1.0, target); ++it) {
                double hc = hb - fb * (hb - ha) / (fb - fa);
                if (!(hc > 0.0 && hc <= h)) hc = 0.5 * (ha + hb);
                StepResult sc = dopri_step(f, y, k1, hc, opts.atol, opts.rtol);
                const double fc = sc.y[2 * n] - target;
                ha = hb, fa = fb;
                hb = hc, fb = fc;
                step = std::move(sc);
            }
            h_taken = hb;
            arc_done = true;
        }

        t = (last && !arc_done) ? t_end : t + h_taken;
        y = step.y;
        k1 = step.k7;
        PhasePoint p = split(y, n);
        const double drift = std::abs(energy(metric, p.x, p.xi) - e0) / e0;
        max_drift = std::max(max_drift, drift);
        if (drift > opts.energy_tol) throw EnergyDriftError(drift, opts.energy_tol);
        samples.push_back({t, std::move(p)});
        if (arc_done) {
            status = TrajectoryStatus::ArclengthReached;
            break;
        }
        const double fac = step.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(step.err, -0.2), 0.2, 5.0);
        h = std::min(h * fac, opts.max_step);
    }
    return Trajectory(metric, std::move(samples), status, max_drift);
}

namespace {

/// Re-integrates from a stored sample over a sub-step, carrying arc length
/// under `arc` alongside the geodesic flow of the trajectory's own metric.
class SubStepper {
public:
    SubStepper(const Trajectory& traj, const MetricField& arc) : traj_(traj), f_(traj.metric(), &arc) {}

    /// (base point, arc length gained, speed) after advancing sample i by dt.
    struct Result {
        std::vector<double> x;
        double arc = 0.0;
        double speed = 0.0;
    };

    Result advance(std::size_t i, double dt) const {
        const std::size_t n = f_.dim();
        if (i != base_) {
            const auto& p = traj_.samples()[i].phase;
            y_.assign(2 * n + 1, 0.0);
            std::copy(p.x.begin(), p.x.end(), y_.begin());
            std::copy(p.xi.begin(), p.xi.end(), y_.begin() + static_cast<std::ptrdiff_t>(n));
            k1_.resize(y_.size());
            f_(y_, k1_);
            base_ = i;
        }
        Result r;
        if (dt == 0.0) {
            r.x.assign(y_.begin(), y_.begin() + static_cast<std::ptrdiff_t>(n));
            r.speed = k1_[2 * n];
            return r;
        }
        const StepResult s = dopri_step(f_, y_, k1_, dt, 1.0, 1.0);
        r.x.assign(s.y.begin(), s.y.begin() + static_cast<std::ptrdiff_t>(n));
        r.arc = s.y[2 * n];
        r.speed = s.k7[2 * n];
        return r;
    }

private:
    const Trajectory& traj_;
    FlowRhs f_;
    mutable std::size_t base_ = static_cast<std::size_t>(-1);
    mutable std::vector<double> y_, k1_;
};

/// Root in [0, h] of the cubic Hermite arc-length model with s(0) = 0,
/// s(h) = len, s'(0) = v0, s'(h) = v1.
double hermite_arc_inverse(double h, double len, double v0, double v1, double need) {
    const auto model = [&](double tau, double& ds) {
        const double u = tau / h, u2 = u * u, u3 = u2 * u;
        ds = (6 * u - 6 * u2) * len / h + (1 - 4 * u + 3 * u2) * v0 + (-2 * u + 3 * u2) * v1;
        return (3 * u2 - 2 * u3) * len + (u - 2 * u2 + u3) * h * v0 + (-u2 + u3) * h * v1;
    };
    double tau = len > 0.0 ? h * need / len : 0.0;
    for (int it = 0; it < 20; ++it) {
        double ds = 0.0;
        const double r = model(tau, ds) - need;
        if (!(ds > 0.0)) break;
        const double next = std::clamp(tau - r / ds, 0.0, h);
        if (std::abs(next - tau) <= 1e-16 * h) return next;
        tau = next;
    }
    return tau;
}

}  // namespace

std::vector<double> cumulative_arclength(const Trajectory& traj, const MetricField& metric) {
    const auto& s = traj.samples();
    std::vector<double> cum(s.size(), 0.0);
    const SubStepper stepper(traj, metric);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        try {
            cum[i + 1] = cum[i] + stepper.advance(i, s[i + 1].t - s[i].t).arc;
        } catch (const StageFailure&) {
            throw IntegrationError("trajectory sample outside the chart during arc-length quadrature");
        }
    }
    return cum;
}

Curve arclength_reparam(const Trajectory& traj, const MetricField& metric, std::size_t count) {
    if (traj.size() < 2) throw Error("arc-length reparametrization needs at least two samples");
    if (count < 2) throw Error("curve needs at least two points");
    const auto& s = traj.samples();
    const std::vector<double> cum = cumulative_arclength(traj, metric);
    const double total = cum.back();
    if (!(total > 0.0)) throw ZeroTangentError("zero-length trajectory");

    std::vector<double> speed;
    speed.reserve(s.size());
    for (const auto& smp : s) speed.push_back(std::sqrt(std::max(0.0, metric.inner(smp.phase.x, smp.phase.xi, smp.phase.xi))));
    const SubStepper stepper(traj, metric);
    Curve out(count);
    std::size_t i = 0;
    for (std::size_t k = 0; k < count; ++k) {
        if (k == 0) {
            out[k] = s.front().phase.x;
            continue;
        }
        if (k + 1 == count) {
            out[k] = s.back().phase.x;
            continue;
        }
        const double target = total * static_cast<double>(k) / static_cast<double>(count - 1);
        while (i + 2 < s.size() && cum[i + 1] < target) ++i;
        const double dt_full = s[i + 1].t - s[i].t;
        const double need = target - cum[i];
        const double seg = cum[i + 1] - cum[i];
        double dt = hermite_arc_inverse(dt_full, seg, speed[i], speed[i + 1], need);
        SubStepper::Result r;
        try {
            for (int it = 0; it < 8; ++it) {
                r = stepper.advance(i, dt);
                const double resid = r.arc - need;
                if (std::abs(resid) <= 1e-13 * std::max(1.0, total) || r.speed <= 0.0) break;
                dt = std::clamp(dt - resid / r.speed, 0.0, dt_full);
            }
        } catch (const StageFailure&) {
            throw IntegrationError("trajectory sample outside the chart during reparametrization");
        }
        out[k] = std::move(r.x);
    }
    return out;
}

namespace {

double point_segment_sq(std::span<const double> p, std::span<const double> a, std::span<const double> b) {
    double ab2 = 0.0, apab = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double ab = b[i] - a[i];
        ab2 += ab * ab;
        apab += (p[i] - a[i]) * ab;
    }
    const double u = ab2 > 0.0 ? std::clamp(apab / ab2, 0.0, 1.0) : 0.0;
    double d2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = a[i] + u * (b[i] - a[i]);
        d2 += (p[i] - q) * (p[i] - q);
    }
    return d2;
}

double point_polyline_sq(std::span<const double> p, const Curve& c) {
    if (c.size() == 1) return point_segment_sq(p, c[0], c[0]);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < c.size(); ++j) best = std::min(best, point_segment_sq(p, c[j], c[j + 1]));
    return best;
}

void check_curves(const Curve& c1, const Curve& c2) {
    if (c1.empty() || c2.empty()) throw Error("curve_distance needs non-empty curves");
}

}  // namespace

double curve_distance_serial(const Curve& c1, const Curve& c2) {
    check_curves(c1, c2);
    double worst = 0.0;
    for (const auto& p : c1) worst = std::max(worst, point_polyline_sq(p, c2));
    return std::sqrt(worst);
}

double curve_distance(const Curve& c1, const Curve& c2) {
    check_curves(c1, c2);
    const auto m = static_cast<std::ptrdiff_t>(c1.size());
    double worst = 0.0;
#pragma omp parallel for num_threads(worker_count()) reduction(max : worst) schedule(static)
    for (std::ptrdiff_t k = 0; k < m; ++k) worst = std::max(worst, point_polyline_sq(c1[k], c2));
    return std::sqrt(worst);
}

std::vector<Trajectory> integrate_geodesics_serial(const MetricField& metric, const std::vector<PhasePoint>& starts,
                                                   double t_end, const GeodesicOptions& opts) {
    std::vector<Trajectory> out;
    out.reserve(starts.size());
    for (const auto& p : starts) out.push_back(integrate_geodesic(metric, p, t_end, opts));
    return out;
}

std::vector<Trajectory> integrate_geodesics(const MetricField& metric, const std::vector<PhasePoint>& starts,
                                            double t_end, const GeodesicOptions& opts) {
    const auto m = static_cast<std::ptrdiff_t>(starts.size());
    std::vector<std::optional<Trajectory>> slots(starts.size());
    std::vector<std::exception_ptr> errors(starts.size());
#pragma omp parallel for num_threads(worker_count()) schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < m; ++k) {
        try {
            slots[k].emplace(integrate_geodesic(metric, starts[k], t_end, opts));
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<Trajectory> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

double symmetric_curve_distance(const Curve& a, const Curve& b) {
    return std::max(curve_distance(a, b), curve_distance(b, a));
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const std::size_t n = traj.metric().dim();
    os << "t";
    for (std::size_t i = 1; i <= n; ++i) os << ",x" << i;
    for (std::size_t i = 1; i <= n; ++i) os << ",xi" << i;
    os << "\n";
    for (const auto& s : traj.samples()) {
        os << format_double(s.t);
        for (double v : s.phase.x) os << "," << format_double(v);
        for (double v : s.phase.xi) os << "," << format_double(v);
        os << "\n";
    }
}

nlohmann::json trajectory_json(const Trajectory& traj) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : traj.samples()) arr.push_back({{"t", s.t}, {"x", s.phase.x}, {"xi", s.phase.xi}});
    return arr;
}

}  // namespace geodequiv
