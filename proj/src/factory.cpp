#include "geodequiv/factory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include <Eigen/Dense>

namespace geodequiv {

FormMatrix operator-(const FormMatrix& a, const FormMatrix& b) {
    FormMatrix r(a.dim_);
    for (std::size_t i = 0; i < a.a_.size(); ++i) r.a_[i] = a.a_[i] - b.a_[i];
    return r;
}

FormMatrix operator*(double s, const FormMatrix& a) {
    FormMatrix r(a.dim_);
    for (std::size_t i = 0; i < a.a_.size(); ++i) r.a_[i] = s * a.a_[i];
    return r;
}

FormMatrix FormMatrix::canonical(std::size_t n) {
    FormMatrix f(2 * n);
    for (std::size_t i = 0; i < n; ++i) f.set(2 * i, 2 * i + 1, 1.0);
    return f;
}

double pfaffian(const FormMatrix& s) {
    const std::size_t n = s.size();
    if (n % 2 != 0) throw Error("pfaffian: odd dimension");
    if (n == 0) return 1.0;
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = s(i, j);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

    double pf = 1.0;
    std::vector<double> tau(n);
    for (std::size_t k = 0; k + 1 < n; k += 2) {
        std::size_t kp = k + 1;
        for (std::size_t i = k + 2; i < n; ++i)
            if (std::abs(at(i, k)) > std::abs(at(kp, k))) kp = i;
        if (kp != k + 1) {
            for (std::size_t j = 0; j < n; ++j) std::swap(at(k + 1, j), at(kp, j));
            for (std::size_t i = 0; i < n; ++i) std::swap(at(i, k + 1), at(i, kp));
            pf = -pf;
        }
        if (at(k + 1, k) == 0.0) return 0.0;
        pf *= at(k, k + 1);
        if (k + 2 < n) {
            const double piv = at(k, k + 1);
            for (std::size_t j = k + 2; j < n; ++j) tau[j] = at(k, j) / piv;
            // Rank-two update keeps the trailing block skew-symmetric.
            for (std::size_t i = k + 2; i < n; ++i)
                for (std::size_t j = k + 2; j < n; ++j) at(i, j) += tau[i] * at(j, k + 1) - at(i, k + 1) * tau[j];
        }
    }
    return pf;
}

namespace {

std::vector<Dual> seeded(const std::vector<double>& v, std::size_t offset) {
    std::vector<Dual> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = Dual::variable(v[i], offset + i);
    return out;
}

/// Skew matrix of d(theta_i dx^i) from a dual-valued theta over z = (x, xi).
FormMatrix exterior_derivative(const std::vector<Dual>& theta, std::size_t n) {
    FormMatrix w(2 * n);
    auto jac = [&](std::size_t a, std::size_t b) { return a < n ? theta[a].d[b] : 0.0; };
    for (std::size_t a = 0; a < 2 * n; ++a)
        for (std::size_t b = a + 1; b < 2 * n; ++b) w.set(a, b, jac(a, b) - jac(b, a));
    return w;
}

void require_phase(const MetricPair& pair, const PhasePoint& p) {
    require_nonzero(p.xi);
    if (!pair.chart().contains(p.x)) throw ChartDomainError("point outside chart domain");
}

}  // namespace

FormMatrix omega_g_at(const MetricField& g, const PhasePoint& p) {
    const std::size_t n = g.dim();
    if (2 * n > kMaxDualVars) throw Error("omega_g_at: dimension exceeds dual capacity");
    if (!g.chart().contains(p.x)) throw ChartDomainError("point outside chart domain");
    const auto x = seeded(p.x, 0), xi = seeded(p.xi, n);
    const SquareMatrix<Dual> m = g.evaluate<Dual>(x);
    return exterior_derivative(mat_vec(m, std::span<const Dual>(xi)), n);
}

FormMatrix pullback_phi_omega(const MetricPair& pair, const PhasePoint& p) {
    require_phase(pair, p);
    const std::size_t n = pair.dim();
    if (2 * n > kMaxDualVars) throw Error("pullback_phi_omega: dimension exceeds dual capacity");
    const auto x = seeded(p.x, 0), xi = seeded(p.xi, n);
    const std::span<const Dual> sx(x), sxi(xi);
    const SquareMatrix<Dual> g = pair.g().evaluate<Dual>(sx);
    const SquareMatrix<Dual> gb = pair.gbar().evaluate<Dual>(sx);
    const Dual scale = sqrt(bilinear(g, sxi, sxi) / bilinear(gb, sxi, sxi));
    std::vector<Dual> theta = mat_vec(gb, sxi);
    for (auto& t : theta) t = scale * t;
    return exterior_derivative(theta, n);
}

double a_scalar(const MetricPair& pair, const PhasePoint& p) {
    require_phase(pair, p);
    return std::sqrt(pair.gbar().inner(p.x, p.xi, p.xi) / pair.g().inner(p.x, p.xi, p.xi));
}

double poly_eval(const PolyCoeffs& c, double t) {
    double r = 0.0;
    for (double v : c) r = r * t + v;
    return r;
}

double poly_norm(const PolyCoeffs& c) {
    double s = 0.0;
    for (double v : c) s += v * v;
    return std::sqrt(s);
}

double pfaffian_ratio(const MetricPair& pair, const PhasePoint& p, double t) {
    const FormMatrix w = omega_g_at(pair.g(), p);
    const FormMatrix wb = pullback_phi_omega(pair, p);
    return pfaffian(wb - t * w) / pfaffian(w);
}

PolyCoeffs delta_poly(const MetricPair& pair, const PhasePoint& p) {
    const std::size_t n = pair.dim();
    const FormMatrix w = omega_g_at(pair.g(), p);
    const FormMatrix wb = pullback_phi_omega(pair, p);
    const double pw = pfaffian(w);
    // Newton interpolation on nodes s*(j - n/2) with s a power of two, so
    // exactly representable polynomial data interpolates without rounding.
    const double radius = 1.0 + a_scalar(pair, p);
    const double half = std::max(0.5, 0.5 * static_cast<double>(n));
    const double s = std::exp2(std::ceil(std::log2(radius / half)));
    std::vector<double> t(n + 1), dd(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        t[j] = s * (static_cast<double>(j) - 0.5 * static_cast<double>(n));
        dd[j] = pfaffian(wb - t[j] * w) / pw;
    }
    for (std::size_t k = 1; k <= n; ++k)
        for (std::size_t j = n; j >= k; --j) dd[j] = (dd[j] - dd[j - 1]) / (t[j] - t[j - k]);
    // Horner expansion of the Newton form, highest power first.
    PolyCoeffs out{dd[n]};
    for (std::size_t k = n; k-- > 0;) {
        PolyCoeffs next(out.size() + 1, 0.0);
        for (std::size_t i = 0; i < out.size(); ++i) {
            next[i] += out[i];
            next[i + 1] -= t[k] * out[i];
        }
        next.back() += dd[k];
        out = std::move(next);
    }
    const double lead = out.front();
    if (lead == 0.0) throw Error("delta_poly: vanishing leading coefficient");
    for (double& v : out) v /= lead;
    return out;
}

double rank_one_delta(const RankOneData& d, double t) {
    const std::size_t n = d.mu.size();
    double prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) prod *= t + d.mu[i];
    double corr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double rest = d.A[i] * d.B[i];
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) rest *= t + d.mu[j];
        corr += rest;
    }
    return prod - corr;
}

RankOneData rank_one_data(const MetricPair& pair, const PhasePoint& p) {
    require_phase(pair, p);
    const std::size_t n = pair.dim();
    const auto v = evaluate_pair<double>(pair, p.x, p.x);
    Eigen::MatrixXd L(n, n), B(n, n);
    Eigen::VectorXd xi(n);
    for (std::size_t i = 0; i < n; ++i) {
        xi(i) = p.xi[i];
        for (std::size_t j = 0; j < n; ++j) {
            L(i, j) = v.chol_g.factor()(i, j);
            B(i, j) = v.gbar(i, j);
        }
    }
    const auto tri = L.triangularView<Eigen::Lower>();
    const Eigen::MatrixXd y = tri.solve(B);
    Eigen::MatrixXd C = tri.solve(y.transpose()).transpose();
    C = 0.5 * (C + C.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    const Eigen::VectorXd rho = es.eigenvalues();
    const Eigen::VectorXd xp = es.eigenvectors().transpose() * (L.transpose() * xi);
    const double N = xp.norm();
    const double D = std::sqrt(xp.cwiseProduct(xp).dot(rho));
    RankOneData d;
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        d.mu.push_back(-rho(ii) * N / D);
        d.A.push_back(rho(ii) * xp(ii));
        d.B.push_back((D / N - rho(ii) * N / D) * xp(ii) / (D * D));
    }
    return d;
}

HornerResult horner_divide(const PolyCoeffs& a, double root) {
    if (a.size() < 2) throw Error("horner_divide: polynomial degree must be at least 1");
    HornerResult r;
    r.quotient.resize(a.size() - 1);
    double acc = a[0];
    r.quotient[0] = acc;
    for (std::size_t k = 1; k + 1 < a.size(); ++k) {
        acc = a[k] + root * acc;
        r.quotient[k] = acc;
    }
    r.remainder = a.back() + root * acc;
    return r;
}

FactoryResult factory_integrals(const MetricPair& pair, const PhasePoint& p) {
    FactoryResult f;
    f.delta = delta_poly(pair, p);
    f.a = a_scalar(pair, p);
    HornerResult h = horner_divide(f.delta, f.a);
    f.quotient = std::move(h.quotient);
    f.remainder = h.remainder;
    return f;
}

PolyCoeffs factory_from_integrals(const MetricPair& pair, const PhasePoint& p) {
    const std::vector<double> I = all_integrals(pair, p);
    const double e = pair.g().inner(p.x, p.xi, p.xi);
    const double i0 = I[0];
    PolyCoeffs out;
    for (std::size_t k = 0; k < I.size(); ++k) {
        const double half = 0.5 * static_cast<double>(k);
        out.push_back(std::pow(e, half) * I[k] / (i0 * std::pow(std::abs(i0), half)));
    }
    return out;
}

std::vector<double> factory_drift(const MetricPair& pair, const Trajectory& traj, double floor) {
    if (traj.samples().empty()) throw Error("factory_drift: empty trajectory");
    const PolyCoeffs b0 = factory_integrals(pair, traj.samples().front().phase).quotient;
    std::vector<double> worst(b0.size(), 0.0);
    for (const auto& s : traj.samples()) {
        const PolyCoeffs b = factory_integrals(pair, s.phase).quotient;
        for (std::size_t k = 0; k < b.size(); ++k)
            worst[k] = std::max(worst[k], std::abs(b[k] - b0[k]) / std::max(std::abs(b0[k]), floor));
    }
    return worst;
}

double factory_constant_term(const MetricPair& pair, const PhasePoint& p) {
    require_phase(pair, p);
    const std::size_t n = pair.dim();
    const auto v = evaluate_pair<double>(pair, p.x, p.x);
    const double rho_prod = std::exp(v.log_det_gbar - v.log_det_g);
    const double ratio = std::sqrt(pair.g().inner(p.x, p.xi, p.xi) / pair.gbar().inner(p.x, p.xi, p.xi));
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;
    return sign * std::pow(ratio, static_cast<double>(n + 1)) * rho_prod;
}

}  // namespace geodequiv
