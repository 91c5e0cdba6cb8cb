#include "geodequiv/phase.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include <Eigen/Dense>

#include "geodequiv/parallel.hpp"

namespace geodequiv {

CanonicalPoint legendre(const MetricField& g, const PhasePoint& pt) {
    const MetricSample s = metric_at(g, pt.x);
    return CanonicalPoint{pt.x, mat_vec(s.values, std::span<const double>(pt.xi))};
}

PhasePoint inverse_legendre(const MetricField& g, const CanonicalPoint& cp) {
    const MetricSample s = metric_at(g, cp.x);
    return PhasePoint{cp.x, s.cholesky.solve(std::span<const double>(cp.p))};
}

PhaseGradient PhaseFunction::gradient(std::span<const double> x, std::span<const double> xi) const {
    if (2 * n_ > kMaxDualVars) throw Error("phase function dimension exceeds dual capacity");
    std::vector<Dual> dx(n_), dxi(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        dx[i] = Dual::variable(x[i], i);
        dxi[i] = Dual::variable(xi[i], n_ + i);
    }
    const Dual r = df_(dx, dxi);
    PhaseGradient g;
    g.value = r.v;
    g.dx.assign(r.d.begin(), r.d.begin() + n_);
    g.dxi.assign(r.d.begin() + n_, r.d.begin() + 2 * n_);
    return g;
}

PhaseFunction operator*(const PhaseFunction& a, const PhaseFunction& b) {
    return PhaseFunction(
        a.n_, [fa = a.f_, fb = b.f_](auto x, auto xi) { return fa(x, xi) * fb(x, xi); },
        [fa = a.df_, fb = b.df_](auto x, auto xi) { return fa(x, xi) * fb(x, xi); });
}

PhaseFunction operator+(const PhaseFunction& a, const PhaseFunction& b) {
    return PhaseFunction(
        a.n_, [fa = a.f_, fb = b.f_](auto x, auto xi) { return fa(x, xi) + fb(x, xi); },
        [fa = a.df_, fb = b.df_](auto x, auto xi) { return fa(x, xi) + fb(x, xi); });
}

PhaseFunction operator*(double s, const PhaseFunction& a) {
    return PhaseFunction(
        a.n_, [s, fa = a.f_](auto x, auto xi) { return s * fa(x, xi); },
        [s, fa = a.df_](auto x, auto xi) { return s * fa(x, xi); });
}

PhaseFunction hamiltonian(const MetricField& g) {
    return PhaseFunction::from_generic(g.dim(), [g](auto x, auto xi) {
        using S = typename decltype(x)::value_type;
        const auto m = g.evaluate<std::remove_const_t<S>>(x);
        return 0.5 * bilinear(m, xi, xi);
    });
}

PhaseFunction integral_function(const MetricPair& pair, std::size_t k) {
    if (k >= pair.dim()) throw Error("integral index must be below the dimension");
    return PhaseFunction::from_generic(pair.dim(), [pair, k](auto x, auto xi) {
        using S = std::remove_const_t<typename decltype(x)::value_type>;
        return integrals<S>(pair, x, xi)[k];
    });
}

PhaseFunction painleve_function(const MetricPair& pair) {
    return PhaseFunction::from_generic(pair.dim(), [pair](auto x, auto xi) {
        using S = std::remove_const_t<typename decltype(x)::value_type>;
        return painleve<S>(pair, x, xi);
    });
}

PhaseFunction transfer_killing(const MetricPair& pair, std::vector<Expression> a) {
    if (a.size() != pair.dim()) throw Error("covector field needs one entry per coordinate");
    return PhaseFunction::from_generic(pair.dim(), [pair, a = std::move(a)](auto x, auto xi) {
        using S = std::remove_const_t<typename decltype(x)::value_type>;
        return killing_transfer<S>(pair, a, x, xi);
    });
}

PhaseFunction coordinate_function(std::size_t dim, std::size_t i) {
    return PhaseFunction::from_generic(dim, [i](auto x, auto) {
        using S = std::remove_const_t<typename decltype(x)::value_type>;
        return S(x[i]);
    });
}

PhaseFunction momentum_function(const MetricField& g, std::size_t i) {
    return PhaseFunction::from_generic(g.dim(), [g, i](auto x, auto xi) {
        using S = std::remove_const_t<typename decltype(x)::value_type>;
        const auto m = g.evaluate<S>(x);
        S s(0.0);
        for (std::size_t j = 0; j < g.dim(); ++j) s = s + m(i, j) * xi[j];
        return s;
    });
}

double CanonicalGradient::norm() const {
    double s = 0.0;
    for (double v : dx) s += v * v;
    for (double v : dp) s += v * v;
    return std::sqrt(s);
}

CanonicalGradient canonical_gradient(const PhaseFunction& f, const MetricJet& jet, const PhasePoint& p) {
    const std::size_t n = p.x.size();
    const PhaseGradient gr = f.gradient(p);
    CanonicalGradient c;
    // dF/dp = g^{-1} F_xi (g^{-1} is symmetric).
    c.dp = mat_vec(jet.inverse, std::span<const double>(gr.dxi));
    // dF/dx|_p = F_x - F_xi . g^{-1} (d_k g) xi = F_x - dF/dp . (d_k g) xi.
    c.dx.resize(n);
    for (std::size_t k = 0; k < n; ++k) c.dx[k] = gr.dx[k] - bilinear(jet.dg[k], std::span<const double>(c.dp),
                                                                        std::span<const double>(p.xi));
    return c;
}

namespace {

double bracket(const CanonicalGradient& a, const CanonicalGradient& b) {
    // Two separate sums keep {F,G} = -{G,F} and {F,F} = 0 exact.
    double pos = 0.0, neg = 0.0;
    for (std::size_t i = 0; i < a.dx.size(); ++i) {
        pos += a.dp[i] * b.dx[i];
        neg += a.dx[i] * b.dp[i];
    }
    return pos - neg;
}

}  // namespace

double poisson_bracket(const PhaseFunction& f, const PhaseFunction& h, const MetricField& g, const PhasePoint& p) {
    const MetricJet jet = metric_jet(g, p.x);
    return bracket(canonical_gradient(f, jet, p), canonical_gradient(h, jet, p));
}

double normalized_bracket(const PhaseFunction& f, const PhaseFunction& h, const MetricField& g,
                          const PhasePoint& p) {
    const MetricJet jet = metric_jet(g, p.x);
    const CanonicalGradient a = canonical_gradient(f, jet, p), b = canonical_gradient(h, jet, p);
    return std::abs(bracket(a, b)) / (1.0 + a.norm() * b.norm());
}

double conservation_drift(const PhaseFunction& f, const Trajectory& traj, double floor) {
    if (traj.size() == 0) throw Error("conservation_drift needs a non-empty trajectory");
    const double f0 = f(traj.samples().front().phase);
    const double scale = std::max(std::abs(f0), floor);
    double worst = 0.0;
    for (const auto& s : traj.samples()) worst = std::max(worst, std::abs(f(s.phase) - f0) / scale);
    return worst;
}

namespace {

std::vector<CanonicalGradient> integral_gradients(const MetricPair& pair, const PhasePoint& p) {
    require_nonzero(p.xi);
    if (!pair.chart().contains(p.x)) throw ChartDomainError("point outside chart domain");
    const std::size_t n = pair.dim();
    const MetricJet jet = metric_jet(pair.g(), p.x);
    std::vector<Dual> dx(n), dxi(n);
    for (std::size_t i = 0; i < n; ++i) {
        dx[i] = Dual::variable(p.x[i], i);
        dxi[i] = Dual::variable(p.xi[i], n + i);
    }
    // One dual pass yields every I_k.
    const std::vector<Dual> ik = integrals<Dual>(pair, dx, dxi);
    std::vector<CanonicalGradient> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> fx(ik[k].d.begin(), ik[k].d.begin() + n), fxi(ik[k].d.begin() + n, ik[k].d.begin() + 2 * n);
        CanonicalGradient& c = out[k];
        c.dp = mat_vec(jet.inverse, std::span<const double>(fxi));
        c.dx.resize(n);
        for (std::size_t l = 0; l < n; ++l)
            c.dx[l] = fx[l] - bilinear(jet.dg[l], std::span<const double>(c.dp), std::span<const double>(p.xi));
    }
    return out;
}

void accumulate_involution(const MetricPair& pair, const PhasePoint& p, SquareTable& table) {
    const auto grads = integral_gradients(pair, p);
    const std::size_t n = grads.size();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
            const double v = std::abs(bracket(grads[j], grads[k])) / (1.0 + grads[j].norm() * grads[k].norm());
            table[j][k] = std::max(table[j][k], v);
            table[k][j] = table[j][k];
        }
}

void merge_max(SquareTable& into, const SquareTable& from) {
    for (std::size_t j = 0; j < into.size(); ++j)
        for (std::size_t k = 0; k < into.size(); ++k) into[j][k] = std::max(into[j][k], from[j][k]);
}

}  // namespace

SquareTable involution_matrix_serial(const MetricPair& pair, const std::vector<PhasePoint>& points) {
    if (points.empty()) throw Error("involution_matrix needs at least one point");
    const std::size_t n = pair.dim();
    SquareTable table(n, std::vector<double>(n, 0.0));
    for (const auto& p : points) accumulate_involution(pair, p, table);
    return table;
}

SquareTable involution_matrix(const MetricPair& pair, const std::vector<PhasePoint>& points) {
    if (points.empty()) throw Error("involution_matrix needs at least one point");
    const std::size_t n = pair.dim();
    SquareTable table(n, std::vector<double>(n, 0.0));
    const auto count = static_cast<std::ptrdiff_t>(points.size());
    std::exception_ptr failure;
#pragma omp parallel num_threads(worker_count())
    {
        SquareTable local(n, std::vector<double>(n, 0.0));
#pragma omp for schedule(dynamic, 4)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            try {
                accumulate_involution(pair, points[i], local);
            } catch (...) {
#pragma omp critical(geodequiv_involution_error)
                if (!failure) failure = std::current_exception();
            }
        }
#pragma omp critical(geodequiv_involution_merge)
        merge_max(table, local);
    }
    if (failure) std::rethrow_exception(failure);
    return table;
}

std::size_t differential_rank(const MetricPair& pair, const PhasePoint& p, double tol) {
    const std::size_t n = pair.dim();
    const auto grads = integral_gradients(pair, p);
    Eigen::MatrixXd m(n, 2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            m(k, i) = grads[k].dx[i];
            m(k, n + i) = grads[k].dp[i];
        }
        const double norm = m.row(k).norm();
        if (norm > 0.0) m.row(k) /= norm;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * sv(0)) ++r;
    return r;
}

std::size_t independence_rank_serial(const MetricPair& pair, const std::vector<PhasePoint>& points, double tol) {
    if (points.empty()) throw Error("independence_rank needs at least one point");
    std::size_t best = 0;
    for (const auto& p : points) best = std::max(best, differential_rank(pair, p, tol));
    return best;
}

std::size_t independence_rank(const MetricPair& pair, const std::vector<PhasePoint>& points, double tol) {
    if (points.empty()) throw Error("independence_rank needs at least one point");
    const auto count = static_cast<std::ptrdiff_t>(points.size());
    std::size_t best = 0;
    std::exception_ptr failure;
#pragma omp parallel for num_threads(worker_count()) reduction(max : best) schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            best = std::max(best, differential_rank(pair, points[i], tol));
        } catch (...) {
#pragma omp critical(geodequiv_rank_error)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return best;
}

}  // namespace geodequiv
