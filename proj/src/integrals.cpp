#include "geodequiv/integrals.hpp"

#include <algorithm>

#include <Eigen/Dense>

namespace geodequiv {

MetricPair::MetricPair(MetricField g, MetricField gbar) : g_(std::move(g)), gbar_(std::move(gbar)) {
    if (g_.dim() != gbar_.dim()) throw Error("metric pair: dimensions differ");
    if (g_.chart().names() != gbar_.chart().names()) throw Error("metric pair: charts differ");
}

namespace {

void require_inside(const MetricPair& pair, std::span<const double> x) {
    if (!pair.chart().contains(x)) throw ChartDomainError("point outside chart domain");
}

}  // namespace

void require_nonzero(std::span<const double> xi) {
    if (std::all_of(xi.begin(), xi.end(), [](double v) { return v == 0.0; })) throw ZeroTangentError();
}

SquareMatrix<double> g_operator(const MetricPair& pair, std::span<const double> x) {
    require_inside(pair, x);
    return g_operator(evaluate_pair(pair, x, x));
}

std::vector<double> char_coeffs(const SquareMatrix<double>& G) { return char_coeffs<double>(G); }

SquareMatrix<double> s_matrix(const MetricPair& pair, std::span<const double> x, std::size_t k) {
    if (k >= pair.dim()) throw Error("s_matrix: k must be below the dimension");
    const SquareMatrix<double> G = g_operator(pair, x);
    const std::vector<double> c = char_coeffs<double>(G);
    return s_matrix<double>(G, c, k);
}

std::vector<double> all_integrals(const MetricPair& pair, const PhasePoint& p) {
    require_nonzero(p.xi);
    require_inside(pair, p.x);
    evaluate_pair<double>(pair, p.x, p.x);  // definiteness diagnostics carry the point
    return integrals<double>(pair, p.x, p.xi);
}

double integral_Ik(const MetricPair& pair, const PhasePoint& p, std::size_t k) {
    if (k >= pair.dim()) throw Error("integral_Ik: k must be below the dimension");
    return all_integrals(pair, p)[k];
}

double painleve_I0(const MetricPair& pair, const PhasePoint& p) {
    require_nonzero(p.xi);
    require_inside(pair, p.x);
    return painleve<double>(pair, p.x, p.xi);
}

namespace {

/// Symmetric L^{-1} gbar L^{-T}, similar to G.
Eigen::MatrixXd symmetric_form(const MetricPair& pair, std::span<const double> x) {
    require_inside(pair, x);
    const auto v = evaluate_pair<double>(pair, x, x);
    const std::size_t n = pair.dim();
    Eigen::MatrixXd L(n, n), B(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            L(i, j) = v.chol_g.factor()(i, j);
            B(i, j) = v.gbar(i, j);
        }
    const auto tri = L.triangularView<Eigen::Lower>();
    Eigen::MatrixXd y = tri.solve(B);
    Eigen::MatrixXd s = tri.solve(y.transpose()).transpose();
    return 0.5 * (s + s.transpose());
}

}  // namespace

EigenProfile eigen_profile(const MetricPair& pair, std::span<const double> x, double tau) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric_form(pair, x), Eigen::EigenvaluesOnly);
    EigenProfile prof;
    const auto& ev = es.eigenvalues();
    prof.values.assign(ev.data(), ev.data() + ev.size());
    std::sort(prof.values.begin(), prof.values.end());
    for (std::size_t i = 0; i < prof.values.size(); ++i) {
        const double r = prof.values[i];
        if (i > 0 && r - prof.values[i - 1] < tau * (1.0 + std::abs(r)))
            ++prof.multiplicities.back();
        else
            prof.multiplicities.push_back(1);
    }
    prof.m = prof.multiplicities.size();
    prof.strictly_nonproportional = prof.m == pair.dim();
    return prof;
}

double g_operator_max_imag(const MetricPair& pair, std::span<const double> x) {
    const SquareMatrix<double> G = g_operator(pair, x);
    const std::size_t n = G.size();
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = G(i, j);
    const Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    return es.eigenvalues().imag().cwiseAbs().maxCoeff();
}

}  // namespace geodequiv
