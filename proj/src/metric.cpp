#include "geodequiv/metric.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace geodequiv {

namespace {

bool is_identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

}  // namespace

Chart::Chart(std::vector<std::string> names, std::vector<Expression> domain)
    : names_(std::move(names)), domain_(std::move(domain)) {
    if (names_.empty()) throw Error("chart must have at least one coordinate");
    if (names_.size() > kMaxChartDim)
        throw Error("chart dimension " + std::to_string(names_.size()) + " exceeds " +
                    std::to_string(kMaxChartDim));
    std::set<std::string> seen;
    for (const auto& n : names_) {
        if (!is_identifier(n)) throw Error("invalid coordinate name \"" + n + "\"");
        if (is_function_name(n)) throw Error("coordinate name \"" + n + "\" is a reserved function name");
        if (!seen.insert(n).second) throw Error("duplicate coordinate name \"" + n + "\"");
    }
    for (const auto& d : domain_)
        for (auto v : d.variables())
            if (v >= names_.size()) throw Error("domain predicate references an undeclared coordinate");
}

Chart Chart::with_domain(std::vector<std::string> names, const std::vector<std::string>& domain_src) {
    std::vector<Expression> domain;
    for (const auto& s : domain_src) domain.push_back(geodequiv::parse(s, names));
    return Chart(std::move(names), std::move(domain));
}

bool Chart::contains(std::span<const double> x) const {
    if (x.size() != dim()) return false;
    for (double v : x)
        if (!std::isfinite(v)) return false;
    try {
        for (const auto& d : domain_)
            if (!(d.evaluate<double>(x) > 0.0)) return false;
    } catch (const DomainError&) {
        return false;
    }
    return true;
}

MetricField::MetricField(Chart chart, std::vector<Expression> upper)
    : chart_(std::move(chart)), upper_(std::move(upper)) {
    const std::size_t n = chart_.dim();
    if (upper_.size() != n * (n + 1) / 2)
        throw Error("metric needs " + std::to_string(n * (n + 1) / 2) + " upper-triangle entries");
    for (const auto& e : upper_)
        for (auto v : e.variables())
            if (v >= n) throw Error("metric entry references an undeclared coordinate");
}

MetricField MetricField::diagonal(Chart chart, const std::vector<Expression>& diag) {
    const std::size_t n = chart.dim();
    if (diag.size() != n) throw Error("diagonal metric needs one entry per coordinate");
    std::vector<Expression> upper;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) upper.push_back(i == j ? diag[i] : Expression::constant(0.0));
    return MetricField(std::move(chart), std::move(upper));
}

MetricField MetricField::euclidean(Chart chart) {
    std::vector<Expression> diag(chart.dim(), Expression::constant(1.0));
    return diagonal(std::move(chart), diag);
}

std::size_t MetricField::packed_index(std::size_t i, std::size_t j, std::size_t n) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
}

const Expression& MetricField::entry(std::size_t i, std::size_t j) const {
    return upper_[packed_index(i, j, dim())];
}

double MetricField::inner(std::span<const double> x, std::span<const double> u,
                          std::span<const double> v) const {
    return bilinear(evaluate<double>(x), u, v);
}

MetricSample metric_at(const MetricField& metric, std::span<const double> x) {
    if (!metric.chart().contains(x)) throw ChartDomainError("point outside chart domain");
    const std::size_t n = metric.dim();
    SquareMatrix<Dual2> entries(n);
    SquareMatrix<double> values(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            entries(i, j) = eval2(metric.entry(i, j), x);
            entries(j, i) = entries(i, j);
            values(i, j) = values(j, i) = entries(i, j).value();
        }
    Cholesky<double> chol(values, x);
    return MetricSample{std::move(entries), std::move(values), std::move(chol)};
}

MetricJet metric_jet(const MetricField& metric, std::span<const double> x) {
    const std::size_t n = metric.dim();
    std::vector<Dual> vars(n);
    for (std::size_t i = 0; i < n; ++i) vars[i] = Dual::variable(x[i], i);
    const SquareMatrix<Dual> m = metric.evaluate<Dual>(vars);
    MetricJet jet;
    jet.g = SquareMatrix<double>(n);
    jet.dg.assign(n, SquareMatrix<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            jet.g(i, j) = m(i, j).v;
            for (std::size_t k = 0; k < n; ++k) jet.dg[k](i, j) = m(i, j).d[k];
        }
    Cholesky<double> chol(jet.g, x);
    jet.inverse = chol.inverse();
    jet.log_det = chol.log_det();
    return jet;
}

Christoffel christoffel(const MetricJet& jet) {
    const std::size_t n = jet.g.size();
    Christoffel gamma(n);
    // Christoffel symbols of the first kind, lowered index l.
    std::vector<double> first(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            for (std::size_t l = 0; l < n; ++l)
                first[l] = 0.5 * (jet.dg[i](j, l) + jet.dg[j](i, l) - jet.dg[l](i, j));
            for (std::size_t k = 0; k < n; ++k) {
                double s = 0.0;
                for (std::size_t l = 0; l < n; ++l) s += jet.inverse(k, l) * first[l];
                gamma(k, i, j) = s;
                gamma(k, j, i) = s;
            }
        }
    return gamma;
}

Christoffel christoffel(const MetricField& metric, std::span<const double> x) {
    if (!metric.chart().contains(x)) throw ChartDomainError("point outside chart domain");
    return christoffel(metric_jet(metric, x));
}

std::vector<double> geodesic_acceleration(const MetricJet& jet, std::span<const double> xi) {
    const std::size_t n = jet.g.size();
    // a_l = (d_i g_jl) xi^i xi^j - 1/2 (d_l g_ij) xi^i xi^j, then xi'' = -g^{-1} a.
    std::vector<double> lowered(n, 0.0);
    for (std::size_t l = 0; l < n; ++l) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                s += (jet.dg[i](j, l) - 0.5 * jet.dg[l](i, j)) * xi[i] * xi[j];
        lowered[l] = s;
    }
    std::vector<double> acc(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l) s += jet.inverse(k, l) * lowered[l];
        acc[k] = -s;
    }
    return acc;
}

}  // namespace geodequiv
