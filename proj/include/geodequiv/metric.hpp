#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geodequiv/expression.hpp"
#include "geodequiv/linalg.hpp"

namespace geodequiv {

/// Coordinate domain: named coordinates plus optional predicates. A point is
/// inside iff every predicate evaluates to a value > 0.
class Chart {
public:
    explicit Chart(std::vector<std::string> names, std::vector<Expression> domain = {});

    /// Chart whose domain predicates are given as DSL source.
    static Chart with_domain(std::vector<std::string> names, const std::vector<std::string>& domain_src);

    std::size_t dim() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<Expression>& domain() const { return domain_; }

    /// Predicate failures from domain errors count as "outside".
    bool contains(std::span<const double> x) const;

    Expression parse(std::string_view src) const { return geodequiv::parse(src, names_); }

private:
    std::vector<std::string> names_;
    std::vector<Expression> domain_;
};

inline constexpr std::size_t kMaxChartDim = kMaxDualVars / 2;

/// Symmetric n x n field of expressions, stored as the row-major upper
/// triangle (0,0),(0,1),...,(0,n-1),(1,1),...
class MetricField {
public:
    MetricField(Chart chart, std::vector<Expression> upper);

    static MetricField diagonal(Chart chart, const std::vector<Expression>& diag);
    static MetricField euclidean(Chart chart);

    const Chart& chart() const { return chart_; }
    std::size_t dim() const { return chart_.dim(); }
    const Expression& entry(std::size_t i, std::size_t j) const;
    const std::vector<Expression>& upper() const { return upper_; }

    template <class S>
    SquareMatrix<S> evaluate(std::span<const S> x) const {
        const std::size_t n = dim();
        SquareMatrix<S> m(n);
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j, ++k) {
                m(i, j) = upper_[k].evaluate<S>(x);
                if (i != j) m(j, i) = m(i, j);
            }
        return m;
    }

    /// g_x(u, v).
    double inner(std::span<const double> x, std::span<const double> u, std::span<const double> v) const;

    /// Entry (i,j) of the upper-triangle storage index.
    static std::size_t packed_index(std::size_t i, std::size_t j, std::size_t n);

private:
    Chart chart_;
    std::vector<Expression> upper_;
};

/// Metric with per-entry value, gradient and Hessian plus the Cholesky factor.
struct MetricSample {
    SquareMatrix<Dual2> entries;
    SquareMatrix<double> values;
    Cholesky<double> cholesky;
};

/// Throws ChartDomainError outside the chart, NotPositiveDefiniteError when
/// Cholesky fails.
MetricSample metric_at(const MetricField& metric, std::span<const double> x);

/// First-order data used by the geodesic equations and Poisson brackets.
struct MetricJet {
    SquareMatrix<double> g;
    SquareMatrix<double> inverse;
    std::vector<SquareMatrix<double>> dg;  // dg[k](i,j) = d g_ij / d x^k
    double log_det = 0.0;
};

MetricJet metric_jet(const MetricField& metric, std::span<const double> x);

/// Gamma^k_ij stored densely, symmetric in (i,j) by construction.
class Christoffel {
public:
    explicit Christoffel(std::size_t n) : n_(n), data_(n * n * n, 0.0) {}
    std::size_t dim() const { return n_; }
    double operator()(std::size_t k, std::size_t i, std::size_t j) const { return data_[(k * n_ + i) * n_ + j]; }
    double& operator()(std::size_t k, std::size_t i, std::size_t j) { return data_[(k * n_ + i) * n_ + j]; }

private:
    std::size_t n_;
    std::vector<double> data_;
};

Christoffel christoffel(const MetricField& metric, std::span<const double> x);
Christoffel christoffel(const MetricJet& jet);

/// -Gamma^k_ij xi^i xi^j: the geodesic acceleration.
std::vector<double> geodesic_acceleration(const MetricJet& jet, std::span<const double> xi);

}  // namespace geodequiv
