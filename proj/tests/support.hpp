#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geodequiv/catalog.hpp"
#include "geodequiv/integrals.hpp"

namespace testing_support {

using namespace geodequiv;

inline MetricField field(const Chart& chart, const std::vector<std::string>& upper) {
    std::vector<Expression> e;
    for (const auto& s : upper) e.push_back(chart.parse(s));
    return MetricField(chart, e);
}

inline MetricPair pair_of(std::vector<std::string> names, const std::vector<std::string>& g,
                          const std::vector<std::string>& gbar, const std::vector<std::string>& domain = {}) {
    const Chart chart = Chart::with_domain(std::move(names), domain);
    return MetricPair(field(chart, g), field(chart, gbar));
}

inline double rel(double a, double b) {
    return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)});
}

/// Random symmetric positive definite matrix with eigenvalues in [0.5, 3].
inline Eigen::MatrixXd random_spd(std::size_t n, SplitMix64& rng) {
    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd d(n);
    for (std::size_t i = 0; i < n; ++i) d(i) = rng.uniform(0.5, 3.0);
    return q * d.asDiagonal() * q.transpose();
}

inline SquareMatrix<double> to_square(const Eigen::MatrixXd& m) {
    SquareMatrix<double> s(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) s(i, j) = m(i, j);
    return s;
}

inline Eigen::MatrixXd to_eigen(const SquareMatrix<double>& s) {
    const auto n = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = s(i, j);
    return m;
}

/// Battery of equivalent pairs used by the property tests.
inline std::vector<std::string> equivalent_names() {
    return {"lc-2d", "lc-a", "lc-b", "lc-c", "lc-m1", "lc-revolution", "ellipsoid:1,2,3", "ellipsoid-box:1,2,3",
            "sphere"};
}

}  // namespace testing_support
