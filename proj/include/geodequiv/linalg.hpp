#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "geodequiv/error.hpp"
#include "geodequiv/scalar.hpp"

namespace geodequiv {

/// Dense row-major n x n matrix over any scalar with field operations.
/// Small (n <= 8) by design; used inside dual-number pipelines.
template <class S>
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n) : n_(n), a_(n * n, S(0.0)) {}

    static SquareMatrix identity(std::size_t n) {
        SquareMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1.0);
        return m;
    }

    std::size_t size() const { return n_; }
    S& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const S& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<S> a_;
};

template <class S>
SquareMatrix<S> operator*(const SquareMatrix<S>& a, const SquareMatrix<S>& b) {
    const std::size_t n = a.size();
    SquareMatrix<S> r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const S& aik = a(i, k);
            for (std::size_t j = 0; j < n; ++j) r(i, j) = r(i, j) + aik * b(k, j);
        }
    return r;
}

template <class S>
std::vector<S> mat_vec(const SquareMatrix<S>& a, std::span<const S> v) {
    const std::size_t n = a.size();
    std::vector<S> r(n, S(0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r[i] = r[i] + a(i, j) * v[j];
    return r;
}

/// u^T A v.
template <class S>
S bilinear(const SquareMatrix<S>& a, std::span<const S> u, std::span<const S> v) {
    const std::size_t n = a.size();
    S r(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        S row(0.0);
        for (std::size_t j = 0; j < n; ++j) row = row + a(i, j) * v[j];
        r = r + u[i] * row;
    }
    return r;
}

template <class S>
S trace(const SquareMatrix<S>& a) {
    S t(0.0);
    for (std::size_t i = 0; i < a.size(); ++i) t = t + a(i, i);
    return t;
}

/// Lower-triangular Cholesky factor A = L L^T.
template <class S>
class Cholesky {
public:
    /// Throws NotPositiveDefiniteError carrying `point` and the 1-based
    /// index of the first failing leading minor.
    explicit Cholesky(const SquareMatrix<S>& a, std::span<const double> point = {}) : l_(a.size()) {
        using std::sqrt;
        const std::size_t n = a.size();
        for (std::size_t j = 0; j < n; ++j) {
            S d = a(j, j);
            for (std::size_t k = 0; k < j; ++k) d = d - l_(j, k) * l_(j, k);
            const double dv = value_of(d);
            if (!(dv > 0.0) || !std::isfinite(dv))
                throw NotPositiveDefiniteError(std::vector<double>(point.begin(), point.end()), j + 1);
            l_(j, j) = sqrt(d);
            for (std::size_t i = j + 1; i < n; ++i) {
                S s = a(i, j);
                for (std::size_t k = 0; k < j; ++k) s = s - l_(i, k) * l_(j, k);
                l_(i, j) = s / l_(j, j);
            }
        }
    }

    const SquareMatrix<S>& factor() const { return l_; }

    S log_det() const {
        using std::log;
        S r(0.0);
        for (std::size_t i = 0; i < l_.size(); ++i) r = r + log(l_(i, i));
        return S(2.0) * r;
    }

    /// Solves A x = b.
    std::vector<S> solve(std::span<const S> b) const {
        const std::size_t n = l_.size();
        std::vector<S> y(b.begin(), b.end());
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < i; ++k) y[i] = y[i] - l_(i, k) * y[k];
            y[i] = y[i] / l_(i, i);
        }
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t k = i + 1; k < n; ++k) y[i] = y[i] - l_(k, i) * y[k];
            y[i] = y[i] / l_(i, i);
        }
        return y;
    }

    /// Solves A X = B column by column.
    SquareMatrix<S> solve(const SquareMatrix<S>& b) const {
        const std::size_t n = l_.size();
        SquareMatrix<S> x(n);
        std::vector<S> col(n);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
            const auto sol = solve(std::span<const S>(col));
            for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[i];
        }
        return x;
    }

    SquareMatrix<S> inverse() const { return solve(SquareMatrix<S>::identity(l_.size())); }

private:
    SquareMatrix<S> l_;
};

}  // namespace geodequiv
