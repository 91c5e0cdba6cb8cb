#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace geodequiv {

/// Maximum number of independent variables a first-order Dual can carry.
/// Phase-space pipelines seed 2n variables, so charts are limited to n <= 8.
inline constexpr std::size_t kMaxDualVars = 16;

/// First-order forward-mode dual number with a fixed-capacity gradient.
///
/// Unused gradient slots stay zero, so arithmetic loops run over the whole
/// array without branching on the active variable count.
struct Dual {
    double v = 0.0;
    std::array<double, kMaxDualVars> d{};

    Dual() = default;
    Dual(double value) : v(value) {}  // NOLINT: constants promote implicitly

    static Dual variable(double value, std::size_t index) {
        Dual r(value);
        r.d[index] = 1.0;
        return r;
    }
};

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

/// f(a) given f(a.v) and f'(a.v).
inline Dual chain(const Dual& a, double f0, double f1) {
    Dual r(f0);
    for (std::size_t i = 0; i < kMaxDualVars; ++i) r.d[i] = f1 * a.d[i];
    return r;
}

inline Dual operator+(const Dual& a, const Dual& b) {
    Dual r(a.v + b.v);
    for (std::size_t i = 0; i < kMaxDualVars; ++i) r.d[i] = a.d[i] + b.d[i];
    return r;
}
inline Dual operator-(const Dual& a, const Dual& b) {
    Dual r(a.v - b.v);
    for (std::size_t i = 0; i < kMaxDualVars; ++i) r.d[i] = a.d[i] - b.d[i];
    return r;
}
inline Dual operator-(const Dual& a) {
    Dual r(-a.v);
    for (std::size_t i = 0; i < kMaxDualVars; ++i) r.d[i] = -a.d[i];
    return r;
}
inline Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.v * b.v);
    for (std::size_t i = 0; i < kMaxDualVars; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
}
inline Dual operator/(const Dual& a, const Dual& b) {
    const double q = a.v / b.v;
    Dual r(q);
    for (std::size_t i = 0; i < kMaxDualVars; ++i) r.d[i] = (a.d[i] - q * b.d[i]) / b.v;
    return r;
}
inline Dual operator+(const Dual& a, double b) { Dual r = a; r.v += b; return r; }
inline Dual operator+(double a, const Dual& b) { return b + a; }
inline Dual operator-(const Dual& a, double b) { Dual r = a; r.v -= b; return r; }
inline Dual operator-(double a, const Dual& b) { return -b + a; }
inline Dual operator*(const Dual& a, double b) { return chain(a, a.v * b, b); }
inline Dual operator*(double a, const Dual& b) { return b * a; }
inline Dual operator/(const Dual& a, double b) { return a * (1.0 / b); }
inline Dual operator/(double a, const Dual& b) { return Dual(a) / b; }

inline Dual& operator+=(Dual& a, const Dual& b) { return a = a + b; }
inline Dual& operator-=(Dual& a, const Dual& b) { return a = a - b; }
inline Dual& operator*=(Dual& a, const Dual& b) { return a = a * b; }
inline Dual& operator/=(Dual& a, const Dual& b) { return a = a / b; }

inline Dual sin(const Dual& a) { return chain(a, std::sin(a.v), std::cos(a.v)); }
inline Dual cos(const Dual& a) { return chain(a, std::cos(a.v), -std::sin(a.v)); }
inline Dual exp(const Dual& a) {
    const double e = std::exp(a.v);
    return chain(a, e, e);
}
inline Dual log(const Dual& a) { return chain(a, std::log(a.v), 1.0 / a.v); }
inline Dual sqrt(const Dual& a) {
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s);
}
inline Dual abs(const Dual& a) {
    const double sign = a.v > 0 ? 1.0 : (a.v < 0 ? -1.0 : 0.0);
    return chain(a, std::abs(a.v), sign);
}
/// a^p for a real constant exponent.
inline Dual pow(const Dual& a, double p) {
    const double f = std::pow(a.v, p);
    const double df = (p == 0.0) ? 0.0 : p * std::pow(a.v, p - 1.0);
    return chain(a, f, df);
}

/// Second-order forward-mode dual: value, gradient and Hessian over n
/// variables. The Hessian is built upper-triangle first and mirrored, so it
/// is exactly symmetric.
class Dual2 {
public:
    Dual2() = default;
    explicit Dual2(double value) : v_(value) {}
    Dual2(double value, std::size_t n) : v_(value), g_(n, 0.0), h_(n * n, 0.0) {}

    static Dual2 variable(double value, std::size_t index, std::size_t n) {
        Dual2 r(value, n);
        r.g_[index] = 1.0;
        return r;
    }

    double value() const { return v_; }
    std::size_t size() const { return g_.size(); }
    double grad(std::size_t i) const { return g_[i]; }
    double hess(std::size_t i, std::size_t j) const { return h_[i * g_.size() + j]; }
    const std::vector<double>& grad() const { return g_; }

    /// f(a) from f, f', f'' at a.value().
    friend Dual2 chain2(const Dual2& a, double f0, double f1, double f2) {
        const std::size_t n = a.size();
        Dual2 r(f0, n);
        for (std::size_t i = 0; i < n; ++i) r.g_[i] = f1 * a.g_[i];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                r.h_[i * n + j] = f1 * a.h_[i * n + j] + f2 * a.g_[i] * a.g_[j];
        r.mirror();
        return r;
    }

    friend Dual2 operator+(const Dual2& a, const Dual2& b) {
        const std::size_t n = common(a, b);
        Dual2 r(a.v_ + b.v_, n);
        for (std::size_t i = 0; i < n; ++i) r.g_[i] = a.g_at(i) + b.g_at(i);
        for (std::size_t k = 0; k < n * n; ++k) r.h_[k] = a.h_at(k) + b.h_at(k);
        return r;
    }
    friend Dual2 operator-(const Dual2& a, const Dual2& b) {
        const std::size_t n = common(a, b);
        Dual2 r(a.v_ - b.v_, n);
        for (std::size_t i = 0; i < n; ++i) r.g_[i] = a.g_at(i) - b.g_at(i);
        for (std::size_t k = 0; k < n * n; ++k) r.h_[k] = a.h_at(k) - b.h_at(k);
        return r;
    }
    friend Dual2 operator-(const Dual2& a) { return chain2(a, -a.v_, -1.0, 0.0); }
    friend Dual2 operator*(const Dual2& a, const Dual2& b) {
        const std::size_t n = common(a, b);
        Dual2 r(a.v_ * b.v_, n);
        for (std::size_t i = 0; i < n; ++i) r.g_[i] = a.g_at(i) * b.v_ + a.v_ * b.g_at(i);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                const std::size_t k = i * n + j;
                r.h_[k] = a.h_at(k) * b.v_ + a.v_ * b.h_at(k) + a.g_at(i) * b.g_at(j) +
                          b.g_at(i) * a.g_at(j);
            }
        r.mirror();
        return r;
    }
    friend Dual2 operator/(const Dual2& a, const Dual2& b) {
        const double inv = 1.0 / b.v_;
        return a * chain2(b, inv, -inv * inv, 2.0 * inv * inv * inv);
    }

private:
    // Constants carry empty derivative storage; mixed operations take the
    // larger size.
    static std::size_t common(const Dual2& a, const Dual2& b) {
        return a.size() > b.size() ? a.size() : b.size();
    }
    double g_at(std::size_t i) const { return i < g_.size() ? g_[i] : 0.0; }
    double h_at(std::size_t k) const { return k < h_.size() ? h_[k] : 0.0; }
    void mirror() {
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) h_[i * n + j] = h_[j * n + i];
    }

    double v_ = 0.0;
    std::vector<double> g_;
    std::vector<double> h_;
};

inline double value_of(const Dual2& x) { return x.value(); }

inline Dual2 sin(const Dual2& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    return chain2(a, s, c, -s);
}
inline Dual2 cos(const Dual2& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    return chain2(a, c, -s, -c);
}
inline Dual2 exp(const Dual2& a) {
    const double e = std::exp(a.value());
    return chain2(a, e, e, e);
}
inline Dual2 log(const Dual2& a) {
    const double x = a.value();
    return chain2(a, std::log(x), 1.0 / x, -1.0 / (x * x));
}
inline Dual2 sqrt(const Dual2& a) {
    const double s = std::sqrt(a.value());
    return chain2(a, s, 0.5 / s, -0.25 / (s * a.value()));
}
inline Dual2 abs(const Dual2& a) {
    const double x = a.value();
    const double sign = x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
    return chain2(a, std::abs(x), sign, 0.0);
}
inline Dual2 pow(const Dual2& a, double p) {
    const double x = a.value();
    const double f = std::pow(x, p);
    const double df = (p == 0.0) ? 0.0 : p * std::pow(x, p - 1.0);
    const double d2f = (p == 0.0 || p == 1.0) ? 0.0 : p * (p - 1.0) * std::pow(x, p - 2.0);
    return chain2(a, f, df, d2f);
}

/// Integer power by repeated squaring; valid for any base (negative
/// exponents require a nonzero base).
template <class S>
S powi(const S& base, long long e) {
    if (e < 0) return S(1.0) / powi(base, -e);
    S result(1.0);
    S b = base;
    while (e > 0) {
        if (e & 1) result = result * b;
        e >>= 1;
        if (e) b = b * b;
    }
    return result;
}

}  // namespace geodequiv
