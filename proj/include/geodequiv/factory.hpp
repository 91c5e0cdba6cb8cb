#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "geodequiv/integrals.hpp"

namespace geodequiv {

/// Skew-symmetric 2-form matrix in the basis (dx^1..dx^n, dxi^1..dxi^n).
/// Writes go through set(), which fills both triangles.
class FormMatrix {
public:
    explicit FormMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, 0.0) {}

    std::size_t size() const { return dim_; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
    /// Sets entry (i,j) = v and (j,i) = -v; i != j.
    void set(std::size_t i, std::size_t j, double v) {
        a_[i * dim_ + j] = v;
        a_[j * dim_ + i] = -v;
    }

    friend FormMatrix operator-(const FormMatrix& a, const FormMatrix& b);
    friend FormMatrix operator*(double s, const FormMatrix& a);

    static FormMatrix canonical(std::size_t n);  // blocks [[0,1],[-1,0]] on the diagonal

private:
    std::size_t dim_;
    std::vector<double> a_;
};

/// Pfaffian by skew-symmetric Gaussian elimination with pivoting.
/// Pf(canonical) = +1. Throws Error for odd dimension.
double pfaffian(const FormMatrix& s);

/// Exterior derivative of the 1-form theta_i dx^i with entries
/// W_ab = d theta_a / dz^b - d theta_b / dz^a over z = (x, xi).
/// For omega_g = d[g_ij xi^j dx^i] the dx-dxi block is g.
FormMatrix omega_g_at(const MetricField& g, const PhasePoint& p);

/// d[(|xi|_g / |xi|_gbar) gbar_ij xi^j dx^i].
FormMatrix pullback_phi_omega(const MetricPair& pair, const PhasePoint& p);

/// |xi|_gbar / |xi|_g.
double a_scalar(const MetricPair& pair, const PhasePoint& p);

/// Descending-power coefficients.
using PolyCoeffs = std::vector<double>;

double poly_eval(const PolyCoeffs& c, double t);
double poly_norm(const PolyCoeffs& c);

/// Pf(Phi^* omega_gbar - t omega_g) / Pf(omega_g), interpolated at n+1
/// Chebyshev nodes on [-(1+|a|), 1+|a|], leading coefficient normalized to 1.
PolyCoeffs delta_poly(const MetricPair& pair, const PhasePoint& p);

/// The raw ratio at one t, without normalization.
double pfaffian_ratio(const MetricPair& pair, const PhasePoint& p, double t);

struct RankOneData {
    std::vector<double> mu;
    std::vector<double> A;
    std::vector<double> B;
};

/// (t+mu_1)...(t+mu_n) - sum_i A_i B_i prod_{j != i}(t + mu_j).
double rank_one_delta(const RankOneData& d, double t);

/// mu, A, B of the pair at p in a g-orthonormal frame that diagonalizes
/// gbar: mu_i = -rho_i N/D, A_i = rho_i xi_i, B_i = (D/N - rho_i N/D) xi_i / D^2
/// with N = |xi|_g, D = |xi|_gbar.
RankOneData rank_one_data(const MetricPair& pair, const PhasePoint& p);

struct HornerResult {
    PolyCoeffs quotient;
    double remainder = 0.0;
};

/// Synthetic division by (t - root).
HornerResult horner_divide(const PolyCoeffs& a, double root);

struct FactoryResult {
    PolyCoeffs delta;     // degree n, monic
    double a = 0.0;       // the root |xi|_gbar / |xi|_g
    PolyCoeffs quotient;  // degree n-1, monic
    double remainder = 0.0;
};

FactoryResult factory_integrals(const MetricPair& pair, const PhasePoint& p);

/// Quotient coefficients predicted from I_0..I_{n-1}: the coefficient of
/// t^(n-1-k) is g(xi,xi)^(k/2) I_k / (I_0 |I_0|^(k/2)).
PolyCoeffs factory_from_integrals(const MetricPair& pair, const PhasePoint& p);

/// Per-coefficient max_t |b_k(t) - b_k(0)| / max(|b_k(0)|, floor) of the
/// factory quotient along a trajectory of g.
std::vector<double> factory_drift(const MetricPair& pair, const Trajectory& traj, double floor = 1e-12);

/// Constant quotient coefficient (-1)^(n+1) (|xi|_g/|xi|_gbar)^(n+1) rho^1...rho^n.
double factory_constant_term(const MetricPair& pair, const PhasePoint& p);

}  // namespace geodequiv
