#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geodequiv/integrals.hpp"
#include "geodequiv/levi_civita.hpp"
#include "geodequiv/sampling.hpp"

namespace geodequiv {

/// Semi-axes a_1 < ... < a_n of sum x_i^2 / a_i = 1.
struct EllipsoidSpec {
    std::vector<double> a;

    std::size_t dim() const { return a.size(); }
    /// Throws ConfigError unless 0 < a_1 < ... < a_n and n >= 2.
    void validate() const;
};

/// Ambient point from elliptic coordinates nu = (nu^2, ..., nu^n); nu^1 = 0
/// is implicit. x_i^2 = prod_j (a_i - nu^j) / prod_{k != i} (a_i - a_k).
template <class S>
std::vector<S> elliptic_to_cartesian(const EllipsoidSpec& spec, std::span<const S> nu) {
    using std::sqrt;
    const std::size_t n = spec.dim();
    std::vector<S> x;
    x.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        S num(spec.a[i]);
        for (std::size_t j = 0; j + 1 < n; ++j) num = num * (S(spec.a[i]) - nu[j]);
        double den = 1.0;
        for (std::size_t k = 0; k < n; ++k)
            if (k != i) den *= spec.a[i] - spec.a[k];
        const S r = num / S(den);
        if (value_of(r) < 0.0) throw DomainError("sqrt", value_of(r));
        x.push_back(sqrt(r));
    }
    return x;
}

/// Checked variant: requires a_{i-1} < nu^i < a_i (ConfigError otherwise).
std::vector<double> elliptic_to_cartesian(const EllipsoidSpec& spec, std::span<const double> nu);

/// The pair on the box chart a_{i-1} < nu^i < a_i, coordinates nu2..nun.
MetricPair ellipsoid_pair(const EllipsoidSpec& spec);

/// The same pair after nu^i = a_{i-1} + (a_i - a_{i-1}) sin^2(th_i). This chart
/// covers the closed quadrant, so geodesics can cross the coordinate planes;
/// only umbilic points (nu^i = nu^{i+1}) are excluded.
MetricPair ellipsoid_pair_unfolded(const EllipsoidSpec& spec);

std::vector<double> unfolded_to_box(const EllipsoidSpec& spec, std::span<const double> theta);

/// Both metrics pulled back from the ambient space through
/// elliptic_to_cartesian: sum dx_i^2 and (sum dx_i^2 / a_i) / (sum x_i^2 / a_i^2).
struct AmbientPullback {
    SquareMatrix<double> g;
    SquareMatrix<double> gbar;
};
AmbientPullback ellipsoid_ambient_pullback(const EllipsoidSpec& spec, std::span<const double> nu);

/// Sampling box strictly inside the interlacing intervals.
Box ellipsoid_box(const EllipsoidSpec& spec, double margin = 0.05);

enum class FalsifyKind { PerturbedLC, RandomConformal };

/// Pairs that are not geodesically equivalent. PerturbedLC multiplies gbar of
/// the lc-2d pair by (1 + amplitude sin(x1 x2)); RandomConformal uses
/// gbar = exp(x1) g on the same chart.
MetricPair falsification_pair(FalsifyKind kind, double amplitude = 0.1);

struct CatalogEntry {
    std::string name;
    std::string description;
    MetricPair pair;
    /// Whether the pair is known to be geodesically equivalent.
    bool equivalent = true;
    Box box;
    std::optional<LCSpec> lc;
    std::optional<EllipsoidSpec> ellipsoid;
    /// Covector of a gbar-Killing field that is also g-Killing, when known.
    std::vector<Expression> killing;
};

/// Built-in Levi-Civita specs: lc-2d, lc-a, lc-b, lc-c, lc-m1, lc-revolution.
LCSpec builtin_lc_spec(std::string_view name);
std::vector<std::string> builtin_lc_names();

/// Entry for a built-in LCSpec, or a user spec under the given name.
CatalogEntry lc_entry(const LCSpec& spec, std::string name, Box box = {});

/// Resolves flat[:n], sphere, lc-*, ellipsoid:a1,..., ellipsoid-box:a1,...,
/// falsify:perturbed-lc[:amp], falsify:random-conformal. lc:<path> is
/// handled by the config layer. Throws ConfigError for unknown names.
CatalogEntry lookup(std::string_view name);

struct CatalogListing {
    std::string name;
    std::string description;
};
std::vector<CatalogListing> builtin_listing();

}  // namespace geodequiv
