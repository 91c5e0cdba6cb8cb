#include "geodequiv/catalog.hpp"

#include <charconv>
#include <numbers>

namespace geodequiv {

namespace {

Expression var(std::size_t i) { return Expression::variable(i); }
Expression num(double v) { return Expression::constant(v); }

std::vector<std::string> indexed_names(std::string_view stem, std::size_t first, std::size_t count) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(std::string(stem) + std::to_string(first + i));
    return out;
}

MetricField diagonal_field(const Chart& chart, const std::vector<Expression>& diag) {
    return MetricField::diagonal(chart, diag);
}

/// Diagonal entries of g and gbar in terms of nu^2..nu^n given as
/// expressions; `unfolded` selects the angle-chart factor.
std::pair<std::vector<Expression>, std::vector<Expression>> ellipsoid_diagonals(const EllipsoidSpec& spec,
                                                                                const std::vector<Expression>& nu,
                                                                                bool unfolded) {
    const std::size_t n = spec.dim();
    const double s = (n % 2 == 1 ? 1.0 : -1.0) / 4.0;
    double prod_a = 1.0;
    for (double a : spec.a) prod_a *= a;
    Expression prod_nu = nu[0];
    for (std::size_t j = 1; j < nu.size(); ++j) prod_nu = prod_nu * nu[j];

    std::vector<Expression> g, gbar;
    // nu[q] is nu^(q+2); a[j] is a_(j+1).
    for (std::size_t q = 0; q < nu.size(); ++q) {
        Expression e = nu[q];
        for (std::size_t r = 0; r < nu.size(); ++r)
            if (r != q) e = e * (nu[q] - nu[r]);
        Expression den = num(1.0);
        bool any = false;
        for (std::size_t j = 0; j < n; ++j) {
            // The interval (a_{i-1}, a_i) of nu^i has a-indices q and q+1.
            if (unfolded && (j == q || j == q + 1)) continue;
            den = any ? den * (spec.a[j] - nu[q]) : (spec.a[j] - nu[q]);
            any = true;
        }
        const double c = unfolded ? -4.0 * s : s;
        Expression gi = any ? c * e / den : c * e;
        g.push_back(gi);
        gbar.push_back(prod_a * gi / (nu[q] * prod_nu));
    }
    return {g, gbar};
}

double parse_number(std::string_view s, std::string_view what) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ConfigError("invalid number \"" + std::string(s) + "\" in " + std::string(what));
    return v;
}

std::vector<double> parse_list(std::string_view s, std::string_view what) {
    std::vector<double> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(parse_number(s.substr(0, comma), what));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

Box uniform_box(std::size_t n, double lo, double hi) { return Box(n, {lo, hi}); }

constexpr double kPi = std::numbers::pi;

}  // namespace

void EllipsoidSpec::validate() const {
    if (a.size() < 2) throw ConfigError("ellipsoid needs at least two semi-axes");
    if (a.size() > kMaxChartDim + 1) throw ConfigError("ellipsoid dimension exceeds the supported maximum");
    if (!(a[0] > 0.0)) throw ConfigError("ellipsoid semi-axes must be positive");
    for (std::size_t i = 0; i + 1 < a.size(); ++i)
        if (!(a[i + 1] > a[i])) throw ConfigError("ellipsoid semi-axes must be strictly increasing");
}

std::vector<double> elliptic_to_cartesian(const EllipsoidSpec& spec, std::span<const double> nu) {
    spec.validate();
    if (nu.size() + 1 != spec.dim()) throw ConfigError("elliptic coordinates: expected n-1 values");
    for (std::size_t q = 0; q < nu.size(); ++q)
        if (!(nu[q] > spec.a[q] && nu[q] < spec.a[q + 1]))
            throw ConfigError("elliptic coordinate nu" + std::to_string(q + 2) + " outside its interval");
    return elliptic_to_cartesian<double>(spec, nu);
}

MetricPair ellipsoid_pair(const EllipsoidSpec& spec) {
    spec.validate();
    const std::size_t d = spec.dim() - 1;
    std::vector<Expression> nu, preds;
    for (std::size_t q = 0; q < d; ++q) {
        nu.push_back(var(q));
        preds.push_back(var(q) - spec.a[q]);
        preds.push_back(spec.a[q + 1] - var(q));
    }
    const Chart chart(indexed_names("nu", 2, d), preds);
    auto [g, gbar] = ellipsoid_diagonals(spec, nu, false);
    return MetricPair(diagonal_field(chart, g), diagonal_field(chart, gbar));
}

MetricPair ellipsoid_pair_unfolded(const EllipsoidSpec& spec) {
    spec.validate();
    const std::size_t d = spec.dim() - 1;
    std::vector<Expression> nu, preds;
    for (std::size_t q = 0; q < d; ++q) {
        const Expression s = sin(var(q));
        nu.push_back(spec.a[q] + (spec.a[q + 1] - spec.a[q]) * (s * s));
    }
    for (std::size_t q = 0; q + 1 < d; ++q) preds.push_back(nu[q + 1] - nu[q]);
    const Chart chart(indexed_names("th", 2, d), preds);
    auto [g, gbar] = ellipsoid_diagonals(spec, nu, true);
    return MetricPair(diagonal_field(chart, g), diagonal_field(chart, gbar));
}

std::vector<double> unfolded_to_box(const EllipsoidSpec& spec, std::span<const double> theta) {
    std::vector<double> nu;
    for (std::size_t q = 0; q < theta.size(); ++q) {
        const double s = std::sin(theta[q]);
        nu.push_back(spec.a[q] + (spec.a[q + 1] - spec.a[q]) * s * s);
    }
    return nu;
}

AmbientPullback ellipsoid_ambient_pullback(const EllipsoidSpec& spec, std::span<const double> nu) {
    elliptic_to_cartesian(spec, nu);  // bounds check
    const std::size_t n = spec.dim(), d = n - 1;
    std::vector<Dual> v;
    for (std::size_t q = 0; q < d; ++q) v.push_back(Dual::variable(nu[q], q));
    const std::vector<Dual> x = elliptic_to_cartesian<Dual>(spec, std::span<const Dual>(v));
    double weight = 0.0;
    for (std::size_t i = 0; i < n; ++i) weight += x[i].v * x[i].v / (spec.a[i] * spec.a[i]);
    AmbientPullback out{SquareMatrix<double>(d), SquareMatrix<double>(d)};
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            double e = 0.0, eb = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double jj = x[i].d[r] * x[i].d[c];
                e += jj;
                eb += jj / spec.a[i];
            }
            out.g(r, c) = e;
            out.gbar(r, c) = eb / weight;
        }
    return out;
}

Box ellipsoid_box(const EllipsoidSpec& spec, double margin) {
    Box box;
    for (std::size_t q = 0; q + 1 < spec.dim(); ++q) {
        const double w = spec.a[q + 1] - spec.a[q];
        box.emplace_back(spec.a[q] + margin * w, spec.a[q + 1] - margin * w);
    }
    return box;
}

LCSpec builtin_lc_spec(std::string_view name) {
    const auto x = [](std::size_t n) { return indexed_names("x", 1, n); };
    const std::vector<std::string> block2 = {"2 + 0.5*sin(x3)", "0.3*cos(x2)", "1.5 + 0.4*cos(x3)"};
    if (name == "lc-2d") return make_lc_spec(x(2), {1, 1}, {"1 + 0.25*cos(x1)", "3 + 0.5*sin(x2)"}, {{"1"}, {"1"}});
    if (name == "lc-a") return make_lc_spec(x(3), {1, 2}, {"1 + 0.3*sin(x1)", "2"}, {{"1"}, block2});
    if (name == "lc-b")
        return make_lc_spec(x(4), {1, 2, 1}, {"1 + 0.3*sin(x1)", "2", "3 + 0.3*cos(x4)"},
                            {{"1"}, block2, {"1 + 0.2*sin(x4)"}});
    if (name == "lc-c")
        return make_lc_spec(x(3), {1, 1, 1}, {"1 + 0.2*sin(x1)", "2 + 0.2*cos(x2)", "3.5 + 0.3*sin(x3)"},
                            {{"1"}, {"1"}, {"1"}});
    if (name == "lc-m1")
        return make_lc_spec(x(2), {2}, {"2"}, {{"2 + 0.5*sin(x1)", "0.2*cos(x2)", "1.5 + 0.3*cos(x1)"}});
    if (name == "lc-revolution") return make_lc_spec(x(2), {1, 1}, {"1 + 0.3*cos(x1)", "3"}, {{"1"}, {"1"}});
    throw ConfigError("unknown Levi-Civita spec \"" + std::string(name) + "\"");
}

std::vector<std::string> builtin_lc_names() { return {"lc-2d", "lc-a", "lc-b", "lc-c", "lc-m1", "lc-revolution"}; }

CatalogEntry lc_entry(const LCSpec& spec, std::string name, Box box) {
    if (box.empty()) box = uniform_box(spec.dim(), -kPi, kPi);
    CatalogEntry e{std::move(name), "Levi-Civita normal form", build_pair(spec), true, std::move(box), spec, {}, {}};
    return e;
}

MetricPair falsification_pair(FalsifyKind kind, double amplitude) {
    const MetricPair base = build_pair(builtin_lc_spec("lc-2d"));
    const std::size_t n = base.dim();
    Expression factor = kind == FalsifyKind::PerturbedLC ? 1.0 + amplitude * sin(var(0) * var(1)) : exp(var(0));
    const MetricField& src = kind == FalsifyKind::PerturbedLC ? base.gbar() : base.g();
    std::vector<Expression> upper;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) upper.push_back(factor * src.entry(i, j));
    return MetricPair(base.g(), MetricField(base.chart(), std::move(upper)));
}

CatalogEntry lookup(std::string_view name) {
    const auto colon = name.find(':');
    const std::string_view head = name.substr(0, colon);
    const std::string_view tail = colon == std::string_view::npos ? std::string_view{} : name.substr(colon + 1);
    const std::string full(name);

    if (head == "flat") {
        const double nd = tail.empty() ? 2.0 : parse_number(tail, full);
        const auto n = static_cast<std::size_t>(nd);
        if (static_cast<double>(n) != nd || n < 1 || n > kMaxChartDim)
            throw ConfigError("flat dimension must be an integer in 1.." + std::to_string(kMaxChartDim));
        const MetricField g = MetricField::euclidean(Chart(indexed_names("x", 1, n)));
        return {full, "Euclidean metric paired with itself", MetricPair(g, g), true, uniform_box(n, -1.0, 1.0), {}, {}, {}};
    }
    if (name == "sphere") {
        const Chart chart({"th", "ph"}, {var(0), kPi - var(0)});
        const Expression s = sin(var(0));
        const MetricField g = MetricField::diagonal(chart, {num(1.0), s * s});
        const MetricField gb = MetricField::diagonal(chart, {num(4.0), 4.0 * (s * s)});
        return {full, "round sphere and its constant multiple by 4", MetricPair(g, gb), true,
                Box{{0.6, kPi - 0.6}, {-kPi, kPi}}, {}, {}, {}};
    }
    if (head.starts_with("lc-") && colon == std::string_view::npos) {
        CatalogEntry e = lc_entry(builtin_lc_spec(name), full);
        if (name == "lc-revolution") {
            e.description = "Levi-Civita pair of revolution with a common Killing field";
            e.killing = {num(0.0), e.pair.gbar().entry(1, 1)};
        }
        return e;
    }
    if (head == "ellipsoid" || head == "ellipsoid-box") {
        EllipsoidSpec spec{parse_list(tail, full)};
        spec.validate();
        if (head == "ellipsoid")
            return {full, "ellipsoid pair in unfolded elliptic coordinates", ellipsoid_pair_unfolded(spec), true,
                    uniform_box(spec.dim() - 1, 0.15, kPi / 2 - 0.15), {}, spec, {}};
        return {full, "ellipsoid pair in elliptic coordinates; singular at the caustics, use ellipsoid: for geodesics",
                ellipsoid_pair(spec), true, ellipsoid_box(spec), {},
                spec, {}};
    }
    if (head == "falsify") {
        const auto c2 = tail.find(':');
        const std::string_view kind = tail.substr(0, c2);
        const Box box = uniform_box(2, -kPi, kPi);
        if (kind == "perturbed-lc") {
            const double amp = c2 == std::string_view::npos ? 0.1 : parse_number(tail.substr(c2 + 1), full);
            return {full, "lc-2d with gbar multiplied by 1 + amp sin(x1 x2)",
                    falsification_pair(FalsifyKind::PerturbedLC, amp), amp == 0.0, box, {}, {}, {}};
        }
        if (kind == "random-conformal" && c2 == std::string_view::npos)
            return {full, "lc-2d metric with gbar = exp(x1) g", falsification_pair(FalsifyKind::RandomConformal), false,
                    box, {}, {}, {}};
    }
    throw ConfigError("unknown catalog entry \"" + full + "\"");
}

std::vector<CatalogListing> builtin_listing() {
    std::vector<CatalogListing> out;
    for (const char* n : {"flat", "sphere"}) out.push_back({n, lookup(n).description});
    for (const auto& n : builtin_lc_names()) {
        const LCSpec s = builtin_lc_spec(n);
        out.push_back({n, "Levi-Civita normal form, n = " + std::to_string(s.dim()) + ", m = " +
                              std::to_string(s.m())});
    }
    out.push_back({"ellipsoid:a1,...,an", "ellipsoid pair in unfolded elliptic coordinates"});
    out.push_back({"ellipsoid-box:a1,...,an", "ellipsoid pair in elliptic coordinates (pointwise checks only)"});
    out.push_back({"falsify:perturbed-lc[:amp]", "non-equivalent control, default amplitude 0.1"});
    out.push_back({"falsify:random-conformal", "non-equivalent control, conformal factor exp(x1)"});
    out.push_back({"lc:<config path>", "Levi-Civita spec from a JSON config"});
    return out;
}

}  // namespace geodequiv
