#include "geodequiv/config.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <numbers>
#include <set>

namespace geodequiv {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw ConfigError(where.empty() ? msg : where + ": " + msg);
}

const json& member(const json& doc, const char* key, const std::string& where) {
    if (!doc.is_object() || !doc.contains(key)) fail(where, std::string("missing key \"") + key + "\"");
    return doc.at(key);
}

std::vector<std::string> string_list(const json& v, const std::string& where, const char* key) {
    if (!v.is_array()) fail(where, std::string("\"") + key + "\" must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) fail(where, std::string("\"") + key + "\" must contain only strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

std::size_t packed_index(std::size_t i, std::size_t j, std::size_t n) { return i * n - i * (i - 1) / 2 + (j - i); }

std::vector<std::string> default_names(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= n; ++i) out.push_back("x" + std::to_string(i));
    return out;
}

template <class T>
T number(const json& v, const std::string& where, const std::string& key) {
    if (!v.is_number()) fail(where, "\"" + key + "\" must be a number");
    if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned()) fail(where, "\"" + key + "\" must be a non-negative integer");
    }
    return v.get<T>();
}

Box box_from_json(const json& v, std::size_t n, const std::string& where) {
    if (!v.is_array() || v.size() != n) fail(where, "\"box\" must list one [lo, hi] pair per coordinate");
    Box box;
    for (const auto& e : v) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            fail(where, "\"box\" entries must be [lo, hi] number pairs");
        const double lo = e[0].get<double>(), hi = e[1].get<double>();
        if (!(lo < hi)) fail(where, "\"box\" entries need lo < hi");
        box.emplace_back(lo, hi);
    }
    return box;
}

MetricField metric_from_json(const json& v, const Chart& chart, const std::string& where, const char* key) {
    if (!v.is_object()) fail(where, std::string("\"") + key + "\" must be an object of \"g[i][j]\" entries");
    const std::size_t n = chart.dim();
    static const std::regex pattern(R"(g\[(\d+)\]\[(\d+)\])");
    std::vector<std::optional<Expression>> upper(n * (n + 1) / 2);
    for (const auto& [k, src] : v.items()) {
        std::smatch m;
        if (!std::regex_match(k, m, pattern)) fail(where, std::string(key) + ": bad entry key \"" + k + "\"");
        std::size_t i = std::stoul(m[1].str()), j = std::stoul(m[2].str());
        if (i < 1 || j < 1 || i > n || j > n) fail(where, std::string(key) + ": index out of range in \"" + k + "\"");
        if (!src.is_string()) fail(where, std::string(key) + ": entry \"" + k + "\" must be a DSL string");
        if (i > j) std::swap(i, j);
        auto& slot = upper[packed_index(i - 1, j - 1, n)];
        Expression e;
        try {
            e = chart.parse(src.get<std::string>());
        } catch (const ParseError& err) {
            fail(where, std::string(key) + " entry \"" + k + "\": " + err.what());
        }
        if (slot && slot->to_string(chart.names()) != e.to_string(chart.names()))
            fail(where, std::string(key) + ": conflicting entries for \"" + k + "\" and its transpose");
        slot = e;
    }
    std::vector<Expression> out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const auto& slot = upper[packed_index(i, j, n)];
            if (!slot && i == j)
                fail(where, std::string(key) + ": missing diagonal entry g[" + std::to_string(i + 1) + "][" +
                                std::to_string(i + 1) + "]");
            out.push_back(slot ? *slot : Expression::constant(0.0));
        }
    return MetricField(chart, std::move(out));
}

json metric_to_json(const MetricField& m) {
    json out = json::object();
    const std::size_t n = m.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            out["g[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]"] =
                m.entry(i, j).to_string(m.chart().names());
    return out;
}

}  // namespace

void RunConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(drift_tol, "drift tolerance");
    positive(bracket_tol, "bracket tolerance");
    positive(rank_tol, "rank tolerance");
    positive(remainder_tol, "remainder tolerance");
    positive(curve_tol, "curve tolerance");
    positive(t_end, "t_end");
    positive(arclength, "arc length");
    if (trajectories < 1) throw ConfigError("trajectory count must be at least 1");
    if (points < 1) throw ConfigError("sample-point count must be at least 1");
    if (curve_samples < 2) throw ConfigError("curve sample count must be at least 2");
    if (format != "json" && format != "csv") throw ConfigError("format must be json or csv");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void apply_run_section(RunConfig& cfg, const json& run, const std::string& where) {
    if (!run.is_object()) fail(where, "\"run\" must be an object");
    static const std::set<std::string> known{"seed",    "drift_tol", "bracket_tol", "rank_tol",      "remainder_tol",
                                             "curve_tol", "trajectories", "t_end",  "points",        "arclength",
                                             "curve_samples", "format", "out"};
    for (const auto& [k, v] : run.items()) {
        if (!known.count(k)) fail(where, "unknown run key \"" + k + "\"");
        const std::string w = where;
        if (k == "seed") cfg.seed = number<std::uint64_t>(v, w, k);
        else if (k == "drift_tol") cfg.drift_tol = number<double>(v, w, k);
        else if (k == "bracket_tol") cfg.bracket_tol = number<double>(v, w, k);
        else if (k == "rank_tol") cfg.rank_tol = number<double>(v, w, k);
        else if (k == "remainder_tol") cfg.remainder_tol = number<double>(v, w, k);
        else if (k == "curve_tol") cfg.curve_tol = number<double>(v, w, k);
        else if (k == "trajectories") cfg.trajectories = number<std::size_t>(v, w, k);
        else if (k == "t_end") cfg.t_end = number<double>(v, w, k);
        else if (k == "points") cfg.points = number<std::size_t>(v, w, k);
        else if (k == "arclength") cfg.arclength = number<double>(v, w, k);
        else if (k == "curve_samples") cfg.curve_samples = number<std::size_t>(v, w, k);
        else if (k == "format" || k == "out") {
            if (!v.is_string()) fail(where, "\"" + k + "\" must be a string");
            (k == "format" ? cfg.format : cfg.out) = v.get<std::string>();
        }
    }
}

LCSpec lc_spec_from_json(const json& doc, const std::string& where) {
    const json& sizes_j = member(doc, "sizes", where);
    if (!sizes_j.is_array()) fail(where, "\"sizes\" must be an array of positive integers");
    std::vector<std::size_t> sizes;
    for (const auto& s : sizes_j) sizes.push_back(number<std::size_t>(s, where, "sizes"));
    std::size_t n = 0;
    for (auto s : sizes) n += s;
    const std::vector<std::string> names =
        doc.contains("coordinates") ? string_list(doc.at("coordinates"), where, "coordinates") : default_names(n);
    const std::vector<std::string> phi = string_list(member(doc, "phi", where), where, "phi");
    const json& blocks_j = member(doc, "blocks", where);
    if (!blocks_j.is_array()) fail(where, "\"blocks\" must be an array of string arrays");
    std::vector<std::vector<std::string>> blocks;
    for (const auto& b : blocks_j) blocks.push_back(string_list(b, where, "blocks"));
    const std::vector<std::string> domain =
        doc.contains("domain") ? string_list(doc.at("domain"), where, "domain") : std::vector<std::string>{};
    try {
        return make_lc_spec(names, sizes, phi, blocks, domain);
    } catch (const ConfigError& e) {
        fail(where, e.what());
    } catch (const ParseError& e) {
        fail(where, std::string("Levi-Civita spec: ") + e.what());
    }
}

json lc_spec_to_json(const LCSpec& spec) {
    json phi = json::array(), blocks = json::array(), domain = json::array();
    for (const auto& p : spec.phi) phi.push_back(p.to_string(spec.coordinates));
    for (const auto& b : spec.blocks) {
        json entries = json::array();
        for (const auto& e : b) entries.push_back(e.to_string(spec.coordinates));
        blocks.push_back(entries);
    }
    for (const auto& d : spec.domain) domain.push_back(d.to_string(spec.coordinates));
    return {{"coordinates", spec.coordinates}, {"sizes", spec.sizes}, {"phi", phi}, {"blocks", blocks},
            {"domain", domain}};
}

MetricPair pair_from_json(const json& doc, const std::string& where) {
    const std::vector<std::string> names = string_list(member(doc, "coordinates", where), where, "coordinates");
    if (names.empty() || names.size() > kMaxChartDim)
        fail(where, "need between 1 and " + std::to_string(kMaxChartDim) + " coordinates");
    const std::vector<std::string> domain =
        doc.contains("domain") ? string_list(doc.at("domain"), where, "domain") : std::vector<std::string>{};
    const Chart chart = [&] {
        try {
            return Chart::with_domain(names, domain);
        } catch (const ParseError& e) {
            fail(where, std::string("domain: ") + e.what());
        }
    }();
    return MetricPair(metric_from_json(member(doc, "g", where), chart, where, "g"),
                      metric_from_json(member(doc, "gbar", where), chart, where, "gbar"));
}

json pair_to_json(const MetricPair& pair) {
    const Chart& c = pair.chart();
    json domain = json::array();
    for (const auto& d : c.domain()) domain.push_back(d.to_string(c.names()));
    return {{"coordinates", c.names()}, {"domain", domain}, {"g", metric_to_json(pair.g())},
            {"gbar", metric_to_json(pair.gbar())}};
}

void check_spec_on_box(const LCSpec& spec, const Box& box, std::size_t count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    for (std::size_t s = 0; s < count; ++s) {
        std::vector<double> x;
        for (const auto& [lo, hi] : box) x.push_back(rng.uniform(lo, hi));
        bool inside = true;
        for (const auto& d : spec.domain) {
            try {
                if (!(d(x) > 0.0)) inside = false;
            } catch (const DomainError&) {
                inside = false;
            }
        }
        if (inside) check_spec_at(spec, x);
    }
}

CatalogEntry entry_from_document(const json& doc, const std::string& where) {
    if (!doc.is_object()) fail(where, "config must be a JSON object");
    std::optional<CatalogEntry> entry;
    if (doc.contains("pair")) {
        if (!doc.at("pair").is_string()) fail(where, "\"pair\" must be a string");
        const std::string name = doc.at("pair").get<std::string>();
        if (name.rfind("lc:", 0) == 0) fail(where, "\"pair\" cannot reference another config file");
        try {
            entry = lookup(name);
        } catch (const ConfigError& e) {
            fail(where, e.what());
        }
    } else if (doc.contains("sizes")) {
        const LCSpec spec = lc_spec_from_json(doc, where);
        Box box = doc.contains("box") ? box_from_json(doc.at("box"), spec.dim(), where) : Box(spec.dim(), {-std::numbers::pi, std::numbers::pi});
        try {
            check_spec_on_box(spec, box);
        } catch (const ConfigError& e) {
            fail(where, e.what());
        }
        entry = lc_entry(spec, where, box);
    } else if (doc.contains("g")) {
        const MetricPair pair = pair_from_json(doc, where);
        entry = CatalogEntry{where, "pair from config", pair, true, Box(pair.dim(), {-1.0, 1.0}), {}, {}, {}};
        if (doc.contains("equivalent")) {
            if (!doc.at("equivalent").is_boolean()) fail(where, "\"equivalent\" must be a boolean");
            entry->equivalent = doc.at("equivalent").get<bool>();
        }
    } else {
        fail(where, "config needs \"pair\", a Levi-Civita spec (\"sizes\") or explicit metrics (\"g\", \"gbar\")");
    }
    if (doc.contains("box") && !doc.contains("sizes")) entry->box = box_from_json(doc.at("box"), entry->pair.dim(), where);
    if (doc.contains("name")) {
        if (!doc.at("name").is_string()) fail(where, "\"name\" must be a string");
        entry->name = doc.at("name").get<std::string>();
    }
    return std::move(*entry);
}

CatalogEntry resolve_pair(const RunConfig& cfg) {
    if (cfg.pair_document) return entry_from_document(*cfg.pair_document, cfg.config_path);
    if (cfg.pair.rfind("lc:", 0) == 0) {
        const std::string path = cfg.pair.substr(3);
        CatalogEntry e = entry_from_document(read_json_file(path), path);
        if (!e.lc) throw ConfigError(path + ": lc: expects a Levi-Civita spec");
        e.name = cfg.pair;
        return e;
    }
    return lookup(cfg.pair);
}

}  // namespace geodequiv
