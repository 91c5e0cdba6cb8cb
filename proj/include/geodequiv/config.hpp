#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "geodequiv/catalog.hpp"

namespace geodequiv {

/// Everything a CLI run needs; defaults match the acceptance settings.
struct RunConfig {
    std::string pair = "flat";
    std::string config_path;           // document the pair came from, if any
    std::optional<nlohmann::json> pair_document;
    std::uint64_t seed = 1;
    double drift_tol = 1e-6;
    double bracket_tol = 1e-8;
    double rank_tol = 1e-8;
    double remainder_tol = 1e-8;
    double curve_tol = 1e-5;
    std::size_t trajectories = 20;
    double t_end = 10.0;
    std::size_t points = 100;
    double arclength = 5.0;
    std::size_t curve_samples = kDefaultCurveSamples;
    std::string format = "json";
    std::string out;

    /// Throws ConfigError for non-positive tolerances, zero counts or an
    /// unknown format.
    void validate() const;
};

/// Reads a JSON file; ConfigError carries the path and the parser message.
nlohmann::json read_json_file(const std::string& path);

/// Applies a "run" object (keys seed, drift_tol, bracket_tol, rank_tol,
/// remainder_tol, curve_tol, trajectories, t_end, points, arclength,
/// curve_samples, format, out) on top of cfg.
void apply_run_section(RunConfig& cfg, const nlohmann::json& run, const std::string& where);

/// LCSpec from {coordinates?, sizes, phi, blocks, domain?}. Coordinates
/// default to x1..xn.
LCSpec lc_spec_from_json(const nlohmann::json& doc, const std::string& where);
nlohmann::json lc_spec_to_json(const LCSpec& spec);

/// MetricPair from {coordinates, domain?, g: {"g[i][j]": src}, gbar: {...}};
/// indices are 1-based and either triangle may be given.
MetricPair pair_from_json(const nlohmann::json& doc, const std::string& where);
nlohmann::json pair_to_json(const MetricPair& pair);

/// Checks the ordering and block definiteness of an LCSpec at sampled
/// points of the box; ConfigError on the first violation.
void check_spec_on_box(const LCSpec& spec, const Box& box, std::size_t count = 64, std::uint64_t seed = 1);

/// Builds the catalog entry for a document: a "pair" name, an LC spec
/// (has "sizes") or an explicit pair (has "g"). Optional "box", "name" and
/// "equivalent" keys override the defaults.
CatalogEntry entry_from_document(const nlohmann::json& doc, const std::string& where);

/// Resolves cfg.pair: lc:<path> loads a document, anything else is a
/// catalog name; an inline pair_document takes precedence.
CatalogEntry resolve_pair(const RunConfig& cfg);

}  // namespace geodequiv
