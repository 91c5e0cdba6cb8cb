#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "geodequiv/config.hpp"

namespace geodequiv {

/// One thresholded check. relation is "<=", ">=", ">" or "==".
struct Criterion {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string relation = "<=";
    bool passed = false;
};

Criterion make_criterion(std::string name, double value, double threshold, std::string relation = "<=");

/// A command's output: the JSON report, the CSV text for --format csv, and
/// extra named files (trajectory exports).
struct CommandReport {
    nlohmann::ordered_json doc;
    std::string csv;
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<Criterion> criteria;
    std::vector<std::string> warnings;

    bool passed() const;
    /// Fills "criteria", "violated", "warnings" and "passed" in doc.
    void finish();
};

/// Phase points for the pointwise checks and geodesic starts; both derived
/// from cfg.seed and cfg.points / cfg.trajectories.
std::vector<PhasePoint> config_points(const CatalogEntry& e, const RunConfig& cfg);
std::vector<PhasePoint> config_starts(const CatalogEntry& e, const RunConfig& cfg);

/// Drift of every I_k along geodesics, involution matrix, energy identity,
/// independence rank against the eigenvalue count.
CommandReport cmd_verify(const RunConfig& cfg, const CatalogEntry& e);

/// Factory polynomial per point: remainder, closed-form cross-checks, and
/// coefficient drift along geodesics.
CommandReport cmd_factory(const RunConfig& cfg, const CatalogEntry& e);

/// g-geodesic export plus g / gbar curve comparison over cfg.arclength.
CommandReport cmd_geodesic(const RunConfig& cfg, const CatalogEntry& e);

/// Explicit-pair config document for an LC spec (consumable by --config).
nlohmann::ordered_json cmd_levi_civita_build(const CatalogEntry& e);

nlohmann::ordered_json cmd_catalog();

}  // namespace geodequiv
