#include "geodequiv/commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geodequiv/coincidence.hpp"
#include "geodequiv/factory.hpp"
#include "geodequiv/format.hpp"
#include "geodequiv/phase.hpp"

namespace geodequiv {

using nlohmann::ordered_json;

namespace {

constexpr double kEnergyIdentityTol = 1e-10;
constexpr double kClosedFormTol = 1e-8;

ordered_json header(const char* command, const RunConfig& cfg, const CatalogEntry& e) {
    ordered_json doc;
    doc["command"] = command;
    doc["timestamp"] = "";
    doc["pair"] = e.name;
    doc["description"] = e.description;
    doc["dimension"] = e.pair.dim();
    doc["equivalent"] = e.equivalent;
    doc["seed"] = cfg.seed;
    return doc;
}

ordered_json settings(const RunConfig& cfg) {
    return {{"drift_tol", cfg.drift_tol},         {"bracket_tol", cfg.bracket_tol},
            {"rank_tol", cfg.rank_tol},           {"remainder_tol", cfg.remainder_tol},
            {"curve_tol", cfg.curve_tol},         {"trajectories", cfg.trajectories},
            {"t_end", cfg.t_end},                 {"points", cfg.points},
            {"arclength", cfg.arclength},         {"curve_samples", cfg.curve_samples}};
}

std::vector<Trajectory> run_trajectories(const CatalogEntry& e, const RunConfig& cfg, CommandReport& r) {
    std::vector<Trajectory> trajs = [&] {
        try {
            return integrate_geodesics(e.pair.g(), config_starts(e, cfg), cfg.t_end);
        } catch (const IntegrationError& err) {
            throw IntegrationError(e.name + ": geodesic integration failed (" + err.what() +
                                   "); the chart may be singular along the flow");
        }
    }();
    for (std::size_t i = 0; i < trajs.size(); ++i)
        if (trajs[i].left_chart())
            r.warnings.push_back("trajectory " + std::to_string(i) + " left the chart at t = " +
                                 format_double(trajs[i].back().t));
    return trajs;
}

ordered_json trajectory_summary(const std::vector<Trajectory>& trajs) {
    ordered_json out = ordered_json::array();
    for (std::size_t i = 0; i < trajs.size(); ++i)
        out.push_back({{"trajectory_id", i},
                       {"t_final", trajs[i].back().t},
                       {"samples", trajs[i].size()},
                       {"left_chart", trajs[i].left_chart()},
                       {"energy_drift", trajs[i].max_energy_drift()}});
    return out;
}

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

}  // namespace

Criterion make_criterion(std::string name, double value, double threshold, std::string relation) {
    bool ok = false;
    if (relation == "<=") ok = value <= threshold;
    else if (relation == ">=") ok = value >= threshold;
    else if (relation == ">") ok = value > threshold;
    else if (relation == "==") ok = value == threshold;
    else throw Error("make_criterion: unknown relation " + relation);
    return {std::move(name), value, threshold, std::move(relation), ok};
}

bool CommandReport::passed() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.passed; });
}

void CommandReport::finish() {
    ordered_json list = ordered_json::array(), violated = ordered_json::array();
    for (const auto& c : criteria) {
        list.push_back({{"name", c.name},
                        {"value", c.value},
                        {"relation", c.relation},
                        {"threshold", c.threshold},
                        {"passed", c.passed}});
        if (!c.passed) violated.push_back(c.name);
    }
    doc["criteria"] = list;
    doc["violated"] = violated;
    doc["warnings"] = warnings;
    doc["passed"] = passed();
}

std::vector<PhasePoint> config_points(const CatalogEntry& e, const RunConfig& cfg) {
    return sample_phase_points(e.pair.g(), e.box, cfg.points, cfg.seed);
}

std::vector<PhasePoint> config_starts(const CatalogEntry& e, const RunConfig& cfg) {
    SplitMix64 derive(cfg.seed);
    return sample_phase_points(e.pair.g(), e.box, cfg.trajectories, derive.next());
}

CommandReport cmd_verify(const RunConfig& cfg, const CatalogEntry& e) {
    CommandReport r;
    r.doc = header("verify", cfg, e);
    r.doc["settings"] = settings(cfg);
    const MetricPair& pair = e.pair;
    const std::size_t n = pair.dim();

    const std::vector<Trajectory> trajs = run_trajectories(e, cfg, r);
    std::vector<double> drift(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const PhaseFunction f = integral_function(pair, k);
        for (const auto& t : trajs) drift[k] = std::max(drift[k], conservation_drift(f, t));
    }
    r.doc["trajectories"] = trajectory_summary(trajs);
    r.doc["drift"] = drift;
    r.criteria.push_back(make_criterion("conservation", max_of(drift), cfg.drift_tol));
    if (!e.killing.empty()) {
        const PhaseFunction kf = transfer_killing(pair, e.killing);
        double kd = 0.0;
        for (const auto& t : trajs) kd = std::max(kd, conservation_drift(kf, t));
        r.doc["killing_drift"] = kd;
        r.criteria.push_back(make_criterion("killing-transfer", kd, cfg.drift_tol));
    }

    const std::vector<PhasePoint> pts = config_points(e, cfg);
    const SquareTable inv = involution_matrix(pair, pts);
    double off = 0.0, diag = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) (j == k ? diag : off) = std::max(j == k ? diag : off, inv[j][k]);
    r.doc["involution"] = inv;
    r.criteria.push_back(make_criterion("involution", off, cfg.bracket_tol));
    r.criteria.push_back(make_criterion("involution-diagonal", diag, 0.0, "=="));

    std::ostringstream csv;
    csv << "k,point_id,value\n";
    double energy = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::vector<double> I = all_integrals(pair, pts[i]);
        for (std::size_t k = 0; k < n; ++k) csv << k << ',' << i << ',' << format_double(I[k]) << '\n';
        const double gg = pair.g().inner(pts[i].x, pts[i].xi, pts[i].xi);
        energy = std::max(energy, std::abs(I[n - 1] + gg) / gg);
        m = std::max(m, eigen_profile(pair, pts[i].x).m);
    }
    r.csv = csv.str();
    r.criteria.push_back(make_criterion("energy-identity", energy, kEnergyIdentityTol));

    const std::size_t rank = independence_rank(pair, pts, cfg.rank_tol);
    r.doc["independence_rank"] = rank;
    r.doc["eigenvalue_count"] = m;
    r.criteria.push_back(
        make_criterion("independence-rank", static_cast<double>(rank), static_cast<double>(m), ">="));
    r.finish();
    return r;
}

CommandReport cmd_factory(const RunConfig& cfg, const CatalogEntry& e) {
    CommandReport r;
    r.doc = header("factory", cfg, e);
    r.doc["settings"] = settings(cfg);
    const MetricPair& pair = e.pair;

    const std::vector<PhasePoint> pts = config_points(e, cfg);
    ordered_json rows = ordered_json::array();
    std::ostringstream csv;
    csv << "point_id,t_or_coeff_index,value,remainder\n";
    double rem = 0.0, closed = 0.0, rank_one = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const FactoryResult f = factory_integrals(pair, pts[i]);
        const double rel_rem = std::abs(f.remainder) / poly_norm(f.delta);
        rem = std::max(rem, rel_rem);

        const double qscale = std::max(1.0, poly_norm(f.quotient));
        const PolyCoeffs cf = factory_from_integrals(pair, pts[i]);
        double cd = 0.0;
        for (std::size_t k = 0; k < cf.size(); ++k) cd = std::max(cd, std::abs(cf[k] - f.quotient[k]) / qscale);
        closed = std::max(closed, cd);

        const RankOneData ro = rank_one_data(pair, pts[i]);
        const double dscale = std::max(1.0, poly_norm(f.delta));
        double rd = 0.0;
        for (double t : {-2.0, -0.5, 0.0, 0.5, 1.0, 2.0})
            rd = std::max(rd, std::abs(poly_eval(f.delta, t) - rank_one_delta(ro, t)) / dscale);
        rank_one = std::max(rank_one, rd);

        rows.push_back({{"point_id", i},
                        {"a", f.a},
                        {"quotient", f.quotient},
                        {"remainder", f.remainder},
                        {"closed_form_delta", cd},
                        {"rank_one_delta", rd}});
        for (std::size_t k = 0; k < f.quotient.size(); ++k)
            csv << i << ',' << k << ',' << format_double(f.quotient[k]) << ',' << format_double(f.remainder)
                << '\n';
    }
    r.csv = csv.str();
    r.doc["points"] = rows;
    r.criteria.push_back(make_criterion("factory-remainder", rem, cfg.remainder_tol));
    r.criteria.push_back(make_criterion("closed-form-delta", closed, kClosedFormTol));
    r.criteria.push_back(make_criterion("rank-one-delta", rank_one, kClosedFormTol));

    const std::vector<Trajectory> trajs = run_trajectories(e, cfg, r);
    std::vector<double> drift;
    for (const auto& t : trajs) {
        const std::vector<double> d = factory_drift(pair, t);
        if (drift.empty()) drift.assign(d.size(), 0.0);
        for (std::size_t k = 0; k < d.size(); ++k) drift[k] = std::max(drift[k], d[k]);
    }
    r.doc["trajectories"] = trajectory_summary(trajs);
    r.doc["coefficient_drift"] = drift;
    r.criteria.push_back(make_criterion("factory-conservation", max_of(drift), cfg.drift_tol));
    r.finish();
    return r;
}

CommandReport cmd_geodesic(const RunConfig& cfg, const CatalogEntry& e) {
    CommandReport r;
    r.doc = header("geodesic", cfg, e);
    r.doc["settings"] = settings(cfg);
    const std::vector<PhasePoint> starts = config_starts(e, cfg);

    const std::vector<Trajectory> trajs = run_trajectories(e, cfg, r);
    ordered_json exported = ordered_json::array();
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        exported.push_back({{"trajectory_id", i}, {"samples", trajectory_json(trajs[i])}});
        std::ostringstream os;
        write_trajectory_csv(os, trajs[i]);
        std::string id = std::to_string(i);
        id.insert(0, id.size() < 3 ? 3 - id.size() : 0, '0');
        r.files.emplace_back("trajectory_" + id + ".csv", os.str());
    }

    const std::vector<CoincidenceResult> co = coincidence_batch(e.pair, starts, cfg.arclength, cfg.curve_samples);
    ordered_json rows = ordered_json::array();
    std::ostringstream csv;
    csv << "trajectory_id,arclength,distance,left_chart\n";
    double worst = 0.0;
    for (std::size_t i = 0; i < co.size(); ++i) {
        worst = std::max(worst, co[i].distance);
        if (co[i].left_chart)
            r.warnings.push_back("curve pair " + std::to_string(i) + " left the chart; compared over arc length " +
                                 format_double(co[i].arclength));
        rows.push_back({{"trajectory_id", i},
                        {"arclength", co[i].arclength},
                        {"distance", co[i].distance},
                        {"left_chart", co[i].left_chart}});
        csv << i << ',' << format_double(co[i].arclength) << ',' << format_double(co[i].distance) << ','
            << (co[i].left_chart ? 1 : 0) << '\n';
    }
    r.csv = csv.str();
    r.doc["coincidence"] = rows;
    r.doc["trajectories"] = exported;
    r.criteria.push_back(make_criterion("geodesic-coincidence", worst, cfg.curve_tol));
    r.finish();
    return r;
}

ordered_json cmd_levi_civita_build(const CatalogEntry& e) {
    if (!e.lc) throw ConfigError(e.name + ": levi-civita-build needs a Levi-Civita spec");
    const nlohmann::json pj = pair_to_json(e.pair);
    ordered_json doc;
    doc["name"] = e.name;
    doc["coordinates"] = pj["coordinates"];
    doc["domain"] = pj["domain"];
    doc["g"] = pj["g"];
    doc["gbar"] = pj["gbar"];
    ordered_json box = ordered_json::array();
    for (const auto& [lo, hi] : e.box) box.push_back({lo, hi});
    doc["box"] = box;
    doc["equivalent"] = true;
    doc["spec"] = lc_spec_to_json(*e.lc);
    return doc;
}

ordered_json cmd_catalog() {
    ordered_json out = ordered_json::array();
    for (const auto& l : builtin_listing()) out.push_back({{"name", l.name}, {"description", l.description}});
    return out;
}

}  // namespace geodequiv
