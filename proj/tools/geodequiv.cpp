#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "geodequiv/commands.hpp"

using namespace geodequiv;
namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Flags {
    std::optional<std::string> pair, config, format, out;
    std::optional<std::uint64_t> seed;
    std::optional<double> drift_tol, bracket_tol, t_end;
    std::optional<long long> trajectories, points;
};

void add_flags(CLI::App* cmd, Flags& f, bool run_flags) {
    cmd->add_option("--pair", f.pair, "catalog name or lc:<config path>");
    cmd->add_option("--config", f.config, "JSON config: pair document and/or \"run\" section");
    cmd->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", f.out, "output path (directory for geodesic csv)");
    if (!run_flags) return;
    cmd->add_option("--seed", f.seed, "64-bit seed");
    cmd->add_option("--tol-drift", f.drift_tol, "relative drift tolerance");
    cmd->add_option("--tol-bracket", f.bracket_tol, "normalized bracket tolerance");
    cmd->add_option("--t-end", f.t_end, "geodesic time horizon");
    cmd->add_option("--trajectories", f.trajectories, "number of geodesics");
    cmd->add_option("--points", f.points, "number of sample points");
}

std::size_t count_flag(long long v, const char* name) {
    if (v < 1) throw ConfigError(std::string(name) + " must be at least 1");
    return static_cast<std::size_t>(v);
}

RunConfig build_config(const Flags& f) {
    RunConfig cfg;
    if (f.config) {
        const nlohmann::json doc = read_json_file(*f.config);
        if (!doc.is_object()) throw ConfigError(*f.config + ": config must be a JSON object");
        cfg.config_path = *f.config;
        if (doc.contains("run")) apply_run_section(cfg, doc.at("run"), *f.config);
        if (doc.contains("pair") || doc.contains("sizes") || doc.contains("g")) cfg.pair_document = doc;
    }
    if (f.pair) {
        cfg.pair = *f.pair;
        cfg.pair_document.reset();
    }
    if (f.seed) cfg.seed = *f.seed;
    if (f.drift_tol) cfg.drift_tol = *f.drift_tol;
    if (f.bracket_tol) cfg.bracket_tol = *f.bracket_tol;
    if (f.t_end) cfg.t_end = *f.t_end;
    if (f.trajectories) cfg.trajectories = count_flag(*f.trajectories, "trajectory count");
    if (f.points) cfg.points = count_flag(*f.points, "sample-point count");
    if (f.format) cfg.format = *f.format;
    if (f.out) cfg.out = *f.out;
    cfg.validate();
    return cfg;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError(path + ": cannot open for writing");
    os << text;
    if (!os) throw ConfigError(path + ": write failed");
}

int emit(CommandReport& r, const RunConfig& cfg) {
    r.doc["timestamp"] = utc_timestamp();
    if (!r.files.empty() && cfg.format == "csv") {
        if (cfg.out.empty()) throw ConfigError("geodesic --format csv needs --out <directory>");
        fs::create_directories(cfg.out);
        for (const auto& [name, text] : r.files) write_text((fs::path(cfg.out) / name).string(), text);
        write_text((fs::path(cfg.out) / "coincidence.csv").string(), r.csv);
        write_text((fs::path(cfg.out) / "summary.json").string(), r.doc.dump(2) + "\n");
    } else if (cfg.format == "csv") {
        write_text(cfg.out, r.csv);
    } else {
        write_text(cfg.out, r.doc.dump(2) + "\n");
    }
    for (const auto& c : r.criteria)
        std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.value << ' ' << c.relation << ' '
                  << c.threshold << '\n';
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    return r.passed() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geodesic equivalence: integrals, factory and verification"};
    app.require_subcommand(1);
    Flags verify_f, factory_f, geodesic_f, build_f, catalog_f;
    CLI::App* verify = app.add_subcommand("verify", "conservation, involution, energy identity, independence rank");
    CLI::App* factory = app.add_subcommand("factory", "factory polynomial remainders, cross-checks and drift");
    CLI::App* geodesic = app.add_subcommand("geodesic", "export trajectories and compare g / gbar geodesics");
    CLI::App* build = app.add_subcommand("levi-civita-build", "emit an explicit pair config from an LC spec");
    CLI::App* catalog = app.add_subcommand("catalog", "list built-in pairs");
    add_flags(verify, verify_f, true);
    add_flags(factory, factory_f, true);
    add_flags(geodesic, geodesic_f, true);
    add_flags(build, build_f, false);
    catalog->add_option("--format", catalog_f.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    catalog->add_option("--out", catalog_f.out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*catalog) {
            const nlohmann::ordered_json list = cmd_catalog();
            std::string text;
            if (catalog_f.format.value_or("text") == "json") {
                text = list.dump(2) + "\n";
            } else {
                for (const auto& l : list)
                    text += l["name"].get<std::string>() + "\t" + l["description"].get<std::string>() + "\n";
            }
            write_text(catalog_f.out.value_or(""), text);
            return kExitPass;
        }
        if (*build) {
            const RunConfig cfg = build_config(build_f);
            write_text(cfg.out, cmd_levi_civita_build(resolve_pair(cfg)).dump(2) + "\n");
            return kExitPass;
        }
        const Flags& f = *verify ? verify_f : *factory ? factory_f : geodesic_f;
        const RunConfig cfg = build_config(f);
        const CatalogEntry e = resolve_pair(cfg);
        CommandReport r = *verify ? cmd_verify(cfg, e) : *factory ? cmd_factory(cfg, e) : cmd_geodesic(cfg, e);
        return emit(r, cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}
