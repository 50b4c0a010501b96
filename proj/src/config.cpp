#include "sres/config.hpp"

#include "sres/errors.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace sres {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("invalid value '" + text + "' for key '" + key + "'");
    return v;
}

} // namespace

RunConfig parse_config(std::istream& is, const std::string& source) {
    RunConfig cfg;
    cfg.geometry = DisplayGeometry{};
    using Setter = std::function<void(const std::string&, const std::string&)>;
    auto as_int = [](int& dst) -> Setter { return [&dst](const std::string& k, const std::string& v) { dst = parse_number<int>(k, v); }; };
    auto as_double = [](double& dst) -> Setter {
        return [&dst](const std::string& k, const std::string& v) { dst = parse_number<double>(k, v); };
    };
    const std::map<std::string, Setter> setters = {
        {"panel_cols", as_int(cfg.geometry.panel_cols)},
        {"panel_rows", as_int(cfg.geometry.panel_rows)},
        {"panel_pitch", as_double(cfg.geometry.panel_pitch)},
        {"gap_panels", as_double(cfg.geometry.gap_panels)},
        {"gap_diffuser", as_double(cfg.geometry.gap_diffuser)},
        {"sr_factor", as_double(cfg.geometry.sr_factor)},
        {"half_angle", as_double(cfg.diffuser.half_angle)},
        {"angular_samples", as_int(cfg.diffuser.angular_samples)},
        {"profile",
         [&cfg](const std::string& k, const std::string& v) {
             if (v == "cosine")
                 cfg.diffuser.profile = DiffuserProfile::Cosine;
             else if (v == "uniform")
                 cfg.diffuser.profile = DiffuserProfile::Uniform;
             else
                 throw ConfigError("invalid value '" + v + "' for key '" + k + "' (expected cosine or uniform)");
         }},
        {"rank", as_int(cfg.rank)},
        {"black_level", as_double(cfg.black_level)},
        {"view_cols", as_int(cfg.view_cols)},
        {"view_rows", as_int(cfg.view_rows)},
        {"outer_iters", as_int(cfg.solver.outer_iters)},
        {"sart_iters", as_int(cfg.solver.sart_iters)},
        {"fact_iters", as_int(cfg.solver.fact_iters)},
        {"polish_iters", as_int(cfg.solver.polish_iters)},
        {"rho", as_double(cfg.solver.rho)},
        {"tol_primal", as_double(cfg.solver.tol_primal)},
        {"relaxation", as_double(cfg.solver.relaxation)},
        {"seed", [&cfg](const std::string& k, const std::string& v) { cfg.solver.seed = parse_number<std::uint64_t>(k, v); }},
        {"factor_update",
         [&cfg](const std::string& k, const std::string& v) {
             if (v == "hals")
                 cfg.solver.update = FactorUpdate::Hals;
             else if (v == "multiplicative")
                 cfg.solver.update = FactorUpdate::Multiplicative;
             else
                 throw ConfigError("invalid value '" + v + "' for key '" + k + "' (expected hals or multiplicative)");
         }},
    };

    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(where + ": unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
        if (value.empty()) throw ConfigError(where + ": missing value for key '" + key + "'");
        try {
            it->second(key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }

    for (const char* key : {"panel_cols", "panel_rows", "panel_pitch", "gap_panels", "gap_diffuser", "sr_factor", "half_angle"}) {
        if (!seen.count(key)) throw ConfigError(source + ": missing required key '" + std::string(key) + "'");
    }

    auto check = [&source](const std::string& key, bool ok, const std::string& rule) {
        if (!ok) throw ConfigError(source + ": key '" + key + "' " + rule);
    };
    const DisplayGeometry& g = cfg.geometry;
    check("panel_cols", g.panel_cols >= 1, "must be >= 1");
    check("panel_rows", g.panel_rows >= 1, "must be >= 1");
    check("panel_pitch", g.panel_pitch > 0.0, "must be > 0");
    check("gap_panels", g.gap_panels > 0.0, "must be > 0");
    check("gap_diffuser", g.gap_diffuser >= 0.0, "must be >= 0");
    check("sr_factor", g.sr_factor >= 1.0, "must be >= 1");
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(source + ": key 'sr_factor': " + e.what());
    }
    check("half_angle", cfg.diffuser.half_angle > 0.0 && cfg.diffuser.half_angle < 90.0, "must lie in (0, 90)");
    check("angular_samples", cfg.diffuser.angular_samples == 0 || cfg.diffuser.angular_samples >= 2,
          "must be >= 2 (or 0 for automatic)");
    check("rank", cfg.rank >= 1 && cfg.rank <= g.panel_pixels(), "must lie in [1, panel pixels]");
    check("black_level", cfg.black_level >= 0.0 && cfg.black_level < 1.0, "must lie in [0, 1)");
    check("view_cols", cfg.view_cols >= 1, "must be >= 1");
    check("view_rows", cfg.view_rows >= 1, "must be >= 1");
    check("outer_iters", cfg.solver.outer_iters >= 1, "must be >= 1");
    check("sart_iters", cfg.solver.sart_iters >= 1, "must be >= 1");
    check("fact_iters", cfg.solver.fact_iters >= 1, "must be >= 1");
    check("polish_iters", cfg.solver.polish_iters >= 0, "must be >= 0");
    check("rho", cfg.solver.rho > 0.0, "must be > 0");
    check("tol_primal", cfg.solver.tol_primal > 0.0, "must be > 0");
    check("relaxation", cfg.solver.relaxation > 0.0 && cfg.solver.relaxation <= 2.0, "must lie in (0, 2]");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

std::string format_config(const RunConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    const DisplayGeometry& g = cfg.geometry;
    os << "panel_cols = " << g.panel_cols << "\npanel_rows = " << g.panel_rows << "\npanel_pitch = " << g.panel_pitch
       << "\ngap_panels = " << g.gap_panels << "\ngap_diffuser = " << g.gap_diffuser << "\nsr_factor = " << g.sr_factor
       << "\nhalf_angle = " << cfg.diffuser.half_angle
       << "\nprofile = " << (cfg.diffuser.profile == DiffuserProfile::Cosine ? "cosine" : "uniform")
       << "\nangular_samples = " << cfg.diffuser.angular_samples << "\nrank = " << cfg.rank
       << "\nblack_level = " << cfg.black_level << "\nview_cols = " << cfg.view_cols << "\nview_rows = " << cfg.view_rows
       << "\nouter_iters = " << cfg.solver.outer_iters << "\nsart_iters = " << cfg.solver.sart_iters
       << "\nfact_iters = " << cfg.solver.fact_iters << "\npolish_iters = " << cfg.solver.polish_iters << "\nrho = " << cfg.solver.rho
       << "\ntol_primal = " << cfg.solver.tol_primal << "\nrelaxation = " << cfg.solver.relaxation
       << "\nseed = " << cfg.solver.seed
       << "\nfactor_update = " << (cfg.solver.update == FactorUpdate::Hals ? "hals" : "multiplicative") << '\n';
    return os.str();
}

} // namespace sres
