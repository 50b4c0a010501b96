#pragma once

#include "sres/core.hpp"

#include <iosfwd>
#include <string>

namespace sres {

/// Everything a run reads from a configuration file.
struct RunConfig {
    DisplayGeometry geometry;
    DiffuserModel diffuser;
    SolverConfig solver;
    int rank = 4;
    double black_level = 0.15;  // hdr mode
    int view_cols = 5;          // hdr / lightfield3d modes
    int view_rows = 3;
};

/// Parses `key = value` lines; `#` starts a comment. Required keys: panel_cols, panel_rows,
/// panel_pitch, gap_panels, gap_diffuser, sr_factor, half_angle. Optional: profile
/// (cosine|uniform), angular_samples, rank, black_level, view_cols, view_rows, outer_iters,
/// sart_iters, fact_iters, polish_iters, rho, tol_primal, relaxation, seed, factor_update (hals|multiplicative).
/// Throws ConfigError naming the offending key on unknown, duplicate, missing or invalid entries.
RunConfig parse_config(std::istream& is, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Canonical text form accepted by parse_config.
std::string format_config(const RunConfig& cfg);

} // namespace sres
