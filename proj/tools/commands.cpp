#include "commands.hpp"

#include "sres/baselines.hpp"
#include "sres/charts.hpp"
#include "sres/conditioning.hpp"
#include "sres/config.hpp"
#include "sres/display_modes.hpp"
#include "sres/forward_model.hpp"
#include "sres/image_io.hpp"
#include "sres/metrics.hpp"
#include "sres/mtf.hpp"
#include "sres/solver.hpp"
#include "sres/sweep.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;
using namespace sres;

namespace cli {
namespace {

fs::path prepare_dir(const std::string& dir) {
    if (dir.empty()) throw IoError("no output directory given");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
    return fs::path(dir);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot create '" + path.string() + "'");
    return os;
}

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << "0x" << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

std::string frame_name(const char* panel, int k, int channels) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%02d.%s", panel, k, channels == 1 ? "pgm" : "ppm");
    return buf;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad " + what + " value '" + item + "' in --sweep-grid");
        }
    }
    if (out.empty()) throw ConfigError("empty " + what + " list in --sweep-grid");
    return out;
}

RunConfig config_with_overrides(const std::string& path, std::optional<int> rank, std::optional<std::uint64_t> seed) {
    if (path.empty()) throw ConfigError("--config is required");
    RunConfig cfg = load_config(path);
    if (rank) {
        if (*rank < 1) throw ConfigError("--rank must be >= 1");
        cfg.rank = *rank;
    }
    if (seed) cfg.solver.seed = *seed;
    return cfg;
}

// Panel-resolution patterns of one channel per frame, stacked into images of all channels.
void write_patterns(const fs::path& dir, const std::vector<PatternSet>& per_channel, const DisplayGeometry& g,
                    std::vector<std::string>& fronts, std::vector<std::string>& rears) {
    const int channels = static_cast<int>(per_channel.size());
    const int rank = per_channel.front().rank();
    for (int k = 0; k < rank; ++k) {
        Image front, rear;
        for (const auto& pat : per_channel) {
            front.channels.push_back(Eigen::Map<const Plane>(pat.front.col(k).data(), g.panel_rows, g.panel_cols));
            rear.channels.push_back(Eigen::Map<const Plane>(pat.rear.col(k).data(), g.panel_rows, g.panel_cols));
        }
        fronts.push_back(frame_name("front", k, channels));
        rears.push_back(frame_name("rear", k, channels));
        write_image((dir / fronts.back()).string(), front);
        write_image((dir / rears.back()).string(), rear);
    }
}

double image_psnr(const Image& a, const Image& b) {
    // PSNR over all channels together
    double err = 0.0;
    long count = 0;
    for (std::size_t c = 0; c < a.channels.size(); ++c) {
        err += (a.channels[c] - b.channels[c]).squaredNorm();
        count += a.channels[c].size();
    }
    const double m = err / static_cast<double>(count);
    return m <= 0.0 ? kPsnrCap : std::min(kPsnrCap, -10.0 * std::log10(m));
}

Image clamp01(Image img) {
    for (auto& c : img.channels) c = c.cwiseMax(0.0).cwiseMin(1.0);
    return img;
}

std::string ext(int channels) { return channels == 1 ? ".pgm" : ".ppm"; }

void require_size(const Image& img, int cols, int rows, const std::string& path, const std::string& what) {
    if (img.cols() != cols || img.rows() != rows) {
        throw IoError("image '" + path + "' is " + std::to_string(img.cols()) + "x" + std::to_string(img.rows()) +
                      " but the configuration expects " + std::to_string(cols) + "x" + std::to_string(rows) + " (" +
                      what + ")");
    }
}

ViewGrid view_grid(const RunConfig& cfg) {
    ViewGrid grid = default_view_grid(cfg.geometry);
    grid.cols = cfg.view_cols;
    grid.rows = cfg.view_rows;
    return grid;
}

} // namespace

int run_decompose(const DecomposeOptions& opt) {
    const RunConfig cfg = config_with_overrides(opt.config, opt.rank, opt.seed);
    if (opt.mode != "superres" && opt.mode != "hdr" && opt.mode != "lightfield3d")
        throw ConfigError("unknown --mode '" + opt.mode + "' (expected superres, hdr or lightfield3d)");
    if (opt.target.empty()) throw IoError("--target is required");
    const Image target = read_image(opt.target);
    const fs::path dir = prepare_dir(opt.out);
    const DisplayGeometry& g = cfg.geometry;
    const int channels = target.channel_count();

    std::vector<PatternSet> patterns;
    std::ostringstream diag;
    diag.precision(10);
    std::vector<std::pair<std::string, std::string>> extra;
    double lower = 0.0;
    auto put = [&extra](const std::string& k, double v) {
        std::ostringstream os;
        os.precision(10);
        os << v;
        extra.emplace_back(k, os.str());
    };

    if (opt.mode == "superres") {
        require_size(target, g.target_cols(), g.target_rows(), opt.target, "superresolved target");
        const ProjectionOperator P = build_projection(g, cfg.diffuser);
        Image perceived, native;
        diag << (channels > 1 ? "channel," : "") << "iter,primal_residual,fact_error,psnr\n";
        for (int c = 0; c < channels; ++c) {
            const Plane& t = target.channels[static_cast<std::size_t>(c)];
            SuperresResult r = decompose_superres(t, P, cfg.rank, cfg.solver);
            for (const auto& h : r.history) {
                if (channels > 1) diag << c << ',';
                diag << h.iter << ',' << h.primal_residual << ',' << h.fact_error << ',' << h.psnr << '\n';
            }
            perceived.channels.push_back(apply_projection(P, r.patterns));
            native.channels.push_back(simulate_native(t, g));
            patterns.push_back(std::move(r.patterns));
        }
        perceived = clamp01(std::move(perceived));
        write_image((dir / ("perceived" + ext(channels))).string(), perceived);
        write_image((dir / ("native" + ext(channels))).string(), native);
        extra.emplace_back("perceived", "perceived" + ext(channels));
        extra.emplace_back("native", "native" + ext(channels));
        put("psnr", image_psnr(perceived, target));
        put("native_psnr", image_psnr(native, target));
    } else if (opt.mode == "hdr") {
        require_size(target, g.panel_cols, g.panel_rows, opt.target, "panel-resolution image");
        lower = cfg.black_level;
        Image perceived, single;
        diag << (channels > 1 ? "channel," : "") << "iter,objective\n";
        int unreachable = 0;
        for (int c = 0; c < channels; ++c) {
            const Plane& t = target.channels[static_cast<std::size_t>(c)];
            SolverConfig sc = cfg.solver;
            HdrResult r = decompose_hdr(t, cfg.rank, cfg.black_level, g, view_grid(cfg), sc);
            for (std::size_t i = 0; i < r.objective.size(); ++i) {
                if (channels > 1) diag << c << ',';
                diag << i + 1 << ',' << r.objective[i] << '\n';
            }
            unreachable += r.unreachable_pixels;
            perceived.channels.push_back(simulate_hdr(r.patterns, g));
            single.channels.push_back(simulate_single_panel(t, cfg.black_level));
            patterns.push_back(std::move(r.patterns));
        }
        write_image((dir / ("perceived" + ext(channels))).string(), perceived);
        write_image((dir / ("single_panel" + ext(channels))).string(), single);
        extra.emplace_back("perceived", "perceived" + ext(channels));
        extra.emplace_back("single_panel", "single_panel" + ext(channels));
        put("black_level", cfg.black_level);
        put("unreachable_pixels", unreachable);
        put("psnr", image_psnr(perceived, target));
        put("single_panel_psnr", image_psnr(single, target));
    } else {
        const ViewGrid grid = view_grid(cfg);
        require_size(target, g.panel_cols * grid.cols, g.panel_rows * grid.rows, opt.target,
                     "view mosaic of " + std::to_string(grid.cols) + "x" + std::to_string(grid.rows) + " panel-sized views");
        const DisplayGeometry flat_geom = diffuser_off(g);
        const auto dirs = grid.angles();
        Image mosaic;
        diag << (channels > 1 ? "channel," : "") << "iter,objective\n";
        std::vector<double> view_scores(dirs.size(), 0.0);
        for (int c = 0; c < channels; ++c) {
            std::vector<Plane> views;
            for (int v = 0; v < grid.size(); ++v) {
                views.push_back(target.channels[static_cast<std::size_t>(c)].block(
                    (v / grid.cols) * g.panel_rows, (v % grid.cols) * g.panel_cols, g.panel_rows, g.panel_cols));
            }
            const WeightedLightField lf = build_lightfield_target(views, flat_geom, grid);
            FactorizationResult r = decompose_3d(lf, cfg.rank, cfg.solver);
            for (std::size_t i = 0; i < r.objective.size(); ++i) {
                if (channels > 1) diag << c << ',';
                diag << i + 1 << ',' << r.objective[i] << '\n';
            }
            const auto scores = view_psnr(r.patterns, views, g, grid);
            for (std::size_t v = 0; v < scores.size(); ++v) view_scores[v] += scores[v] / channels;
            Plane out(target.rows(), target.cols());
            for (int v = 0; v < grid.size(); ++v) {
                out.block((v / grid.cols) * g.panel_rows, (v % grid.cols) * g.panel_cols, g.panel_rows, g.panel_cols) =
                    render_view(r.patterns, flat_geom, dirs[static_cast<std::size_t>(v)].first,
                                dirs[static_cast<std::size_t>(v)].second);
            }
            mosaic.channels.push_back(std::move(out));
            patterns.push_back(std::move(r.patterns));
        }
        write_image((dir / ("perceived" + ext(channels))).string(), mosaic);
        extra.emplace_back("perceived", "perceived" + ext(channels));
        for (std::size_t v = 0; v < view_scores.size(); ++v) put("view_psnr_" + std::to_string(v), view_scores[v]);
    }

    std::vector<std::string> fronts, rears;
    write_patterns(dir, patterns, g, fronts, rears);
    {
        std::ofstream os = open_out(dir / "diagnostics.csv");
        os << diag.str();
    }
    std::ofstream man = open_out(dir / "manifest.txt");
    man << "mode = " << opt.mode << "\nrank = " << cfg.rank << "\nlower_bound = " << lower
        << "\nseed = " << cfg.solver.seed << "\ngeometry_hash = " << hex(g.hash()) << "\nchannels = " << channels
        << "\nfront =";
    for (const auto& f : fronts) man << ' ' << f;
    man << "\nrear =";
    for (const auto& f : rears) man << ' ' << f;
    man << "\ndiagnostics = diagnostics.csv\n";
    for (const auto& [k, v] : extra) man << k << " = " << v << '\n';
    if (!man) throw IoError("failed to write manifest");
    for (const auto& [k, v] : extra)
        if (k.find("psnr") != std::string::npos) std::cout << k << " = " << v << '\n';
    return kOk;
}

int run_conditioning(const AnalyzeOptions& opt) {
    const RunConfig cfg = config_with_overrides(opt.config, opt.rank, opt.seed);
    SweepSpec spec;
    spec.kind = SweepKind::Conditioning;
    spec.geometry = cfg.geometry;
    spec.diffuser = cfg.diffuser;
    spec.tile = opt.tile;
    spec.values = {0.1, 0.3, 1.0, 2.0, 4.0};
    spec.spreads = {1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 20};
    if (!opt.sweep_grid.empty()) {
        const auto semi = opt.sweep_grid.find(';');
        if (semi == std::string::npos) throw ConfigError("conditioning --sweep-grid is 'distances;spreads'");
        spec.values = parse_list(opt.sweep_grid.substr(0, semi), "distance");
        spec.spreads = parse_list(opt.sweep_grid.substr(semi + 1), "spread");
    }
    const SweepResult res = sweep(spec, {}, cfg.solver);
    const fs::path dir = prepare_dir(opt.out);
    std::ofstream os = open_out(dir / "conditioning.csv");
    res.write_csv(os);

    const std::vector<double>* best = nullptr;
    for (const auto& row : res.rows)
        if (!best || row[2] < (*best)[2]) best = &row;
    std::cout << "minimum condition number " << (*best)[2] << " at distance " << (*best)[0] << " mm, spread "
              << (*best)[1] << " deg\n";
    return kOk;
}

int run_sweep(const AnalyzeOptions& opt) {
    const RunConfig cfg = config_with_overrides(opt.config, opt.rank, opt.seed);
    SweepSpec spec;
    spec.kind = parse_sweep_kind(opt.kind);
    spec.geometry = cfg.geometry;
    spec.diffuser = cfg.diffuser;
    spec.rank = cfg.rank;
    spec.tile = opt.tile;
    switch (spec.kind) {
    case SweepKind::Conditioning:
        return run_conditioning(opt);
    case SweepKind::DistancePsnr:
        spec.values = {0.3, 1.0, 2.0, 4.0, 6.0};
        break;
    case SweepKind::RankPsnr:
        spec.values = {1, 2, 4, 6, 8};
        break;
    case SweepKind::FactorPsnr:
        spec.values = {2, 3};
        break;
    }
    if (!opt.sweep_grid.empty()) spec.values = parse_list(opt.sweep_grid, sweep_kind_name(spec.kind));
    ImageSource source;
    if (opt.target.empty()) {
        source = [](int cols, int rows) { return charts::natural_image(0, cols, rows); };
    } else {
        source = resampling_source(to_gray(read_image(opt.target)));
    }
    const SweepResult res = sweep(spec, source, cfg.solver);
    const fs::path dir = prepare_dir(opt.out);
    std::ofstream os = open_out(dir / ("sweep_" + sweep_kind_name(spec.kind) + ".csv"));
    res.write_csv(os);
    res.write_csv(std::cout);
    return kOk;
}

int run_baselines(const AnalyzeOptions& opt) {
    const RunConfig cfg = config_with_overrides(opt.config, opt.rank, opt.seed);
    const DisplayGeometry& g = cfg.geometry;
    Plane target;
    if (opt.target.empty()) {
        target = charts::natural_image(0, g.target_cols(), g.target_rows());
    } else {
        const Image img = read_image(opt.target);
        require_size(img, g.target_cols(), g.target_rows(), opt.target, "superresolved target");
        target = to_gray(img);
    }
    const ProjectionOperator P = build_projection(g, cfg.diffuser);
    const SuperresResult ours = decompose_superres(target, P, cfg.rank, cfg.solver);
    const Plane perceived = apply_projection(P, ours.patterns).cwiseMax(0.0).cwiseMin(1.0);
    const Plane native = simulate_native(target, g);
    const Plane cubic = baseline_cubic(target, g).cwiseMax(0.0).cwiseMin(1.0);

    const fs::path dir = prepare_dir(opt.out);
    std::ofstream os = open_out(dir / "baselines.csv");
    os << "method,psnr\n";
    os.precision(10);
    auto report = [&](const std::string& name, const Plane& img) {
        write_image((dir / (name + ".pgm")).string(), img);
        const double p = psnr(img, target);
        os << name << ',' << p << '\n';
        std::cout << name << " psnr = " << p << '\n';
    };
    report("ours", perceived);
    report("native", native);
    report("cubic", cubic);
    const int s = static_cast<int>(std::lround(g.sr_factor));
    if (std::abs(g.sr_factor - s) < 1e-12) report("wobulation", baseline_wobulation(target, std::min(cfg.rank, s * s), g).perceived);
    return kOk;
}

int run_mtf(const AnalyzeOptions& opt) {
    if (opt.oversample < 1) throw ConfigError("--oversample must be >= 1");
    Plane image;
    double scale = 1.0;
    const std::string method = opt.method.empty() ? "image" : opt.method;
    if (method == "image") {
        image = opt.target.empty() ? charts::slanted_edge(opt.cols, opt.rows, opt.angle, 0.0, 1.0)
                                   : to_gray(read_image(opt.target));
        if (!opt.config.empty()) scale = load_config(opt.config).geometry.sr_factor;
    } else {
        const RunConfig cfg = config_with_overrides(opt.config, opt.rank, opt.seed);
        const DisplayGeometry& g = cfg.geometry;
        scale = g.sr_factor;
        const Plane edge = charts::slanted_edge(g.target_cols(), g.target_rows(), opt.angle);
        if (method == "ours") {
            const ProjectionOperator P = build_projection(g, cfg.diffuser);
            image = apply_projection(P, decompose_superres(edge, P, cfg.rank, cfg.solver).patterns);
        } else if (method == "native") {
            image = simulate_native(edge, g);
        } else if (method == "cubic") {
            image = baseline_cubic(edge, g);
        } else if (method == "wobulation") {
            const int s = static_cast<int>(std::lround(g.sr_factor));
            image = baseline_wobulation(edge, std::min(cfg.rank, s * s), g).perceived;
        } else {
            throw ConfigError("unknown --method '" + method + "' (expected image, ours, native, cubic or wobulation)");
        }
    }
    const MtfCurve curve = mtf_slanted_edge(image, opt.angle, opt.oversample, scale);
    const fs::path dir = prepare_dir(opt.out);
    std::ofstream os = open_out(dir / ("mtf_" + method + ".csv"));
    curve.write_csv(os);
    write_image((dir / ("mtf_" + method + ".pgm")).string(), image.cwiseMax(0.0).cwiseMin(1.0).eval());
    std::cout << "edge angle " << curve.edge_angle << " deg" << (curve.slant_warning ? " (outside 2-10 deg or far from hint)" : "")
              << ", mtf(0) = " << curve.magnitudes.front() << ", mtf(1) = " << curve.at(1.0) << '\n';
    return kOk;
}

int run_chart(const ChartOptions& opt) {
    if (opt.out.empty()) throw IoError("--out is required");
    if (opt.cols < 1 || opt.rows < 1) throw ConfigError("--cols and --rows must be >= 1");
    Plane img;
    if (opt.kind == "edge")
        img = charts::slanted_edge(opt.cols, opt.rows, opt.angle);
    else if (opt.kind == "chirp")
        img = charts::chirp(opt.cols, opt.rows, opt.sr_factor);
    else if (opt.kind == "checkerboard")
        img = charts::checkerboard(opt.cols, opt.rows, opt.cell);
    else if (opt.kind == "natural")
        img = charts::natural_image(opt.index, opt.cols, opt.rows);
    else if (opt.kind == "hdr")
        img = charts::hdr_test_image(opt.cols, opt.rows);
    else if (opt.kind == "scene") {
        // 5 x 3 view mosaic of a two-plane scene for prototype panels of cols x rows pixels
        const DisplayGeometry g = prototype_geometry(opt.cols, opt.rows, 1.0);
        const ViewGrid grid = default_view_grid(g);
        const auto views = two_plane_scene(g, grid);
        img.resize(opt.rows * grid.rows, opt.cols * grid.cols);
        for (int v = 0; v < grid.size(); ++v)
            img.block((v / grid.cols) * opt.rows, (v % grid.cols) * opt.cols, opt.rows, opt.cols) = views[static_cast<std::size_t>(v)];
    } else
        throw ConfigError("unknown chart '" + opt.kind + "' (expected edge, chirp, checkerboard, natural, hdr or scene)");
    write_image(opt.out, img);
    return kOk;
}

} // namespace cli
