#include "commands.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
    CLI::App app{"Dual-layer LCD + diffuser superresolution: pattern decomposition, simulation and analysis"};
    app.require_subcommand(1);

    cli::DecomposeOptions dec;
    auto* decompose = app.add_subcommand("decompose", "Decompose a target image into time-multiplexed pattern pairs");
    decompose->add_option("--config", dec.config, "Display configuration file")->required();
    decompose->add_option("--target", dec.target, "Target image (PGM/PPM)")->required();
    decompose->add_option("--mode", dec.mode, "superres, hdr or lightfield3d")->capture_default_str();
    decompose->add_option("--rank", dec.rank, "Number of frames K (overrides the config)");
    decompose->add_option("--seed", dec.seed, "Solver seed (overrides the config)");
    decompose->add_option("--out", dec.out, "Output directory")->required();

    cli::AnalyzeOptions an;
    auto* analyze = app.add_subcommand("analyze", "Conditioning, MTF, parameter sweeps and baseline comparisons");
    analyze->require_subcommand(1);
    auto common = [&an](CLI::App* sub) {
        sub->add_option("--config", an.config, "Display configuration file");
        sub->add_option("--target", an.target, "Test image (PGM/PPM)");
        sub->add_option("--rank", an.rank, "Number of frames K (overrides the config)");
        sub->add_option("--seed", an.seed, "Solver seed (overrides the config)");
        sub->add_option("--out", an.out, "Output directory")->capture_default_str();
    };
    auto* cond = analyze->add_subcommand("conditioning", "Condition number over diffuser distance and spread");
    common(cond);
    cond->add_option("--sweep-grid", an.sweep_grid, "'d1,d2,...;spread1,spread2,...' (mm; full field of view, degrees)");
    cond->add_option("--tile", an.tile, "Tile size in superpixels")->capture_default_str();

    auto* mtf = analyze->add_subcommand("mtf", "Slanted-edge MTF");
    common(mtf);
    mtf->add_option("--method", an.method, "image (default), ours, native, cubic or wobulation");
    mtf->add_option("--oversample", an.oversample, "ESF oversampling factor")->capture_default_str();
    mtf->add_option("--angle", an.angle, "Edge slant in degrees")->capture_default_str();
    mtf->add_option("--cols", an.cols, "Generated edge width")->capture_default_str();
    mtf->add_option("--rows", an.rows, "Generated edge height")->capture_default_str();

    auto* sw = analyze->add_subcommand("sweep", "PSNR or conditioning sweep");
    common(sw);
    sw->add_option("kind", an.kind, "conditioning, distance, rank or factor")->required();
    sw->add_option("--sweep-grid", an.sweep_grid, "Comma-separated grid values");
    sw->add_option("--tile", an.tile, "Conditioning tile size in superpixels")->capture_default_str();

    auto* base = analyze->add_subcommand("baselines", "Compare against native, cubic and wobulation");
    common(base);

    cli::ChartOptions ch;
    auto* chart = app.add_subcommand("chart", "Generate a test chart");
    chart->add_option("kind", ch.kind, "edge, chirp, checkerboard, natural, hdr or scene")->required();
    chart->add_option("--out", ch.out, "Output image")->required();
    chart->add_option("--cols", ch.cols, "Width")->capture_default_str();
    chart->add_option("--rows", ch.rows, "Height")->capture_default_str();
    chart->add_option("--angle", ch.angle, "Edge slant, degrees")->capture_default_str();
    chart->add_option("--sr-factor", ch.sr_factor, "Chirp: target pixels per panel pixel")->capture_default_str();
    chart->add_option("--cell", ch.cell, "Checkerboard cell size")->capture_default_str();
    chart->add_option("--index", ch.index, "Natural image index")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kConfigError;
    }

    if (decompose->parsed()) return cli::guarded([&] { return cli::run_decompose(dec); });
    if (cond->parsed()) return cli::guarded([&] { return cli::run_conditioning(an); });
    if (mtf->parsed()) return cli::guarded([&] { return cli::run_mtf(an); });
    if (sw->parsed()) return cli::guarded([&] { return cli::run_sweep(an); });
    if (base->parsed()) return cli::guarded([&] { return cli::run_baselines(an); });
    if (chart->parsed()) return cli::guarded([&] { return cli::run_chart(ch); });
    return cli::kConfigError;
}
