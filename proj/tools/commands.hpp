#pragma once

#include "sres/errors.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

namespace cli {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kIoError = 3, kDiverged = 4 };

struct DecomposeOptions {
    std::string config;
    std::string target;
    std::string mode = "superres";
    std::optional<int> rank;
    std::optional<std::uint64_t> seed;
    std::string out;
};

struct AnalyzeOptions {
    std::string config;
    std::string target;
    std::string out = ".";
    std::string sweep_grid;
    std::string kind;    // sweep kind
    std::string method;  // mtf: image | ours | native | cubic | wobulation
    std::optional<int> rank;
    std::optional<std::uint64_t> seed;
    int oversample = 4;
    int tile = 16;
    double angle = 5.0;
    int cols = 96;
    int rows = 96;
};

struct ChartOptions {
    std::string kind;
    std::string out;
    int cols = 96;
    int rows = 96;
    double angle = 5.0;
    double sr_factor = 3.0;
    int cell = 1;
    int index = 0;
};

int run_decompose(const DecomposeOptions& opt);
int run_conditioning(const AnalyzeOptions& opt);
int run_mtf(const AnalyzeOptions& opt);
int run_sweep(const AnalyzeOptions& opt);
int run_baselines(const AnalyzeOptions& opt);
int run_chart(const ChartOptions& opt);

/// Maps library exceptions to exit codes and prints the message.
template <typename F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const sres::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const sres::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const sres::SolverDiverged& e) {
        std::cerr << "solver diverged: " << e.what() << '\n';
        return kDiverged;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}

} // namespace cli
