// freespec command-line front end; the work happens in freespec::cli::run.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "freespec/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Spectral anomaly detection for multichannel measurement data"};
    app.require_subcommand(1);
    app.fallthrough();

    std::map<std::string, std::string> params;
    auto flag = [&](const char* name, const char* key, const char* help) {
        app.add_option_function<std::string>(
            name, [&params, key](const std::string& v) { params[key] = v; }, help);
    };
    flag("--eta", "eta", "preprocessing noise level (default 1e-5)");
    flag("--repetitions", "repetitions", "ESD repetitions (default 10)");
    flag("--margin-eps", "margin_eps", "outlier margin; 0 derives it from the density");
    flag("--grid-points", "grid_points", "density grid points (default 4096)");
    flag("--smoothing-offset", "smoothing_offset", "Stieltjes height; 0 = 1e-4 of the span");
    flag("--corner-eps", "corner_eps", "linearization corner epsilon (default 1e-6)");
    flag("--delta", "delta", "product-spectrum band (default 0.15)");
    flag("--seed", "seed", "random seed (default 0)");
    flag("--polynomial", "polynomial", "p1 or p2 (default p2)");
    flag("--stride", "window_stride", "sliding-window stride for locate");
    flag("--ratio", "ratio", "asd: aspect ratio c = N/T (default 1)");

    std::string out_path;
    app.add_option("--out,-o", out_path, "output file");

    std::vector<std::string> inputs;
    const std::vector<std::pair<const char*, const char*>> commands = {
        {"simulate", "scenario.json -> data CSV"},
        {"mp-check", "data.csv -> ESD histogram CSV, KS and L1 against MP"},
        {"asd", "[p1|p2] -> density CSV (cached)"},
        {"detect", "ref.csv test.csv -> report JSON"},
        {"locate", "ref.csv test.csv -> location JSON (+ CSV series with --stride)"},
        {"product", "ref.csv test.csv -> product spectrum CSV"},
    };
    for (const auto& [name, help] : commands)
        app.add_subcommand(name, help)->add_option("inputs", inputs, "input files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : freespec::cli::kUsage;
    }

    freespec::cli::RunConfig config;
    config.command = app.get_subcommands().front()->get_name();
    for (const auto& in : inputs) config.input_paths.emplace_back(in);
    config.output_path = out_path;
    config.params = params;
    return freespec::cli::run(config, std::cout, std::cerr);
}
