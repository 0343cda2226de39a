// SPDX-License-Identifier: Apache-2.0
// wetbeam: run the figure presets or check a configuration file.
//
//   wetbeam run --preset fig5 --scale 0.25 --out out/fig5
//   wetbeam validate --config my.json
//
// Exit codes: 0 success, 2 configuration error, 3 experiment failure.
// WETBEAM_LOG_LEVEL=trace|debug|info|warn|error|off sets log verbosity.

#include "wetbeam/errors.hpp"
#include "wetbeam/harness/config.hpp"
#include "wetbeam/harness/experiment.hpp"
#include "wetbeam/harness/output.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <optional>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitExperiment = 3;

void setup_logging()
{
    auto logger = spdlog::stderr_color_mt("wetbeam");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("WETBEAM_LOG_LEVEL")) {
        const auto level = spdlog::level::from_str(env);
        // from_str maps unknown names to off; only accept the real "off"
        if (level != spdlog::level::off || std::string(env) == "off")
            spdlog::set_level(level);
        else
            spdlog::warn("ignoring unknown WETBEAM_LOG_LEVEL '{}'", env);
    }
}

std::string command_line(int argc, char** argv)
{
    std::string s;
    for (int i = 0; i < argc; ++i)
        s += (i ? " " : "") + std::string(argv[i]);
    return s;
}

void print_summary(const wetbeam::harness::ResultSet& results)
{
    std::cout << "architecture,sweep_value,count,failures,mean_total_power_W,mean_total_power_dBW\n";
    for (const auto& a : results.aggregates)
        std::cout << to_string(a.architecture) << ',' << a.sweep_value << ',' << a.count << ',' << a.failures << ','
                  << a.mean_W << ',' << a.mean_dBW << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    using namespace wetbeam;
    setup_logging();

    CLI::App app{"Power-beacon beamforming experiments"};
    app.require_subcommand(1);

    std::string preset_name;
    std::optional<std::string> config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    double scale = 1.0;
    std::optional<int> workers;
    std::optional<std::string> focus;

    auto* run = app.add_subcommand("run", "run a figure preset and write CSV results");
    run->add_option("--preset", preset_name, "fig4, fig5, fig6, fig7 or fig8")
        ->required()
        ->check(CLI::IsMember({"fig4", "fig5", "fig6", "fig7", "fig8"}));
    run->add_option("--config", config_path, "JSON file with configuration keys");
    run->add_option("--set", overrides, "key=value override, repeatable")->allow_extra_args(false);
    run->add_option("--seed", seed, "master seed");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--scale", scale, "shrink M and realization counts, in (0, 1]");
    run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--focus", focus, "fig8 beamformer: sca or conjugate")
        ->check(CLI::IsMember({"sca", "conjugate"}));

    std::string validate_path;
    std::string validate_preset;
    auto* validate = app.add_subcommand("validate", "check a configuration file and print the merged result");
    validate->add_option("--config", validate_path, "JSON file with configuration keys")->required();
    validate->add_option("--preset", validate_preset, "preset the file is merged onto")
        ->check(CLI::IsMember({"fig4", "fig5", "fig6", "fig7", "fig8"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    harness::ExperimentConfig config;
    try {
        if (*validate) {
            const auto base = validate_preset.empty() ? harness::ExperimentConfig{} : harness::preset(validate_preset);
            config = harness::load_config(validate_path, {}, base);
            std::cout << harness::to_json(config) << '\n';
            return kExitOk;
        }
        config = harness::load_config(config_path, overrides, harness::preset(preset_name));
        if (seed)
            config.seed = *seed;
        if (out_dir)
            config.output_dir = *out_dir;
        if (workers)
            config.workers = *workers;
        if (focus)
            harness::apply_override(config, "focus=" + *focus);
        config = harness::scaled(config, scale);
        config.validate();
    } catch (const std::invalid_argument& e) {
        // ConfigError, ParameterError and UnsupportedConfigurationError
        spdlog::error("configuration error: {}", e.what());
        return kExitConfig;
    }

    try {
        harness::RunInfo info;
        info.command = command_line(argc, argv);
        info.scale = scale;
        info.started = harness::utc_timestamp();
        spdlog::info("running {} ({} workers) into {}", config.id, config.workers, config.output_dir);
        const auto results = harness::run_experiment(config);
        info.finished = harness::utc_timestamp();
        harness::write_results(results, config.output_dir, info);
        print_summary(results);
        if (results.failed()) {
            for (const auto& c : results.failed_cells)
                spdlog::error("too many failed realizations: {}", c);
            return kExitExperiment;
        }
    } catch (const std::exception& e) {
        spdlog::error("experiment failed: {}", e.what());
        return kExitExperiment;
    }
    return kExitOk;
}
