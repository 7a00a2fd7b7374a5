#include "minidemo/initialization.hpp"
#include "minidemo/simulation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

using namespace minidemo;
namespace fs = std::filesystem;

namespace {

enum Exit : int { ok = 0, usage = 2, bad_config = 3, io_failure = 4, invariant_failure = 5 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> dt;
    std::optional<int> t0;
    std::optional<int> tfinal;
    std::optional<int> initial_pop;
    std::optional<std::string> fertility;
    std::optional<std::string> out;
    bool audit = false;
    int replicates = 1;
};

// Paths inside a config file are taken relative to that file.
std::string resolve_beside(const fs::path& config_path, const std::string& value) {
    if (value.empty() || value == "synthetic" || fs::path(value).is_absolute())
        return value;
    return (config_path.parent_path() / value).string();
}

RunConfig load_run_config(const std::optional<std::string>& path) {
    if (!path)
        return {};
    if (!fs::exists(*path))
        throw IoError("config file not found: " + *path);
    RunConfig config;
    try {
        config = load_config(*path);
    } catch (const std::exception& e) {
        throw ConfigError("bad config " + *path + ": " + e.what());
    }
    config.simulation.fertility = resolve_beside(*path, config.simulation.fertility);
    config.simulation.densityMap = resolve_beside(*path, config.simulation.densityMap);
    return config;
}

void apply_flags(RunConfig& config, const RunOptions& o) {
    try {
        if (o.seed)
            config.simulation.seed = *o.seed;
        if (o.dt)
            config.simulation.clock = ClockSpec::parse(*o.dt);
        if (o.t0)
            config.simulation.t0 = *o.t0;
        if (o.tfinal)
            config.simulation.tFinal = *o.tfinal;
        if (o.initial_pop)
            config.parameters.initialPop = *o.initial_pop;
        if (o.fertility)
            config.simulation.fertility = *o.fertility;
        if (o.out)
            config.simulation.outputDir = *o.out;
        if (o.audit)
            config.simulation.audit = true;
        config.simulation.validate();
        config.parameters.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad configuration: ") + e.what());
    }
}

struct Inputs {
    DataTables tables;
    DensityMap density;
};

Inputs load_inputs(const SimulationConfig& sim) {
    Inputs in{DataTables{}, DensityMap::uk_default()};
    auto load = [](const std::string& what, const std::string& path, auto&& loader) {
        if (path != "synthetic" && !fs::exists(path))
            throw IoError(what + " file not found: " + path);
        try {
            loader();
        } catch (const std::exception& e) {
            throw ConfigError("bad " + what + " file " + path + ": " + e.what());
        }
    };
    load("fertility", sim.fertility, [&] { in.tables.fertility = load_fertility_table(sim.fertility); });
    if (!sim.densityMap.empty())
        load("density map", sim.densityMap, [&] { in.density = DensityMap::load(sim.densityMap); });
    return in;
}

void write_outputs(const fs::path& dir, const SimulationResult& result) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    std::ofstream stats(dir / "statistics.csv", std::ios::binary);
    if (!stats)
        throw IoError("cannot write " + (dir / "statistics.csv").string());
    write_statistics(stats, result.statistics);
    try {
        export_population(result.final_state, dir / "population.csv");
    } catch (const std::exception& e) {
        throw IoError(e.what());
    }
}

int command_run(const RunOptions& o) {
    RunConfig config = load_run_config(o.config);
    apply_flags(config, o);
    if (o.replicates < 1)
        throw ConfigError("bad configuration: --replicates must be at least 1");
    const Inputs inputs = load_inputs(config.simulation);
    const fs::path out = config.simulation.outputDir;

    if (o.replicates == 1) {
        const auto result = run_simulation(config.simulation, config.parameters, inputs.tables, inputs.density);
        write_outputs(out, result);
        const auto& last = result.statistics.back();
        std::printf("%lld steps, %zu alive, outputs in %s\n", static_cast<long long>(last.step),
                    static_cast<std::size_t>(last.alive), out.string().c_str());
        return Exit::ok;
    }

    std::vector<std::vector<StepStatistics>> series(o.replicates);
    std::vector<std::exception_ptr> errors(o.replicates);
    std::vector<std::thread> workers;
    for (int r = 0; r < o.replicates; ++r) {
        workers.emplace_back([&, r] {
            try {
                SimulationConfig sim = config.simulation;
                sim.seed = config.simulation.seed + static_cast<std::uint64_t>(r);
                auto result = run_simulation(sim, config.parameters, inputs.tables, inputs.density);
                write_outputs(out / ("replicate_" + std::to_string(r)), result);
                series[r] = std::move(result.statistics);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        });
    }
    for (auto& w : workers)
        w.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    std::ofstream summary(out / "summary.csv", std::ios::binary);
    if (!summary)
        throw IoError("cannot write " + (out / "summary.csv").string());
    write_replicate_summary(summary, series);
    std::printf("%d replicates, outputs in %s\n", o.replicates, out.string().c_str());
    return Exit::ok;
}

int command_validate(const RunOptions& o) {
    RunConfig config = load_run_config(o.config);
    apply_flags(config, o);
    const Inputs inputs = load_inputs(config.simulation);
    try {
        config.simulation.validate();
        inputs.tables.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad configuration: ") + e.what());
    }
    Rng rng(config.simulation.seed);
    const World world = initialize_world(config.simulation, config.parameters, inputs.density, rng);
    const auto violations = check_invariants(world);
    for (const auto& v : violations)
        std::fprintf(stderr, "invariant violated: %s\n", v.c_str());
    if (!violations.empty())
        return Exit::invariant_failure;
    std::printf("valid: %zu persons in %zu houses\n", world.people.size(), world.space.house_count());
    return Exit::ok;
}

int command_export_defaults(const std::optional<std::string>& path) {
    if (!path) {
        write_config(std::cout, RunConfig{});
        return Exit::ok;
    }
    std::ofstream out(*path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + *path);
    write_config(out, RunConfig{});
    return Exit::ok;
}

void add_common_flags(CLI::App& cmd, RunOptions& o) {
    cmd.add_option("--config", o.config, "key = value configuration file");
    cmd.add_option("--seed", o.seed, "64-bit random seed");
    cmd.add_option("--dt", o.dt, "step length: hourly, daily, weekly, monthly or custom:N");
    cmd.add_option("--t0", o.t0, "start year");
    cmd.add_option("--tfinal", o.tfinal, "end year");
    cmd.add_option("--initial-pop", o.initial_pop, "initial population size");
    cmd.add_option("--fertility", o.fertility, "fertility table file, or 'synthetic'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"minidemo: agent-based demographic simulation"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "run a simulation and write statistics and population files");
    add_common_flags(*run, run_opts);
    run->add_option("--out", run_opts.out, "output directory");
    run->add_flag("--audit", run_opts.audit, "check every invariant after every step");
    run->add_option("--replicates", run_opts.replicates, "independent runs with seeds seed, seed+1, ...");

    RunOptions validate_opts;
    auto* validate = app.add_subcommand("validate", "load the inputs and check the initial state");
    add_common_flags(*validate, validate_opts);

    std::optional<std::string> defaults_path;
    auto* defaults = app.add_subcommand("export-defaults", "write the default parameters as a config file");
    defaults->add_option("path", defaults_path, "destination (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Exit::ok : Exit::usage;
    }

    try {
        if (*run)
            return command_run(run_opts);
        if (*validate)
            return command_validate(validate_opts);
        return command_export_defaults(defaults_path);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return Exit::bad_config;
    } catch (const IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return Exit::io_failure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "simulation error: %s\n", e.what());
        return Exit::invariant_failure;
    }
}
