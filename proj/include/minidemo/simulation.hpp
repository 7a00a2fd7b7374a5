#pragma once

#include "minidemo/events.hpp"
#include "minidemo/feature.hpp"
#include "minidemo/initialization.hpp"
#include "minidemo/parameters.hpp"
#include "minidemo/world.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace minidemo {

struct StepStatistics {
    std::int64_t step = 0;
    double time = 0.0;
    std::size_t alive = 0;
    std::size_t males = 0;
    std::size_t females = 0;
    std::size_t married = 0;
    std::size_t single = 0;
    std::size_t divorced = 0;
    std::size_t widowed = 0;
    double mean_age = 0.0;
    std::size_t births = 0;
    std::size_t deaths = 0;
    std::size_t marriages = 0;
    std::size_t divorces = 0;
    std::size_t orphan_relocations = 0;
    std::size_t divorce_relocations = 0;
    std::size_t houses = 0;
    std::size_t occupied_houses = 0;

    friend bool operator==(const StepStatistics&, const StepStatistics&) = default;
};

/// Counts by a full sweep over persons and houses.
StepStatistics collect_step_statistics(const World& world, const StepEventLog& log, std::int64_t step,
                                       double time);

/// CSV header of the statistics table.
std::string statistics_header();
/// One CSV row; decimals printed with 6 significant digits.
std::string statistics_row(const StepStatistics& s);
void write_statistics(std::ostream& out, std::span<const StepStatistics> rows);
/// Parses a file written by write_statistics.
std::vector<StepStatistics> read_statistics(std::istream& in);

/// Per-step means and sample variances of every statistics column across
/// replicate runs of equal length.
void write_replicate_summary(std::ostream& out, std::span<const std::vector<StepStatistics>> replicates);

/// Structural invariants of persons, kinship, partnerships and housing.
/// Returns one message per violation (empty when the state is consistent).
std::vector<std::string> check_invariants(const World& world);

/// Checks that the logged events match the corresponding temporal
/// sub-populations (e.g. deaths = just(!alive)).
std::vector<std::string> check_event_log(const World& world, const StepSnapshot& prev, const StepEventLog& log);

/// One exported person (see export_population for the line format).
struct PersonRecord {
    std::uint32_t id = 0;
    Gender gender = Gender::male;
    std::int64_t age_steps = 0;
    std::int64_t birth_step = 0;
    bool alive = true;
    MaritalStatus status = MaritalStatus::single;
    std::optional<std::uint32_t> partner;
    std::optional<std::uint32_t> father;
    std::optional<std::uint32_t> mother;
    std::vector<std::uint32_t> children;
    /// nullopt for the grave.
    std::optional<std::uint32_t> house;
    std::optional<TownCoord> town;

    friend bool operator==(const PersonRecord&, const PersonRecord&) = default;
};

struct PopulationExport {
    int steps_per_year = 365;
    std::int64_t step = 0;
    std::vector<PersonRecord> persons;
};

PopulationExport snapshot_population(const World& world);
/// Writes a header comment, a column line, then one comma-separated person per line.
void export_population(const World& world, std::ostream& out);
void export_population(const World& world, const std::filesystem::path& path);
PopulationExport import_population(std::istream& in);

/// Drives one run: initial state, then the fixed-step event loop.
class Simulation {
public:
    Simulation(SimulationConfig config, ModelParameters params, DataTables tables,
               DensityMap density = DensityMap::uk_default());

    const World& world() const { return world_; }
    const SimulationConfig& config() const { return config_; }
    const InitReport& init_report() const { return init_report_; }
    const StepEventLog& last_log() const { return log_; }
    const StepSnapshot& previous() const { return prev_; }

    std::int64_t steps_done() const { return steps_done_; }
    std::int64_t total_steps() const { return config_.step_count(); }
    bool done() const { return steps_done_ >= total_steps(); }
    double time() const { return config_.t0 + config_.clock.years(steps_done_); }

    /// Statistics of the current state with the last step's event counts.
    StepStatistics statistics() const;

    /// Advances one step. In audit mode throws std::runtime_error when an
    /// invariant or event-log check fails.
    void step();

    /// Runs to tFinal; returns the initial row plus every statsEvery-th step.
    std::vector<StepStatistics> run();

private:
    void audit_step(std::size_t alive_before, std::size_t houses_before) const;

    SimulationConfig config_;
    ModelParameters params_;
    DataTables tables_;
    Rng rng_;
    InitReport init_report_;
    World world_;
    StepSnapshot prev_;
    StepEventLog log_;
    std::int64_t steps_done_ = 0;
};

struct SimulationResult {
    std::vector<StepStatistics> statistics;
    World final_state;
};

SimulationResult run_simulation(const SimulationConfig& config, const ModelParameters& params,
                                const DataTables& tables, const DensityMap& density = DensityMap::uk_default());

} // namespace minidemo
