#pragma once

#include "minidemo/stochastics.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace minidemo {

/// Model rates and sizes. Defaults are the model's ad-hoc, uncalibrated values.
struct ModelParameters {
    double basicDivorceRate = 0.06;
    double baseDieRate = 0.0001;
    double basicMaleMarriageRate = 0.7;
    double femaleAgeDieProb = 0.00019;
    double femaleAgeScaling = 15.5;
    int initialPop = 10000;
    double maleAgeDieProb = 0.00021;
    double maleAgeScaling = 14.0;
    int maxNumMarrCand = 100;
    double startMarriedRate = 0.8;

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;
};

/// Yearly fertility rates for women aged 17..51 in calendar years 1951..2050.
class FertilityTable {
public:
    static constexpr int kMinAge = 17;
    static constexpr int kMaxAge = 51;
    static constexpr int kFirstYear = 1951;
    static constexpr int kLastYear = 2050;
    static constexpr int kAges = kMaxAge - kMinAge + 1;
    static constexpr int kYears = kLastYear - kFirstYear + 1;
    static constexpr const char* kHeader = "ages 17..51 years 1951..2050";

    /// All-zero table.
    FertilityTable();

    /// Gaussian age profile peaking at 0.25 at age 29 (sigma 5 years),
    /// identical for every year. Not observed data.
    static FertilityTable synthetic();

    static FertilityTable parse(std::istream& in);
    static FertilityTable load(const std::filesystem::path& path);
    void write(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;

    /// Rate for whole-year age and calendar year; 0 outside the table.
    double rate(int age, int year) const;
    void set(int age, int year, double value);

    friend bool operator==(const FertilityTable&, const FertilityTable&) = default;

private:
    std::vector<double> rates_;  // age-major, kAges x kYears
};

/// "synthetic" or a table file path.
FertilityTable load_fertility_table(const std::string& source);

struct DataTables {
    /// Indexed 1..16 by ceil(age / 10); stored 0-based.
    std::array<double, 16> divorceModifierByDecade{0, 1.0, 0.9, 0.5, 0.4, 0.2, 0.1, 0.03,
                                                   0.01, 0.001, 0.001, 0.001, 0, 0, 0, 0};
    std::array<double, 16> maleMarriageModifierByDecade{0, 0.16, 0.5, 1.0, 0.8, 0.7, 0.66, 0.5,
                                                        0.4, 0.2, 0.1, 0.05, 0.01, 0, 0, 0};
    FertilityTable fertility = FertilityTable::synthetic();

    void validate() const;
};

/// 1-based decade index ceil(age / 10), clamped to [1, 16].
int decade_index(double age_years);

enum class EventKind : std::uint8_t { ageing, deaths, births, divorces, marriages };

std::string to_string(EventKind kind);
EventKind parse_event_kind(const std::string& text);

struct SimulationConfig {
    int t0 = 2020;
    int tFinal = 2030;
    ClockSpec clock = ClockSpec::daily();
    std::uint64_t seed = 0;
    /// Ageing must come first; any subset of the other events may follow.
    std::vector<EventKind> eventOrder{EventKind::ageing, EventKind::deaths, EventKind::births,
                                      EventKind::divorces, EventKind::marriages};
    std::string outputDir = "out";
    /// "synthetic" or a path to a fertility table file.
    std::string fertility = "synthetic";
    /// Empty for the built-in map, else a path to a density map file.
    std::string densityMap;
    int townGridSize = 25;
    double maxInitialAge = 110.0;
    /// Emit statistics every k-th step.
    int statsEvery = 1;
    bool audit = false;

    std::int64_t step_count() const {
        return static_cast<std::int64_t>(tFinal - t0) * clock.steps_per_year();
    }
    void validate() const;
};

/// Contents of a key = value configuration file.
struct RunConfig {
    SimulationConfig simulation;
    ModelParameters parameters;
};

/// Reads key = value lines ('#' starts a comment). Keys are the field names
/// of ModelParameters and SimulationConfig; basicDeathRate, femaleAgeDieRate
/// and maleAgeDieRate are accepted as aliases. Unknown keys are rejected.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Applies one key/value pair; throws std::invalid_argument on unknown keys.
void apply_config_value(RunConfig& config, const std::string& key, const std::string& value);

void write_config(std::ostream& out, const RunConfig& config);

} // namespace minidemo
