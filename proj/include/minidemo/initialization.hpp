#pragma once

#include "minidemo/parameters.hpp"
#include "minidemo/world.hpp"

#include <span>
#include <vector>

namespace minidemo {

/// Per-person attributes drawn before anyone is added to the store.
struct InitialPerson {
    TownId town;
    Gender gender = Gender::male;
    std::int64_t age_steps = 0;
};

struct InitReport {
    std::size_t couples = 0;
    /// Males selected for marriage after the eligible female pool ran out.
    std::size_t unmatched_males = 0;
    /// Children whose parents violate the age-gap bound (no couple satisfied it).
    std::size_t relaxed_children = 0;
    /// Children for whom no older couple existed at all.
    std::size_t parentless_children = 0;
};

/// Persons per town, proportional to density; sums to initial_pop exactly
/// (largest-remainder rounding, ties to the lower town index).
std::vector<int> init_town_populations(int initial_pop, const DensityMap& density);

/// One InitialPerson per target slot, towns in ascending order.
std::vector<InitialPerson> layout_initial_population(std::span<const int> town_targets);

/// Gender ~ Bernoulli(0.5), age ~ half-normal (see sample_half_normal_age_steps).
void init_ages_and_genders(std::span<InitialPerson> persons, const ClockSpec& clock, Rng& rng,
                           double max_age_years = 110.0);

/// Marries a random share of adult males to adult females picked by age preference.
void init_partnerships(PopulationStore& people, const ModelParameters& params, Rng& rng, InitReport& report);

/// Gives every minor a married couple as parents.
void init_children(PopulationStore& people, Rng& rng, InitReport& report);

/// Houses singles alone and families together in the husband's town.
/// home_towns is indexed by person id.
void init_housing(PopulationStore& people, Space& space, std::span<const TownId> home_towns, Rng& rng);

/// Builds the full initial state.
World initialize_world(const SimulationConfig& config, const ModelParameters& params,
                       const DensityMap& density, Rng& rng, InitReport* report = nullptr);

} // namespace minidemo
