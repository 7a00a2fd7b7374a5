#pragma once

#include "minidemo/feature.hpp"
#include "minidemo/parameters.hpp"
#include "minidemo/world.hpp"

#include <utility>
#include <vector>

namespace minidemo {

/// What happened during one step. Counts are the list lengths.
struct StepEventLog {
    std::vector<PersonId> births;
    std::vector<PersonId> deaths;
    /// (husband, wife)
    std::vector<std::pair<PersonId, PersonId>> marriages;
    std::vector<std::pair<PersonId, PersonId>> divorces;
    /// Survivors whose partner died this step (and who are still alive).
    std::vector<PersonId> widowed;
    std::vector<PersonId> orphan_relocations;
    std::vector<PersonId> divorce_relocations;

    void clear();
};

// Yearly hazards and matching weights.

double death_probability_yearly(const ModelParameters& params, Gender gender, double age_years);
double divorce_probability_yearly(const ModelParameters& params, const DataTables& tables, double age_years);
double marriage_probability_yearly(const ModelParameters& params, const DataTables& tables, double age_years);

/// Preference for the age difference (male minus female, in years).
double age_factor(double male_age, double female_age);
double geo_factor(int town_distance);
double children_factor(std::size_t male_children, std::size_t female_children);

/// Shared inputs of the per-step events.
struct StepContext {
    const ModelParameters& params;
    const DataTables& tables;
    const StepSnapshot& prev;
    /// Calendar time at the start of the step, in decimal years.
    double time;
    Rng& rng;
};

void ageing_step(World& world, StepContext& ctx, StepEventLog& log);
void deaths_step(World& world, StepContext& ctx, StepEventLog& log);
void births_step(World& world, StepContext& ctx, StepEventLog& log);
void divorces_step(World& world, StepContext& ctx, StepEventLog& log);
void marriages_step(World& world, StepContext& ctx, StepEventLog& log);

void apply_event(EventKind kind, World& world, StepContext& ctx, StepEventLog& log);

/// Married women under 45 whose youngest child, if any, is older than one.
bool is_reproducible(const PopulationStore& people, PersonId woman);

/// Number of candidate partners drawn per marriage: max(floor, ceil(pool/10)),
/// capped at the pool size.
std::size_t candidate_count(int max_num_marr_cand, std::size_t pool_size);

} // namespace minidemo
