#include "minidemo/events.hpp"

#include <algorithm>
#include <cmath>

namespace minidemo {

void StepEventLog::clear() {
    births.clear();
    deaths.clear();
    marriages.clear();
    divorces.clear();
    widowed.clear();
    orphan_relocations.clear();
    divorce_relocations.clear();
}

double death_probability_yearly(const ModelParameters& params, Gender gender, double age_years) {
    const bool male = gender == Gender::male;
    const double scaling = male ? params.maleAgeScaling : params.femaleAgeScaling;
    const double age_prob = male ? params.maleAgeDieProb : params.femaleAgeDieProb;
    const double p = params.baseDieRate + std::exp(age_years / scaling) * age_prob;
    return std::min(p, 1.0);
}

double divorce_probability_yearly(const ModelParameters& params, const DataTables& tables, double age_years) {
    return params.basicDivorceRate * tables.divorceModifierByDecade[decade_index(age_years) - 1];
}

double marriage_probability_yearly(const ModelParameters& params, const DataTables& tables, double age_years) {
    return params.basicMaleMarriageRate * tables.maleMarriageModifierByDecade[decade_index(age_years) - 1];
}

double age_factor(double male_age, double female_age) {
    const double diff = male_age - female_age;
    if (diff >= 5.0)
        return 1.0 / (diff - 5.0 + 1.0);
    if (diff <= -2.0)
        return -1.0 / (diff + 2.0 - 1.0);
    return 1.0;
}

double geo_factor(int town_distance) {
    return std::exp(-4.0 * town_distance);
}

double children_factor(std::size_t male_children, std::size_t female_children) {
    const auto cm = static_cast<double>(male_children);
    const auto cf = static_cast<double>(female_children);
    return std::exp(-cm) * std::exp(-cf) * std::exp(cm * cf);
}

std::size_t candidate_count(int max_num_marr_cand, std::size_t pool_size) {
    const std::size_t tenth = (pool_size + 9) / 10;
    return std::min(pool_size, std::max(static_cast<std::size_t>(max_num_marr_cand), tenth));
}

bool is_reproducible(const PopulationStore& people, PersonId woman) {
    const Person& f = people[woman];
    if (!f.alive || !f.is_female() || !f.is_married())
        return false;
    const int n = people.steps_per_year();
    if (f.age_steps >= 45LL * n)
        return false;
    if (f.children.empty())
        return true;
    const Person& youngest = people[f.children.back()];
    return people.current_step() - youngest.birth_step > n;
}

namespace {

std::vector<PersonId> alive_ids(const PopulationStore& people) {
    std::vector<PersonId> ids;
    ids.reserve(people.size());
    for (const Person& p : people.persons())
        if (p.alive)
            ids.push_back(p.id);
    return ids;
}

bool was_married(const StepSnapshot& prev, PersonId id) {
    return prev.contains(id) && prev.status(id) == MaritalStatus::married;
}

bool is_minor_orphan(const PopulationStore& people, const Person& p) {
    if (p.age_steps >= 18LL * people.steps_per_year() || !p.father || !p.mother)
        return false;
    return !people[*p.father].alive && !people[*p.mother].alive;
}

bool has_older_alive_sibling(const PopulationStore& people, const Person& p) {
    for (const auto& parent : {p.father, p.mother}) {
        if (!parent)
            continue;
        for (PersonId s : people[*parent].children) {
            const Person& sib = people[s];
            if (s == p.id || !sib.alive)
                continue;
            if (sib.age_steps > p.age_steps || (sib.age_steps == p.age_steps && s < p.id))
                return true;
        }
    }
    return false;
}

/// The person plus the co-occupants who follow them when they move house:
/// their own unmarried children and under-age orphans. Married children stay
/// with their spouse.
std::vector<PersonId> household_of(const World& world, PersonId head) {
    std::vector<PersonId> movers{head};
    const HouseRef h = world.people[head].house;
    for (PersonId o : world.space.house(h).occupants) {
        if (o == head)
            continue;
        const Person& p = world.people[o];
        const bool own_child = (p.father == head || p.mother == head) && !p.is_married();
        if (own_child || is_minor_orphan(world.people, p))
            movers.push_back(o);
    }
    return movers;
}

void merge_households(World& world, PersonId husband, PersonId wife) {
    const HouseRef hm = world.people[husband].house;
    const HouseRef hf = world.people[wife].house;
    if (hm == hf)
        return;
    const auto occupants_m = world.space.house(hm).occupants.size();
    const auto occupants_f = world.space.house(hf).occupants.size();
    const bool to_husband = occupants_m >= occupants_f;
    const auto movers = household_of(world, to_husband ? wife : husband);
    const HouseRef target = to_husband ? hm : hf;
    for (PersonId p : movers)
        world.people.move(world.space, p, target);
}

} // namespace

void ageing_step(World& world, StepContext& ctx, StepEventLog& log) {
    auto& people = world.people;
    people.age_all_alive();
    const std::int64_t adult = 18LL * people.steps_per_year();
    for (const Person& p : people.persons()) {
        if (!p.alive || p.age_steps != adult || !p.father || !p.mother)
            continue;
        if (people[*p.father].alive || people[*p.mother].alive)
            continue;
        if (!has_older_alive_sibling(people, p))
            continue;
        if (world.space.house(p.house).occupants.size() == 1)
            continue;
        log.orphan_relocations.push_back(p.id);
    }
    // Relocate after the scan so that the loop does not observe its own moves.
    for (PersonId id : log.orphan_relocations) {
        const HouseRef target = world.space.find_or_create_empty_house(world.town_of(id), ctx.rng);
        people.move(world.space, id, target);
    }
}

void deaths_step(World& world, StepContext& ctx, StepEventLog& log) {
    auto& people = world.people;
    auto order = alive_ids(people);
    shuffle(ctx.rng, std::span(order));
    for (PersonId id : order) {
        const Person& p = people[id];
        const double yearly = death_probability_yearly(ctx.params, p.gender, people.age_years(id));
        if (!bernoulli(ctx.rng, instantaneous_probability(yearly, world.clock)))
            continue;
        const auto partner = p.partner;
        people.kill(world.space, id);
        log.deaths.push_back(id);
        if (partner)
            log.widowed.push_back(*partner);
    }
    std::erase_if(log.widowed, [&](PersonId w) { return !people[w].alive; });
}

void births_step(World& world, StepContext& ctx, StepEventLog& log) {
    auto& people = world.people;
    const int year = static_cast<int>(std::floor(ctx.time));
    std::vector<PersonId> mothers;
    for (const Person& p : people.persons())
        if (p.is_female() && is_reproducible(people, p.id))
            mothers.push_back(p.id);

    for (PersonId m : mothers) {
        const int age = static_cast<int>(std::floor(people.age_years(m)));
        const double yearly = ctx.tables.fertility.rate(age, year);
        if (!bernoulli(ctx.rng, instantaneous_probability(yearly, world.clock)))
            continue;
        const Gender g = bernoulli(ctx.rng, 0.5) ? Gender::male : Gender::female;
        const Person& mother = people[m];
        const PersonId baby =
            people.spawn_person(world.space, g, 0, mother.partner, m, mother.house);
        log.births.push_back(baby);
    }
}

void divorces_step(World& world, StepContext& ctx, StepEventLog& log) {
    auto& people = world.people;
    std::vector<PersonId> husbands;
    for (const Person& p : people.persons())
        if (p.alive && p.is_male() && p.is_married() && was_married(ctx.prev, p.id))
            husbands.push_back(p.id);
    shuffle(ctx.rng, std::span(husbands));

    for (PersonId m : husbands) {
        const double yearly = divorce_probability_yearly(ctx.params, ctx.tables, people.age_years(m));
        if (!bernoulli(ctx.rng, instantaneous_probability(yearly, world.clock)))
            continue;
        const PersonId wife = *people[m].partner;
        people.unwed(m, UnwedReason::divorce);
        log.divorces.emplace_back(m, wife);
        const HouseRef target = world.space.find_or_create_empty_house(world.town_of(m), ctx.rng);
        people.move(world.space, m, target);
        log.divorce_relocations.push_back(m);
    }
}

void marriages_step(World& world, StepContext& ctx, StepEventLog& log) {
    auto& people = world.people;
    const std::int64_t adult = 18LL * people.steps_per_year();
    auto eligible = [&](const Person& p) {
        if (!p.alive || p.is_married() || p.age_steps < adult)
            return false;
        // Partnerships that ended this step, and persons who came of age
        // this step, wait until the next step.
        if (was_married(ctx.prev, p.id))
            return false;
        return !(ctx.prev.contains(p.id) && ctx.prev.age_steps(p.id) < adult);
    };

    std::vector<PersonId> men;
    std::vector<PersonId> pool;
    for (const Person& p : people.persons()) {
        if (!eligible(p))
            continue;
        (p.is_female() ? pool : men).push_back(p.id);
    }
    shuffle(ctx.rng, std::span(men));
    const std::size_t n_candidates = candidate_count(ctx.params.maxNumMarrCand, pool.size());

    std::vector<double> weights;
    for (PersonId m : men) {
        const double yearly = marriage_probability_yearly(ctx.params, ctx.tables, people.age_years(m));
        if (!bernoulli(ctx.rng, instantaneous_probability(yearly, world.clock)))
            continue;
        if (pool.empty())
            break;
        const std::size_t k = std::min(n_candidates, pool.size());
        partial_shuffle(ctx.rng, std::span(pool), k);

        const Person& man = people[m];
        const TownId home = world.town_of(m);
        weights.assign(k, 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const Person& woman = people[pool[i]];
            weights[i] = geo_factor(manhattan_distance(home, world.town_of(woman.id))) *
                         children_factor(man.children.size(), woman.children.size()) *
                         age_factor(people.age_years(m), people.age_years(woman.id));
            total += weights[i];
        }
        if (!(total > 0.0))
            continue;
        const std::size_t chosen = weighted_index(ctx.rng, weights);
        const PersonId wife = pool[chosen];
        pool[chosen] = pool.back();
        pool.pop_back();

        people.wed(m, wife);
        log.marriages.emplace_back(m, wife);
        merge_households(world, m, wife);
    }
}

void apply_event(EventKind kind, World& world, StepContext& ctx, StepEventLog& log) {
    switch (kind) {
    case EventKind::ageing: ageing_step(world, ctx, log); break;
    case EventKind::deaths: deaths_step(world, ctx, log); break;
    case EventKind::births: births_step(world, ctx, log); break;
    case EventKind::divorces: divorces_step(world, ctx, log); break;
    case EventKind::marriages: marriages_step(world, ctx, log); break;
    }
}

} // namespace minidemo
