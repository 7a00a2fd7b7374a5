#include "minidemo/initialization.hpp"

#include "minidemo/events.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace minidemo {

std::vector<int> init_town_populations(int initial_pop, const DensityMap& density) {
    if (initial_pop < 1)
        throw std::invalid_argument("initial population must be at least 1");
    const double total = density.total();
    if (!(total > 0.0))
        throw std::invalid_argument("density map has no inhabitable town");

    std::vector<int> targets(kTownCount, 0);
    std::vector<double> remainders(kTownCount, 0.0);
    int assigned = 0;
    for (int i = 0; i < kTownCount; ++i) {
        const double quota = initial_pop * density.cells()[i] / total;
        targets[i] = static_cast<int>(std::floor(quota));
        remainders[i] = quota - targets[i];
        assigned += targets[i];
    }
    std::vector<int> order;
    for (int i = 0; i < kTownCount; ++i)
        if (density.cells()[i] > 0.0)
            order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return remainders[a] > remainders[b]; });
    for (std::size_t i = 0; assigned < initial_pop; ++i, ++assigned)
        ++targets[order[i % order.size()]];
    return targets;
}

std::vector<InitialPerson> layout_initial_population(std::span<const int> town_targets) {
    std::vector<InitialPerson> persons;
    persons.reserve(static_cast<std::size_t>(std::accumulate(town_targets.begin(), town_targets.end(), 0)));
    for (std::size_t t = 0; t < town_targets.size(); ++t)
        for (int i = 0; i < town_targets[t]; ++i)
            persons.push_back(InitialPerson{TownId{static_cast<std::uint16_t>(t)}});
    return persons;
}

void init_ages_and_genders(std::span<InitialPerson> persons, const ClockSpec& clock, Rng& rng,
                           double max_age_years) {
    for (auto& p : persons) {
        p.gender = bernoulli(rng, 0.5) ? Gender::male : Gender::female;
        p.age_steps = sample_half_normal_age_steps(rng, clock, max_age_years);
    }
}

void init_partnerships(PopulationStore& people, const ModelParameters& params, Rng& rng, InitReport& report) {
    const std::int64_t adult = 18LL * people.steps_per_year();
    std::vector<PersonId> pool;
    std::vector<PersonId> grooms;
    for (const Person& p : people.persons()) {
        if (!p.alive || p.is_married() || p.age_steps < adult)
            continue;
        if (p.is_female())
            pool.push_back(p.id);
        else if (bernoulli(rng, params.startMarriedRate))
            grooms.push_back(p.id);
    }
    shuffle(rng, std::span(grooms));
    const std::size_t n_candidates = candidate_count(params.maxNumMarrCand, pool.size());

    std::vector<double> weights;
    for (PersonId m : grooms) {
        if (pool.empty()) {
            ++report.unmatched_males;
            continue;
        }
        const std::size_t k = std::min(n_candidates, pool.size());
        partial_shuffle(rng, std::span(pool), k);
        weights.resize(k);
        const double male_age = people.age_years(m);
        for (std::size_t i = 0; i < k; ++i)
            weights[i] = age_factor(male_age, people.age_years(pool[i]));
        const std::size_t chosen = weighted_index(rng, weights);
        people.wed(m, pool[chosen]);
        pool[chosen] = pool.back();
        pool.pop_back();
        ++report.couples;
    }
}

void init_children(PopulationStore& people, Rng& rng, InitReport& report) {
    const int n = people.steps_per_year();
    const std::int64_t adult = 18LL * n;

    struct Couple {
        PersonId father;
        PersonId mother;
        std::int64_t younger_age;
        std::int64_t wife_age;
    };
    std::vector<Couple> couples;
    for (const Person& p : people.persons()) {
        if (p.alive && p.is_male() && p.is_married()) {
            const Person& wife = people[*p.partner];
            couples.push_back({p.id, wife.id, std::min(p.age_steps, wife.age_steps), wife.age_steps});
        }
    }
    std::stable_sort(couples.begin(), couples.end(),
                     [](const Couple& a, const Couple& b) { return a.younger_age > b.younger_age; });

    std::vector<PersonId> minors;
    for (const Person& p : people.persons())
        if (p.alive && p.age_steps < adult && !p.father && !p.mother)
            minors.push_back(p.id);
    std::stable_sort(minors.begin(), minors.end(),
                     [&](PersonId a, PersonId b) { return people[a].age_steps < people[b].age_steps; });

    std::vector<std::size_t> candidates;
    for (std::size_t first = 0; first < minors.size();) {
        const std::int64_t age = people[minors[first]].age_steps;
        std::size_t last = first;
        while (last < minors.size() && people[minors[last]].age_steps == age)
            ++last;

        // Both spouses at least 18 years and 9 months older; wife under 45 + age(child).
        const double min_parent_age = static_cast<double>(age) + 18.75 * n;
        const std::int64_t wife_bound = 45LL * n + age;
        candidates.clear();
        for (std::size_t i = 0; i < couples.size() && couples[i].younger_age >= min_parent_age; ++i)
            if (couples[i].wife_age < wife_bound)
                candidates.push_back(i);

        for (std::size_t c = first; c < last; ++c) {
            const PersonId child = minors[c];
            if (!candidates.empty()) {
                const Couple& cp = couples[candidates[rng.uniform_index(candidates.size())]];
                people.set_parents(child, cp.father, cp.mother);
            } else if (!couples.empty() && couples.front().younger_age > age) {
                // Closest couple to the bound keeps the no-orphan guarantee.
                people.set_parents(child, couples.front().father, couples.front().mother);
                ++report.relaxed_children;
            } else {
                ++report.parentless_children;
            }
        }
        first = last;
    }
}

void init_housing(PopulationStore& people, Space& space, std::span<const TownId> home_towns, Rng& rng) {
    const std::int64_t adult = 18LL * people.steps_per_year();
    for (std::size_t i = 0; i < people.size(); ++i) {
        const Person& p = people[PersonId{static_cast<std::uint32_t>(i)}];
        if (!p.alive || p.house.is_house())
            continue;
        if (p.is_married()) {
            if (p.is_female())
                continue;  // housed with her husband
            const HouseRef h = space.find_or_create_empty_house(home_towns[i], rng);
            const PersonId wife = *p.partner;
            const std::vector<PersonId> kids = p.children;
            people.move(space, p.id, h);
            people.move(space, wife, h);
            for (PersonId c : kids)
                people.move(space, c, h);
            continue;
        }
        if (p.age_steps < adult && p.father)
            continue;  // housed with the parents
        people.move(space, p.id, space.find_or_create_empty_house(home_towns[i], rng));
    }
}

World initialize_world(const SimulationConfig& config, const ModelParameters& params,
                       const DensityMap& density, Rng& rng, InitReport* report) {
    params.validate();
    World world(config.clock, density, config.townGridSize);

    auto persons = layout_initial_population(init_town_populations(params.initialPop, density));
    init_ages_and_genders(persons, config.clock, rng, config.maxInitialAge);

    std::vector<TownId> home_towns;
    home_towns.reserve(persons.size());
    for (const auto& p : persons) {
        world.people.spawn_unhoused(p.gender, p.age_steps);
        home_towns.push_back(p.town);
    }

    InitReport local;
    InitReport& r = report ? *report : local;
    init_partnerships(world.people, params, rng, r);
    init_children(world.people, rng, r);
    init_housing(world.people, world.space, home_towns, rng);
    return world;
}

} // namespace minidemo
