#pragma once

#include "minidemo/events.hpp"
#include "minidemo/feature.hpp"
#include "minidemo/simulation.hpp"
#include "minidemo/world.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace minidemo::testing {

/// Hand-built worlds for scenario tests.
class Scenario {
public:
    explicit Scenario(ClockSpec clock = ClockSpec::daily(), std::uint64_t seed = 1)
        : world(clock, DensityMap::uk_default()), rng(seed) {}

    World world;
    Rng rng;

    HouseRef new_house(int x = 4, int y = 3) { return world.space.find_or_create_empty_house(town_at(x, y), rng); }

    std::int64_t steps(double years) const {
        return static_cast<std::int64_t>(std::llround(years * world.clock.steps_per_year()));
    }

    PersonId person(Gender g, double years, HouseRef house, std::optional<PersonId> father = std::nullopt,
                    std::optional<PersonId> mother = std::nullopt) {
        return world.people.spawn_person(world.space, g, steps(years), father, mother, house);
    }
    PersonId man(double years, HouseRef house) { return person(Gender::male, years, house); }
    PersonId woman(double years, HouseRef house) { return person(Gender::female, years, house); }

    StepSnapshot snapshot() const { return StepSnapshot::capture(world.people, world.space); }

    const Person& operator[](PersonId id) const { return world.people[id]; }

    void require_consistent() const {
        const auto errors = check_invariants(world);
        if (!errors.empty())
            FAIL(errors.front());
    }
};

inline double binomial_sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

} // namespace minidemo::testing
