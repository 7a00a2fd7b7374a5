#pragma once

#include "minidemo/population.hpp"
#include "minidemo/space.hpp"
#include "minidemo/stochastics.hpp"

namespace minidemo {

/// Complete mutable model state: persons plus space, under one clock.
struct World {
    World(ClockSpec clock_spec, DensityMap density, int town_grid_size = 25)
        : clock(clock_spec), space(std::move(density), town_grid_size), people(clock_spec.steps_per_year()) {}

    ClockSpec clock;
    Space space;
    PopulationStore people;

    TownId town_of(PersonId id) const { return space.town_of(people[id].house); }
};

} // namespace minidemo
