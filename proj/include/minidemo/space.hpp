#pragma once

#include "minidemo/ids.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace minidemo {

class PopulationStore;
class Rng;

inline constexpr int kGridRows = 12;    // x: north to south
inline constexpr int kGridColumns = 8;  // y: west to east
inline constexpr int kTownCount = kGridRows * kGridColumns;

/// 1-based grid coordinates of a town.
struct TownCoord {
    int x = 1;
    int y = 1;

    friend constexpr bool operator==(TownCoord, TownCoord) = default;
};

constexpr TownCoord coord_of(TownId town) {
    return {town.value / kGridColumns + 1, town.value % kGridColumns + 1};
}

constexpr TownId town_at(int x, int y) {
    return TownId{static_cast<std::uint16_t>((x - 1) * kGridColumns + (y - 1))};
}

constexpr int manhattan_distance(TownCoord a, TownCoord b) {
    return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

inline constexpr int manhattan_distance(TownId a, TownId b) {
    return manhattan_distance(coord_of(a), coord_of(b));
}

/// 12x8 population density weights; row = x (1..12), column = y (1..8).
class DensityMap {
public:
    /// All-zero map.
    DensityMap() = default;

    /// The ad-hoc UK density map shipped with the model.
    static DensityMap uk_default();

    /// Plain text: 12 lines of 8 whitespace-separated decimals.
    static DensityMap parse(std::istream& in);
    static DensityMap load(const std::filesystem::path& path);

    double at(int x, int y) const { return cells_[town_at(x, y).value]; }
    double at(TownId town) const { return cells_[town.value]; }
    void set(int x, int y, double value);

    int nonzero_count() const;
    double total() const;
    std::span<const double> cells() const { return cells_; }

private:
    std::array<double, kTownCount> cells_{};
};

struct House {
    HouseRef id;
    TownId town;
    int local_x = 1;
    int local_y = 1;
    std::vector<PersonId> occupants;
};

/// Towns, their density weights, and the ever-growing set of houses.
class Space {
public:
    explicit Space(DensityMap density, int town_grid_size = 25);

    const DensityMap& density() const { return density_; }
    int town_grid_size() const { return town_grid_size_; }
    bool inhabitable(TownId town) const { return density_.at(town) > 0.0; }
    std::vector<TownId> inhabitable_towns() const;

    std::size_t house_count() const { return houses_.size(); }
    std::span<const House> houses() const { return houses_; }
    const House& house(HouseRef ref) const;
    TownId town_of(HouseRef ref) const { return house(ref).town; }
    std::span<const HouseRef> houses_in(TownId town) const { return by_town_[town.value]; }
    std::size_t empty_house_count(TownId town) const { return empty_by_town_[town.value].size(); }

    /// Town drawn with probability proportional to its density.
    TownId sample_town_weighted(Rng& rng) const;

    /// A uniformly chosen empty house of `town`, created at a uniform
    /// position on the town grid if none is empty.
    HouseRef find_or_create_empty_house(TownId town, Rng& rng);

    /// Occupancy bookkeeping; use PopulationStore mutators instead.
    void add_occupant(HouseRef ref, PersonId person);
    void remove_occupant(HouseRef ref, PersonId person);

private:
    HouseRef create_house(TownId town, Rng& rng);
    void mark_empty(HouseRef ref);
    void unmark_empty(HouseRef ref);

    DensityMap density_;
    int town_grid_size_;
    std::vector<House> houses_;
    std::vector<std::vector<HouseRef>> by_town_;
    std::vector<std::vector<HouseRef>> empty_by_town_;
    std::vector<std::size_t> empty_slot_;  // position in empty_by_town_, or npos
};

/// Moves a living person to another house, keeping both sides of the
/// occupancy relation consistent.
void move_person(PopulationStore& people, Space& space, PersonId person, HouseRef house);

} // namespace minidemo
