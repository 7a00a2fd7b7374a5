#include "minidemo/space.hpp"

#include "minidemo/population.hpp"
#include "minidemo/stochastics.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace minidemo {

namespace {

constexpr std::size_t kNotEmpty = std::numeric_limits<std::size_t>::max();

// clang-format off
constexpr std::array<double, kTownCount> kUkDensity = {
    0.0, 0.1, 0.2, 0.1, 0.0, 0.0, 0.0, 0.0,
    0.1, 0.1, 0.2, 0.2, 0.3, 0.0, 0.0, 0.0,
    0.0, 0.2, 0.2, 0.3, 0.0, 0.0, 0.0, 0.0,
    0.0, 0.2, 1.0, 0.5, 0.0, 0.0, 0.0, 0.0,
    0.4, 0.0, 0.2, 0.2, 0.4, 0.0, 0.0, 0.0,
    0.6, 0.0, 0.0, 0.3, 0.8, 0.2, 0.0, 0.0,
    0.0, 0.0, 0.0, 0.6, 0.8, 0.4, 0.0, 0.0,
    0.0, 0.0, 0.2, 1.0, 0.8, 0.6, 0.1, 0.0,
    0.0, 0.0, 0.1, 0.2, 1.0, 0.6, 0.3, 0.4,
    0.0, 0.0, 0.5, 0.7, 0.5, 1.0, 1.0, 0.0,
    0.0, 0.0, 0.2, 0.4, 0.6, 1.0, 1.0, 0.0,
    0.0, 0.2, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0,
};
// clang-format on

} // namespace

DensityMap DensityMap::uk_default() {
    DensityMap map;
    map.cells_ = kUkDensity;
    return map;
}

DensityMap DensityMap::parse(std::istream& in) {
    DensityMap map;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        if (row == kGridRows)
            throw std::runtime_error("density map: more than 12 rows");
        std::istringstream fields(line);
        double value = 0.0;
        int column = 0;
        while (fields >> value) {
            if (column == kGridColumns)
                throw std::runtime_error("density map: row " + std::to_string(row + 1) +
                                         " has more than 8 values");
            map.set(row + 1, column + 1, value);
            ++column;
        }
        if (!fields.eof() || column != kGridColumns)
            throw std::runtime_error("density map: row " + std::to_string(row + 1) +
                                     " must hold 8 decimals");
        ++row;
    }
    if (row != kGridRows)
        throw std::runtime_error("density map: expected 12 rows, found " + std::to_string(row));
    return map;
}

DensityMap DensityMap::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open density map '" + path.string() + "'");
    return parse(in);
}

void DensityMap::set(int x, int y, double value) {
    if (x < 1 || x > kGridRows || y < 1 || y > kGridColumns)
        throw std::out_of_range("density map coordinate outside 12x8 grid");
    if (!(value >= 0.0 && value <= 1.0))
        throw std::invalid_argument("density values must lie in [0, 1]");
    cells_[town_at(x, y).value] = value;
}

int DensityMap::nonzero_count() const {
    return static_cast<int>(std::count_if(cells_.begin(), cells_.end(), [](double d) { return d > 0.0; }));
}

double DensityMap::total() const {
    double sum = 0.0;
    for (double d : cells_)
        sum += d;
    return sum;
}

Space::Space(DensityMap density, int town_grid_size)
    : density_(density), town_grid_size_(town_grid_size), by_town_(kTownCount), empty_by_town_(kTownCount) {
    if (town_grid_size < 1)
        throw std::invalid_argument("town grid size must be positive");
}

std::vector<TownId> Space::inhabitable_towns() const {
    std::vector<TownId> towns;
    for (std::uint16_t i = 0; i < kTownCount; ++i)
        if (inhabitable(TownId{i}))
            towns.push_back(TownId{i});
    return towns;
}

const House& Space::house(HouseRef ref) const {
    if (!ref.is_house() || ref.index() >= houses_.size())
        throw std::out_of_range("house reference does not name a house");
    return houses_[ref.index()];
}

TownId Space::sample_town_weighted(Rng& rng) const {
    const auto index = weighted_index(rng, density_.cells());
    return TownId{static_cast<std::uint16_t>(index)};
}

HouseRef Space::find_or_create_empty_house(TownId town, Rng& rng) {
    if (!inhabitable(town))
        throw ContractViolation("requested a house in an uninhabitable town");
    const auto& empty = empty_by_town_[town.value];
    if (!empty.empty())
        return empty[rng.uniform_index(empty.size())];
    return create_house(town, rng);
}

HouseRef Space::create_house(TownId town, Rng& rng) {
    House h;
    h.id = HouseRef(static_cast<std::uint32_t>(houses_.size()));
    h.town = town;
    h.local_x = 1 + static_cast<int>(rng.uniform_index(town_grid_size_));
    h.local_y = 1 + static_cast<int>(rng.uniform_index(town_grid_size_));
    houses_.push_back(std::move(h));
    by_town_[town.value].push_back(houses_.back().id);
    empty_slot_.push_back(kNotEmpty);
    mark_empty(houses_.back().id);
    return houses_.back().id;
}

void Space::mark_empty(HouseRef ref) {
    auto& list = empty_by_town_[houses_[ref.index()].town.value];
    empty_slot_[ref.index()] = list.size();
    list.push_back(ref);
}

void Space::unmark_empty(HouseRef ref) {
    auto& list = empty_by_town_[houses_[ref.index()].town.value];
    const std::size_t slot = empty_slot_[ref.index()];
    const HouseRef moved = list.back();
    list[slot] = moved;
    empty_slot_[moved.index()] = slot;
    list.pop_back();
    empty_slot_[ref.index()] = kNotEmpty;
}

void Space::add_occupant(HouseRef ref, PersonId person) {
    if (!ref.is_house() || ref.index() >= houses_.size())
        throw ContractViolation("cannot occupy a non-house location");
    auto& h = houses_[ref.index()];
    if (h.occupants.empty())
        unmark_empty(ref);
    h.occupants.push_back(person);
}

void Space::remove_occupant(HouseRef ref, PersonId person) {
    auto& occupants = houses_.at(ref.index()).occupants;
    const auto it = std::find(occupants.begin(), occupants.end(), person);
    if (it == occupants.end())
        throw ContractViolation("person is not an occupant of the house");
    occupants.erase(it);
    if (occupants.empty())
        mark_empty(ref);
}

void move_person(PopulationStore& people, Space& space, PersonId person, HouseRef house) {
    people.move(space, person, house);
}

} // namespace minidemo
