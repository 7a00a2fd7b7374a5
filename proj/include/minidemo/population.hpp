#pragma once

#include "minidemo/ids.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace minidemo {

class Space;

enum class Gender : std::uint8_t { male, female };
enum class MaritalStatus : std::uint8_t { single, married, divorced, widowed };
enum class UnwedReason : std::uint8_t { divorce, partner_death };

std::string_view to_string(Gender g);
std::string_view to_string(MaritalStatus s);

struct Person {
    PersonId id;
    Gender gender = Gender::male;
    /// Age in whole simulation steps; years = age_steps / steps_per_year.
    std::int64_t age_steps = 0;
    /// Step index at which age was zero. Negative for persons born before t0.
    std::int64_t birth_step = 0;
    bool alive = true;
    MaritalStatus status = MaritalStatus::single;
    std::optional<PersonId> partner;
    std::optional<PersonId> father;
    std::optional<PersonId> mother;
    /// In birth order (ascending id).
    std::vector<PersonId> children;
    HouseRef house = HouseRef::none();

    bool is_male() const { return gender == Gender::male; }
    bool is_female() const { return gender == Gender::female; }
    bool is_married() const { return status == MaritalStatus::married; }
};

/// Owns every person ever created. Dead persons stay as tombstones so that
/// kinship links keep resolving. Occupancy of houses is mirrored in Space;
/// all mutators that touch housing take the Space to keep both sides in sync.
class PopulationStore {
public:
    explicit PopulationStore(int steps_per_year);

    int steps_per_year() const { return steps_per_year_; }
    /// Number of completed steps (advanced by age_all_alive()).
    std::int64_t current_step() const { return step_; }

    std::size_t size() const { return persons_.size(); }
    bool contains(PersonId id) const { return id.value < persons_.size(); }
    const Person& at(PersonId id) const;
    const Person& operator[](PersonId id) const { return persons_[id.value]; }
    std::span<const Person> persons() const { return persons_; }

    double age_years(PersonId id) const;
    std::size_t alive_count() const;

    /// Adds a living, single person to `house`. Parents, if given, must exist
    /// and have the right genders.
    PersonId spawn_person(Space& space, Gender gender, std::int64_t age_steps,
                          std::optional<PersonId> father, std::optional<PersonId> mother,
                          HouseRef house);

    /// Initialization-only: adds a person with no house yet.
    PersonId spawn_unhoused(Gender gender, std::int64_t age_steps);

    /// Initialization-only: links a parentless person to a couple.
    void set_parents(PersonId child, PersonId father, PersonId mother);

    void wed(PersonId a, PersonId b);
    void unwed(PersonId a, UnwedReason reason);
    void kill(Space& space, PersonId a);

    /// Moves a living person into `house` (a no-op if already there).
    void move(Space& space, PersonId id, HouseRef house);

    /// Advances the clock by one step and ages every living person.
    void age_all_alive();

private:
    Person& mut(PersonId id);
    void check_parent(std::optional<PersonId> parent, Gender expected, std::int64_t child_birth) const;

    int steps_per_year_;
    std::int64_t step_ = 0;
    std::vector<Person> persons_;
};

} // namespace minidemo
