#include "minidemo/population.hpp"

#include "minidemo/space.hpp"

#include <algorithm>
#include <string>

namespace minidemo {

std::string_view to_string(Gender g) {
    return g == Gender::male ? "male" : "female";
}

std::string_view to_string(MaritalStatus s) {
    switch (s) {
    case MaritalStatus::single: return "single";
    case MaritalStatus::married: return "married";
    case MaritalStatus::divorced: return "divorced";
    case MaritalStatus::widowed: return "widowed";
    }
    return "?";
}

namespace {

std::string describe(PersonId id) {
    return "person " + std::to_string(id.value);
}

} // namespace

PopulationStore::PopulationStore(int steps_per_year) : steps_per_year_(steps_per_year) {
    if (steps_per_year < 1)
        throw std::invalid_argument("steps per year must be positive");
}

const Person& PopulationStore::at(PersonId id) const {
    if (!contains(id))
        throw ContractViolation(describe(id) + " does not exist");
    return persons_[id.value];
}

Person& PopulationStore::mut(PersonId id) {
    if (!contains(id))
        throw ContractViolation(describe(id) + " does not exist");
    return persons_[id.value];
}

double PopulationStore::age_years(PersonId id) const {
    return static_cast<double>(at(id).age_steps) / steps_per_year_;
}

std::size_t PopulationStore::alive_count() const {
    std::size_t n = 0;
    for (const auto& p : persons_)
        n += p.alive ? 1 : 0;
    return n;
}

void PopulationStore::check_parent(std::optional<PersonId> parent, Gender expected,
                                   std::int64_t child_birth) const {
    if (!parent)
        return;
    if (!contains(*parent))
        throw ContractViolation("unresolved parent id " + std::to_string(parent->value));
    const Person& p = persons_[parent->value];
    if (p.gender != expected)
        throw ContractViolation(describe(*parent) + " has the wrong gender for this parent role");
    if (p.birth_step >= child_birth)
        throw ContractViolation(describe(*parent) + " is not older than the child");
}

PersonId PopulationStore::spawn_person(Space& space, Gender gender, std::int64_t age_steps,
                                       std::optional<PersonId> father,
                                       std::optional<PersonId> mother, HouseRef house) {
    if (age_steps < 0)
        throw ContractViolation("negative age");
    check_parent(father, Gender::male, step_ - age_steps);
    check_parent(mother, Gender::female, step_ - age_steps);
    if (!house.is_house())
        throw ContractViolation("a living person needs a house");

    const PersonId id{static_cast<std::uint32_t>(persons_.size())};
    space.add_occupant(house, id);

    Person p;
    p.id = id;
    p.gender = gender;
    p.age_steps = age_steps;
    p.birth_step = step_ - age_steps;
    p.father = father;
    p.mother = mother;
    p.house = house;
    persons_.push_back(std::move(p));

    if (father)
        persons_[father->value].children.push_back(id);
    if (mother)
        persons_[mother->value].children.push_back(id);
    return id;
}

PersonId PopulationStore::spawn_unhoused(Gender gender, std::int64_t age_steps) {
    if (age_steps < 0)
        throw ContractViolation("negative age");
    Person p;
    p.id = PersonId{static_cast<std::uint32_t>(persons_.size())};
    p.gender = gender;
    p.age_steps = age_steps;
    p.birth_step = step_ - age_steps;
    persons_.push_back(std::move(p));
    return persons_.back().id;
}

void PopulationStore::set_parents(PersonId child, PersonId father, PersonId mother) {
    Person& c = mut(child);
    if (c.father || c.mother)
        throw ContractViolation(describe(child) + " already has parents");
    check_parent(father, Gender::male, c.birth_step);
    check_parent(mother, Gender::female, c.birth_step);
    c.father = father;
    c.mother = mother;
    // Keep children lists in ascending id order regardless of assignment order.
    for (PersonId parent : {father, mother}) {
        auto& kids = persons_[parent.value].children;
        kids.insert(std::upper_bound(kids.begin(), kids.end(), child), child);
    }
}

void PopulationStore::wed(PersonId a, PersonId b) {
    Person& pa = mut(a);
    Person& pb = mut(b);
    if (!pa.alive || !pb.alive)
        throw ContractViolation("wed: both persons must be alive");
    if (pa.gender == pb.gender)
        throw ContractViolation("wed: same gender");
    const std::int64_t adult = 18LL * steps_per_year_;
    if (pa.age_steps < adult || pb.age_steps < adult)
        throw ContractViolation("wed: underage");
    if (pa.is_married() || pb.is_married())
        throw ContractViolation("wed: already married");
    pa.status = pb.status = MaritalStatus::married;
    pa.partner = b;
    pb.partner = a;
}

void PopulationStore::unwed(PersonId a, UnwedReason reason) {
    Person& pa = mut(a);
    if (!pa.is_married() || !pa.partner)
        throw ContractViolation("unwed: " + describe(a) + " is not married");
    Person& pb = persons_[pa.partner->value];
    pa.partner.reset();
    pb.partner.reset();
    if (reason == UnwedReason::divorce) {
        pa.status = pb.status = MaritalStatus::divorced;
    } else {
        // `a` is the one who died; the partner survives as a widow(er).
        pa.status = MaritalStatus::widowed;
        pb.status = MaritalStatus::widowed;
    }
}

void PopulationStore::kill(Space& space, PersonId a) {
    Person& p = mut(a);
    if (!p.alive)
        throw ContractViolation("kill: " + describe(a) + " is already dead");
    if (p.is_married())
        unwed(a, UnwedReason::partner_death);
    if (p.house.is_house())
        space.remove_occupant(p.house, a);
    p.alive = false;
    p.house = HouseRef::grave();
}

void PopulationStore::move(Space& space, PersonId id, HouseRef house) {
    Person& p = mut(id);
    if (!p.alive)
        throw ContractViolation("move: " + describe(id) + " is dead");
    if (!house.is_house())
        throw ContractViolation("move: target is not a house");
    if (p.house == house)
        return;
    space.add_occupant(house, id);
    if (p.house.is_house())
        space.remove_occupant(p.house, id);
    p.house = house;
}

void PopulationStore::age_all_alive() {
    ++step_;
    for (auto& p : persons_)
        if (p.alive)
            ++p.age_steps;
}

} // namespace minidemo
