#include "minidemo/population.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <set>

using namespace minidemo;
using minidemo::testing::Scenario;

TEST_CASE("spawn_person") {
    Scenario s;
    const HouseRef h = s.new_house();
    const PersonId dad = s.man(30, h);
    const PersonId mum = s.woman(28, h);

    SUBCASE("neonate joins the parents' children and the house") {
        const PersonId baby = s.person(Gender::female, 0, h, dad, mum);
        const Person& b = s[baby];
        CHECK(b.alive);
        CHECK(b.age_steps == 0);
        CHECK(b.status == MaritalStatus::single);
        CHECK(b.house == h);
        CHECK(s[dad].children == std::vector<PersonId>{baby});
        CHECK(s[mum].children == std::vector<PersonId>{baby});
        const auto& occ = s.world.space.house(h).occupants;
        CHECK(std::find(occ.begin(), occ.end(), baby) != occ.end());
        s.require_consistent();
    }
    SUBCASE("adult without kin") {
        const Person& p = s[dad];
        CHECK(p.is_male());
        CHECK(s.world.people.age_years(dad) == 30.0);
        CHECK_FALSE(p.father);
        CHECK_FALSE(p.mother);
        CHECK(p.children.empty());
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(s.person(Gender::male, 1, h, PersonId{99}, mum), ContractViolation);
        CHECK_THROWS_AS(s.person(Gender::male, 1, h, mum, dad), ContractViolation);
        CHECK_THROWS_AS(s.person(Gender::male, 40, h, dad, mum), ContractViolation);  // older than parents
        CHECK_THROWS_AS(s.world.people.spawn_person(s.world.space, Gender::male, -1, {}, {}, h), ContractViolation);
        CHECK_THROWS_AS(s.world.people.spawn_person(s.world.space, Gender::male, 1, {}, {}, HouseRef::grave()),
                        ContractViolation);
    }
}

TEST_CASE("ids are distinct and strictly increasing") {
    Scenario s;
    const HouseRef h = s.new_house();
    std::set<std::uint32_t> seen;
    std::uint32_t last = 0;
    for (int i = 0; i < 100'000; ++i) {
        const PersonId id = s.person(i % 2 ? Gender::male : Gender::female, 20, h);
        if (i > 0)
            CHECK_MESSAGE(id.value > last, "ids must increase");
        last = id.value;
        seen.insert(id.value);
    }
    CHECK(seen.size() == 100'000);
}

TEST_CASE("wed and unwed") {
    Scenario s;
    const HouseRef h = s.new_house();
    const PersonId m = s.man(30, h);
    const PersonId f = s.woman(28, h);
    auto& people = s.world.people;

    people.wed(m, f);
    CHECK(s[m].is_married());
    CHECK(s[f].is_married());
    CHECK(s[m].partner == f);
    CHECK(s[f].partner == m);
    s.require_consistent();

    SUBCASE("already married") {
        const PersonId other = s.woman(25, h);
        CHECK_THROWS_AS(people.wed(m, other), ContractViolation);
    }
    SUBCASE("divorce") {
        people.unwed(m, UnwedReason::divorce);
        CHECK(s[m].status == MaritalStatus::divorced);
        CHECK(s[f].status == MaritalStatus::divorced);
        CHECK_FALSE(s[m].partner);
        CHECK_FALSE(s[f].partner);
        // Both are eligible again: unmarried adults.
        const auto snap = s.snapshot();
        const EvalContext ctx{people, s.world.space, snap};
        const auto eligible = Feature::is_single() & Feature::age(AgeComparison::greater_equal, 18);
        CHECK(eval(eligible, m, ctx));
        CHECK(eval(eligible, f, ctx));
        CHECK_THROWS_AS(people.unwed(m, UnwedReason::divorce), ContractViolation);
        s.require_consistent();
    }
    SUBCASE("round trip restores non-married state") {
        people.unwed(f, UnwedReason::divorce);
        CHECK_FALSE(s[m].is_married());
        CHECK_FALSE(s[f].is_married());
        people.wed(m, f);
        CHECK(s[f].partner == m);
    }
}

TEST_CASE("wed preconditions") {
    Scenario s;
    const HouseRef h = s.new_house();
    const PersonId a = s.man(30, h);
    const PersonId b = s.man(31, h);
    const PersonId teen = s.woman(17.9, h);
    CHECK_THROWS_AS(s.world.people.wed(a, b), ContractViolation);
    CHECK_THROWS_AS(s.world.people.wed(a, teen), ContractViolation);
}

TEST_CASE("kill") {
    Scenario s;
    const HouseRef h = s.new_house();
    const PersonId m = s.man(40, h);
    const PersonId f = s.woman(38, h);
    s.world.people.wed(m, f);
    const PersonId kid = s.person(Gender::male, 10, h, m, f);

    SUBCASE("widow stays, the dead go to the grave") {
        s.world.people.kill(s.world.space, m);
        CHECK_FALSE(s[m].alive);
        CHECK(s[m].house.is_grave());
        CHECK(s[f].status == MaritalStatus::widowed);
        CHECK(s[f].house == h);
        CHECK_FALSE(s[f].partner);
        CHECK(s.world.space.house(h).occupants.size() == 2);
        CHECK_THROWS_AS(s.world.people.kill(s.world.space, m), ContractViolation);
        s.require_consistent();
    }
    SUBCASE("orphaned minor keeps parent links") {
        s.world.people.kill(s.world.space, m);
        s.world.people.kill(s.world.space, f);
        CHECK(s[kid].father == m);
        CHECK(s[kid].mother == f);
        const auto snap = s.snapshot();
        const EvalContext ctx{s.world.people, s.world.space, snap};
        CHECK(eval(Feature::is_orphan() & Feature::age(AgeComparison::less, 18), kid, ctx));
        CHECK(eval(Feature::lives_alone(), kid, ctx));
        s.require_consistent();
    }
    SUBCASE("house persists when its last occupant dies") {
        const HouseRef lone = s.new_house(10, 6);
        const PersonId hermit = s.man(70, lone);
        const auto houses = s.world.space.house_count();
        s.world.people.kill(s.world.space, hermit);
        CHECK(s.world.space.house_count() == houses);
        CHECK(s.world.space.house(lone).occupants.empty());
        CHECK(s.world.space.find_or_create_empty_house(town_at(10, 6), s.rng) == lone);
    }
}

TEST_CASE("random mutator sequences keep every invariant") {
    // Hand-rolled property test: random spawn/wed/unwed/kill/move sequences.
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Scenario s(ClockSpec::monthly(), seed);
        Rng pick(seed * 7919);
        std::vector<HouseRef> houses;
        for (int i = 0; i < 5; ++i)
            houses.push_back(s.new_house());
        auto& people = s.world.people;
        for (int op = 0; op < 400; ++op) {
            const auto n = people.size();
            const auto any = [&] { return PersonId{static_cast<std::uint32_t>(pick.uniform_index(n))}; };
            switch (pick.uniform_index(6)) {
            case 0:
            case 1: {
                const Gender g = pick.uniform_index(2) ? Gender::male : Gender::female;
                std::optional<PersonId> dad, mum;
                if (n > 0) {
                    const PersonId cand = any();
                    const Person& c = people[cand];
                    if (c.is_married() && c.age_steps > 12 * 20) {
                        dad = c.is_male() ? cand : *c.partner;
                        mum = c.is_female() ? cand : *c.partner;
                    }
                }
                const auto age = dad ? 0 : static_cast<std::int64_t>(pick.uniform_index(12 * 60));
                s.world.people.spawn_person(s.world.space, g, age, dad, mum,
                                            houses[pick.uniform_index(houses.size())]);
                break;
            }
            case 2:
                if (n >= 2) {
                    const PersonId a = any();
                    const PersonId b = any();
                    try {
                        people.wed(a, b);
                    } catch (const ContractViolation&) {
                    }
                }
                break;
            case 3:
                if (n > 0) {
                    const PersonId a = any();
                    if (people[a].is_married())
                        people.unwed(a, UnwedReason::divorce);
                }
                break;
            case 4:
                if (n > 0) {
                    const PersonId a = any();
                    if (people[a].alive)
                        people.kill(s.world.space, a);
                }
                break;
            case 5:
                if (n > 0) {
                    const PersonId a = any();
                    if (people[a].alive)
                        move_person(people, s.world.space, a, houses[pick.uniform_index(houses.size())]);
                }
                break;
            }
            if (op % 10 == 0)
                people.age_all_alive();
        }
        s.require_consistent();
    }
}
