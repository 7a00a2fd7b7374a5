#pragma once

#include "minidemo/ids.hpp"
#include "minidemo/population.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace minidemo {

class Space;

/// Attributes of every person at the last step boundary. Persons created
/// after the capture are absent. Kinship predicates evaluated against the
/// snapshot use the live kinship graph restricted to persons that existed.
class StepSnapshot {
public:
    static StepSnapshot capture(const PopulationStore& people, const Space& space);

    std::int64_t step() const { return step_; }
    std::size_t size() const { return alive_.size(); }
    bool contains(PersonId id) const { return id.value < alive_.size(); }

    bool alive(PersonId id) const { return alive_[id.value] != 0; }
    std::int64_t age_steps(PersonId id) const { return age_steps_[id.value]; }
    MaritalStatus status(PersonId id) const { return status_[id.value]; }
    HouseRef house(PersonId id) const { return house_[id.value]; }
    /// Town of the house; meaningless for persons without a house.
    TownId town(PersonId id) const { return town_[id.value]; }
    std::uint32_t occupancy(HouseRef house) const;

private:
    std::int64_t step_ = 0;
    std::vector<std::uint8_t> alive_;
    std::vector<std::int64_t> age_steps_;
    std::vector<MaritalStatus> status_;
    std::vector<HouseRef> house_;
    std::vector<TownId> town_;
    std::vector<std::uint32_t> occupancy_;
};

/// Previous location of a person, or nullopt if absent from the snapshot
/// or not housed then.
std::optional<HouseRef> previous_house(PersonId id, const StepSnapshot& prev);
std::optional<TownId> previous_town(PersonId id, const StepSnapshot& prev);

enum class AgeComparison : std::uint8_t { less, less_equal, equal, greater_equal, greater };

/// Immutable predicate over persons, composed from elementary features with
/// set-algebra operators and the temporal operators just() and pre().
class Feature {
public:
    // Elementary features.
    static Feature always();
    static Feature never();
    static Feature is_alive();
    static Feature is_male();
    static Feature is_female();
    static Feature is_married();
    /// Not married (single, divorced or widowed).
    static Feature is_single();
    static Feature is_divorced();
    static Feature is_widowed();
    static Feature has_children();
    static Feature has_alive_children();
    static Feature has_alive_sibling();
    static Feature has_older_alive_sibling();
    /// Both parents recorded and dead.
    static Feature is_orphan();
    static Feature lives_alone();
    static Feature age(AgeComparison cmp, double years);
    /// The most recently born child is older than `years`.
    static Feature youngest_child_older_than(double years);
    static Feature in_town(TownId town);

    // Operators.
    friend Feature operator|(const Feature& a, const Feature& b);  // union
    friend Feature operator&(const Feature& a, const Feature& b);  // intersection
    friend Feature operator-(const Feature& a, const Feature& b);  // difference
    friend Feature operator!(const Feature& a);                    // negation

    /// f(g): g restricted to persons satisfying f; evaluated lazily.
    Feature operator()(const Feature& g) const;

    static Feature just(const Feature& f);
    static Feature pre(const Feature& f);

    struct Node;
    const Node& node() const { return *node_; }

private:
    explicit Feature(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// Read-only view used for evaluation: current state plus previous snapshot.
struct EvalContext {
    const PopulationStore& now;
    const Space& space;
    const StepSnapshot& prev;
};

bool eval(const Feature& f, PersonId p, const EvalContext& ctx);
bool eval_compose(const Feature& f, const Feature& g, PersonId p, const EvalContext& ctx);
bool eval_just(const Feature& f, PersonId p, const EvalContext& ctx);
bool eval_pre(const Feature& f, PersonId p, const EvalContext& ctx);

/// Persons satisfying f, in ascending id order.
std::vector<PersonId> subpopulation(const Feature& f, const EvalContext& ctx);

} // namespace minidemo
