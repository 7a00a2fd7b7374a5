#include "minidemo/feature.hpp"

#include "minidemo/space.hpp"

#include <algorithm>
#include <variant>

namespace minidemo {

enum class Elementary : std::uint8_t {
    always,
    never,
    alive,
    male,
    female,
    married,
    single,
    divorced,
    widowed,
    has_children,
    has_alive_children,
    has_alive_sibling,
    has_older_alive_sibling,
    orphan,
    lives_alone,
};

struct AgeTest {
    AgeComparison cmp;
    double years;
};

struct YoungestChildOlder {
    double years;
};

struct InTown {
    TownId town;
};

enum class Op : std::uint8_t { union_, intersection, difference, negation, composition, just, pre };

struct Operator {
    Op op;
    std::shared_ptr<const Feature::Node> lhs;
    std::shared_ptr<const Feature::Node> rhs;  // null for unary operators
};

struct Feature::Node {
    std::variant<Elementary, AgeTest, YoungestChildOlder, InTown, Operator> content;
};

StepSnapshot StepSnapshot::capture(const PopulationStore& people, const Space& space) {
    StepSnapshot snap;
    snap.step_ = people.current_step();
    const auto n = people.size();
    snap.alive_.resize(n);
    snap.age_steps_.resize(n);
    snap.status_.resize(n);
    snap.house_.resize(n);
    snap.town_.resize(n);
    for (const Person& p : people.persons()) {
        const auto i = p.id.value;
        snap.alive_[i] = p.alive ? 1 : 0;
        snap.age_steps_[i] = p.age_steps;
        snap.status_[i] = p.status;
        snap.house_[i] = p.house;
        snap.town_[i] = p.house.is_house() ? space.town_of(p.house) : TownId{};
    }
    snap.occupancy_.resize(space.house_count());
    for (const House& h : space.houses())
        snap.occupancy_[h.id.index()] = static_cast<std::uint32_t>(h.occupants.size());
    return snap;
}

std::uint32_t StepSnapshot::occupancy(HouseRef house) const {
    if (!house.is_house() || house.index() >= occupancy_.size())
        return 0;
    return occupancy_[house.index()];
}

std::optional<HouseRef> previous_house(PersonId id, const StepSnapshot& prev) {
    if (!prev.contains(id) || !prev.house(id).is_house())
        return std::nullopt;
    return prev.house(id);
}

std::optional<TownId> previous_town(PersonId id, const StepSnapshot& prev) {
    if (!previous_house(id, prev))
        return std::nullopt;
    return prev.town(id);
}

namespace {

using NodePtr = std::shared_ptr<const Feature::Node>;

enum class Frame : std::uint8_t { now, prev };

/// Uniform attribute access over the live store and the snapshot.
class Accessor {
public:
    Accessor(const EvalContext& ctx, Frame frame) : ctx_(ctx), frame_(frame) {}

    bool exists(PersonId id) const {
        return frame_ == Frame::now ? ctx_.now.contains(id) : ctx_.prev.contains(id);
    }
    bool alive(PersonId id) const {
        return frame_ == Frame::now ? ctx_.now[id].alive : ctx_.prev.alive(id);
    }
    std::int64_t age_steps(PersonId id) const {
        return frame_ == Frame::now ? ctx_.now[id].age_steps : ctx_.prev.age_steps(id);
    }
    MaritalStatus status(PersonId id) const {
        return frame_ == Frame::now ? ctx_.now[id].status : ctx_.prev.status(id);
    }
    HouseRef house(PersonId id) const {
        return frame_ == Frame::now ? ctx_.now[id].house : ctx_.prev.house(id);
    }
    TownId town(PersonId id) const {
        return frame_ == Frame::now ? ctx_.space.town_of(ctx_.now[id].house) : ctx_.prev.town(id);
    }
    std::size_t occupancy(HouseRef h) const {
        return frame_ == Frame::now ? ctx_.space.house(h).occupants.size() : ctx_.prev.occupancy(h);
    }
    std::int64_t step() const {
        return frame_ == Frame::now ? ctx_.now.current_step() : ctx_.prev.step();
    }
    const Person& person(PersonId id) const { return ctx_.now[id]; }

    /// Calls fn(sibling) for each existing person sharing a parent with p.
    template <class Fn>
    bool any_sibling(const Person& p, Fn&& fn) const {
        for (const auto& parent : {p.father, p.mother}) {
            if (!parent)
                continue;
            for (PersonId s : ctx_.now[*parent].children)
                if (s != p.id && exists(s) && fn(s))
                    return true;
        }
        return false;
    }

private:
    const EvalContext& ctx_;
    Frame frame_;
};

bool compare_age(std::int64_t age_steps, int steps_per_year, AgeComparison cmp, double years) {
    const double age = static_cast<double>(age_steps);
    const double bound = years * steps_per_year;
    switch (cmp) {
    case AgeComparison::less: return age < bound;
    case AgeComparison::less_equal: return age <= bound;
    case AgeComparison::equal: return age == bound;
    case AgeComparison::greater_equal: return age >= bound;
    case AgeComparison::greater: return age > bound;
    }
    return false;
}

bool eval_elementary(Elementary e, PersonId id, const Accessor& at) {
    const Person& p = at.person(id);
    switch (e) {
    case Elementary::always: return true;
    case Elementary::never: return false;
    case Elementary::alive: return at.alive(id);
    case Elementary::male: return p.is_male();
    case Elementary::female: return p.is_female();
    case Elementary::married: return at.status(id) == MaritalStatus::married;
    case Elementary::single: return at.status(id) != MaritalStatus::married;
    case Elementary::divorced: return at.status(id) == MaritalStatus::divorced;
    case Elementary::widowed: return at.status(id) == MaritalStatus::widowed;
    case Elementary::has_children:
        return std::any_of(p.children.begin(), p.children.end(), [&](PersonId c) { return at.exists(c); });
    case Elementary::has_alive_children:
        return std::any_of(p.children.begin(), p.children.end(),
                           [&](PersonId c) { return at.exists(c) && at.alive(c); });
    case Elementary::has_alive_sibling:
        return at.any_sibling(p, [&](PersonId s) { return at.alive(s); });
    case Elementary::has_older_alive_sibling: {
        const auto own = at.age_steps(id);
        return at.any_sibling(p, [&](PersonId s) {
            const auto other = at.age_steps(s);
            return at.alive(s) && (other > own || (other == own && s < id));
        });
    }
    case Elementary::orphan:
        return p.father && p.mother && at.exists(*p.father) && at.exists(*p.mother) &&
               !at.alive(*p.father) && !at.alive(*p.mother);
    case Elementary::lives_alone: {
        const HouseRef h = at.house(id);
        return h.is_house() && at.occupancy(h) == 1;
    }
    }
    return false;
}

bool eval_node(const Feature::Node& node, PersonId id, const EvalContext& ctx, Frame frame);

bool eval_previous(const Feature::Node& node, PersonId id, const EvalContext& ctx) {
    return ctx.prev.contains(id) && eval_node(node, id, ctx, Frame::prev);
}

bool eval_node(const Feature::Node& node, PersonId id, const EvalContext& ctx, Frame frame) {
    const Accessor at(ctx, frame);
    return std::visit(
        [&](const auto& c) -> bool {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Elementary>) {
                return eval_elementary(c, id, at);
            } else if constexpr (std::is_same_v<T, AgeTest>) {
                return compare_age(at.age_steps(id), ctx.now.steps_per_year(), c.cmp, c.years);
            } else if constexpr (std::is_same_v<T, YoungestChildOlder>) {
                const Person& p = at.person(id);
                for (auto it = p.children.rbegin(); it != p.children.rend(); ++it) {
                    if (!at.exists(*it))
                        continue;
                    const auto since_birth = at.step() - ctx.now[*it].birth_step;
                    return compare_age(since_birth, ctx.now.steps_per_year(), AgeComparison::greater,
                                       c.years);
                }
                return false;
            } else if constexpr (std::is_same_v<T, InTown>) {
                return at.house(id).is_house() && at.town(id) == c.town;
            } else {
                switch (c.op) {
                case Op::union_:
                    return eval_node(*c.lhs, id, ctx, frame) || eval_node(*c.rhs, id, ctx, frame);
                case Op::intersection:
                case Op::composition:
                    return eval_node(*c.lhs, id, ctx, frame) && eval_node(*c.rhs, id, ctx, frame);
                case Op::difference:
                    return eval_node(*c.lhs, id, ctx, frame) && !eval_node(*c.rhs, id, ctx, frame);
                case Op::negation: return !eval_node(*c.lhs, id, ctx, frame);
                case Op::just:
                    // Only one snapshot is retained, so just() nested under
                    // pre() has nothing to compare against.
                    if (frame == Frame::prev)
                        return false;
                    return eval_node(*c.lhs, id, ctx, Frame::now) && !eval_previous(*c.lhs, id, ctx);
                case Op::pre:
                    if (frame == Frame::prev)
                        return eval_node(*c.lhs, id, ctx, Frame::prev);
                    return eval_previous(*c.lhs, id, ctx);
                }
                return false;
            }
        },
        node.content);
}

Feature::Node make_op(Op op, NodePtr lhs, NodePtr rhs = nullptr) {
    return Feature::Node{Operator{op, std::move(lhs), std::move(rhs)}};
}

} // namespace

namespace {
std::shared_ptr<const Feature::Node> leaf(Elementary e) {
    return std::make_shared<const Feature::Node>(Feature::Node{e});
}
} // namespace

Feature Feature::always() { return Feature(leaf(Elementary::always)); }
Feature Feature::never() { return Feature(leaf(Elementary::never)); }
Feature Feature::is_alive() { return Feature(leaf(Elementary::alive)); }
Feature Feature::is_male() { return Feature(leaf(Elementary::male)); }
Feature Feature::is_female() { return Feature(leaf(Elementary::female)); }
Feature Feature::is_married() { return Feature(leaf(Elementary::married)); }
Feature Feature::is_single() { return Feature(leaf(Elementary::single)); }
Feature Feature::is_divorced() { return Feature(leaf(Elementary::divorced)); }
Feature Feature::is_widowed() { return Feature(leaf(Elementary::widowed)); }
Feature Feature::has_children() { return Feature(leaf(Elementary::has_children)); }
Feature Feature::has_alive_children() { return Feature(leaf(Elementary::has_alive_children)); }
Feature Feature::has_alive_sibling() { return Feature(leaf(Elementary::has_alive_sibling)); }
Feature Feature::has_older_alive_sibling() { return Feature(leaf(Elementary::has_older_alive_sibling)); }
Feature Feature::is_orphan() { return Feature(leaf(Elementary::orphan)); }
Feature Feature::lives_alone() { return Feature(leaf(Elementary::lives_alone)); }

Feature Feature::age(AgeComparison cmp, double years) {
    return Feature(std::make_shared<const Node>(Node{AgeTest{cmp, years}}));
}

Feature Feature::youngest_child_older_than(double years) {
    return Feature(std::make_shared<const Node>(Node{YoungestChildOlder{years}}));
}

Feature Feature::in_town(TownId town) {
    return Feature(std::make_shared<const Node>(Node{InTown{town}}));
}

Feature operator|(const Feature& a, const Feature& b) {
    return Feature(std::make_shared<const Feature::Node>(make_op(Op::union_, a.node_, b.node_)));
}

Feature operator&(const Feature& a, const Feature& b) {
    return Feature(std::make_shared<const Feature::Node>(make_op(Op::intersection, a.node_, b.node_)));
}

Feature operator-(const Feature& a, const Feature& b) {
    return Feature(std::make_shared<const Feature::Node>(make_op(Op::difference, a.node_, b.node_)));
}

Feature operator!(const Feature& a) {
    return Feature(std::make_shared<const Feature::Node>(make_op(Op::negation, a.node_)));
}

Feature Feature::operator()(const Feature& g) const {
    return Feature(std::make_shared<const Node>(make_op(Op::composition, node_, g.node_)));
}

Feature Feature::just(const Feature& f) {
    return Feature(std::make_shared<const Node>(make_op(Op::just, f.node_)));
}

Feature Feature::pre(const Feature& f) {
    return Feature(std::make_shared<const Node>(make_op(Op::pre, f.node_)));
}

bool eval(const Feature& f, PersonId p, const EvalContext& ctx) {
    if (!ctx.now.contains(p))
        throw ContractViolation("eval: unknown person " + std::to_string(p.value));
    return eval_node(f.node(), p, ctx, Frame::now);
}

bool eval_compose(const Feature& f, const Feature& g, PersonId p, const EvalContext& ctx) {
    return eval(f(g), p, ctx);
}

bool eval_just(const Feature& f, PersonId p, const EvalContext& ctx) {
    return eval(Feature::just(f), p, ctx);
}

bool eval_pre(const Feature& f, PersonId p, const EvalContext& ctx) {
    return eval(Feature::pre(f), p, ctx);
}

std::vector<PersonId> subpopulation(const Feature& f, const EvalContext& ctx) {
    std::vector<PersonId> out;
    for (const Person& p : ctx.now.persons())
        if (eval_node(f.node(), p.id, ctx, Frame::now))
            out.push_back(p.id);
    return out;
}

} // namespace minidemo
