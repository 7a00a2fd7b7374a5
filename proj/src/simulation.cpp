#include "minidemo/simulation.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace minidemo {

// ---------------------------------------------------------------------------
// Statistics

StepStatistics collect_step_statistics(const World& world, const StepEventLog& log, std::int64_t step,
                                       double time) {
    StepStatistics s;
    s.step = step;
    s.time = time;
    double age_sum = 0.0;
    for (const Person& p : world.people.persons()) {
        if (!p.alive)
            continue;
        ++s.alive;
        ++(p.is_male() ? s.males : s.females);
        switch (p.status) {
        case MaritalStatus::single: ++s.single; break;
        case MaritalStatus::married: ++s.married; break;
        case MaritalStatus::divorced: ++s.divorced; break;
        case MaritalStatus::widowed: ++s.widowed; break;
        }
        age_sum += static_cast<double>(p.age_steps);
    }
    if (s.alive > 0)
        s.mean_age = age_sum / static_cast<double>(s.alive) / world.clock.steps_per_year();
    s.births = log.births.size();
    s.deaths = log.deaths.size();
    s.marriages = log.marriages.size();
    s.divorces = log.divorces.size();
    s.orphan_relocations = log.orphan_relocations.size();
    s.divorce_relocations = log.divorce_relocations.size();
    s.houses = world.space.house_count();
    for (const House& h : world.space.houses())
        s.occupied_houses += h.occupants.empty() ? 0 : 1;
    return s;
}

namespace {

constexpr const char* kCountColumns[] = {"alive",    "males",     "females",   "married",
                                         "single",   "divorced",  "widowed",   "mean_age",
                                         "births",   "deaths",    "marriages", "divorces",
                                         "orphan_relocations", "divorce_relocations",
                                         "houses",   "occupied_houses"};

std::vector<double> numeric_columns(const StepStatistics& s) {
    auto d = [](std::size_t v) { return static_cast<double>(v); };
    return {d(s.alive),    d(s.males),    d(s.females),   d(s.married),
            d(s.single),   d(s.divorced), d(s.widowed),   s.mean_age,
            d(s.births),   d(s.deaths),   d(s.marriages), d(s.divorces),
            d(s.orphan_relocations), d(s.divorce_relocations),
            d(s.houses),   d(s.occupied_houses)};
}

std::string g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

std::string statistics_header() {
    std::string h = "step,time";
    for (const char* c : kCountColumns)
        h += std::string(",") + c;
    return h;
}

std::string statistics_row(const StepStatistics& s) {
    std::ostringstream out;
    out << s.step << ',' << g6(s.time) << ',' << s.alive << ',' << s.males << ',' << s.females << ','
        << s.married << ',' << s.single << ',' << s.divorced << ',' << s.widowed << ',' << g6(s.mean_age)
        << ',' << s.births << ',' << s.deaths << ',' << s.marriages << ',' << s.divorces << ','
        << s.orphan_relocations << ',' << s.divorce_relocations << ',' << s.houses << ','
        << s.occupied_houses;
    return out.str();
}

void write_statistics(std::ostream& out, std::span<const StepStatistics> rows) {
    out << statistics_header() << '\n';
    for (const auto& r : rows)
        out << statistics_row(r) << '\n';
}

std::vector<StepStatistics> read_statistics(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != statistics_header())
        throw std::runtime_error("statistics: unexpected header");
    std::vector<StepStatistics> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream fields(line);
        std::string f;
        std::vector<std::string> cells;
        while (std::getline(fields, f, ','))
            cells.push_back(f);
        if (cells.size() != 18)
            throw std::runtime_error("statistics: malformed row '" + line + "'");
        StepStatistics s;
        auto u = [&](int i) { return static_cast<std::size_t>(std::stoull(cells[i])); };
        s.step = std::stoll(cells[0]);
        s.time = std::stod(cells[1]);
        s.alive = u(2);
        s.males = u(3);
        s.females = u(4);
        s.married = u(5);
        s.single = u(6);
        s.divorced = u(7);
        s.widowed = u(8);
        s.mean_age = std::stod(cells[9]);
        s.births = u(10);
        s.deaths = u(11);
        s.marriages = u(12);
        s.divorces = u(13);
        s.orphan_relocations = u(14);
        s.divorce_relocations = u(15);
        s.houses = u(16);
        s.occupied_houses = u(17);
        rows.push_back(s);
    }
    return rows;
}

void write_replicate_summary(std::ostream& out, std::span<const std::vector<StepStatistics>> replicates) {
    if (replicates.empty())
        throw std::invalid_argument("replicate summary needs at least one run");
    const std::size_t rows = replicates.front().size();
    for (const auto& r : replicates)
        if (r.size() != rows)
            throw std::invalid_argument("replicate runs differ in length");

    out << "step,time,replicates";
    for (const char* c : kCountColumns)
        out << ',' << c << "_mean," << c << "_var";
    out << '\n';

    const auto n = static_cast<double>(replicates.size());
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& first = replicates.front()[i];
        std::vector<double> sum(std::size(kCountColumns), 0.0);
        std::vector<double> sum_sq(std::size(kCountColumns), 0.0);
        for (const auto& rep : replicates) {
            const auto values = numeric_columns(rep[i]);
            for (std::size_t c = 0; c < values.size(); ++c)
                sum[c] += values[c];
        }
        for (std::size_t c = 0; c < sum.size(); ++c)
            sum[c] /= n;
        for (const auto& rep : replicates) {
            const auto values = numeric_columns(rep[i]);
            for (std::size_t c = 0; c < values.size(); ++c)
                sum_sq[c] += (values[c] - sum[c]) * (values[c] - sum[c]);
        }
        out << first.step << ',' << g6(first.time) << ',' << replicates.size();
        for (std::size_t c = 0; c < sum.size(); ++c) {
            const double var = replicates.size() > 1 ? sum_sq[c] / (n - 1.0) : 0.0;
            out << ',' << g6(sum[c]) << ',' << g6(var);
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Invariants

namespace {

std::string who(const Person& p) {
    return "person " + std::to_string(p.id.value);
}

} // namespace

std::vector<std::string> check_invariants(const World& world) {
    std::vector<std::string> errors;
    auto fail = [&](std::string msg) { errors.push_back(std::move(msg)); };
    const auto& people = world.people;
    const auto& space = world.space;
    const std::int64_t adult = 18LL * people.steps_per_year();

    std::size_t alive = 0;
    for (std::size_t i = 0; i < people.size(); ++i) {
        const Person& p = people.persons()[i];
        if (p.id.value != i)
            fail("store slot " + std::to_string(i) + " holds " + who(p));
        if (p.age_steps < 0)
            fail(who(p) + " has negative age");
        if (p.alive) {
            ++alive;
            if (p.age_steps != people.current_step() - p.birth_step)
                fail(who(p) + " age disagrees with birth step");
            if (!p.house.is_house() || p.house.index() >= space.house_count()) {
                fail(who(p) + " is alive but homeless");
            } else {
                const auto& occ = space.house(p.house).occupants;
                if (std::find(occ.begin(), occ.end(), p.id) == occ.end())
                    fail(who(p) + " missing from the occupants of its house");
            }
        } else if (!p.house.is_grave()) {
            fail(who(p) + " is dead but not in the grave");
        }

        if (p.is_married() != p.partner.has_value())
            fail(who(p) + " marital status disagrees with partner link");
        if (p.partner) {
            if (!people.contains(*p.partner)) {
                fail(who(p) + " partner does not resolve");
            } else {
                const Person& q = people[*p.partner];
                if (q.partner != p.id)
                    fail(who(p) + " partnership is not symmetric");
                if (q.gender == p.gender)
                    fail(who(p) + " is married to the same gender");
                if (!q.alive || !p.alive)
                    fail(who(p) + " is married with a dead spouse involved");
            }
            if (p.age_steps < adult)
                fail(who(p) + " is married under 18");
        }

        auto check_parent = [&](const std::optional<PersonId>& parent, Gender g, const char* role) {
            if (!parent)
                return;
            if (!people.contains(*parent)) {
                fail(who(p) + " " + role + " does not resolve");
                return;
            }
            const Person& q = people[*parent];
            if (q.gender != g)
                fail(who(p) + " " + role + " has the wrong gender");
            if (q.birth_step >= p.birth_step)
                fail(who(p) + " " + role + " is not older than the child");
            if (!std::binary_search(q.children.begin(), q.children.end(), p.id))
                fail(who(p) + " not listed among the " + role + "'s children");
        };
        check_parent(p.father, Gender::male, "father");
        check_parent(p.mother, Gender::female, "mother");

        for (std::size_t c = 0; c < p.children.size(); ++c) {
            const PersonId kid = p.children[c];
            if (c > 0 && !(p.children[c - 1] < kid))
                fail(who(p) + " children list is not strictly ascending");
            if (!people.contains(kid)) {
                fail(who(p) + " child does not resolve");
                continue;
            }
            const Person& k = people[kid];
            if (k.father != p.id && k.mother != p.id)
                fail(who(p) + " lists a child that does not name it as parent");
        }
    }

    std::size_t housed = 0;
    for (std::size_t i = 0; i < space.house_count(); ++i) {
        const House& h = space.houses()[i];
        const std::string name = "house " + std::to_string(i);
        if (h.id.index() != i)
            fail(name + " has a mismatched id");
        if (!space.inhabitable(h.town))
            fail(name + " lies in an uninhabitable town");
        if (h.local_x < 1 || h.local_x > space.town_grid_size() || h.local_y < 1 ||
            h.local_y > space.town_grid_size())
            fail(name + " lies outside the town grid");
        for (PersonId o : h.occupants) {
            ++housed;
            if (!people.contains(o)) {
                fail(name + " has an unknown occupant");
                continue;
            }
            const Person& p = people[o];
            if (!p.alive)
                fail(name + " is occupied by the dead " + who(p));
            if (p.house != h.id)
                fail(name + " lists " + who(p) + " who lives elsewhere");
        }
    }
    if (housed != alive)
        fail("occupancy total " + std::to_string(housed) + " differs from alive count " + std::to_string(alive));
    return errors;
}

std::vector<std::string> check_event_log(const World& world, const StepSnapshot& prev, const StepEventLog& log) {
    std::vector<std::string> errors;
    const EvalContext ctx{world.people, world.space, prev};
    using F = Feature;

    auto sorted = [](std::vector<PersonId> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    auto expect = [&](const char* what, const std::vector<PersonId>& logged, const Feature& f) {
        if (sorted(logged) != subpopulation(f, ctx))
            errors.push_back(std::string(what) + " list differs from its temporal sub-population");
    };

    expect("deaths", log.deaths, F::just(!F::is_alive()));
    expect("births", log.births, F::just(F::is_alive()));

    std::vector<PersonId> married;
    for (auto [m, f] : log.marriages) {
        married.push_back(m);
        married.push_back(f);
    }
    expect("marriages", married, F::just(F::is_married()));

    std::vector<PersonId> unmarried = log.widowed;
    for (auto [m, f] : log.divorces) {
        unmarried.push_back(m);
        unmarried.push_back(f);
    }
    expect("divorces and widowhoods", unmarried, F::is_alive() & F::pre(F::is_alive()) & F::just(F::is_single()));

    // Ageing runs first, so the previous snapshot is the state it acted on.
    expect("orphan relocations", log.orphan_relocations,
           F::pre(F::is_orphan()) & F::just(F::age(AgeComparison::greater_equal, 18.0)) &
               F::pre(F::has_older_alive_sibling()) & !F::pre(F::lives_alone()));
    expect("divorce relocations", log.divorce_relocations, F::is_male() & F::just(F::is_divorced()));

    auto moved_within_town = [&](PersonId id) {
        return !world.people[id].alive ||
               (eval(F::lives_alone(), id, ctx) && previous_town(id, prev) == world.town_of(id) &&
                previous_house(id, prev) != world.people[id].house);
    };
    for (PersonId id : log.orphan_relocations)
        if (!moved_within_town(id))
            errors.push_back("orphan relocation of person " + std::to_string(id.value) + " is inconsistent");
    for (PersonId id : log.divorce_relocations)
        if (!moved_within_town(id))
            errors.push_back("divorce relocation of person " + std::to_string(id.value) + " is inconsistent");
    return errors;
}

// ---------------------------------------------------------------------------
// Population export

namespace {

std::string opt_id(const std::optional<PersonId>& id) {
    return id ? std::to_string(id->value) : "-";
}

std::optional<std::uint32_t> parse_opt(const std::string& s) {
    if (s == "-")
        return std::nullopt;
    return static_cast<std::uint32_t>(std::stoul(s));
}

constexpr const char* kPopulationColumns =
    "id,gender,age_steps,birth_step,alive,status,partner,father,mother,children,house,town_x,town_y";

} // namespace

PopulationExport snapshot_population(const World& world) {
    std::ostringstream buf;
    export_population(world, buf);
    std::istringstream in(buf.str());
    return import_population(in);
}

void export_population(const World& world, std::ostream& out) {
    const auto& people = world.people;
    out << "# minidemo population steps_per_year=" << people.steps_per_year() << " step=" << people.current_step()
        << '\n';
    out << kPopulationColumns << '\n';
    for (const Person& p : people.persons()) {
        out << p.id.value << ',' << to_string(p.gender) << ',' << p.age_steps << ',' << p.birth_step << ','
            << (p.alive ? 1 : 0) << ',' << to_string(p.status) << ',' << opt_id(p.partner) << ','
            << opt_id(p.father) << ',' << opt_id(p.mother) << ',';
        for (std::size_t i = 0; i < p.children.size(); ++i)
            out << (i ? ";" : "") << p.children[i].value;
        if (p.children.empty())
            out << '-';
        if (p.house.is_house()) {
            const TownCoord c = coord_of(world.space.town_of(p.house));
            out << ',' << p.house.index() << ',' << c.x << ',' << c.y << '\n';
        } else {
            out << ",grave,-,-\n";
        }
    }
}

void export_population(const World& world, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write population export '" + path.string() + "'");
    export_population(world, out);
    if (!out)
        throw std::runtime_error("failed writing population export '" + path.string() + "'");
}

PopulationExport import_population(std::istream& in) {
    PopulationExport result;
    std::string line;
    if (!std::getline(in, line) ||
        std::sscanf(line.c_str(), "# minidemo population steps_per_year=%d step=%" SCNd64, &result.steps_per_year,
                    &result.step) != 2)
        throw std::runtime_error("population export: bad header line");
    if (!std::getline(in, line) || line != kPopulationColumns)
        throw std::runtime_error("population export: bad column line");

    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::istringstream fields(line);
        std::string f;
        while (std::getline(fields, f, ','))
            cells.push_back(f);
        if (cells.size() != 13)
            throw std::runtime_error("population export: malformed record '" + line + "'");
        PersonRecord r;
        r.id = static_cast<std::uint32_t>(std::stoul(cells[0]));
        if (cells[1] != "male" && cells[1] != "female")
            throw std::runtime_error("population export: bad gender '" + cells[1] + "'");
        r.gender = cells[1] == "male" ? Gender::male : Gender::female;
        r.age_steps = std::stoll(cells[2]);
        r.birth_step = std::stoll(cells[3]);
        r.alive = cells[4] == "1";
        bool status_ok = false;
        for (auto s : {MaritalStatus::single, MaritalStatus::married, MaritalStatus::divorced, MaritalStatus::widowed})
            if (to_string(s) == cells[5]) {
                r.status = s;
                status_ok = true;
            }
        if (!status_ok)
            throw std::runtime_error("population export: bad status '" + cells[5] + "'");
        r.partner = parse_opt(cells[6]);
        r.father = parse_opt(cells[7]);
        r.mother = parse_opt(cells[8]);
        if (cells[9] != "-") {
            std::istringstream kids(cells[9]);
            std::string k;
            while (std::getline(kids, k, ';'))
                r.children.push_back(static_cast<std::uint32_t>(std::stoul(k)));
        }
        if (cells[10] != "grave") {
            r.house = static_cast<std::uint32_t>(std::stoul(cells[10]));
            r.town = TownCoord{std::stoi(cells[11]), std::stoi(cells[12])};
        }
        result.persons.push_back(std::move(r));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

World build_initial_world(const SimulationConfig& config, const ModelParameters& params, const DataTables& tables,
                          const DensityMap& density, Rng& rng, InitReport& report) {
    config.validate();
    params.validate();
    tables.validate();
    return initialize_world(config, params, density, rng, &report);
}

} // namespace

Simulation::Simulation(SimulationConfig config, ModelParameters params, DataTables tables, DensityMap density)
    : config_(std::move(config)),
      params_(params),
      tables_(std::move(tables)),
      rng_(config_.seed),
      world_(build_initial_world(config_, params_, tables_, density, rng_, init_report_)),
      prev_(StepSnapshot::capture(world_.people, world_.space)) {
    if (config_.audit) {
        if (auto errors = check_invariants(world_); !errors.empty())
            throw std::runtime_error("initial state violates invariants: " + errors.front());
    }
}

StepStatistics Simulation::statistics() const {
    return collect_step_statistics(world_, log_, steps_done_, time());
}

void Simulation::step() {
    if (done())
        throw std::logic_error("simulation already reached tFinal");
    const double start_time = time();
    prev_ = StepSnapshot::capture(world_.people, world_.space);
    log_.clear();
    const std::size_t alive_before = world_.people.alive_count();
    const std::size_t houses_before = world_.space.house_count();

    StepContext ctx{params_, tables_, prev_, start_time, rng_};
    for (EventKind kind : config_.eventOrder)
        apply_event(kind, world_, ctx, log_);
    ++steps_done_;

    if (config_.audit)
        audit_step(alive_before, houses_before);
}

void Simulation::audit_step(std::size_t alive_before, std::size_t houses_before) const {
    std::vector<std::string> errors = check_invariants(world_);
    const auto log_errors = check_event_log(world_, prev_, log_);
    errors.insert(errors.end(), log_errors.begin(), log_errors.end());

    const std::size_t alive_after = world_.people.alive_count();
    if (alive_after + log_.deaths.size() != alive_before + log_.births.size())
        errors.push_back("population not conserved: alive(t+dt) != alive(t) + births - deaths");
    if (world_.space.house_count() < houses_before)
        errors.push_back("house count decreased");

    // Statistics against independent feature-algebra counts.
    const StepStatistics s = statistics();
    const EvalContext ctx{world_.people, world_.space, prev_};
    using F = Feature;
    auto count = [&](const Feature& f) { return subpopulation(f, ctx).size(); };
    if (s.alive != count(F::is_alive()) || s.males != count(F::is_alive() & F::is_male()) ||
        s.married != count(F::is_alive() & F::is_married()) || s.divorced != count(F::is_alive() & F::is_divorced()) ||
        s.widowed != count(F::is_alive() & F::is_widowed()) || s.births != count(F::age(AgeComparison::equal, 0.0)) ||
        s.married % 2 != 0)
        errors.push_back("statistics disagree with feature-algebra counts");

    if (!errors.empty()) {
        std::string msg = "audit failed at step " + std::to_string(steps_done_) + ":";
        for (const auto& e : errors)
            msg += "\n  " + e;
        throw std::runtime_error(msg);
    }
}

std::vector<StepStatistics> Simulation::run() {
    std::vector<StepStatistics> rows{statistics()};
    while (!done()) {
        step();
        if (steps_done_ % config_.statsEvery == 0 || done())
            rows.push_back(statistics());
    }
    return rows;
}

SimulationResult run_simulation(const SimulationConfig& config, const ModelParameters& params,
                                const DataTables& tables, const DensityMap& density) {
    Simulation sim(config, params, tables, density);
    auto rows = sim.run();
    return SimulationResult{std::move(rows), sim.world()};
}

} // namespace minidemo
