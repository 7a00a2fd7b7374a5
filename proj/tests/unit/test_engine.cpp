#include "minidemo/simulation.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace minidemo;

namespace {

SimulationConfig small_config(std::uint64_t seed = 1, int years = 2) {
    SimulationConfig c;
    c.clock = ClockSpec::monthly();
    c.t0 = 2020;
    c.tFinal = 2020 + years;
    c.seed = seed;
    return c;
}

ModelParameters small_params(int pop = 300) {
    ModelParameters p;
    p.initialPop = pop;
    return p;
}

std::string csv(const std::vector<StepStatistics>& rows) {
    std::ostringstream out;
    write_statistics(out, rows);
    return out.str();
}

std::string exported(const World& w) {
    std::ostringstream out;
    export_population(w, out);
    return out.str();
}

} // namespace

TEST_CASE("parameter defaults and validation") {
    const ModelParameters p;
    CHECK(p.basicDivorceRate == 0.06);
    CHECK(p.baseDieRate == 0.0001);
    CHECK(p.basicMaleMarriageRate == 0.7);
    CHECK(p.femaleAgeDieProb == 0.00019);
    CHECK(p.femaleAgeScaling == 15.5);
    CHECK(p.initialPop == 10000);
    CHECK(p.maleAgeDieProb == 0.00021);
    CHECK(p.maleAgeScaling == 14.0);
    CHECK(p.maxNumMarrCand == 100);
    CHECK(p.startMarriedRate == 0.8);
    CHECK_NOTHROW(p.validate());

    ModelParameters bad = p;
    bad.startMarriedRate = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.maleAgeScaling = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.initialPop = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    DataTables tables;
    CHECK(tables.divorceModifierByDecade[2] == 0.9);
    CHECK(tables.maleMarriageModifierByDecade[3] == 1.0);
    CHECK_NOTHROW(tables.validate());
    tables.divorceModifierByDecade[0] = 2.0;
    CHECK_THROWS(tables.validate());
}

TEST_CASE("config files") {
    SUBCASE("round trip") {
        RunConfig original;
        original.parameters.basicDivorceRate = 0.123456789012345;
        original.parameters.initialPop = 777;
        original.simulation.clock = ClockSpec::custom(100);
        original.simulation.seed = 18446744073709551615ULL;
        original.simulation.eventOrder = {EventKind::ageing, EventKind::marriages, EventKind::deaths};
        original.simulation.audit = true;
        original.simulation.statsEvery = 30;
        std::stringstream text;
        write_config(text, original);
        const RunConfig back = parse_config(text);
        CHECK(back.parameters.basicDivorceRate == original.parameters.basicDivorceRate);
        CHECK(back.parameters.initialPop == 777);
        CHECK(back.simulation.clock == ClockSpec::custom(100));
        CHECK(back.simulation.seed == original.simulation.seed);
        CHECK(back.simulation.eventOrder == original.simulation.eventOrder);
        CHECK(back.simulation.audit);
        CHECK(back.simulation.statsEvery == 30);
        std::stringstream again;
        write_config(again, back);
        CHECK(again.str() == text.str());
    }
    SUBCASE("aliases and comments") {
        std::istringstream in("# comment\nbasicDeathRate = 0.5  # trailing\n\nfemaleAgeDieRate=0.1\nmaleAgeDieRate = 0.2\n");
        const RunConfig c = parse_config(in);
        CHECK(c.parameters.baseDieRate == 0.5);
        CHECK(c.parameters.femaleAgeDieProb == 0.1);
        CHECK(c.parameters.maleAgeDieProb == 0.2);
    }
    SUBCASE("rejections") {
        std::istringstream unknown("fooRate = 1\n");
        CHECK_THROWS_WITH_AS(parse_config(unknown), doctest::Contains("fooRate"), std::invalid_argument);
        std::istringstream no_eq("initialPop 5\n");
        CHECK_THROWS(parse_config(no_eq));
        std::istringstream bad_number("initialPop = five\n");
        CHECK_THROWS(parse_config(bad_number));
        std::istringstream backwards("t0 = 2030\ntFinal = 2020\n");
        CHECK_THROWS(parse_config(backwards));
        std::istringstream order("eventOrder = deaths,ageing\n");
        CHECK_THROWS(parse_config(order));
        std::istringstream twice("eventOrder = ageing,deaths,deaths\n");
        CHECK_THROWS(parse_config(twice));
        std::istringstream rate("baseDieRate = 2\n");
        CHECK_THROWS(parse_config(rate));
        CHECK_THROWS(load_config("/nonexistent/minidemo.conf"));
    }
}

TEST_CASE("fertility tables") {
    const auto synthetic = FertilityTable::synthetic();
    CHECK(synthetic.rate(29, 2025) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(synthetic.rate(17, 2025) < synthetic.rate(29, 2025));
    CHECK(synthetic.rate(51, 2025) < synthetic.rate(29, 2025));
    CHECK(synthetic.rate(34, 2025) == doctest::Approx(0.25 * std::exp(-0.5)).epsilon(1e-12));
    CHECK(synthetic.rate(16, 2025) == 0.0);
    CHECK(synthetic.rate(52, 2025) == 0.0);
    CHECK(synthetic.rate(29, 1950) == 0.0);
    CHECK(synthetic.rate(29, 2051) == 0.0);
    for (int a = FertilityTable::kMinAge; a <= FertilityTable::kMaxAge; ++a)
        for (int y = FertilityTable::kFirstYear; y <= FertilityTable::kLastYear; ++y) {
            CHECK(synthetic.rate(a, y) >= 0.0);
            CHECK(synthetic.rate(a, y) <= 1.0);
            CHECK(synthetic.rate(a, y) == synthetic.rate(a, 2000));
        }

    FertilityTable custom;
    custom.set(20, 1999, 0.1);
    custom.set(51, 2050, 1.0 / 3.0);
    std::stringstream text;
    custom.write(text);
    CHECK(text.str().rfind(FertilityTable::kHeader, 0) == 0);
    CHECK(FertilityTable::parse(text) == custom);

    const auto path = std::filesystem::temp_directory_path() / "minidemo_fertility_test.txt";
    synthetic.save(path);
    CHECK(load_fertility_table(path.string()) == synthetic);
    CHECK(load_fertility_table("synthetic") == synthetic);
    std::filesystem::remove(path);

    std::istringstream wrong_header("ages 1..2\n");
    CHECK_THROWS(FertilityTable::parse(wrong_header));
    std::istringstream short_table(std::string(FertilityTable::kHeader) + "\n0.1 0.2\n");
    CHECK_THROWS(FertilityTable::parse(short_table));
    CHECK_THROWS(custom.set(10, 2000, 0.5));
    CHECK_THROWS(custom.set(20, 2000, 1.5));
    CHECK_THROWS(load_fertility_table("/nonexistent/table.txt"));
}

TEST_CASE("statistics") {
    SUBCASE("empty world") {
        const World empty(ClockSpec::daily(), DensityMap::uk_default());
        const auto s = collect_step_statistics(empty, StepEventLog{}, 0, 2020.0);
        CHECK(s == StepStatistics{0, 2020.0});
    }
    SUBCASE("counts by hand") {
        testing::Scenario sc;
        const HouseRef h = sc.new_house();
        const PersonId m = sc.man(40, h);
        const PersonId f = sc.woman(20, h);
        sc.world.people.wed(m, f);
        const PersonId w = sc.woman(60, sc.new_house());
        const PersonId gone = sc.man(61, sc.world.people[w].house);
        sc.world.people.wed(gone, w);
        sc.world.people.kill(sc.world.space, gone);
        StepEventLog log;
        log.deaths.push_back(gone);
        const auto s = collect_step_statistics(sc.world, log, 5, 2020.5);
        CHECK(s.step == 5);
        CHECK(s.alive == 3);
        CHECK(s.males == 1);
        CHECK(s.females == 2);
        CHECK(s.married == 2);
        CHECK(s.widowed == 1);
        CHECK(s.single == 0);
        CHECK(s.mean_age == doctest::Approx(40.0));
        CHECK(s.deaths == 1);
        CHECK(s.houses == 2);
        CHECK(s.occupied_houses == 2);
    }
    SUBCASE("csv round trip") {
        Simulation sim(small_config(), small_params(), DataTables{});
        const auto rows = sim.run();
        const std::string text = csv(rows);
        CHECK(text.rfind(statistics_header() + "\n", 0) == 0);
        std::istringstream in(text);
        const auto back = read_statistics(in);
        REQUIRE(back.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(back[i].step == rows[i].step);
            CHECK(back[i].alive == rows[i].alive);
            CHECK(back[i].births == rows[i].births);
            CHECK(back[i].mean_age == doctest::Approx(rows[i].mean_age).epsilon(1e-5));
        }
        CHECK(csv(back) == text);
    }
}

TEST_CASE("replicate summary") {
    std::vector<std::vector<StepStatistics>> reps(3);
    for (std::size_t r = 0; r < 3; ++r) {
        StepStatistics s;
        s.alive = 10 + 2 * r;  // 10, 12, 14: mean 12, sample variance 4
        reps[r].push_back(s);
    }
    std::ostringstream out;
    write_replicate_summary(out, reps);
    std::istringstream in(out.str());
    std::string header;
    std::string row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header.rfind("step,time,replicates,alive_mean,alive_var", 0) == 0);
    CHECK(row.rfind("0,0,3,12,4,", 0) == 0);

    reps[1].push_back(StepStatistics{});
    std::ostringstream bad;
    CHECK_THROWS(write_replicate_summary(bad, reps));
}

TEST_CASE("population export") {
    Simulation sim(small_config(3, 3), small_params(), DataTables{});
    const auto rows = sim.run();
    const World& world = sim.world();
    const std::string text = exported(world);
    CHECK(text.rfind("# minidemo population steps_per_year=12 step=36\n", 0) == 0);

    std::istringstream in(text);
    const PopulationExport back = import_population(in);
    const PopulationExport direct = snapshot_population(world);
    CHECK(back.steps_per_year == 12);
    CHECK(back.step == 36);
    REQUIRE(back.persons.size() == world.people.size());
    CHECK(back.persons == direct.persons);

    std::size_t alive = 0;
    for (const PersonRecord& r : back.persons) {
        alive += r.alive;
        if (!r.alive) {
            CHECK_FALSE(r.house);
            CHECK_FALSE(r.town);
        } else {
            REQUIRE(r.town);
            CHECK(*r.town == coord_of(world.space.town_of(HouseRef(*r.house))));
        }
    }
    CHECK(alive == rows.back().alive);
    CHECK(text.find(",grave,-,-") != std::string::npos);

    std::istringstream garbage("# minidemo population steps_per_year=12 step=0\nnot,a,row\n");
    CHECK_THROWS(import_population(garbage));
}

TEST_CASE("simulation runs") {
    SUBCASE("tFinal equal to t0 gives the initial state only") {
        auto config = small_config(1, 0);
        const auto result = run_simulation(config, small_params(), DataTables{});
        REQUIRE(result.statistics.size() == 1);
        CHECK(result.statistics[0].step == 0);
        CHECK(result.statistics[0].time == 2020.0);
        CHECK(result.statistics[0].births == 0);
        CHECK(result.statistics[0].alive == 300);
    }
    SUBCASE("same seed, same bytes; other seed, other bytes") {
        const auto a = run_simulation(small_config(11), small_params(), DataTables{});
        const auto b = run_simulation(small_config(11), small_params(), DataTables{});
        const auto c = run_simulation(small_config(12), small_params(), DataTables{});
        CHECK(csv(a.statistics) == csv(b.statistics));
        CHECK(exported(a.final_state) == exported(b.final_state));
        CHECK(csv(a.statistics) != csv(c.statistics));
    }
    SUBCASE("statsEvery thins the rows") {
        auto config = small_config(1, 2);
        config.statsEvery = 5;
        const auto rows = run_simulation(config, small_params(), DataTables{}).statistics;
        // Step 0, then 5, 10, 15, 20, and the final step 24.
        REQUIRE(rows.size() == 6);
        CHECK(rows[1].step == 5);
        CHECK(rows.back().step == 24);
        CHECK(rows.back().time == doctest::Approx(2022.0));
    }
    SUBCASE("audit mode") {
        auto config = small_config(4, 3);
        config.audit = true;
        CHECK_NOTHROW(run_simulation(config, small_params(500), DataTables{}));
    }
    SUBCASE("stepping past the end") {
        Simulation sim(small_config(1, 0), small_params(), DataTables{});
        CHECK(sim.done());
        CHECK_THROWS(sim.step());
    }
    SUBCASE("invalid configuration") {
        auto config = small_config();
        config.eventOrder = {EventKind::deaths};
        CHECK_THROWS(Simulation(config, small_params(), DataTables{}));
    }
    SUBCASE("married count is even and births match newborns") {
        Simulation sim(small_config(8, 2), small_params(), DataTables{});
        while (!sim.done()) {
            sim.step();
            const auto s = sim.statistics();
            CHECK(s.married % 2 == 0);
            CHECK(s.alive == s.males + s.females);
            CHECK(s.alive == s.married + s.single + s.divorced + s.widowed);
            const EvalContext ctx{sim.world().people, sim.world().space, sim.previous()};
            CHECK(s.births == subpopulation(Feature::age(AgeComparison::equal, 0), ctx).size());
        }
    }
}
