#include "minidemo/events.hpp"
#include "minidemo/simulation.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace minidemo;

namespace {

py::dict statistics_dict(const StepStatistics& s) {
    py::dict d;
    d["step"] = s.step;
    d["time"] = s.time;
    d["alive"] = s.alive;
    d["males"] = s.males;
    d["females"] = s.females;
    d["married"] = s.married;
    d["single"] = s.single;
    d["divorced"] = s.divorced;
    d["widowed"] = s.widowed;
    d["mean_age"] = s.mean_age;
    d["births"] = s.births;
    d["deaths"] = s.deaths;
    d["marriages"] = s.marriages;
    d["divorces"] = s.divorces;
    d["orphan_relocations"] = s.orphan_relocations;
    d["divorce_relocations"] = s.divorce_relocations;
    d["houses"] = s.houses;
    d["occupied_houses"] = s.occupied_houses;
    return d;
}

std::vector<std::uint32_t> raw(const std::vector<PersonId>& ids) {
    std::vector<std::uint32_t> out;
    out.reserve(ids.size());
    for (PersonId id : ids)
        out.push_back(id.value);
    return out;
}

py::list raw_pairs(const std::vector<std::pair<PersonId, PersonId>>& pairs) {
    py::list out;
    for (auto [a, b] : pairs)
        out.append(py::make_tuple(a.value, b.value));
    return out;
}

RunConfig config_from_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string config_text(const RunConfig& c) {
    std::ostringstream out;
    write_config(out, c);
    return out.str();
}

Simulation make_simulation(const RunConfig& c) {
    DataTables tables;
    tables.fertility = load_fertility_table(c.simulation.fertility);
    const DensityMap density =
        c.simulation.densityMap.empty() ? DensityMap::uk_default() : DensityMap::load(c.simulation.densityMap);
    return Simulation(c.simulation, c.parameters, tables, density);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Agent-based demographic simulation engine";

    py::register_exception<std::invalid_argument>(m, "ConfigError", PyExc_ValueError);

    m.def("steps_per_year", [](const std::string& clock) { return ClockSpec::parse(clock).steps_per_year(); },
          py::arg("clock"));
    m.def(
        "instantaneous_probability",
        [](double p_yearly, const std::string& clock) { return instantaneous_probability(p_yearly, ClockSpec::parse(clock)); },
        py::arg("p_yearly"), py::arg("clock") = "daily");
    m.def("age_factor", &age_factor, py::arg("male_age"), py::arg("female_age"));
    m.def("geo_factor", &geo_factor, py::arg("town_distance"));
    m.def("children_factor", &children_factor, py::arg("male_children"), py::arg("female_children"));

    py::class_<RunConfig>(m, "Config")
        .def(py::init([](const std::string& text) { return config_from_text(text); }), py::arg("text") = "")
        .def(
            "set",
            [](RunConfig& c, const std::string& key, const py::object& value) {
                std::string text = py::str(value);
                if (py::isinstance<py::bool_>(value))
                    text = value.cast<bool>() ? "true" : "false";
                apply_config_value(c, key, text);
                c.simulation.validate();
                c.parameters.validate();
            },
            py::arg("key"), py::arg("value"))
        .def("text", &config_text)
        .def("__repr__", [](const RunConfig& c) { return "<minidemo.Config seed=" + std::to_string(c.simulation.seed) + ">"; });

    py::class_<Simulation>(m, "Simulation")
        .def(py::init(&make_simulation), py::arg("config"))
        .def("step", &Simulation::step)
        .def("run", [](Simulation& s) {
            py::list rows;
            for (const auto& r : s.run())
                rows.append(statistics_dict(r));
            return rows;
        })
        .def("statistics", [](const Simulation& s) { return statistics_dict(s.statistics()); })
        .def("last_events", [](const Simulation& s) {
            const auto& log = s.last_log();
            py::dict d;
            d["births"] = raw(log.births);
            d["deaths"] = raw(log.deaths);
            d["marriages"] = raw_pairs(log.marriages);
            d["divorces"] = raw_pairs(log.divorces);
            d["widowed"] = raw(log.widowed);
            d["orphan_relocations"] = raw(log.orphan_relocations);
            d["divorce_relocations"] = raw(log.divorce_relocations);
            return d;
        })
        .def("check_invariants", [](const Simulation& s) { return check_invariants(s.world()); })
        .def("export_population", [](const Simulation& s) {
            std::ostringstream out;
            export_population(s.world(), out);
            return out.str();
        })
        .def_property_readonly("done", &Simulation::done)
        .def_property_readonly("steps_done", &Simulation::steps_done)
        .def_property_readonly("total_steps", &Simulation::total_steps)
        .def_property_readonly("time", &Simulation::time)
        .def_property_readonly("alive", [](const Simulation& s) { return s.world().people.alive_count(); });
}
