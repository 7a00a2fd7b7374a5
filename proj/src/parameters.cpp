#include "minidemo/parameters.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace minidemo {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok)
        throw std::invalid_argument(what);
}

bool is_probability(double v) { return v >= 0.0 && v <= 1.0; }

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    in.imbue(std::locale::classic());
    double d = 0.0;
    if (!(in >> d) || !(in >> std::ws).eof())
        throw std::invalid_argument("config key '" + key + "': '" + value + "' is not a number");
    return d;
}

template <class Int>
Int to_integer(const std::string& key, const std::string& value) {
    Int n{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw std::invalid_argument("config key '" + key + "': '" + value + "' is not an integer");
    return n;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1")
        return true;
    if (value == "false" || value == "0")
        return false;
    throw std::invalid_argument("config key '" + key + "': expected true or false");
}

// Shortest text that parses back to the same double.
std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace

void ModelParameters::validate() const {
    require(is_probability(basicDivorceRate), "basicDivorceRate must lie in [0, 1]");
    require(is_probability(baseDieRate), "baseDieRate must lie in [0, 1]");
    require(is_probability(basicMaleMarriageRate), "basicMaleMarriageRate must lie in [0, 1]");
    require(is_probability(femaleAgeDieProb), "femaleAgeDieProb must lie in [0, 1]");
    require(is_probability(maleAgeDieProb), "maleAgeDieProb must lie in [0, 1]");
    require(is_probability(startMarriedRate), "startMarriedRate must lie in [0, 1]");
    require(femaleAgeScaling > 0.0, "femaleAgeScaling must be positive");
    require(maleAgeScaling > 0.0, "maleAgeScaling must be positive");
    require(initialPop >= 1, "initialPop must be at least 1");
    require(maxNumMarrCand >= 1, "maxNumMarrCand must be at least 1");
}

FertilityTable::FertilityTable() : rates_(static_cast<std::size_t>(kAges) * kYears, 0.0) {}

FertilityTable FertilityTable::synthetic() {
    FertilityTable table;
    for (int age = kMinAge; age <= kMaxAge; ++age) {
        const double z = (age - 29.0) / 5.0;
        const double r = 0.25 * std::exp(-0.5 * z * z);
        for (int year = kFirstYear; year <= kLastYear; ++year)
            table.set(age, year, r);
    }
    return table;
}

FertilityTable FertilityTable::parse(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kHeader)
        throw std::runtime_error(std::string("fertility table: first line must be '") + kHeader + "'");
    FertilityTable table;
    int row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        if (row == kAges)
            throw std::runtime_error("fertility table: more than 35 age rows");
        std::istringstream fields(line);
        fields.imbue(std::locale::classic());
        int column = 0;
        double v = 0.0;
        while (fields >> v) {
            if (column == kYears)
                throw std::runtime_error("fertility table: row " + std::to_string(row + 1) +
                                         " has more than 100 values");
            if (!is_probability(v))
                throw std::runtime_error("fertility table: rate outside [0, 1]");
            table.rates_[static_cast<std::size_t>(row) * kYears + column] = v;
            ++column;
        }
        if (!fields.eof() || column != kYears)
            throw std::runtime_error("fertility table: row " + std::to_string(row + 1) +
                                     " must hold 100 decimals");
        ++row;
    }
    if (row != kAges)
        throw std::runtime_error("fertility table: expected 35 age rows, found " + std::to_string(row));
    return table;
}

FertilityTable FertilityTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open fertility table '" + path.string() + "'");
    return parse(in);
}

void FertilityTable::write(std::ostream& out) const {
    out << kHeader << '\n';
    for (int a = 0; a < kAges; ++a) {
        for (int y = 0; y < kYears; ++y) {
            if (y != 0)
                out << ' ';
            out << format_double(rates_[static_cast<std::size_t>(a) * kYears + y]);
        }
        out << '\n';
    }
}

void FertilityTable::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write fertility table '" + path.string() + "'");
    write(out);
}

double FertilityTable::rate(int age, int year) const {
    if (age < kMinAge || age > kMaxAge || year < kFirstYear || year > kLastYear)
        return 0.0;
    return rates_[static_cast<std::size_t>(age - kMinAge) * kYears + (year - kFirstYear)];
}

void FertilityTable::set(int age, int year, double value) {
    if (age < kMinAge || age > kMaxAge || year < kFirstYear || year > kLastYear)
        throw std::out_of_range("fertility table index out of range");
    require(is_probability(value), "fertility rate must lie in [0, 1]");
    rates_[static_cast<std::size_t>(age - kMinAge) * kYears + (year - kFirstYear)] = value;
}

FertilityTable load_fertility_table(const std::string& source) {
    if (source == "synthetic")
        return FertilityTable::synthetic();
    return FertilityTable::load(source);
}

void DataTables::validate() const {
    for (double v : divorceModifierByDecade)
        require(is_probability(v), "divorce modifiers must lie in [0, 1]");
    for (double v : maleMarriageModifierByDecade)
        require(is_probability(v), "marriage modifiers must lie in [0, 1]");
}

int decade_index(double age_years) {
    const double index = std::ceil(age_years / 10.0);
    return static_cast<int>(std::clamp(index, 1.0, 16.0));
}

std::string to_string(EventKind kind) {
    switch (kind) {
    case EventKind::ageing: return "ageing";
    case EventKind::deaths: return "deaths";
    case EventKind::births: return "births";
    case EventKind::divorces: return "divorces";
    case EventKind::marriages: return "marriages";
    }
    return "?";
}

EventKind parse_event_kind(const std::string& text) {
    for (auto k : {EventKind::ageing, EventKind::deaths, EventKind::births, EventKind::divorces,
                   EventKind::marriages})
        if (to_string(k) == text)
            return k;
    throw std::invalid_argument("unknown event '" + text + "'");
}

void SimulationConfig::validate() const {
    require(tFinal >= t0, "tFinal must not precede t0");
    require(!eventOrder.empty() && eventOrder.front() == EventKind::ageing,
            "eventOrder must start with ageing");
    auto sorted = eventOrder;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            "eventOrder lists an event twice");
    require(townGridSize >= 1, "townGridSize must be positive");
    require(maxInitialAge > 0.0, "maxInitialAge must be positive");
    require(statsEvery >= 1, "statsEvery must be at least 1");
}

void apply_config_value(RunConfig& config, const std::string& key, const std::string& value) {
    auto& p = config.parameters;
    auto& s = config.simulation;
    if (key == "basicDivorceRate")
        p.basicDivorceRate = to_double(key, value);
    else if (key == "baseDieRate" || key == "basicDeathRate")
        p.baseDieRate = to_double(key, value);
    else if (key == "basicMaleMarriageRate")
        p.basicMaleMarriageRate = to_double(key, value);
    else if (key == "femaleAgeDieProb" || key == "femaleAgeDieRate")
        p.femaleAgeDieProb = to_double(key, value);
    else if (key == "femaleAgeScaling")
        p.femaleAgeScaling = to_double(key, value);
    else if (key == "initialPop")
        p.initialPop = to_integer<int>(key, value);
    else if (key == "maleAgeDieProb" || key == "maleAgeDieRate")
        p.maleAgeDieProb = to_double(key, value);
    else if (key == "maleAgeScaling")
        p.maleAgeScaling = to_double(key, value);
    else if (key == "maxNumMarrCand")
        p.maxNumMarrCand = to_integer<int>(key, value);
    else if (key == "startMarriedRate")
        p.startMarriedRate = to_double(key, value);
    else if (key == "t0")
        s.t0 = to_integer<int>(key, value);
    else if (key == "tFinal")
        s.tFinal = to_integer<int>(key, value);
    else if (key == "clock")
        s.clock = ClockSpec::parse(value);
    else if (key == "seed")
        s.seed = to_integer<std::uint64_t>(key, value);
    else if (key == "eventOrder") {
        s.eventOrder.clear();
        std::istringstream items(value);
        std::string item;
        while (std::getline(items, item, ','))
            s.eventOrder.push_back(parse_event_kind(trim(item)));
    } else if (key == "outputDir")
        s.outputDir = value;
    else if (key == "fertility")
        s.fertility = value;
    else if (key == "densityMap")
        s.densityMap = value;
    else if (key == "townGridSize")
        s.townGridSize = to_integer<int>(key, value);
    else if (key == "maxInitialAge")
        s.maxInitialAge = to_double(key, value);
    else if (key == "statsEvery")
        s.statsEvery = to_integer<int>(key, value);
    else if (key == "audit")
        s.audit = to_bool(key, value);
    else
        throw std::invalid_argument("unknown config key '" + key + "'");
}

RunConfig parse_config(std::istream& in, RunConfig base) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (trim(line).empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        apply_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    base.parameters.validate();
    base.simulation.validate();
    return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config '" + path.string() + "'");
    return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const RunConfig& config) {
    const auto& p = config.parameters;
    const auto& s = config.simulation;
    out << "# model parameters\n";
    out << "basicDivorceRate = " << format_double(p.basicDivorceRate) << '\n';
    out << "baseDieRate = " << format_double(p.baseDieRate) << '\n';
    out << "basicMaleMarriageRate = " << format_double(p.basicMaleMarriageRate) << '\n';
    out << "femaleAgeDieProb = " << format_double(p.femaleAgeDieProb) << '\n';
    out << "femaleAgeScaling = " << format_double(p.femaleAgeScaling) << '\n';
    out << "initialPop = " << p.initialPop << '\n';
    out << "maleAgeDieProb = " << format_double(p.maleAgeDieProb) << '\n';
    out << "maleAgeScaling = " << format_double(p.maleAgeScaling) << '\n';
    out << "maxNumMarrCand = " << p.maxNumMarrCand << '\n';
    out << "startMarriedRate = " << format_double(p.startMarriedRate) << '\n';
    out << "\n# simulation\n";
    out << "t0 = " << s.t0 << '\n';
    out << "tFinal = " << s.tFinal << '\n';
    out << "clock = " << s.clock.to_string() << '\n';
    out << "seed = " << s.seed << '\n';
    out << "eventOrder = ";
    for (std::size_t i = 0; i < s.eventOrder.size(); ++i)
        out << (i ? "," : "") << to_string(s.eventOrder[i]);
    out << '\n';
    out << "outputDir = " << s.outputDir << '\n';
    out << "fertility = " << s.fertility << '\n';
    if (!s.densityMap.empty())
        out << "densityMap = " << s.densityMap << '\n';
    out << "townGridSize = " << s.townGridSize << '\n';
    out << "maxInitialAge = " << format_double(s.maxInitialAge) << '\n';
    out << "statsEvery = " << s.statsEvery << '\n';
    out << "audit = " << (s.audit ? "true" : "false") << '\n';
}

} // namespace minidemo
