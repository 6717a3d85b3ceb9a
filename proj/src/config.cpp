#include "tweezer/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "tweezer/errors.hpp"
#include "tweezer/format.hpp"

namespace tweezer {

namespace {

constexpr std::pair<ScenarioId, std::string_view> scenario_names[] = {
    {ScenarioId::RampupScan, "rampup-scan"},
    {ScenarioId::TransportScan, "transport-scan"},
    {ScenarioId::OptimizeTransport, "optimize-transport"},
    {ScenarioId::OptimizeBandmap, "optimize-bandmap"},
    {ScenarioId::Multisite, "multisite"},
    {ScenarioId::SensitivityMap, "sensitivity-map"},
    {ScenarioId::Budgets, "budgets"},
    {ScenarioId::ErrorReport, "error-report"},
    {ScenarioId::Constants, "constants"},
};

enum class Kind { Scenario, Text, Count, Real, Time, Length, Wavelength, Energy, Field, CountList, RealList };

using Target = std::variant<ScenarioId*, std::string*, std::size_t*, double*, std::vector<std::size_t>*,
                            std::vector<double>*>;

struct Key {
    std::string_view name;
    Kind kind;
    std::function<Target(ScenarioConfig&)> target;
};

template <class T>
std::function<Target(ScenarioConfig&)> field(T ScenarioConfig::*member) {
    return [member](ScenarioConfig& c) -> Target { return &(c.*member); };
}

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        {"run.scenario", Kind::Scenario, field(&ScenarioConfig::scenario)},
        {"run.output", Kind::Text, field(&ScenarioConfig::output)},
        {"run.threads", Kind::Count, field(&ScenarioConfig::threads)},
        {"run.frames", Kind::Count, field(&ScenarioConfig::frames)},
        {"lattice.depth", Kind::Energy, [](ScenarioConfig& c) -> Target { return &c.lattice.depth; }},
        {"tweezer.depth", Kind::Energy, field(&ScenarioConfig::tweezer_depth)},
        {"tweezer.waist", Kind::Length, field(&ScenarioConfig::waist)},
        {"tweezer.wavelength", Kind::Wavelength, field(&ScenarioConfig::tweezer_wavelength)},
        {"grid.sites", Kind::Count, [](ScenarioConfig& c) -> Target { return &c.resolution.sites; }},
        {"grid.points_per_site", Kind::Count,
         [](ScenarioConfig& c) -> Target { return &c.resolution.points_per_site; }},
        {"grid.steps_per_period", Kind::Real,
         [](ScenarioConfig& c) -> Target { return &c.resolution.steps_per_period; }},
        {"grid.transport_steps_per_period", Kind::Real, field(&ScenarioConfig::transport_steps_per_period)},
        {"rampup.depth", Kind::Energy, field(&ScenarioConfig::rampup_depth)},
        {"rampup.t_min", Kind::Time, field(&ScenarioConfig::rampup_t_min)},
        {"rampup.t_max", Kind::Time, field(&ScenarioConfig::rampup_t_max)},
        {"rampup.points", Kind::Count, field(&ScenarioConfig::rampup_points)},
        {"transport.duration", Kind::Time, field(&ScenarioConfig::transport_duration)},
        {"transport.t_min", Kind::Time, field(&ScenarioConfig::transport_t_min)},
        {"transport.t_max", Kind::Time, field(&ScenarioConfig::transport_t_max)},
        {"transport.points", Kind::Count, field(&ScenarioConfig::transport_points)},
        {"transport.harmonics", Kind::Count, field(&ScenarioConfig::transport_harmonics)},
        {"transport.max_evaluations", Kind::Count, field(&ScenarioConfig::transport_max_evaluations)},
        {"transport.coefficients", Kind::Text, field(&ScenarioConfig::transport_coefficients)},
        {"multisite.sites", Kind::Count, field(&ScenarioConfig::multisite_sites)},
        {"bandmap.start_depth", Kind::Energy, field(&ScenarioConfig::bandmap_start_depth)},
        {"bandmap.aux_depth", Kind::Energy, field(&ScenarioConfig::bandmap_aux_depth)},
        {"bandmap.duration", Kind::Time, field(&ScenarioConfig::bandmap_duration)},
        {"bandmap.harmonics", Kind::Count, field(&ScenarioConfig::bandmap_harmonics)},
        {"bandmap.max_evaluations", Kind::Count, field(&ScenarioConfig::bandmap_max_evaluations)},
        {"bandmap.stages", Kind::CountList, field(&ScenarioConfig::bandmap_stages)},
        {"bandmap.evaluations_per_coefficient", Kind::Count,
         field(&ScenarioConfig::bandmap_evaluations_per_coefficient)},
        {"bandmap.coefficients", Kind::Text, field(&ScenarioConfig::bandmap_coefficients)},
        {"sensitivity.offset_max", Kind::Length, field(&ScenarioConfig::sensitivity_offset_max)},
        {"sensitivity.offset_points", Kind::Count, field(&ScenarioConfig::sensitivity_offset_points)},
        {"sensitivity.scale_span", Kind::Real, field(&ScenarioConfig::sensitivity_scale_span)},
        {"sensitivity.scale_points", Kind::Count, field(&ScenarioConfig::sensitivity_scale_points)},
        {"sensitivity.levels", Kind::RealList, field(&ScenarioConfig::sensitivity_levels)},
        {"budgets.sites", Kind::CountList, field(&ScenarioConfig::budget_sites)},
        {"errors.field_noise", Kind::Field, field(&ScenarioConfig::field_noise)},
        {"errors.relative_intensity", Kind::Real, field(&ScenarioConfig::relative_intensity)},
        {"errors.hold", Kind::Time, field(&ScenarioConfig::hold)},
        {"errors.tweezer_exposure", Kind::Time, field(&ScenarioConfig::tweezer_exposure)},
        {"errors.spin_exposure", Kind::Time, field(&ScenarioConfig::spin_exposure)},
        {"errors.lattice_exposure", Kind::Time, field(&ScenarioConfig::lattice_exposure)},
    };
    return table;
}

std::string_view trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Position of `part` inside `whole`, 1-based, for error columns.
int column_of(std::string_view whole, std::string_view part) {
    return static_cast<int>(part.data() - whole.data()) + 1;
}

struct Quantity {
    double number = 0.0;
    std::string_view unit;
};

Quantity split_number(std::string_view token, int line, int column) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr == token.data())
        throw ConfigError("not a number: '" + std::string(token) + "'", line, column);
    if (!std::isfinite(v)) throw ConfigError("value must be finite", line, column);
    return {v, trim(token.substr(static_cast<std::size_t>(ptr - token.data())))};
}

std::size_t parse_count(std::string_view token, int line, int column) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw ConfigError("expected a non-negative integer, got '" + std::string(token) + "'", line, column);
    return v;
}

double convert(Kind kind, const Quantity& q, const UnitSystem& units, int line, int column) {
    const std::string unit(q.unit);
    auto bad = [&](const char* expected) -> double {
        if (unit.empty()) throw ConfigError(std::string("missing unit, expected one of ") + expected, line, column);
        throw ConfigError("unknown unit '" + unit + "', expected one of " + expected, line, column);
    };
    switch (kind) {
    case Kind::Real:
        if (!unit.empty()) throw ConfigError("dimensionless value takes no unit, got '" + unit + "'", line, column);
        return q.number;
    case Kind::Time: {
        static const std::map<std::string, double> scale{{"ns", 1e-9}, {"us", 1e-6}, {"ms", 1e-3}, {"s", 1.0}};
        if (unit == "tu") return q.number;
        const auto it = scale.find(unit);
        if (it == scale.end()) return bad("ns us ms s tu");
        return units.from_si_time(q.number * it->second);
    }
    case Kind::Length:
    case Kind::Wavelength: {
        static const std::map<std::string, double> scale{{"nm", 1e-9}, {"um", 1e-6}, {"m", 1.0}};
        double meters = 0.0;
        if (unit == "alat") {
            meters = units.to_si_length(q.number);
        } else {
            const auto it = scale.find(unit);
            if (it == scale.end()) return bad("nm um m alat");
            meters = q.number * it->second;
        }
        if (kind == Kind::Wavelength) return meters;
        return unit == "alat" ? q.number : units.from_si_length(meters);
    }
    case Kind::Energy: {
        static const std::map<std::string, double> scale{{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}};
        if (unit == "Er") return q.number;
        const auto it = scale.find(unit);
        if (it == scale.end()) return bad("Er Hz kHz MHz");
        return units.energy_from_hz(q.number * it->second);
    }
    case Kind::Field: {
        static const std::map<std::string, double> scale{{"uG", 1e-6}, {"mG", 1e-3}, {"G", 1.0}};
        const auto it = scale.find(unit);
        if (it == scale.end()) return bad("uG mG G");
        return q.number * it->second;
    }
    default:
        break;
    }
    throw ConfigError("internal: unexpected value kind", line, column);
}

template <class T, class F>
std::vector<T> parse_list(std::string_view value, std::string_view line_text, int line, F parse_item) {
    std::vector<T> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = value.find(',', start);
        const std::string_view item =
            trim(value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (item.empty())
            throw ConfigError("empty list item", line, column_of(line_text, value.substr(start)));
        out.push_back(parse_item(item, column_of(line_text, item)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

void assign(const Key& key, ScenarioConfig& config, std::string_view value, std::string_view line_text, int line,
            const UnitSystem& units) {
    const int col = column_of(line_text, value);
    const Target target = key.target(config);
    switch (key.kind) {
    case Kind::Scenario:
        try {
            *std::get<ScenarioId*>(target) = parse_scenario(value);
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), line, col);
        }
        return;
    case Kind::Text:
        *std::get<std::string*>(target) = std::string(value);
        return;
    case Kind::Count:
        *std::get<std::size_t*>(target) = parse_count(value, line, col);
        return;
    case Kind::CountList:
        if (value.empty()) {
            std::get<std::vector<std::size_t>*>(target)->clear();
            return;
        }
        *std::get<std::vector<std::size_t>*>(target) = parse_list<std::size_t>(
            value, line_text, line, [&](std::string_view item, int c) { return parse_count(item, line, c); });
        return;
    case Kind::RealList:
        if (value.empty()) {
            std::get<std::vector<double>*>(target)->clear();
            return;
        }
        *std::get<std::vector<double>*>(target) =
            parse_list<double>(value, line_text, line, [&](std::string_view item, int c) {
                return convert(Kind::Real, split_number(item, line, c), units, line, c);
            });
        return;
    default:
        *std::get<double*>(target) = convert(key.kind, split_number(value, line, col), units, line, col);
        return;
    }
}

std::string echo_value(const Key& key, ScenarioConfig& config) {
    const Target target = key.target(config);
    auto join = [](const auto& items, auto fmt) {
        std::string s;
        for (std::size_t i = 0; i < items.size(); ++i) s += (i ? "," : "") + fmt(items[i]);
        return s;
    };
    switch (key.kind) {
    case Kind::Scenario:
        return std::string(to_string(*std::get<ScenarioId*>(target)));
    case Kind::Text:
        return *std::get<std::string*>(target);
    case Kind::Count:
        return std::to_string(*std::get<std::size_t*>(target));
    case Kind::CountList:
        return join(*std::get<std::vector<std::size_t>*>(target), [](std::size_t v) { return std::to_string(v); });
    case Kind::RealList:
        return join(*std::get<std::vector<double>*>(target), [](double v) { return format_double(v); });
    case Kind::Real:
        return format_double(*std::get<double*>(target));
    case Kind::Time:
        return format_double(*std::get<double*>(target)) + " tu";
    case Kind::Length:
        return format_double(*std::get<double*>(target)) + " alat";
    case Kind::Wavelength:
        return format_double(*std::get<double*>(target)) + " m";
    case Kind::Energy:
        return format_double(*std::get<double*>(target)) + " Er";
    case Kind::Field:
        return format_double(*std::get<double*>(target)) + " G";
    }
    return {};
}

}  // namespace

ScenarioId parse_scenario(std::string_view id) {
    for (const auto& [s, name] : scenario_names)
        if (name == id) return s;
    throw ConfigError("unknown scenario: " + std::string(id));
}

std::string_view to_string(ScenarioId id) {
    for (const auto& [s, name] : scenario_names)
        if (s == id) return name;
    return "unknown";
}

const std::vector<ScenarioId>& all_scenarios() {
    static const std::vector<ScenarioId> ids = [] {
        std::vector<ScenarioId> v;
        for (const auto& entry : scenario_names) v.push_back(entry.first);
        return v;
    }();
    return ids;
}

ScenarioConfig ScenarioConfig::defaults(const UnitSystem& units) {
    ScenarioConfig c;
    c.rampup_t_min = units.microseconds(2.0);
    c.rampup_t_max = units.microseconds(30.0);
    c.transport_duration = units.microseconds(25.0);
    c.transport_t_min = units.microseconds(5.0);
    c.transport_t_max = units.microseconds(45.0);
    c.bandmap_duration = units.microseconds(75.0);
    c.sensitivity_offset_max = units.from_si_length(10e-9);
    c.hold = units.microseconds(100.0);
    c.tweezer_exposure = units.microseconds(300.0);
    c.spin_exposure = units.microseconds(25.0);
    c.lattice_exposure = units.microseconds(300.0);
    return c;
}

ScenarioConfig parse_config(std::string_view text, const UnitSystem& units) {
    ScenarioConfig config = ScenarioConfig::defaults(units);
    std::set<std::string_view> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        const std::string_view line_text =
            text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        std::string_view content = line_text.substr(0, line_text.find('#'));
        if (trim(content).empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("expected 'section.key = value'", line_no,
                              column_of(line_text, trim(content)));
        const std::string_view name = trim(content.substr(0, eq));
        const std::string_view value = trim(content.substr(eq + 1));
        if (name.empty()) throw ConfigError("missing key before '='", line_no, static_cast<int>(eq) + 1);

        const auto& table = keys();
        const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return k.name == name; });
        if (it == table.end())
            throw ConfigError("unknown key '" + std::string(name) + "'", line_no, column_of(line_text, name));
        if (!seen.insert(it->name).second)
            throw ConfigError("duplicate key '" + std::string(name) + "'", line_no, column_of(line_text, name));
        const bool may_be_empty =
            it->kind == Kind::Text || it->kind == Kind::CountList || it->kind == Kind::RealList;
        if (value.empty() && !may_be_empty)
            throw ConfigError("missing value for '" + std::string(name) + "'", line_no, static_cast<int>(eq) + 2);
        assign(*it, config, value, line_text, line_no, units);
    }
    return config;
}

ScenarioConfig load_config(const std::string& path, const UnitSystem& units) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), units);
}

std::string resolved_config(const ScenarioConfig& config) {
    ScenarioConfig copy = config;
    std::ostringstream out;
    for (const auto& key : keys()) out << key.name << " = " << echo_value(key, copy) << '\n';
    return out.str();
}

std::vector<std::string> config_keys() {
    std::vector<std::string> names;
    for (const auto& key : keys()) names.emplace_back(key.name);
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace tweezer
