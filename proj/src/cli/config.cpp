#include "cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "heatbv/errors.hpp"

namespace heatbv::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

IniFile IniFile::parse(const std::string& text) {
    IniFile ini;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigParse("unterminated section header", lineno,
                                  static_cast<int>(line.find('[')) + 1);
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) throw ConfigParse("empty section name", lineno, 1);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigParse("expected 'key = value'", lineno, 1);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigParse("empty key", lineno, 1);
        const int col = static_cast<int>(line.find(key)) + 1;
        ini.sections_[section][key] = Entry{value, lineno, col};
    }
    return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string IniFile::get(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end() || !s->second.count(key))
        throw ConfigParse("missing required key [" + section + "] " + key, 0, 0);
    return s->second.at(key).value;
}

std::string IniFile::get_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double IniFile::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    const auto& e = sections_.at(section).at(key);
    std::size_t pos = 0;
    double x = 0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigParse("expected a decimal number for [" + section + "] " + key, e.line,
                          e.column);
    }
    if (pos != v.size())
        throw ConfigParse("trailing characters after number for [" + section + "] " + key, e.line,
                          e.column);
    return x;
}

double IniFile::get_double_or(const std::string& section, const std::string& key,
                              double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

std::size_t IniFile::get_size(const std::string& section, const std::string& key) const {
    const double v = get_double(section, key);
    if (v < 0 || v != std::floor(v))
        throw ConfigParse("expected a non-negative integer for [" + section + "] " + key, 0, 0);
    return static_cast<std::size_t>(v);
}

std::vector<double> IniFile::get_doubles(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    std::istringstream in(v);
    std::vector<double> out;
    double x;
    while (in >> x) out.push_back(x);
    if (!in.eof()) {
        const auto& e = sections_.at(section).at(key);
        throw ConfigParse("expected a space-separated list of numbers for [" + section + "] " + key,
                          e.line, e.column);
    }
    return out;
}

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::ValidateKernel: return "validate-kernel";
        case Scenario::Sobolev: return "sobolev";
        case Scenario::Bv: return "bv";
        case Scenario::Perimeter: return "perimeter";
        case Scenario::Jump: return "jump";
        case Scenario::Polarization: return "polarization";
        case Scenario::Blowup: return "blowup";
        case Scenario::Membership: return "membership";
    }
    return "?";
}

Scenario scenario_from_name(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(Scenario::Membership); ++i) {
        const auto s = static_cast<Scenario>(i);
        if (name == scenario_name(s)) return s;
    }
    throw ConfigParse("unknown scenario '" + name + "'", 0, 0);
}

namespace {

std::vector<std::pair<double, double>> parse_intervals(const std::vector<double>& flat) {
    if (flat.size() % 2 != 0)
        throw ConfigParse("interval list needs an even number of endpoints", 0, 0);
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i + 1 < flat.size(); i += 2) out.emplace_back(flat[i], flat[i + 1]);
    return out;
}

GeometryDescriptor parse_geometry(const IniFile& ini) {
    const std::string kind = ini.get("geometry", "kind");
    if (kind == "circle")
        return GeometryDescriptor::circle(ini.get_double_or("geometry", "length", 1.0),
                                          ini.get_size("geometry", "resolution"));
    if (kind == "line")
        return GeometryDescriptor::line(ini.get_double("geometry", "a"),
                                        ini.get_double("geometry", "b"),
                                        ini.get_size("geometry", "resolution"));
    if (kind == "torus")
        return GeometryDescriptor::torus(ini.get_double_or("geometry", "length", 1.0),
                                         ini.get_size("geometry", "resolution"));
    if (kind == "euclidean") {
        const auto lo = ini.get_doubles("geometry", "box_lo");
        const auto hi = ini.get_doubles("geometry", "box_hi");
        return GeometryDescriptor::euclidean(lo, hi, ini.get_size("geometry", "resolution"));
    }
    if (kind == "graph") {
        const std::string path = ini.get("geometry", "edges");
        std::ifstream in(path);
        if (!in) throw IoError("cannot open edge list: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return GeometryDescriptor::graph(parse_edge_list(buf.str()));
    }
    throw ConfigParse("unknown geometry kind '" + kind + "'", 0, 0);
}

std::optional<FieldSpec> parse_field(const IniFile& ini, const GeometryDescriptor& geom) {
    if (!ini.has("field", "kind")) return std::nullopt;
    const std::string kind = ini.get("field", "kind");
    const double domain_length =
        geom.kind == GeometryKind::LineGrid ? (geom.b - geom.a) : geom.length;
    if (kind == "sine")
        return FieldSpec::sine(ini.get_double_or("field", "amplitude", 1.0),
                               ini.get_double_or("field", "periods", 1.0), domain_length);
    if (kind == "linear")
        return FieldSpec::linear(ini.get_double_or("field", "slope", 1.0),
                                 ini.get_double_or("field", "offset", 0.0));
    if (kind == "constant") return FieldSpec::constant_field(ini.get_double_or("field", "value", 0.0));
    if (kind == "staircase") {
        JumpProfile prof;
        prof.breakpoints = ini.get_doubles("field", "breakpoints");
        prof.values = ini.get_doubles("field", "values");
        prof.periodic = geom.kind == GeometryKind::CircleGrid;
        prof.period = geom.length;
        prof.validate();
        return FieldSpec::piecewise(std::move(prof));
    }
    throw ConfigParse("unknown field kind '" + kind + "'", 0, 0);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_ini(const IniFile& ini) {
    ExperimentConfig c;
    c.scenario = scenario_from_name(ini.get("scenario", "name"));
    c.tolerance = ini.get_double_or("scenario", "tolerance", 0.01);
    if (!(c.tolerance > 0.0 && c.tolerance <= 0.1))
        throw ConfigParse("tolerance must lie in (0, 0.1]", 0, 0);
    c.output_dir = ini.get_or("scenario", "output", "out");
    c.engine = ini.get_or("scenario", "engine", "auto");
    c.modes = ini.has("scenario", "modes") ? ini.get_size("scenario", "modes") : 0;

    c.geometry = parse_geometry(ini);
    c.field = parse_field(ini, c.geometry);
    if (ini.has("set", "intervals")) c.set_e = parse_intervals(ini.get_doubles("set", "intervals"));
    if (ini.has("set", "halfline")) c.halfline_a = ini.get_double("set", "halfline");
    if (ini.has("set2", "intervals"))
        c.set_f = parse_intervals(ini.get_doubles("set2", "intervals"));

    c.p = ini.get_double_or("sweep", "p", 2.0);
    c.ladder.t0 = ini.get_double_or("sweep", "t0", 1e-2);
    c.ladder.rho = ini.get_double_or("sweep", "rho", 0.5);
    c.ladder.k = ini.has("sweep", "k") ? ini.get_size("sweep", "k") : 6;

    c.blowup_point = ini.get_double_or("scenario", "point", 0.0);
    c.membership_radius = ini.get_double_or("scenario", "radius", 0.04);
    c.membership_expect = ini.get_or("scenario", "expect", "bounded");
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_ini(IniFile::parse_file(path));
}

}  // namespace heatbv::cli
