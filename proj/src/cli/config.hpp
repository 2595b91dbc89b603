#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heatbv/field.hpp"
#include "heatbv/limits.hpp"
#include "heatbv/space.hpp"

namespace heatbv::cli {

/// Flat INI-shaped config: [section] headers, key = value lines, '#' comments.
/// All numbers are decimal doubles. Parse errors carry line/column positions.
class IniFile {
public:
    static IniFile parse(const std::string& text);
    static IniFile parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& section, const std::string& key) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const;

private:
    struct Entry {
        std::string value;
        int line = 0;
        int column = 0;
    };
    std::map<std::string, std::map<std::string, Entry>> sections_;
};

enum class Scenario {
    ValidateKernel,
    Sobolev,
    Bv,
    Perimeter,
    Jump,
    Polarization,
    Blowup,
    Membership,
};

const char* scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

struct ExperimentConfig {
    Scenario scenario = Scenario::Bv;
    double tolerance = 0.01;
    std::string output_dir = "out";
    std::string engine = "auto";  // auto | closed-form | image-sum | spectral
    std::size_t modes = 0;

    GeometryDescriptor geometry;

    std::optional<FieldSpec> field;
    std::vector<std::pair<double, double>> set_e;  // intervals of E
    std::vector<std::pair<double, double>> set_f;  // intervals of F
    std::optional<double> halfline_a;

    double p = 2.0;
    TLadder ladder;

    double blowup_point = 0.0;
    double membership_radius = 0.04;
    std::string membership_expect = "bounded";  // bounded | diverging

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_ini(const IniFile& ini);
};

}  // namespace heatbv::cli
