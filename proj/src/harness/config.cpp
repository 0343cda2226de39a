// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/harness/config.hpp"

#include "wetbeam/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace wetbeam::harness {

using json = nlohmann::ordered_json;

namespace {

struct KeySpec {
    std::string name;
    std::function<void(ExperimentConfig&, const json&)> set;
    std::function<json(const ExperimentConfig&)> get;
};

[[noreturn]] void type_error(const std::string& key, const std::string& expected, const json& value)
{
    throw ConfigError("key '" + key + "' expects " + expected + ", got " + value.dump());
}

double as_double(const std::string& key, const json& v)
{
    if (!v.is_number())
        type_error(key, "a number", v);
    return v.get<double>();
}

long long as_integer(const std::string& key, const json& v)
{
    if (v.is_number_integer())
        return v.get<long long>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15)
            return static_cast<long long>(d);
    }
    type_error(key, "an integer", v);
}

int as_int(const std::string& key, const json& v)
{
    const long long x = as_integer(key, v);
    if (x < -2147483647LL || x > 2147483647LL)
        throw ConfigError("key '" + key + "' is out of range");
    return static_cast<int>(x);
}

std::uint64_t as_u64(const std::string& key, const json& v)
{
    if (v.is_number_unsigned())
        return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0)
        return static_cast<std::uint64_t>(v.get<long long>());
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            try {
                return std::stoull(s);
            } catch (const std::out_of_range&) {
            }
        }
    }
    type_error(key, "an unsigned 64-bit integer", v);
}

std::string as_string(const std::string& key, const json& v)
{
    if (!v.is_string())
        type_error(key, "a string", v);
    return v.get<std::string>();
}

/// null or "auto" clears the value back to its derived default.
std::optional<double> as_optional(const std::string& key, const json& v)
{
    if (v.is_null() || (v.is_string() && v.get<std::string>() == "auto"))
        return std::nullopt;
    return as_double(key, v);
}

json optional_json(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos)
            out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::vector<double> as_number_list(const std::string& key, const json& v)
{
    std::vector<double> out;
    if (v.is_array()) {
        for (const auto& x : v)
            out.push_back(as_double(key, x));
        return out;
    }
    if (v.is_number())
        return {v.get<double>()};
    if (v.is_string()) {
        for (const auto& s : split_list(v.get<std::string>())) {
            std::size_t used = 0;
            double d = 0.0;
            try {
                d = std::stod(s, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != s.size())
                type_error(key, "a list of numbers", v);
            out.push_back(d);
        }
        return out;
    }
    type_error(key, "a list of numbers", v);
}

std::vector<Architecture> as_architectures(const std::string& key, const json& v)
{
    std::vector<std::string> names;
    if (v.is_array()) {
        for (const auto& x : v)
            names.push_back(as_string(key, x));
    } else if (v.is_string()) {
        names = split_list(v.get<std::string>());
    } else {
        type_error(key, "a list of architecture names", v);
    }
    std::vector<Architecture> out;
    for (const auto& n : names)
        out.push_back(architecture_from_string(n));
    return out;
}

ExperimentKind kind_from_string(const std::string& s)
{
    if (s == "sweep")
        return ExperimentKind::Sweep;
    if (s == "convergence")
        return ExperimentKind::Convergence;
    if (s == "nearfield")
        return ExperimentKind::NearField;
    throw ConfigError("experiment must be sweep, convergence or nearfield, got '" + s + "'");
}

SweepAxis axis_from_string(const std::string& s)
{
    if (s == "none")
        return SweepAxis::None;
    if (s == "N")
        return SweepAxis::Chains;
    if (s == "M")
        return SweepAxis::Elements;
    if (s == "ell")
        return SweepAxis::Ways;
    if (s == "d_f")
        return SweepAxis::FeederDistance;
    throw ConfigError("sweep must be none, N, M, ell or d_f, got '" + s + "'");
}

FocusMode focus_from_string(const std::string& s)
{
    if (s == "sca")
        return FocusMode::Sca;
    if (s == "conjugate")
        return FocusMode::Conjugate;
    throw ConfigError("focus must be sca or conjugate, got '" + s + "'");
}

#define WB_DOUBLE(field)                                                                                   \
    KeySpec{#field, [](ExperimentConfig& c, const json& v) { c.field = as_double(#field, v); },            \
            [](const ExperimentConfig& c) { return json(c.field); }}
#define WB_INT(field)                                                                                      \
    KeySpec{#field, [](ExperimentConfig& c, const json& v) { c.field = as_int(#field, v); },               \
            [](const ExperimentConfig& c) { return json(c.field); }}
#define WB_OPTIONAL(field)                                                                                 \
    KeySpec{#field, [](ExperimentConfig& c, const json& v) { c.field = as_optional(#field, v); },          \
            [](const ExperimentConfig& c) { return optional_json(c.field); }}

const std::vector<KeySpec>& key_table()
{
    static const std::vector<KeySpec> table = {
        KeySpec{"experiment", [](ExperimentConfig& c, const json& v) { c.kind = kind_from_string(as_string("experiment", v)); },
                [](const ExperimentConfig& c) { return json(to_string(c.kind)); }},
        KeySpec{"id", [](ExperimentConfig& c, const json& v) { c.id = as_string("id", v); },
                [](const ExperimentConfig& c) { return json(c.id); }},
        WB_DOUBLE(P_bb),
        WB_DOUBLE(P_tc),
        WB_DOUBLE(P_ctrl),
        WB_DOUBLE(P_cell),
        WB_DOUBLE(P_th),
        WB_DOUBLE(P_max),
        WB_DOUBLE(mu),
        WB_DOUBLE(kappa),
        WB_OPTIONAL(delta),
        WB_DOUBLE(eta_max),
        WB_DOUBLE(rho_its),
        WB_INT(K),
        WB_INT(M),
        WB_INT(N),
        WB_DOUBLE(f_c),
        WB_DOUBLE(gamma_s),
        WB_DOUBLE(gamma_c),
        WB_DOUBLE(gamma_p),
        WB_OPTIONAL(r_a),
        WB_OPTIONAL(d_f),
        WB_INT(ell),
        WB_DOUBLE(g),
        WB_DOUBLE(d_x),
        WB_DOUBLE(d_y),
        WB_DOUBLE(d_z),
        KeySpec{"architectures",
                [](ExperimentConfig& c, const json& v) { c.architectures = as_architectures("architectures", v); },
                [](const ExperimentConfig& c) {
                    json a = json::array();
                    for (auto t : c.architectures)
                        a.push_back(std::string(to_string(t)));
                    return a;
                }},
        KeySpec{"sweep", [](ExperimentConfig& c, const json& v) { c.sweep = axis_from_string(as_string("sweep", v)); },
                [](const ExperimentConfig& c) { return json(to_string(c.sweep)); }},
        KeySpec{"sweep_values",
                [](ExperimentConfig& c, const json& v) { c.sweep_values = as_number_list("sweep_values", v); },
                [](const ExperimentConfig& c) { return json(c.sweep_values); }},
        WB_INT(realizations),
        KeySpec{"seed", [](ExperimentConfig& c, const json& v) { c.seed = as_u64("seed", v); },
                [](const ExperimentConfig& c) { return json(c.seed); }},
        KeySpec{"output_dir", [](ExperimentConfig& c, const json& v) { c.output_dir = as_string("output_dir", v); },
                [](const ExperimentConfig& c) { return json(c.output_dir); }},
        WB_INT(workers),
        KeySpec{"cluster_rule",
                [](ExperimentConfig& c, const json& v) { c.cluster_rule = as_string("cluster_rule", v); },
                [](const ExperimentConfig& c) { return json(c.cluster_rule); }},
        KeySpec{"permutation_cap",
                [](ExperimentConfig& c, const json& v) { c.permutation_cap = as_integer("permutation_cap", v); },
                [](const ExperimentConfig& c) { return json(c.permutation_cap); }},
        WB_INT(max_iterations),
        WB_DOUBLE(tolerance),
        KeySpec{"focus", [](ExperimentConfig& c, const json& v) { c.focus = focus_from_string(as_string("focus", v)); },
                [](const ExperimentConfig& c) { return json(to_string(c.focus)); }},
        WB_DOUBLE(device_distance),
        WB_DOUBLE(map_extent),
        WB_INT(map_points),
    };
    return table;
}

#undef WB_DOUBLE
#undef WB_INT
#undef WB_OPTIONAL

const KeySpec& find_key(const std::string& name)
{
    const auto& table = key_table();
    // delta_a is the table symbol for the feeder distance.
    const std::string lookup = name == "delta_a" ? "d_f" : name;
    for (const auto& k : table)
        if (k.name == lookup)
            return k;
    throw ConfigError("unknown configuration key '" + name + "'");
}

void require(bool ok, const std::string& message)
{
    if (!ok)
        throw ConfigError(message);
}

bool is_integral(double v)
{
    return std::isfinite(v) && v == std::floor(v);
}

void validate_point(const ExperimentConfig& c, const std::string& where)
{
    require(c.K >= 1, "K must be >= 1" + where);
    require(c.N >= 1, "N must be >= 1" + where);
    require(c.M >= 1, "M must be >= 1" + where);
    require(c.ell >= 1, "ell must be >= 1" + where);
    require(c.N >= c.K, "N must be >= K (fewer chains than devices is unsupported)" + where);
    for (auto a : c.architectures)
        if (a != Architecture::FullyDigital)
            require(c.M >= c.N, "M must be >= N" + where);
    if (c.d_f)
        require(*c.d_f > 0.0, "d_f must be positive" + where);
}

} // namespace

std::string to_string(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::Sweep:
        return "sweep";
    case ExperimentKind::Convergence:
        return "convergence";
    case ExperimentKind::NearField:
        return "nearfield";
    }
    return "?";
}

std::string to_string(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::None:
        return "none";
    case SweepAxis::Chains:
        return "N";
    case SweepAxis::Elements:
        return "M";
    case SweepAxis::Ways:
        return "ell";
    case SweepAxis::FeederDistance:
        return "d_f";
    }
    return "?";
}

std::string to_string(FocusMode mode)
{
    return mode == FocusMode::Sca ? "sca" : "conjugate";
}

const std::vector<std::string>& keys()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& k : key_table())
            out.push_back(k.name);
        return out;
    }();
    return names;
}

void ExperimentConfig::validate() const
{
    require(P_bb >= 0.0 && std::isfinite(P_bb), "P_bb must be finite and >= 0");
    require(P_tc >= 0.0 && std::isfinite(P_tc), "P_tc must be finite and >= 0");
    require(P_ctrl >= 0.0 && std::isfinite(P_ctrl), "P_ctrl must be finite and >= 0");
    require(P_cell >= 0.0 && std::isfinite(P_cell), "P_cell must be finite and >= 0");
    require(P_th > 0.0 && std::isfinite(P_th), "P_th must be positive");
    require(P_max > 0.0 && std::isfinite(P_max), "P_max must be positive");
    require(mu >= 2.0 && std::isfinite(mu), "mu must be >= 2");
    require(kappa >= 2.0 && std::isfinite(kappa), "kappa must be >= 2");
    if (delta)
        require(*delta > 0.0 && std::isfinite(*delta), "delta must be positive");
    require(eta_max > 0.0 && eta_max <= 1.0, "eta_max must lie in (0, 1]");
    require(rho_its > 0.0 && rho_its <= 1.0, "rho_its must lie in (0, 1]");
    require(f_c > 0.0 && std::isfinite(f_c), "f_c must be positive");
    require(gamma_s >= 0.0 && gamma_c >= 0.0 && gamma_p >= 0.0, "insertion losses must be >= 0 dB");
    if (r_a)
        require(*r_a >= 0.0 && std::isfinite(*r_a), "r_a must be >= 0");
    require(g > 0.0 && std::isfinite(g), "g must be positive");
    require(d_x > 0.0 && d_y > 0.0 && d_z > 0.0, "service area dimensions must be positive");
    require(!architectures.empty(), "architectures must not be empty");
    for (std::size_t i = 0; i < architectures.size(); ++i)
        for (std::size_t j = i + 1; j < architectures.size(); ++j)
            require(architectures[i] != architectures[j], "architectures must not repeat");
    require(realizations >= 1, "realizations must be >= 1");
    require(workers >= 1, "workers must be >= 1");
    require(permutation_cap >= 1, "permutation_cap must be >= 1");
    require(max_iterations >= 1, "max_iterations must be >= 1");
    require(tolerance > 0.0 && tolerance < 1.0, "tolerance must lie in (0, 1)");
    cluster_rule_from_string(cluster_rule);
    require(device_distance > 0.0, "device_distance must be positive");
    require(map_extent > 0.0, "map_extent must be positive");
    require(map_points >= 2, "map_points must be >= 2");

    if (sweep == SweepAxis::None) {
        require(sweep_values.empty(), "sweep_values given without a sweep axis");
    } else {
        require(!sweep_values.empty(), "sweep axis " + to_string(sweep) + " needs sweep_values");
        for (std::size_t i = 0; i < sweep_values.size(); ++i) {
            require(std::isfinite(sweep_values[i]), "sweep_values must be finite");
            if (i > 0)
                require(sweep_values[i] > sweep_values[i - 1], "sweep_values must be strictly ascending");
            if (sweep != SweepAxis::FeederDistance)
                require(is_integral(sweep_values[i]) && sweep_values[i] >= 1.0,
                        "sweep_values for axis " + to_string(sweep) + " must be positive integers");
        }
    }

    if (kind == ExperimentKind::Convergence) {
        require(architectures.size() == 1 && architectures[0] == Architecture::Its,
                "the convergence experiment runs the ITS architecture only");
        require(sweep == SweepAxis::None, "the convergence experiment takes no sweep axis");
    }
    if (kind == ExperimentKind::NearField) {
        require(architectures.size() == 1 && architectures[0] == Architecture::Its,
                "the near-field experiment runs the ITS architecture only");
        require(K == 1, "the near-field experiment uses a single device (K = 1)");
        require(sweep == SweepAxis::None || sweep == SweepAxis::FeederDistance,
                "the near-field experiment sweeps d_f only");
    }

    for (double v : sweep_points())
        validate_point(at_sweep_point(v),
                       sweep == SweepAxis::None ? "" : " (at " + to_string(sweep) + " = " + json(v).dump() + ")");
}

std::vector<double> ExperimentConfig::sweep_points() const
{
    if (sweep == SweepAxis::None)
        return {0.0};
    return sweep_values;
}

ExperimentConfig ExperimentConfig::at_sweep_point(double value) const
{
    ExperimentConfig c = *this;
    switch (sweep) {
    case SweepAxis::None:
        break;
    case SweepAxis::Chains:
        c.N = static_cast<int>(value);
        break;
    case SweepAxis::Elements:
        c.M = static_cast<int>(value);
        break;
    case SweepAxis::Ways:
        c.ell = static_cast<int>(value);
        break;
    case SweepAxis::FeederDistance:
        c.d_f = value;
        break;
    }
    return c;
}

double ExperimentConfig::wavelength() const
{
    return wavelength_from_frequency(f_c);
}

GeometryParams ExperimentConfig::geometry() const
{
    const double lambda = wavelength();
    GeometryParams p;
    p.its_elements = M;
    p.feeder_antennas = N;
    p.devices = K;
    p.spacing = delta.value_or(lambda / 2.0);
    p.circumradius = r_a ? *r_a : default_circumradius(N, lambda);
    p.feeder_distance = d_f ? *d_f : default_feeder_distance(M, lambda);
    p.area_x = d_x;
    p.area_y = d_y;
    p.area_distance = d_z;
    if (kind == ExperimentKind::NearField)
        p.fixed_devices = std::vector<Vec3>{Vec3(0.0, 0.0, -device_distance)};
    return p;
}

RadiationParams ExperimentConfig::radiation() const
{
    RadiationParams p;
    p.its_gain = kappa;
    p.feeder_gain = mu;
    p.wavelength = wavelength();
    return p;
}

PowerModel ExperimentConfig::power_model() const
{
    PowerModel m;
    m.doherty.ways = ell;
    m.doherty.peak_efficiency = eta_max;
    m.doherty.max_output = P_max;
    m.doherty.gain = g;
    m.statics.baseband = P_bb;
    m.statics.transceiver = P_tc;
    m.its.control = P_ctrl;
    m.its.per_cell = P_cell;
    m.its_efficiency = rho_its;
    m.splitter_db = gamma_s;
    m.combiner_db = gamma_c;
    m.shifter_db = gamma_p;
    return m;
}

ScaSettings ExperimentConfig::sca_settings() const
{
    ScaSettings s;
    s.max_iterations = max_iterations;
    s.tolerance = tolerance;
    s.targets = rvec::Constant(K, P_th);
    return s;
}

InitSettings ExperimentConfig::init_settings() const
{
    InitSettings s;
    s.cluster_rule = cluster_rule_from_string(cluster_rule);
    s.permutation_cap = permutation_cap;
    s.workers = 1;
    return s;
}

ExperimentConfig preset(const std::string& name)
{
    ExperimentConfig c;
    c.id = name;
    if (name == "fig4") {
        c.kind = ExperimentKind::Convergence;
        c.architectures = {Architecture::Its};
        c.realizations = 1;
    } else if (name == "fig5") {
        c.sweep = SweepAxis::Chains;
        c.sweep_values = {4, 5, 6, 7, 8};
    } else if (name == "fig6") {
        c.sweep = SweepAxis::Elements;
        c.sweep_values = {100, 144, 196, 256, 324, 400};
    } else if (name == "fig7") {
        c.sweep = SweepAxis::Ways;
        c.sweep_values = {1, 2, 3, 4, 5, 6};
    } else if (name == "fig8") {
        c.kind = ExperimentKind::NearField;
        c.architectures = {Architecture::Its};
        c.M = 400;
        c.N = 1;
        c.K = 1;
        c.r_a = 0.0;
        c.sweep = SweepAxis::FeederDistance;
        c.sweep_values = {0.2, 1.35};
        c.realizations = 1;
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected fig4, fig5, fig6, fig7 or fig8)");
    }
    return c;
}

void apply_json(ExperimentConfig& config, const std::string& json_text, const std::string& origin)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": malformed JSON: " + e.what());
    }
    if (doc.is_null())
        return;
    if (!doc.is_object())
        throw ConfigError(origin + ": top level must be an object");
    for (const auto& [key, value] : doc.items()) {
        try {
            find_key(key).set(config, value);
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ": " + e.what());
        }
    }
}

void apply_override(ExperimentConfig& config, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    try {
        find_key(key).set(config, value);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("--set ") + e.what());
    }
}

ExperimentConfig load_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides,
                             const ExperimentConfig& base)
{
    ExperimentConfig config = base;
    if (path) {
        std::ifstream in(*path);
        if (!in)
            throw ConfigError("cannot read config file '" + *path + "'");
        std::stringstream buffer;
        buffer << in.rdbuf();
        const std::string text = buffer.str();
        if (text.find_first_not_of(" \t\r\n") != std::string::npos)
            apply_json(config, text, *path);
    }
    for (const auto& o : overrides)
        apply_override(config, o);
    config.validate();
    return config;
}

ExperimentConfig scaled(const ExperimentConfig& config, double factor)
{
    if (!(factor > 0.0 && factor <= 1.0))
        throw ConfigError("--scale must lie in (0, 1]");
    ExperimentConfig c = config;
    if (factor == 1.0)
        return c;
    auto shrink = [&](double m) { return std::max(1.0, std::round(m * factor)); };
    c.M = static_cast<int>(std::max<double>(shrink(c.M), c.N));
    c.realizations = static_cast<int>(shrink(c.realizations));
    if (c.sweep == SweepAxis::Elements) {
        std::vector<double> values;
        for (double v : c.sweep_values) {
            const double s = std::max<double>(shrink(v), c.N);
            if (values.empty() || s > values.back())
                values.push_back(s);
        }
        c.sweep_values = values;
    }
    return c;
}

std::string to_json(const ExperimentConfig& config)
{
    json doc = json::object();
    for (const auto& k : key_table())
        doc[k.name] = k.get(config);
    return doc.dump(2);
}

} // namespace wetbeam::harness
