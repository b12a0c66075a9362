#include "octoswim/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string_view>

#include "octoswim/csv.hpp"

namespace octoswim {

namespace pt = boost::property_tree;

namespace {

// Shortest text that reads back to the same double.
std::string shortest(double v) {
    if (v == 0.0) v = 0.0;
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

const char* to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::design: return "design";
        case ScenarioKind::mech: return "mech";
        case ScenarioKind::arm: return "arm";
        case ScenarioKind::swim: return "swim";
        case ScenarioKind::steer: return "steer";
        case ScenarioKind::sweep: return "sweep";
    }
    return "?";
}

SweepGrid default_sweep_grid() {
    SweepGrid g;
    g.presets = {MechanismGeometry(25.0, 66.0, 40.0), MechanismGeometry(25.0, 69.4, 40.0),
                 MechanismGeometry(19.5, 83.0, 40.0)};
    g.incision_depths = {0.0, 0.2, 0.4, 0.7};
    g.rpms = {33.0};
    return g;
}

ScenarioConfig default_scenario() {
    ScenarioConfig c;
    c.sweep = default_sweep_grid();
    return c;
}

namespace {

// Mutable view of a scenario while keys are applied. Geometry and arm inputs
// are kept raw so their constructors run once, after every key is known.
struct Draft {
    ScenarioConfig cfg;
    double left[3]{25.0, 66.0, 40.0};
    double right[3]{25.0, 66.0, 40.0};
    ArmGeometry arm;
    ArmMaterial material;
};

Draft draft_from(const ScenarioConfig& c) {
    Draft d;
    d.cfg = c;
    d.left[0] = c.robot.mechanism_left.crank();
    d.left[1] = c.robot.mechanism_left.coupler();
    d.left[2] = c.robot.mechanism_left.offset();
    d.right[0] = c.robot.mechanism_right.crank();
    d.right[1] = c.robot.mechanism_right.coupler();
    d.right[2] = c.robot.mechanism_right.offset();
    d.arm = c.robot.arm_model.geometry;
    d.material = c.robot.arm_model.material;
    return d;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& raw, const std::string& where) {
    const std::string s = trim(raw);
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    auto res = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError(where + ": expected a number, got '" + raw + "'");
    }
    return v;
}

int parse_int(const std::string& raw, const std::string& where) {
    const std::string s = trim(raw);
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError(where + ": expected an integer, got '" + raw + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_list(const std::string& raw, const std::string& where) {
    std::vector<double> out;
    for (const auto& item : split(raw, ',')) out.push_back(parse_double(item, where));
    return out;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += shortest(values[i]);
    }
    return out;
}

MotorProfile parse_profile(const std::string& raw, const std::string& where) {
    std::vector<std::pair<double, double>> steps;
    for (const auto& item : split(raw, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError(where + ": expected t:rpm pairs, got '" + raw + "'");
        steps.emplace_back(parse_double(item.substr(0, colon), where), parse_double(item.substr(colon + 1), where));
    }
    if (steps.empty()) throw ConfigError(where + ": empty motor profile");
    try {
        return MotorProfile(std::move(steps));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

std::string format_profile(const MotorProfile& p) {
    std::string out;
    for (std::size_t i = 0; i < p.steps().size(); ++i) {
        if (i) out += ", ";
        out += shortest(p.steps()[i].first) + ":" + shortest(p.steps()[i].second);
    }
    return out;
}

std::vector<MechanismGeometry> parse_presets(const std::string& raw, const std::string& where) {
    std::vector<MechanismGeometry> out;
    for (const auto& item : split(raw, ',')) {
        const auto parts = split(item, '/');
        if (parts.size() != 3) throw ConfigError(where + ": expected a/b/e triples, got '" + item + "'");
        try {
            out.emplace_back(parse_double(parts[0], where), parse_double(parts[1], where),
                             parse_double(parts[2], where));
        } catch (const InvalidGeometry& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    return out;
}

std::string format_presets(const std::vector<MechanismGeometry>& presets) {
    std::string out;
    for (std::size_t i = 0; i < presets.size(); ++i) {
        if (i) out += ", ";
        out += shortest(presets[i].crank()) + "/" + shortest(presets[i].coupler()) + "/" +
               shortest(presets[i].offset());
    }
    return out;
}

template <class E>
E parse_enum(const std::string& raw, const std::string& where, std::initializer_list<std::pair<const char*, E>> opts) {
    const std::string s = trim(raw);
    std::string names;
    for (const auto& [name, value] : opts) {
        if (s == name) return value;
        names += names.empty() ? name : std::string("|") + name;
    }
    throw ConfigError(where + ": expected one of " + names + ", got '" + raw + "'");
}

struct Field {
    const char* section;
    const char* key;
    const char* doc;
    std::function<std::string(const Draft&)> get;
    std::function<void(Draft&, const std::string&, const std::string&)> set;
};

Field num(const char* section, const char* key, const char* doc, std::function<double&(Draft&)> ref) {
    return Field{section, key, doc,
                 [ref](const Draft& d) { return shortest(ref(const_cast<Draft&>(d))); },
                 [ref](Draft& d, const std::string& v, const std::string& w) { ref(d) = parse_double(v, w); }};
}

const std::vector<Field>& schema() {
    static const std::vector<Field> fields = [] {
        std::vector<Field> f;
        f.push_back({"scenario", "kind", "design|mech|arm|swim|steer|sweep",
                     [](const Draft& d) { return std::string(to_string(d.cfg.kind)); },
                     [](Draft& d, const std::string& v, const std::string& w) {
                         d.cfg.kind = parse_enum<ScenarioKind>(v, w, {{"design", ScenarioKind::design},
                                                                      {"mech", ScenarioKind::mech},
                                                                      {"arm", ScenarioKind::arm},
                                                                      {"swim", ScenarioKind::swim},
                                                                      {"steer", ScenarioKind::steer},
                                                                      {"sweep", ScenarioKind::sweep}});
                     }});
        f.push_back(num("simulation", "duration", "s", [](Draft& d) -> double& { return d.cfg.sim.duration; }));
        f.push_back(num("simulation", "dt", "s, at most 1e-3", [](Draft& d) -> double& { return d.cfg.sim.dt; }));
        f.push_back(num("simulation", "sample_interval", "s, whole multiple of dt",
                        [](Draft& d) -> double& { return d.cfg.sim.sample_interval; }));

        f.push_back(num("mechanism_left", "crank_a", "mm", [](Draft& d) -> double& { return d.left[0]; }));
        f.push_back(num("mechanism_left", "coupler_b", "mm", [](Draft& d) -> double& { return d.left[1]; }));
        f.push_back(num("mechanism_left", "offset_e", "mm", [](Draft& d) -> double& { return d.left[2]; }));
        f.push_back(num("mechanism_right", "crank_a", "mm", [](Draft& d) -> double& { return d.right[0]; }));
        f.push_back(num("mechanism_right", "coupler_b", "mm", [](Draft& d) -> double& { return d.right[1]; }));
        f.push_back(num("mechanism_right", "offset_e", "mm", [](Draft& d) -> double& { return d.right[2]; }));

        f.push_back(num("arm", "length", "mm", [](Draft& d) -> double& { return d.arm.length; }));
        f.push_back(num("arm", "base_diameter", "mm", [](Draft& d) -> double& { return d.arm.base_diameter; }));
        f.push_back(num("arm", "tip_diameter", "mm", [](Draft& d) -> double& { return d.arm.tip_diameter; }));
        f.push_back(num("arm", "incision_depth", "fraction of local diameter, [0, 1)",
                        [](Draft& d) -> double& { return d.arm.incision_depth; }));
        f.push_back({"arm", "n_segments", "rigid segments, 2..64",
                     [](const Draft& d) { return format_number(static_cast<long long>(d.arm.n_segments)); },
                     [](Draft& d, const std::string& v, const std::string& w) { d.arm.n_segments = parse_int(v, w); }});
        f.push_back(num("arm", "youngs_modulus", "Pa", [](Draft& d) -> double& { return d.material.youngs_modulus; }));
        f.push_back(num("arm", "density", "kg/m^3", [](Draft& d) -> double& { return d.material.density; }));
        f.push_back(num("arm", "damping_ratio", "per joint", [](Draft& d) -> double& { return d.material.damping_ratio; }));

        f.push_back(num("fluid", "density", "kg/m^3", [](Draft& d) -> double& { return d.cfg.robot.env.density; }));
        f.push_back(num("fluid", "cd_normal", "", [](Draft& d) -> double& { return d.cfg.robot.env.cd_normal; }));
        f.push_back(num("fluid", "ct_tangential", "", [](Draft& d) -> double& { return d.cfg.robot.env.ct_tangential; }));
        f.push_back(num("fluid", "cd_body", "", [](Draft& d) -> double& { return d.cfg.robot.env.cd_body; }));
        f.push_back(num("fluid", "body_frontal_diameter", "mm",
                        [](Draft& d) -> double& { return d.cfg.robot.env.body_frontal_diameter; }));
        f.push_back(num("fluid", "added_mass_coeff", "", [](Draft& d) -> double& { return d.cfg.robot.env.added_mass_coeff; }));

        f.push_back(num("body", "mass", "kg", [](Draft& d) -> double& { return d.cfg.robot.body_mass; }));
        f.push_back(num("body", "chassis_radius", "mm", [](Draft& d) -> double& { return d.cfg.robot.chassis_radius; }));
        f.push_back({"body", "yaw_inertia", "kg*m^2 or auto (solid disc)",
                     [](const Draft& d) {
                         return d.cfg.robot.yaw_inertia ? shortest(*d.cfg.robot.yaw_inertia) : std::string("auto");
                     },
                     [](Draft& d, const std::string& v, const std::string& w) {
                         if (trim(v) == "auto") {
                             d.cfg.robot.yaw_inertia.reset();
                         } else {
                             d.cfg.robot.yaw_inertia = parse_double(v, w);
                         }
                     }});
        f.push_back({"body", "mode", "vertical|planar",
                     [](const Draft& d) {
                         return std::string(d.cfg.robot.mode == SwimMode::planar ? "planar" : "vertical");
                     },
                     [](Draft& d, const std::string& v, const std::string& w) {
                         d.cfg.robot.mode =
                             parse_enum<SwimMode>(v, w, {{"vertical", SwimMode::vertical}, {"planar", SwimMode::planar}});
                     }});
        f.push_back(num("body", "initial_cycle_phase", "rad past the power-stroke start",
                        [](Draft& d) -> double& { return d.cfg.robot.initial_cycle_phase; }));
        f.push_back({"body", "execution", "serial|parallel arm stepping",
                     [](const Draft& d) {
                         return std::string(d.cfg.robot.execution == Execution::serial ? "serial" : "parallel");
                     },
                     [](Draft& d, const std::string& v, const std::string& w) {
                         d.cfg.robot.execution = parse_enum<Execution>(
                             v, w, {{"serial", Execution::serial}, {"parallel", Execution::parallel}});
                     }});

        f.push_back({"root_map", "mode", "linear|linkage",
                     [](const Draft& d) {
                         return std::string(d.cfg.robot.root_map.mode == RootMapMode::linkage ? "linkage" : "linear");
                     },
                     [](Draft& d, const std::string& v, const std::string& w) {
                         d.cfg.robot.root_map.mode = parse_enum<RootMapMode>(
                             v, w, {{"linear", RootMapMode::linear}, {"linkage", RootMapMode::linkage}});
                     }});
        f.push_back(num("root_map", "closed_deg", "deg", [](Draft& d) -> double& { return d.cfg.robot.root_map.closed_deg; }));
        f.push_back(num("root_map", "open_deg", "deg", [](Draft& d) -> double& { return d.cfg.robot.root_map.open_deg; }));
        f.push_back(num("root_map", "support_rod", "mm, linkage mode",
                        [](Draft& d) -> double& { return d.cfg.robot.root_map.linkage.support_rod; }));
        f.push_back(num("root_map", "pivot_radius", "mm, linkage mode",
                        [](Draft& d) -> double& { return d.cfg.robot.root_map.linkage.pivot_radius; }));
        f.push_back(num("root_map", "carrier_attach", "mm, linkage mode",
                        [](Draft& d) -> double& { return d.cfg.robot.root_map.linkage.carrier_attach; }));
        f.push_back(num("root_map", "slider_radius", "mm, linkage mode",
                        [](Draft& d) -> double& { return d.cfg.robot.root_map.linkage.slider_radius; }));
        f.push_back(num("root_map", "axial_offset", "mm, linkage mode",
                        [](Draft& d) -> double& { return d.cfg.robot.root_map.linkage.axial_offset; }));

        f.push_back({"motor_left", "profile", "t:rpm pairs, first t = 0",
                     [](const Draft& d) { return format_profile(d.cfg.robot.motor_left); },
                     [](Draft& d, const std::string& v, const std::string& w) { d.cfg.robot.motor_left = parse_profile(v, w); }});
        f.push_back({"motor_right", "profile", "t:rpm pairs, first t = 0",
                     [](const Draft& d) { return format_profile(d.cfg.robot.motor_right); },
                     [](Draft& d, const std::string& v, const std::string& w) { d.cfg.robot.motor_right = parse_profile(v, w); }});

        f.push_back(num("analysis", "rig_rpm", "single-arm rig speed", [](Draft& d) -> double& { return d.cfg.rig_rpm; }));
        f.push_back({"analysis", "frames_per_cycle", "midline frames sampled per crank cycle",
                     [](const Draft& d) { return format_number(static_cast<long long>(d.cfg.frames_per_cycle)); },
                     [](Draft& d, const std::string& v, const std::string& w) { d.cfg.frames_per_cycle = parse_int(v, w); }});
        f.push_back(num("analysis", "distal_fraction", "of arc length",
                        [](Draft& d) -> double& { return d.cfg.recurve.distal_fraction; }));
        f.push_back(num("analysis", "proximal_fraction", "of arc length",
                        [](Draft& d) -> double& { return d.cfg.recurve.proximal_fraction; }));
        f.push_back(num("analysis", "early_recovery_fraction", "of the recovery interval",
                        [](Draft& d) -> double& { return d.cfg.recurve.early_recovery_fraction; }));
        f.push_back(num("analysis", "kappa_min", "1/mm", [](Draft& d) -> double& { return d.cfg.recurve.kappa_min; }));
        f.push_back(num("analysis", "torque_limit", "N*mm, 0 disables",
                        [](Draft& d) -> double& { return d.cfg.torque_limit; }));

        f.push_back(num("design", "target_k", "travel ratio, > 1", [](Draft& d) -> double& { return d.cfg.design.target_k; }));
        f.push_back(num("design", "offset_e", "mm", [](Draft& d) -> double& { return d.cfg.design.offset_e; }));
        f.push_back(num("design", "crank_a", "mm", [](Draft& d) -> double& { return d.cfg.design.crank_a; }));

        f.push_back({"sweep", "presets", "a/b/e triples, comma separated",
                     [](const Draft& d) { return format_presets(d.cfg.sweep.presets); },
                     [](Draft& d, const std::string& v, const std::string& w) { d.cfg.sweep.presets = parse_presets(v, w); }});
        f.push_back({"sweep", "incision_depths", "comma separated",
                     [](const Draft& d) { return join(d.cfg.sweep.incision_depths); },
                     [](Draft& d, const std::string& v, const std::string& w) {
                         d.cfg.sweep.incision_depths = parse_list(v, w);
                     }});
        f.push_back({"sweep", "rpms", "comma separated",
                     [](const Draft& d) { return join(d.cfg.sweep.rpms); },
                     [](Draft& d, const std::string& v, const std::string& w) { d.cfg.sweep.rpms = parse_list(v, w); }});

        f.push_back({"output", "dir", "directory for CSV and report files",
                     [](const Draft& d) { return d.cfg.output_dir; },
                     [](Draft& d, const std::string& v, const std::string& w) {
                         if (trim(v).empty()) throw ConfigError(w + ": empty path");
                         d.cfg.output_dir = trim(v);
                     }});
        return f;
    }();
    return fields;
}

ScenarioConfig finish(Draft& d) {
    try {
        d.cfg.robot.mechanism_left = MechanismGeometry(d.left[0], d.left[1], d.left[2]);
        d.cfg.robot.mechanism_right = MechanismGeometry(d.right[0], d.right[1], d.right[2]);
        d.cfg.robot.arm_model = build_arm(d.arm, d.material);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    validate(d.cfg);
    return d.cfg;
}

}  // namespace

void validate(const ScenarioConfig& c) {
    try {
        validate(c.robot);
        const auto& s = c.sim;
        if (!(s.duration > 0.0) || !(s.dt > 0.0) || !(s.sample_interval > 0.0)) {
            throw ConfigError("duration, dt and sample_interval must be positive");
        }
        if (s.dt > 1e-3) throw ConfigError("dt must not exceed 1e-3 s");
        const double ratio = s.sample_interval / s.dt;
        if (ratio < 0.5 || std::abs(ratio - std::round(ratio)) > 1e-6 * ratio) {
            throw ConfigError("sample_interval must be a whole multiple of dt");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(c.torque_limit >= 0.0)) throw ConfigError("torque_limit must be non-negative");
    if (!(c.rig_rpm >= 0.0)) throw ConfigError("rig_rpm must be non-negative");
    if (c.frames_per_cycle < 1) throw ConfigError("frames_per_cycle must be at least 1");
    const auto& r = c.recurve;
    auto fraction = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!fraction(r.distal_fraction) || !fraction(r.proximal_fraction) || !fraction(r.early_recovery_fraction)) {
        throw ConfigError("recurve window fractions must lie in (0, 1]");
    }
    if (!(r.kappa_min >= 0.0)) throw ConfigError("kappa_min must be non-negative");
    for (double d : c.sweep.incision_depths) {
        if (!(d >= 0.0 && d < 1.0)) throw ConfigError("sweep incision depths must lie in [0, 1)");
    }
    for (double rpm : c.sweep.rpms) {
        if (!(rpm >= 0.0)) throw ConfigError("sweep rpms must be non-negative");
    }
}

ScenarioConfig parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    Draft d = draft_from(default_scenario());
    for (const auto& [section, keys] : tree) {
        if (keys.empty() && !keys.data().empty()) {
            throw ConfigError("key '" + section + "' outside any section");
        }
        bool known_section = false;
        for (const auto& f : schema()) known_section = known_section || section == f.section;
        if (!known_section) throw ConfigError("unknown section [" + section + "]");
        for (const auto& [key, value] : keys) {
            const Field* field = nullptr;
            for (const auto& f : schema()) {
                if (section == f.section && key == f.key) field = &f;
            }
            if (!field) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
            field->set(d, value.data(), section + "." + key);
        }
    }
    return finish(d);
}

ScenarioConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

void write_config(std::ostream& out, const ScenarioConfig& config) {
    const Draft d = draft_from(config);
    std::string current;
    for (const auto& f : schema()) {
        if (current != f.section) {
            if (!current.empty()) out << '\n';
            current = f.section;
            out << '[' << current << "]\n";
        }
        out << f.key << " = " << f.get(d) << '\n';
    }
}

std::string config_to_string(const ScenarioConfig& config) {
    std::ostringstream out;
    write_config(out, config);
    return out.str();
}

std::string config_schema() {
    const Draft d = draft_from(default_scenario());
    std::ostringstream out;
    for (const auto& f : schema()) {
        out << f.section << '.' << f.key << " = " << f.get(d);
        if (*f.doc) out << "    ; " << f.doc;
        out << '\n';
    }
    return out.str();
}

}  // namespace octoswim
