#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "octoswim/analysis.hpp"
#include "octoswim/vehicle.hpp"

namespace octoswim {

/// Schema violation, unreadable file or malformed value. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind { design, mech, arm, swim, steer, sweep };

const char* to_string(ScenarioKind kind);

struct DesignRequest {
    double target_k = 2.0;
    double offset_e = 40.0;  // mm
    double crank_a = 25.0;   // mm

    bool operator==(const DesignRequest&) const = default;
};

struct SweepGrid {
    std::vector<MechanismGeometry> presets;
    std::vector<double> incision_depths;
    std::vector<double> rpms;

    bool operator==(const SweepGrid&) const = default;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::swim;
    RobotConfig robot;
    SimulationParams sim;
    double torque_limit = 0.0;  // N*mm, 0 disables the flag
    double rig_rpm = 48.0;
    RecurveCriteria recurve;
    int frames_per_cycle = 10;
    DesignRequest design;
    SweepGrid sweep;
    std::string output_dir = ".";

    bool operator==(const ScenarioConfig&) const = default;
};

SweepGrid default_sweep_grid();
ScenarioConfig default_scenario();

/// INI text with sections [scenario], [simulation], [mechanism_left],
/// [mechanism_right], [arm], [fluid], [body], [root_map], [motor_left],
/// [motor_right], [analysis], [design], [sweep], [output]. Missing keys keep
/// their defaults; unknown sections or keys are rejected.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig parse_config_string(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Every key with its effective value, in schema order.
void write_config(std::ostream& out, const ScenarioConfig& config);
std::string config_to_string(const ScenarioConfig& config);

void validate(const ScenarioConfig& config);

/// Human-readable schema with defaults, one line per key.
std::string config_schema();

}  // namespace octoswim
