#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "octoswim/arm.hpp"
#include "octoswim/hydro.hpp"
#include "octoswim/kernels.hpp"
#include "octoswim/mechanism.hpp"

namespace octoswim {

inline constexpr std::size_t kArmsPerGroup = 4;
inline constexpr std::size_t kArmCount = 2 * kArmsPerGroup;

enum class SwimMode { vertical, planar };
enum class RootMapMode { linear, linkage };

/// Support-rod linkage between slider and arm carrier, in the carrier's
/// vertical plane (radial, axial), mm. The carrier pivots on the chassis at
/// `pivot_radius`; the support rod joins it `carrier_attach` from the pivot
/// and meets the slider at `slider_radius`, axial height s - `axial_offset`.
struct SupportLinkage {
    double support_rod = 150.0;
    double pivot_radius = 95.0;
    double carrier_attach = 60.0;
    double slider_radius = 20.0;
    double axial_offset = 166.7;

    bool operator==(const SupportLinkage&) const = default;
};

struct RootAngleMap {
    RootMapMode mode = RootMapMode::linear;
    double closed_deg = 15.0;
    double open_deg = 75.0;
    SupportLinkage linkage;

    bool operator==(const RootAngleMap&) const = default;
};

class Unassemblable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Arm root angle (rad from the downward axis) for a slider position.
double root_angle_map(const MechanismGeometry& geom, const RootAngleMap& map, double slider_s);

/// d(root angle)/ds, rad/mm.
double root_angle_slope(const MechanismGeometry& geom, const RootAngleMap& map, double slider_s);

/// Piecewise-constant motor speed: each entry (t_start s, rpm) holds until the next.
class MotorProfile {
public:
    MotorProfile() = default;
    explicit MotorProfile(double rpm) : steps_{{0.0, rpm}} {}
    explicit MotorProfile(std::vector<std::pair<double, double>> steps);

    double rpm_at(double t) const;
    const std::vector<std::pair<double, double>>& steps() const { return steps_; }
    bool operator==(const MotorProfile&) const = default;

private:
    std::vector<std::pair<double, double>> steps_{{0.0, 0.0}};
};

struct RobotConfig {
    MechanismGeometry mechanism_left{25.0, 66.0, 40.0};
    MechanismGeometry mechanism_right{25.0, 66.0, 40.0};
    ArmModel arm_model = build_arm(ArmGeometry{}, ArmMaterial{});
    FluidEnvironment env;
    double body_mass = 1.5;  // kg
    RootAngleMap root_map;
    MotorProfile motor_left{33.0};
    MotorProfile motor_right{33.0};
    SwimMode mode = SwimMode::vertical;
    double chassis_radius = 95.0;            // mm, arm mounts and lateral thrust offset
    std::optional<double> yaw_inertia;       // kg*m^2; solid disc about a diameter if unset
    double initial_cycle_phase = 0.0;        // rad of crank travel past the power-stroke start
    Execution execution = Execution::parallel;

    double effective_yaw_inertia() const;

    bool operator==(const RobotConfig&) const = default;
};

void validate(const RobotConfig& config);

struct SwimSample {
    double time = 0.0;
    Vec3 position;            // mm, world: x lateral, z up; y unused
    Vec3 world_velocity;      // mm/s
    double velocity = 0.0;    // mm/s along the body axis
    double heading = 0.0;     // rad, counterclockwise tilt of the body axis in the x-z plane
    StrokePhase phase_left = StrokePhase::power;
    StrokePhase phase_right = StrokePhase::power;
    double crank_left = 0.0;  // rad
    double crank_right = 0.0;
    double slider_velocity_left = 0.0;  // mm/s
    double slider_velocity_right = 0.0;
    double root_moment_left = 0.0;   // N*mm, summed over the group's arms
    double root_moment_right = 0.0;
    std::array<double, kArmCount> root_angles{};  // rad
};

struct TimeSeries {
    double sample_interval = 0.0;
    std::vector<SwimSample> rows;
};

struct SimulationParams {
    double duration = 10.0;          // s
    double dt = 1e-4;                // s
    double sample_interval = 0.01;   // s

    bool operator==(const SimulationParams&) const = default;
};

/// Full robot: both motor groups, eight arms, body momentum. Deterministic for
/// a given config and parameters regardless of `config.execution`.
TimeSeries simulate(const RobotConfig& config, const SimulationParams& params);

/// Planar run with (typically) different left/right motor profiles.
TimeSeries simulate_steering(const RobotConfig& config, const SimulationParams& params);

struct TorqueSample {
    double time = 0.0;
    double left = 0.0;   // N*mm, drive sense
    double right = 0.0;
};

struct TorqueEstimate {
    std::vector<TorqueSample> samples;
    double peak_left = 0.0;
    double peak_right = 0.0;
    double limit = 0.0;
    bool over_limit = false;
};

/// Quasi-static crank torque balancing the arm root moments through the
/// slider and coupler (frictionless virtual work).
TorqueEstimate motor_torque_estimate(const RobotConfig& config, const TimeSeries& series,
                                     double torque_limit = 0.0);

/// Single arm on the mechanism with the body held still (bench rig).
struct ArmFrame {
    double time = 0.0;
    StrokePhase phase = StrokePhase::power;
    double cycle_phase = 0.0;  // rad of crank travel since power-stroke start
    ArmState state;
};

struct ArmRigConfig {
    MechanismGeometry mechanism{25.0, 66.0, 40.0};
    ArmModel arm_model = build_arm(ArmGeometry{}, ArmMaterial{});
    FluidEnvironment env;
    RootAngleMap root_map;
    double rpm = 48.0;
    double initial_cycle_phase = 0.0;

    bool operator==(const ArmRigConfig&) const = default;
};

std::vector<ArmFrame> simulate_arm_rig(const ArmRigConfig& config, const SimulationParams& params);

}  // namespace octoswim
