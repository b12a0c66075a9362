#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "octoswim/hydro.hpp"
#include "octoswim/vec.hpp"

namespace octoswim {

/// Tapered silicone arm, lengths in mm. Incisions run along the whole arm and
/// cut `incision_depth` of the local diameter.
struct ArmGeometry {
    double length = 300.0;
    double base_diameter = 30.0;
    double tip_diameter = 10.0;
    double incision_depth = 0.0;
    int n_segments = 10;

    double diameter_at(double s) const { return base_diameter + (tip_diameter - base_diameter) * s / length; }

    bool operator==(const ArmGeometry&) const = default;
};

struct ArmMaterial {
    double youngs_modulus = 1.0e6;  // Pa
    double density = 1080.0;        // kg/m^3
    double damping_ratio = 0.3;

    bool operator==(const ArmMaterial&) const = default;
};

void validate(const ArmGeometry& geometry);
void validate(const ArmMaterial& material);

/// Pseudo-rigid-body arm: `n_segments` rigid links, joint i sits at the
/// proximal end of segment i (station i * segment_length). Joint 0 connects
/// the arm to the driven root.
///
/// Sign convention for joint angles: positive bends toward the incised side,
/// which presses the protrusions together (closing stiffness); negative opens
/// the cuts (opening stiffness). In the arm plane a positive angle turns the
/// distal part counterclockwise.
struct ArmModel {
    ArmGeometry geometry;
    ArmMaterial material;
    double segment_length = 0.0;            // mm
    std::vector<double> stiffness_closing;  // N*mm/rad, per joint
    std::vector<double> stiffness_opening;  // N*mm/rad, per joint
    std::vector<double> damping;            // N*mm*s/rad, per joint
    std::vector<double> segment_mass;       // kg
    std::vector<double> segment_diameter;   // mm, at segment midpoint

    std::size_t joint_count() const { return stiffness_closing.size(); }
    double asymmetry_factor() const;

    bool operator==(const ArmModel&) const = default;
};

ArmModel build_arm(const ArmGeometry& geometry, const ArmMaterial& material);

/// Arm configuration. `root_angle` is measured from the body's downward axis,
/// positive swinging outward; joint angles and rates are relative.
struct ArmState {
    double root_angle = 0.0;
    double root_rate = 0.0;
    std::vector<double> joint_angles;
    std::vector<double> joint_rates;
    double time = 0.0;
};

ArmState rest_state(const ArmModel& model, double root_angle);

struct RootDrive {
    double angle = 0.0;  // rad
    double rate = 0.0;   // rad/s
};

/// Water motion seen from the moving arm frame, mm/s: a uniform part plus a
/// rigid rotation at `spin` rad/s about `pivot` (arm-plane mm).
struct AmbientFlow {
    Vec2 velocity;
    double spin = 0.0;
    Vec2 pivot;

    Vec2 at(const Vec2& p) const { return velocity + perp(p - pivot) * spin; }
};

class ArmUnstable : public std::runtime_error {
public:
    ArmUnstable(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

/// Elastic plus damping torque at a joint, N*mm. Bilinear in angle, switching at zero.
double joint_torque(const ArmModel& model, std::size_t joint, double angle, double rate);

/// Hydrodynamic loads at the start of a step, arm plane.
struct ArmLoads {
    std::vector<Vec2> midpoints;  // mm, relative to the root mount
    std::vector<Vec2> drag;       // N, force of the water on each segment
    double root_torque = 0.0;     // N*mm the arm exerts on its driving rod
};

struct ArmStep {
    ArmState state;
    ArmLoads loads;
};

/// Advances the arm by one semi-implicit Euler step. `next_root` is the
/// imposed root angle and rate at the end of the step. Throws ArmUnstable if
/// a joint angle leaves (-pi, pi) or a value becomes non-finite.
ArmStep step_arm_with_loads(const ArmModel& model, const ArmState& state, const RootDrive& next_root,
                            const FluidEnvironment& env, const AmbientFlow& ambient, double dt);

ArmState step_arm(const ArmModel& model, const ArmState& state, const RootDrive& next_root,
                  const FluidEnvironment& env, const AmbientFlow& ambient, double dt);

/// n_segments + 1 points (mm) from the root mount at the origin, arm plane
/// with y up; root_angle 0 hangs the arm along -y.
std::vector<Vec2> midline(const ArmModel& model, const ArmState& state);

/// Kinetic plus elastic energy, J. Kinetic energy uses the structural mass only.
double arm_energy(const ArmModel& model, const ArmState& state);

/// Equilibrium under a fixed-direction tip force (N, arm plane) with the root
/// held at `root_angle`. Returns the deflected state.
ArmState solve_static(const ArmModel& model, double root_angle, const Vec2& tip_force);

}  // namespace octoswim
