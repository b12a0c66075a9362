#pragma once

#include <span>

#include "octoswim/vec.hpp"

namespace octoswim {

/// Quasi-steady fluid model. Coefficients are dimensionless; lengths in mm.
struct FluidEnvironment {
    double density = 1000.0;  // kg/m^3
    double cd_normal = 1.2;
    double ct_tangential = 0.01;
    double cd_body = 1.0;
    double body_frontal_diameter = 190.0;  // mm
    // Added mass per segment as a fraction of displaced water; lumped
    // isotropically onto the segment mass.
    double added_mass_coeff = 0.0;

    bool operator==(const FluidEnvironment&) const = default;
};

void validate(const FluidEnvironment& env);

/// Slender segment seen by the fluid: velocity relative to still water (mm/s),
/// unit axis direction, diameter and length (mm).
struct SegmentFlow {
    Vec2 velocity;
    Vec2 axis;
    double diameter = 0.0;
    double length = 0.0;
};

/// Blade-element quadratic drag on one segment, N. Normal and tangential
/// components are each opposed to the matching velocity component.
Vec2 segment_drag(const FluidEnvironment& env, const SegmentFlow& segment);

/// Bluff-body drag on the head, N, for a velocity in mm/s.
Vec3 body_drag(const FluidEnvironment& env, const Vec3& velocity);

/// Force an arm segment applies to the water (the negative of the drag it
/// feels), applied at `position` (mm, body frame, origin at body centre).
struct SegmentLoad {
    Vec3 position;
    Vec3 force_on_fluid;
};

struct BodyWrench {
    Vec3 force;   // N
    Vec3 torque;  // N*mm about body centre
};

/// Reaction of the fluid loads on the body: thrust = -sum F, torque = -sum r x F.
BodyWrench net_thrust(std::span<const SegmentLoad> loads);

}  // namespace octoswim
