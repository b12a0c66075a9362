#include "octoswim/hydro.hpp"

#include <cmath>
#include <stdexcept>

namespace octoswim {

namespace {

constexpr double kMm = 1e-3;

}  // namespace

void validate(const FluidEnvironment& env) {
    if (!(env.density > 0.0)) throw std::invalid_argument("fluid density must be positive");
    if (!(env.cd_normal >= 0.0) || !(env.ct_tangential >= 0.0) || !(env.cd_body >= 0.0) ||
        !(env.added_mass_coeff >= 0.0)) {
        throw std::invalid_argument("drag and added-mass coefficients must be non-negative");
    }
    if (!(env.body_frontal_diameter >= 0.0)) {
        throw std::invalid_argument("body frontal diameter must be non-negative");
    }
}

Vec2 segment_drag(const FluidEnvironment& env, const SegmentFlow& segment) {
    const double along = dot(segment.velocity, segment.axis);
    const Vec2 v_t = segment.axis * along;
    const Vec2 v_n = segment.velocity - v_t;
    const double d = segment.diameter * kMm;
    const double l = segment.length * kMm;
    // mm/s -> m/s on both velocity factors
    const double normal_gain = 0.5 * env.density * env.cd_normal * d * l * norm(v_n) * kMm * kMm;
    const double tangential_gain =
        0.5 * env.density * env.ct_tangential * kPi * d * l * std::abs(along) * kMm * kMm;
    return -(v_n * normal_gain) - v_t * tangential_gain;
}

Vec3 body_drag(const FluidEnvironment& env, const Vec3& velocity) {
    const double radius = 0.5 * env.body_frontal_diameter * kMm;
    const double area = kPi * radius * radius;
    const double gain = 0.5 * env.density * env.cd_body * area * norm(velocity) * kMm * kMm;
    return -(velocity * gain);
}

BodyWrench net_thrust(std::span<const SegmentLoad> loads) {
    BodyWrench w;
    for (const SegmentLoad& l : loads) {
        w.force += -l.force_on_fluid;
        w.torque += -cross(l.position, l.force_on_fluid);
    }
    return w;
}

}  // namespace octoswim
