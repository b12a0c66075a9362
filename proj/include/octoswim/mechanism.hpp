#pragma once

#include <stdexcept>
#include <string>

namespace octoswim {

class InvalidGeometry : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidTarget : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Requested travel ratio is outside what the coupler bracket can reach for the
// given crank and offset. The achievable range is carried for reporting.
class NoSolution : public std::runtime_error {
public:
    NoSolution(const std::string& what, double k_min, double k_max)
        : std::runtime_error(what), k_min_(k_min), k_max_(k_max) {}
    double k_min() const { return k_min_; }
    double k_max() const { return k_max_; }

private:
    double k_min_;
    double k_max_;
};

/// Offset crank-slider linkage, lengths in mm.
///
/// Crank pivot at the origin, slider rail parallel to the x-axis at
/// perpendicular distance `offset` (y = e). The slider coordinate is measured
/// along the rail from the foot of the perpendicular through the pivot.
/// Construction rejects linkages whose crank cannot turn a full revolution.
class MechanismGeometry {
public:
    MechanismGeometry(double crank_a, double coupler_b, double offset_e);

    double crank() const { return crank_a_; }
    double coupler() const { return coupler_b_; }
    double offset() const { return offset_e_; }

    // b - a - e; non-negative for every valid linkage.
    double rotatability_margin() const { return coupler_b_ - crank_a_ - offset_e_; }

    bool operator==(const MechanismGeometry&) const = default;

private:
    double crank_a_;
    double coupler_b_;
    double offset_e_;
};

/// Angles in degrees.
struct StrokeCharacteristics {
    double theta = 0.0;         // polar angle between the two extreme crank positions
    double theta1 = 0.0;        // crank angle at full extension, asin(e / (a + b))
    double theta2 = 0.0;        // asin(e / (b - a)), folded position
    double travel_ratio_k = 1.0;
    double phi_push = 180.0;    // slow arc, 180 + theta
    double phi_return = 180.0;  // quick arc, 180 - theta
};

/// Running crank. The drive turns clockwise in the linkage frame (phi
/// decreasing), which makes the slow arc the one that raises the slider from
/// s_min to s_max.
struct CrankState {
    double angle_phi = 0.0;      // rad, wrapped to [0, 2*pi)
    double angular_speed = 0.0;  // rad/s, > 0 for a running motor
};

enum class StrokePhase { power, recovery };

const char* to_string(StrokePhase phase);

struct StrokeTiming {
    double t_recovery = 0.0;  // s
    double t_power = 0.0;     // s
    double period = 0.0;      // s
};

double slider_position(const MechanismGeometry& geom, double phi_rad);

/// ds/dt in mm/s for a crank turning at `crank_rate` = dphi/dt (rad/s, signed).
double slider_velocity(const MechanismGeometry& geom, double phi_rad, double crank_rate);

double slider_max(const MechanismGeometry& geom);
double slider_min(const MechanismGeometry& geom);

// Crank angles (rad) where crank and coupler are collinear.
double extended_crank_angle(const MechanismGeometry& geom);
double folded_crank_angle(const MechanismGeometry& geom);

StrokeCharacteristics stroke_characteristics(const MechanismGeometry& geom);

double travel_ratio_from_polar_angle(double theta_deg);
double polar_angle_from_k(double k);

/// Solves for the coupler length that yields `target_k` with the given crank
/// and offset. Bisection over b in [a + e + 1e-9, 100 (a + e)].
MechanismGeometry synthesize_linkage(double target_k, double offset_e, double crank_a);

StrokeTiming stroke_timing(const MechanismGeometry& geom, double rpm);

/// Crank travel since the start of the current power stroke, in [0, 2*pi).
double cycle_phase_angle(const MechanismGeometry& geom, double phi_rad);

/// Stroke phase at crank angle phi for the clockwise drive. The power stroke
/// (arms closing, slider falling) starts at full extension.
StrokePhase stroke_phase(const MechanismGeometry& geom, double phi_rad);

double wrap_angle(double rad);

}  // namespace octoswim
