#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "octoswim/mechanism.hpp"
#include "octoswim/vec.hpp"
#include "octoswim/vehicle.hpp"

namespace octoswim {

class DegenerateGeometry : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SeriesTooShort : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Signed curvature at the interior vertices of a polyline. Positive when the
/// path turns counterclockwise.
struct CurvatureProfile {
    std::vector<double> arc_position;  // mm from the first point
    std::vector<double> curvature;     // 1/mm
};

CurvatureProfile curvature_profile(std::span<const Vec2> polyline);

struct MaxCurvature {
    double arc_position = 0.0;
    double value = 0.0;  // |kappa|, 1/mm
    int sign = 0;
};

/// Per-frame location of the largest |kappa|; ties resolve toward the tip.
std::vector<MaxCurvature> max_curvature_trace(std::span<const std::vector<Vec2>> frames);

struct RecurveCriteria {
    double distal_fraction = 0.2;
    double proximal_fraction = 0.4;
    double early_recovery_fraction = 0.25;
    double kappa_min = 1e-3;  // 1/mm

    bool operator==(const RecurveCriteria&) const = default;
};

struct RecurveResult {
    bool recurve = false;
    double distal_mean = 0.0;       // signed, 1/mm
    double distal_mean_abs = 0.0;   // 1/mm
    double proximal_mean = 0.0;     // signed, 1/mm
};

/// Tip curvature reversal test for one midline frame. Frames outside the
/// recovery stroke never report a recurve.
RecurveResult detect_recurve(std::span<const Vec2> midline, StrokePhase phase,
                             const RecurveCriteria& criteria = {});

struct CycleMetrics {
    double start_time = 0.0;
    double displacement = 0.0;   // mm
    double average_speed = 0.0;  // mm/s
    double peak_speed = 0.0;     // mm/s
    double period = 0.0;         // s
    double recovery_duration = 0.0;
    double power_duration = 0.0;
    double peak_speed_time = 0.0;
    StrokePhase peak_speed_phase = StrokePhase::power;
    bool startup = false;
};

/// Splits a swim series into crank cycles, each starting where the left
/// group begins a power stroke. The first cycle is flagged as start-up.
std::vector<CycleMetrics> cycle_metrics(const TimeSeries& series, const StrokeCharacteristics& mechanism,
                                        double rpm);

struct SteadyStateSummary {
    std::size_t cycles = 0;
    double mean_displacement = 0.0;
    double mean_average_speed = 0.0;
    double max_peak_speed = 0.0;
};

SteadyStateSummary steady_state(std::span<const CycleMetrics> cycles);

}  // namespace octoswim
