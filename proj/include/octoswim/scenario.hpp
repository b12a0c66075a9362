#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "octoswim/analysis.hpp"
#include "octoswim/config.hpp"

namespace octoswim {

// ---- design ---------------------------------------------------------------

struct DesignRow {
    std::string label;              // preset name, empty for synthesized rows
    std::optional<double> nominal_k;
    MechanismGeometry geometry{25.0, 66.0, 40.0};
    StrokeCharacteristics stroke;
    double s_min = 0.0;
    double s_max = 0.0;

    double stroke_length() const { return s_max - s_min; }
    // Relative gap between computed and nominal K above 5%.
    bool deviates_from_nominal() const;
};

DesignRow design_row(const MechanismGeometry& geometry, std::string label = {},
                     std::optional<double> nominal_k = std::nullopt);
DesignRow run_design(const DesignRequest& request);
std::vector<DesignRow> paper_presets();

void write_design_csv(std::ostream& out, const std::vector<DesignRow>& rows);
void write_design_report(std::ostream& out, const std::vector<DesignRow>& rows);

// ---- mech -----------------------------------------------------------------

struct MechRow {
    double time = 0.0;
    double crank = 0.0;
    double cycle_phase = 0.0;
    double slider = 0.0;
    double slider_velocity = 0.0;  // mm/s
    StrokePhase phase = StrokePhase::power;
};

struct MechResult {
    MechanismGeometry geometry{25.0, 66.0, 40.0};
    double rpm = 0.0;
    StrokeTiming timing;
    std::vector<MechRow> rows;
    double measured_power = 0.0;     // s, from per-step labels
    double measured_recovery = 0.0;  // s
    double slider_min_seen = 0.0;
    double slider_max_seen = 0.0;
};

/// One crank revolution of the left mechanism at the left motor's initial speed.
MechResult run_mech(const ScenarioConfig& config);
void write_mech_csv(std::ostream& out, const MechResult& result);
void write_mech_report(std::ostream& out, const MechResult& result);

// ---- arm rig and recurve --------------------------------------------------

struct RecurveFrame {
    double time = 0.0;
    double cycle_phase = 0.0;
    StrokePhase phase = StrokePhase::power;
    bool early_recovery = false;
    std::vector<Vec2> midline;
    RecurveResult recurve;
    MaxCurvature max_curvature;
};

struct RecurveStats {
    std::vector<RecurveFrame> frames;  // steady-state cycles only
    std::size_t early_recovery_frames = 0;
    std::size_t recurve_frames = 0;

    double fraction() const {
        return early_recovery_frames ? static_cast<double>(recurve_frames) / static_cast<double>(early_recovery_frames)
                                     : 0.0;
    }
};

/// Runs the single-arm rig and evaluates `frames_per_cycle` evenly spaced
/// frames per crank cycle, skipping the first cycle.
RecurveStats analyze_recurve(const ArmRigConfig& rig, const SimulationParams& params,
                             const RecurveCriteria& criteria, int frames_per_cycle);

ArmRigConfig rig_from(const ScenarioConfig& config);
RecurveStats run_arm(const ScenarioConfig& config);
void write_arm_frames_csv(std::ostream& out, const RecurveStats& stats);
void write_arm_midlines_csv(std::ostream& out, const RecurveStats& stats);
void write_arm_report(std::ostream& out, const RecurveStats& stats, const ScenarioConfig& config);

// ---- swim / steer ---------------------------------------------------------

struct SwimResult {
    TimeSeries series;
    std::vector<CycleMetrics> cycles;
    SteadyStateSummary steady;
    TorqueEstimate torque;
    std::string note;  // set when cycle metrics could not be formed
};

SwimResult run_swim(const ScenarioConfig& config);
/// Planar run; motor profiles as configured.
SwimResult run_steer(const ScenarioConfig& config);

void write_swim_csv(std::ostream& out, const TimeSeries& series);
void write_torque_csv(std::ostream& out, const TorqueEstimate& torque);
void write_swim_report(std::ostream& out, const SwimResult& result, const ScenarioConfig& config);

// ---- sweep ----------------------------------------------------------------

struct SweepCell {
    MechanismGeometry preset{25.0, 66.0, 40.0};
    double incision_depth = 0.0;
    double rpm = 0.0;
    SteadyStateSummary steady;
    double peak_torque = 0.0;  // N*mm, larger of the two groups
    std::size_t early_recovery_frames = 0;
    std::size_t recurve_frames = 0;
    double recurve_fraction = 0.0;
    std::string error;
};

/// Swim scenario for one grid cell: both mechanisms set to `preset`, arms at
/// `depth`, both motors at constant `rpm`.
ScenarioConfig cell_scenario(const ScenarioConfig& base, const MechanismGeometry& preset, double depth, double rpm);

/// Cells in preset, depth, rpm order. At most `jobs` cells run at once.
std::vector<SweepCell> run_sweep(const ScenarioConfig& config, int jobs);
void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells);

}  // namespace octoswim
