#include "octoswim/scenario.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "octoswim/csv.hpp"

namespace octoswim {

namespace {

// Shortest exact text, for reports.
std::string fmt(double v) {
    if (v == 0.0) v = 0.0;
    char buf[32];
    return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

std::string triple(const MechanismGeometry& g) {
    return fmt(g.crank()) + "/" + fmt(g.coupler()) + "/" + fmt(g.offset());
}

}  // namespace

// ---- design ---------------------------------------------------------------

bool DesignRow::deviates_from_nominal() const {
    return nominal_k && std::abs(stroke.travel_ratio_k - *nominal_k) > 0.05 * *nominal_k;
}

DesignRow design_row(const MechanismGeometry& geometry, std::string label, std::optional<double> nominal_k) {
    DesignRow r;
    r.label = std::move(label);
    r.nominal_k = nominal_k;
    r.geometry = geometry;
    r.stroke = stroke_characteristics(geometry);
    r.s_min = slider_min(geometry);
    r.s_max = slider_max(geometry);
    return r;
}

DesignRow run_design(const DesignRequest& request) {
    return design_row(synthesize_linkage(request.target_k, request.offset_e, request.crank_a));
}

std::vector<DesignRow> paper_presets() {
    return {design_row(MechanismGeometry(25.0, 66.0, 40.0), "2.0:1", 2.0),
            design_row(MechanismGeometry(25.0, 69.4, 40.0), "1.6:1", 1.6),
            design_row(MechanismGeometry(19.5, 83.0, 40.0), "1.2:1", 1.2)};
}

void write_design_csv(std::ostream& out, const std::vector<DesignRow>& rows) {
    CsvWriter csv(out);
    csv.header({"label", "nominal_k", "crank_a_mm", "coupler_b_mm", "offset_e_mm", "theta_deg", "theta1_deg",
                "theta2_deg", "travel_ratio_k", "s_min_mm", "s_max_mm", "stroke_mm", "rotatability_margin_mm",
                "deviates_from_nominal"});
    for (const auto& r : rows) {
        csv.cell(r.label);
        if (r.nominal_k) {
            csv.cell(*r.nominal_k);
        } else {
            csv.cell("");
        }
        csv.cell(r.geometry.crank()).cell(r.geometry.coupler()).cell(r.geometry.offset());
        csv.cell(r.stroke.theta).cell(r.stroke.theta1).cell(r.stroke.theta2).cell(r.stroke.travel_ratio_k);
        csv.cell(r.s_min).cell(r.s_max).cell(r.stroke_length()).cell(r.geometry.rotatability_margin());
        csv.cell(r.deviates_from_nominal() ? 1 : 0);
        csv.end_row();
    }
}

void write_design_report(std::ostream& out, const std::vector<DesignRow>& rows) {
    for (const auto& r : rows) {
        if (!r.label.empty()) out << "preset " << r.label << '\n';
        out << "  a = " << fmt(r.geometry.crank()) << " mm, b = " << fmt(r.geometry.coupler())
            << " mm, e = " << fmt(r.geometry.offset()) << " mm\n";
        out << "  theta = " << fmt(r.stroke.theta) << " deg, K = " << fmt(r.stroke.travel_ratio_k) << '\n';
        out << "  s_min = " << fmt(r.s_min) << " mm, s_max = " << fmt(r.s_max)
            << " mm, stroke = " << fmt(r.stroke_length()) << " mm\n";
        out << "  rotatability margin = " << fmt(r.geometry.rotatability_margin()) << " mm\n";
        if (r.deviates_from_nominal()) {
            out << "  WARNING: computed K " << fmt(r.stroke.travel_ratio_k) << " differs from nominal "
                << fmt(*r.nominal_k) << " by "
                << fmt(100.0 * std::abs(r.stroke.travel_ratio_k - *r.nominal_k) / *r.nominal_k) << "%\n";
        }
    }
}

// ---- mech -----------------------------------------------------------------

MechResult run_mech(const ScenarioConfig& config) {
    MechResult r;
    r.geometry = config.robot.mechanism_left;
    r.rpm = config.robot.motor_left.rpm_at(0.0);
    if (!(r.rpm > 0.0)) throw ConfigError("mech scenario needs a running left motor");
    r.timing = stroke_timing(r.geometry, r.rpm);

    const double dt = config.sim.dt;
    const auto stride = static_cast<std::size_t>(std::llround(config.sim.sample_interval / dt));
    const auto steps = static_cast<std::size_t>(std::llround(r.timing.period / dt));
    const double omega = r.rpm * 2.0 * kPi / 60.0;
    double crank = wrap_angle(extended_crank_angle(r.geometry) - config.robot.initial_cycle_phase);
    r.slider_min_seen = r.slider_max_seen = slider_position(r.geometry, crank);

    for (std::size_t n = 0;; ++n) {
        const double s = slider_position(r.geometry, crank);
        r.slider_min_seen = std::min(r.slider_min_seen, s);
        r.slider_max_seen = std::max(r.slider_max_seen, s);
        const StrokePhase phase = stroke_phase(r.geometry, crank);
        if (n % stride == 0) {
            r.rows.push_back({static_cast<double>(n) * dt, crank, cycle_phase_angle(r.geometry, crank), s,
                              slider_velocity(r.geometry, crank, -omega), phase});
        }
        if (n == steps) break;
        (phase == StrokePhase::power ? r.measured_power : r.measured_recovery) += dt;
        crank = wrap_angle(crank - omega * dt);
    }
    return r;
}

void write_mech_csv(std::ostream& out, const MechResult& result) {
    CsvWriter csv(out);
    csv.header({"time_s", "crank_rad", "cycle_phase_rad", "slider_mm", "slider_vel_mm_s", "phase"});
    for (const auto& row : result.rows) {
        csv.cell(row.time).cell(row.crank).cell(row.cycle_phase).cell(row.slider).cell(row.slider_velocity);
        csv.cell(to_string(row.phase));
        csv.end_row();
    }
}

void write_mech_report(std::ostream& out, const MechResult& r) {
    const StrokeCharacteristics sc = stroke_characteristics(r.geometry);
    out << "mechanism " << triple(r.geometry) << " at " << fmt(r.rpm) << " rpm\n";
    out << "  theta = " << fmt(sc.theta) << " deg, K = " << fmt(sc.travel_ratio_k) << '\n';
    out << "  period = " << fmt(r.timing.period) << " s\n";
    out << "  recovery = " << fmt(r.timing.t_recovery) << " s (measured " << fmt(r.measured_recovery) << " s)\n";
    out << "  power = " << fmt(r.timing.t_power) << " s (measured " << fmt(r.measured_power) << " s)\n";
    out << "  measured recovery:power = " << fmt(r.measured_recovery / r.measured_power) << '\n';
    out << "  slider range = [" << fmt(r.slider_min_seen) << ", " << fmt(r.slider_max_seen) << "] mm, closed form ["
        << fmt(slider_min(r.geometry)) << ", " << fmt(slider_max(r.geometry)) << "] mm\n";
}

// ---- arm rig --------------------------------------------------------------

RecurveStats analyze_recurve(const ArmRigConfig& rig, const SimulationParams& params,
                             const RecurveCriteria& criteria, int frames_per_cycle) {
    RecurveStats stats;
    if (!(rig.rpm > 0.0)) return stats;
    if (frames_per_cycle < 1) throw std::invalid_argument("frames_per_cycle must be at least 1");

    SimulationParams p = params;
    const double stride = std::max(1.0, std::round(1e-3 / p.dt));
    p.sample_interval = stride * p.dt;
    const std::vector<ArmFrame> frames = simulate_arm_rig(rig, p);

    const StrokeCharacteristics sc = stroke_characteristics(rig.mechanism);
    const double power_arc = deg_to_rad(sc.phi_return);
    const double recovery_arc = deg_to_rad(sc.phi_push);
    const double omega = rig.rpm * 2.0 * kPi / 60.0;
    const double slot = 2.0 * kPi / frames_per_cycle;

    long long last_slot = -1;
    for (const ArmFrame& f : frames) {
        const double travel = f.time * omega + rig.initial_cycle_phase;
        const auto k = static_cast<long long>(std::floor(travel / slot + 1e-9));
        if (k == last_slot) continue;
        last_slot = k;
        if (travel < 2.0 * kPi - 1e-9) continue;

        RecurveFrame rf;
        rf.time = f.time;
        rf.cycle_phase = f.cycle_phase;
        rf.phase = f.phase;
        rf.early_recovery = f.phase == StrokePhase::recovery &&
                            f.cycle_phase - power_arc < criteria.early_recovery_fraction * recovery_arc;
        rf.midline = midline(rig.arm_model, f.state);
        rf.recurve = detect_recurve(rf.midline, f.phase, criteria);
        rf.max_curvature = max_curvature_trace(std::span(&rf.midline, 1)).front();
        if (rf.early_recovery) {
            ++stats.early_recovery_frames;
            if (rf.recurve.recurve) ++stats.recurve_frames;
        }
        stats.frames.push_back(std::move(rf));
    }
    return stats;
}

ArmRigConfig rig_from(const ScenarioConfig& config) {
    ArmRigConfig rig;
    rig.mechanism = config.robot.mechanism_left;
    rig.arm_model = config.robot.arm_model;
    rig.env = config.robot.env;
    rig.root_map = config.robot.root_map;
    rig.rpm = config.rig_rpm;
    rig.initial_cycle_phase = config.robot.initial_cycle_phase;
    return rig;
}

RecurveStats run_arm(const ScenarioConfig& config) {
    return analyze_recurve(rig_from(config), config.sim, config.recurve, config.frames_per_cycle);
}

void write_arm_frames_csv(std::ostream& out, const RecurveStats& stats) {
    CsvWriter csv(out);
    csv.header({"time_s", "cycle_phase_rad", "phase", "early_recovery", "recurve", "distal_mean_per_mm",
                "distal_mean_abs_per_mm", "proximal_mean_per_mm", "max_kappa_s_mm", "max_kappa_per_mm",
                "max_kappa_sign"});
    for (const auto& f : stats.frames) {
        csv.cell(f.time).cell(f.cycle_phase).cell(to_string(f.phase));
        csv.cell(f.early_recovery ? 1 : 0).cell(f.recurve.recurve ? 1 : 0);
        csv.cell(f.recurve.distal_mean).cell(f.recurve.distal_mean_abs).cell(f.recurve.proximal_mean);
        csv.cell(f.max_curvature.arc_position).cell(f.max_curvature.value).cell(f.max_curvature.sign);
        csv.end_row();
    }
}

void write_arm_midlines_csv(std::ostream& out, const RecurveStats& stats) {
    CsvWriter csv(out);
    csv.header({"frame", "time_s", "point", "x_mm", "y_mm"});
    for (std::size_t i = 0; i < stats.frames.size(); ++i) {
        const auto& f = stats.frames[i];
        for (std::size_t j = 0; j < f.midline.size(); ++j) {
            csv.cell(i).cell(f.time).cell(j).cell(f.midline[j].x).cell(f.midline[j].y);
            csv.end_row();
        }
    }
}

void write_arm_report(std::ostream& out, const RecurveStats& stats, const ScenarioConfig& config) {
    const ArmGeometry& g = config.robot.arm_model.geometry;
    out << "arm rig: mechanism " << triple(config.robot.mechanism_left) << ", " << fmt(config.rig_rpm)
        << " rpm, incision depth " << fmt(g.incision_depth) << '\n';
    out << "  frames analysed = " << stats.frames.size() << '\n';
    out << "  early-recovery frames = " << stats.early_recovery_frames << '\n';
    out << "  recurve frames = " << stats.recurve_frames << '\n';
    out << "  recurve fraction = " << fmt(stats.fraction()) << '\n';
}

// ---- swim -----------------------------------------------------------------

namespace {

SwimResult finish_swim(const ScenarioConfig& config, TimeSeries series, bool with_cycles) {
    SwimResult r;
    r.series = std::move(series);
    if (with_cycles) {
        const double rpm = config.robot.motor_left.rpm_at(0.0);
        try {
            r.cycles = cycle_metrics(r.series, stroke_characteristics(config.robot.mechanism_left), rpm);
        } catch (const SeriesTooShort& e) {
            r.note = e.what();
        }
        r.steady = steady_state(r.cycles);
    }
    r.torque = motor_torque_estimate(config.robot, r.series, config.torque_limit);
    return r;
}

}  // namespace

SwimResult run_swim(const ScenarioConfig& config) {
    return finish_swim(config, simulate(config.robot, config.sim), true);
}

SwimResult run_steer(const ScenarioConfig& config) {
    ScenarioConfig c = config;
    c.robot.mode = SwimMode::planar;
    return finish_swim(c, simulate_steering(c.robot, c.sim), false);
}

void write_swim_csv(std::ostream& out, const TimeSeries& series) {
    CsvWriter csv(out);
    csv.header({"time_s", "pos_x_mm", "pos_y_mm", "pos_z_mm", "vel_mm_s", "heading_rad", "phase_left", "phase_right"});
    for (const auto& row : series.rows) {
        csv.cell(row.time).cell(row.position.x).cell(row.position.y).cell(row.position.z);
        csv.cell(row.velocity).cell(row.heading);
        csv.cell(to_string(row.phase_left)).cell(to_string(row.phase_right));
        csv.end_row();
    }
}

void write_torque_csv(std::ostream& out, const TorqueEstimate& torque) {
    CsvWriter csv(out);
    csv.header({"time_s", "torque_left_n_mm", "torque_right_n_mm"});
    for (const auto& s : torque.samples) {
        csv.cell(s.time).cell(s.left).cell(s.right);
        csv.end_row();
    }
}

void write_swim_report(std::ostream& out, const SwimResult& r, const ScenarioConfig& config) {
    const auto& robot = config.robot;
    out << "mechanisms: left " << triple(robot.mechanism_left) << " (K = "
        << fmt(stroke_characteristics(robot.mechanism_left).travel_ratio_k) << "), right "
        << triple(robot.mechanism_right) << " (K = " << fmt(stroke_characteristics(robot.mechanism_right).travel_ratio_k)
        << ")\n";
    out << "incision depth " << fmt(robot.arm_model.geometry.incision_depth) << ", duration " << fmt(config.sim.duration)
        << " s, dt " << fmt(config.sim.dt) << " s\n";
    if (!r.series.rows.empty()) {
        const auto& a = r.series.rows.front();
        const auto& b = r.series.rows.back();
        out << "net displacement: x " << fmt(b.position.x - a.position.x) << " mm, z "
            << fmt(b.position.z - a.position.z) << " mm, final heading " << fmt(b.heading) << " rad\n";
    }
    if (!r.note.empty()) out << "cycle metrics unavailable: " << r.note << '\n';
    if (!r.cycles.empty()) {
        out << "\ncycle,start_s,period_s,displacement_mm,average_speed_mm_s,peak_speed_mm_s,peak_time_s,peak_phase,"
               "power_s,recovery_s,startup\n";
        for (std::size_t i = 0; i < r.cycles.size(); ++i) {
            const auto& c = r.cycles[i];
            out << i << ',' << fmt(c.start_time) << ',' << fmt(c.period) << ',' << fmt(c.displacement) << ','
                << fmt(c.average_speed) << ',' << fmt(c.peak_speed) << ',' << fmt(c.peak_speed_time) << ','
                << to_string(c.peak_speed_phase) << ',' << fmt(c.power_duration) << ',' << fmt(c.recovery_duration)
                << ',' << (c.startup ? 1 : 0) << '\n';
        }
        out << '\n';
    }
    out << "steady-state cycles: " << r.steady.cycles << '\n';
    out << "mean displacement per cycle: " << fmt(r.steady.mean_displacement) << " mm\n";
    out << "mean cycle-average speed: " << fmt(r.steady.mean_average_speed) << " mm/s\n";
    out << "max peak speed: " << fmt(r.steady.max_peak_speed) << " mm/s\n";
    out << "peak motor torque: left " << fmt(r.torque.peak_left) << " N*mm, right " << fmt(r.torque.peak_right)
        << " N*mm";
    if (r.torque.limit > 0.0) out << " (limit " << fmt(r.torque.limit) << (r.torque.over_limit ? ", EXCEEDED)" : ", ok)");
    out << '\n';
}

// ---- sweep ----------------------------------------------------------------

ScenarioConfig cell_scenario(const ScenarioConfig& base, const MechanismGeometry& preset, double depth, double rpm) {
    ScenarioConfig c = base;
    c.kind = ScenarioKind::swim;
    c.robot.mechanism_left = preset;
    c.robot.mechanism_right = preset;
    ArmGeometry g = c.robot.arm_model.geometry;
    g.incision_depth = depth;
    c.robot.arm_model = build_arm(g, c.robot.arm_model.material);
    c.robot.motor_left = MotorProfile(rpm);
    c.robot.motor_right = MotorProfile(rpm);
    c.rig_rpm = rpm;
    return c;
}

std::vector<SweepCell> run_sweep(const ScenarioConfig& config, int jobs) {
    const auto& grid = config.sweep;
    if (grid.presets.empty() || grid.incision_depths.empty() || grid.rpms.empty()) {
        throw ConfigError("sweep grid is empty");
    }
    if (jobs < 1) throw ConfigError("--jobs must be at least 1");

    std::vector<SweepCell> cells;
    for (const auto& preset : grid.presets) {
        for (double depth : grid.incision_depths) {
            for (double rpm : grid.rpms) {
                SweepCell c;
                c.preset = preset;
                c.incision_depth = depth;
                c.rpm = rpm;
                cells.push_back(c);
            }
        }
    }

    const auto n = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        SweepCell& cell = cells[static_cast<std::size_t>(i)];
        try {
            ScenarioConfig sc = cell_scenario(config, cell.preset, cell.incision_depth, cell.rpm);
            sc.robot.execution = Execution::serial;
            const SwimResult swim = run_swim(sc);
            cell.steady = swim.steady;
            cell.peak_torque = std::max(swim.torque.peak_left, swim.torque.peak_right);
            if (!swim.note.empty()) cell.error = swim.note;
            const RecurveStats stats = run_arm(sc);
            cell.early_recovery_frames = stats.early_recovery_frames;
            cell.recurve_frames = stats.recurve_frames;
            cell.recurve_fraction = stats.fraction();
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    }
    return cells;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells) {
    CsvWriter csv(out);
    csv.header({"crank_a_mm", "coupler_b_mm", "offset_e_mm", "travel_ratio_k", "incision_depth", "rpm", "cycles",
                "mean_displacement_mm", "mean_average_speed_mm_s", "max_peak_speed_mm_s", "peak_torque_n_mm",
                "early_recovery_frames", "recurve_frames", "recurve_fraction", "error"});
    for (const auto& c : cells) {
        csv.cell(c.preset.crank()).cell(c.preset.coupler()).cell(c.preset.offset());
        csv.cell(stroke_characteristics(c.preset).travel_ratio_k);
        csv.cell(c.incision_depth).cell(c.rpm).cell(c.steady.cycles);
        csv.cell(c.steady.mean_displacement).cell(c.steady.mean_average_speed).cell(c.steady.max_peak_speed);
        csv.cell(c.peak_torque).cell(c.early_recovery_frames).cell(c.recurve_frames).cell(c.recurve_fraction);
        csv.cell(c.error);
        csv.end_row();
    }
}

}  // namespace octoswim
