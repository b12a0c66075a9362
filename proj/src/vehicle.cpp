#include "octoswim/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace octoswim {

namespace {

constexpr double kMm = 1e-3;

// Radial unit vectors of the arm planes in the body's horizontal plane
// (x lateral, y depth). Left arms are exact mirror images of the right ones,
// index for index, so mirrored runs reproduce bit for bit.
struct ArmLayout {
    std::array<Vec2, kArmCount> radial{};
};

ArmLayout arm_layout() {
    constexpr std::array<double, kArmsPerGroup> azimuth_deg{67.5, 22.5, -22.5, -67.5};
    ArmLayout layout;
    for (std::size_t k = 0; k < kArmsPerGroup; ++k) {
        const double c = std::cos(deg_to_rad(azimuth_deg[k]));
        const double s = std::sin(deg_to_rad(azimuth_deg[k]));
        layout.radial[k] = {-c, s};
        layout.radial[kArmsPerGroup + k] = {c, s};
    }
    return layout;
}

struct GroupDrive {
    double crank = 0.0;
    double slider_velocity = 0.0;
    RootDrive root;
};

GroupDrive drive_at(const MechanismGeometry& geom, const RootAngleMap& map, double crank, double omega) {
    GroupDrive d;
    d.crank = crank;
    const double s = slider_position(geom, crank);
    d.slider_velocity = slider_velocity(geom, crank, -omega);
    d.root.angle = root_angle_map(geom, map, s);
    d.root.rate = root_angle_slope(geom, map, s) * d.slider_velocity;
    return d;
}

double rpm_to_rad_s(double rpm) { return rpm * 2.0 * kPi / 60.0; }

void check_params(const SimulationParams& p) {
    if (!(p.duration > 0.0) || !(p.dt > 0.0) || !(p.sample_interval > 0.0)) {
        throw std::invalid_argument("duration, dt and sample_interval must be positive");
    }
    if (p.dt > 1e-3) throw std::invalid_argument("dt must not exceed 1e-3 s");
}

std::size_t sample_stride(const SimulationParams& p) {
    const double ratio = p.sample_interval / p.dt;
    const auto stride = static_cast<std::size_t>(std::llround(ratio));
    if (stride == 0 || std::abs(ratio - static_cast<double>(stride)) > 1e-6 * ratio) {
        throw std::invalid_argument("sample_interval must be a whole multiple of dt");
    }
    return stride;
}

// Linkage closure residual |P - Q|^2 - L^2 in the carrier plane.
struct Closure {
    double value;
    double d_alpha;
    double d_s;
};

Closure linkage_closure(const SupportLinkage& lk, double alpha, double s) {
    const double pr = lk.pivot_radius + lk.carrier_attach * std::sin(alpha);
    const double pz = -lk.carrier_attach * std::cos(alpha);
    const double dr = pr - lk.slider_radius;
    const double dz = pz - (s - lk.axial_offset);
    Closure c;
    c.value = dr * dr + dz * dz - lk.support_rod * lk.support_rod;
    c.d_alpha = 2.0 * dr * lk.carrier_attach * std::cos(alpha) + 2.0 * dz * lk.carrier_attach * std::sin(alpha);
    c.d_s = -2.0 * dz;
    return c;
}

double solve_linkage(const SupportLinkage& lk, double s) {
    double lo = 0.0;
    double hi = deg_to_rad(150.0);
    const double f_lo = linkage_closure(lk, lo, s).value;
    const double f_hi = linkage_closure(lk, hi, s).value;
    if (!(f_lo * f_hi < 0.0)) {
        std::ostringstream msg;
        msg << "support linkage cannot close at slider position " << s << " mm";
        throw Unassemblable(msg.str());
    }
    const bool rising = f_lo < 0.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        const bool below = linkage_closure(lk, mid, s).value < 0.0;
        if (below == rising) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double root_angle_map(const MechanismGeometry& geom, const RootAngleMap& map, double slider_s) {
    if (map.mode == RootMapMode::linkage) return solve_linkage(map.linkage, slider_s);
    const double lo = slider_min(geom);
    const double hi = slider_max(geom);
    const double t = std::clamp((slider_s - lo) / (hi - lo), 0.0, 1.0);
    return deg_to_rad((1.0 - t) * map.closed_deg + t * map.open_deg);
}

double root_angle_slope(const MechanismGeometry& geom, const RootAngleMap& map, double slider_s) {
    if (map.mode == RootMapMode::linkage) {
        const double alpha = solve_linkage(map.linkage, slider_s);
        const Closure c = linkage_closure(map.linkage, alpha, slider_s);
        return -c.d_s / c.d_alpha;
    }
    return deg_to_rad(map.open_deg - map.closed_deg) / (slider_max(geom) - slider_min(geom));
}

MotorProfile::MotorProfile(std::vector<std::pair<double, double>> steps) : steps_(std::move(steps)) {
    if (steps_.empty() || steps_.front().first != 0.0) {
        throw std::invalid_argument("motor profile must start at t = 0");
    }
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        if (!(steps_[i].second >= 0.0) || !std::isfinite(steps_[i].second)) {
            throw std::invalid_argument("motor speeds must be finite and non-negative");
        }
        if (i > 0 && !(steps_[i].first > steps_[i - 1].first)) {
            throw std::invalid_argument("motor profile times must be strictly increasing");
        }
    }
}

double MotorProfile::rpm_at(double t) const {
    double rpm = steps_.front().second;
    for (const auto& [start, value] : steps_) {
        if (t >= start) rpm = value;
    }
    return rpm;
}

double RobotConfig::effective_yaw_inertia() const {
    if (yaw_inertia) return *yaw_inertia;
    const double r = chassis_radius * kMm;
    return 0.25 * body_mass * r * r;
}

void validate(const RobotConfig& c) {
    if (!(c.body_mass > 0.0)) throw std::invalid_argument("body mass must be positive");
    if (!(c.root_map.open_deg > c.root_map.closed_deg)) {
        throw std::invalid_argument("root_angle_open must exceed root_angle_closed");
    }
    if (!(c.chassis_radius >= 0.0)) throw std::invalid_argument("chassis radius must be non-negative");
    if (c.yaw_inertia && !(*c.yaw_inertia > 0.0)) throw std::invalid_argument("yaw inertia must be positive");
    validate(c.env);
    validate(c.arm_model.geometry);
    validate(c.arm_model.material);
}

TimeSeries simulate(const RobotConfig& config, const SimulationParams& params) {
    validate(config);
    check_params(params);
    const std::size_t stride = sample_stride(params);
    const auto steps = static_cast<std::size_t>(std::llround(params.duration / params.dt));
    const double dt = params.dt;
    const ArmLayout layout = arm_layout();
    const bool planar = config.mode == SwimMode::planar;
    const double yaw_inertia = config.effective_yaw_inertia();
    const double rc = config.chassis_radius;
    const ArmModel& model = config.arm_model;

    const std::array<const MechanismGeometry*, 2> geoms{&config.mechanism_left, &config.mechanism_right};
    const std::array<const MotorProfile*, 2> motors{&config.motor_left, &config.motor_right};

    std::array<double, 2> crank{};
    std::array<GroupDrive, 2> drive{};
    for (std::size_t g = 0; g < 2; ++g) {
        crank[g] = wrap_angle(extended_crank_angle(*geoms[g]) - config.initial_cycle_phase);
        drive[g] = drive_at(*geoms[g], config.root_map, crank[g], rpm_to_rad_s(motors[g]->rpm_at(0.0)));
    }

    std::vector<ArmState> arms;
    arms.reserve(kArmCount);
    for (std::size_t i = 0; i < kArmCount; ++i) {
        ArmState s = rest_state(model, drive[i / kArmsPerGroup].root.angle);
        s.root_rate = drive[i / kArmsPerGroup].root.rate;
        arms.push_back(std::move(s));
    }

    // body state, world x-z plane
    double px = 0.0, pz = 0.0, vx = 0.0, vz = 0.0, heading = 0.0, yaw_rate = 0.0;

    TimeSeries series;
    series.sample_interval = params.sample_interval;
    series.rows.reserve(steps / stride + 1);

    std::vector<RootDrive> next_roots(kArmCount);
    std::vector<AmbientFlow> ambient(kArmCount);
    std::vector<ArmStep> results(kArmCount);
    std::vector<SegmentLoad> group_loads;

    for (std::size_t n = 0;; ++n) {
        const double t = static_cast<double>(n) * dt;
        const double ch = std::cos(heading);
        const double sh = std::sin(heading);
        // body velocity in body axes (lateral, axial)
        const double v_lat = vx * ch + vz * sh;
        const double v_ax = -vx * sh + vz * ch;

        if (n % stride == 0) {
            SwimSample row;
            row.time = t;
            row.position = {px, 0.0, pz};
            row.world_velocity = {vx, 0.0, vz};
            row.velocity = v_ax;
            row.heading = heading;
            row.crank_left = crank[0];
            row.crank_right = crank[1];
            row.phase_left = stroke_phase(*geoms[0], crank[0]);
            row.phase_right = stroke_phase(*geoms[1], crank[1]);
            row.slider_velocity_left = drive[0].slider_velocity;
            row.slider_velocity_right = drive[1].slider_velocity;
            for (std::size_t i = 0; i < kArmCount; ++i) {
                const double moment =
                    -joint_torque(model, 0, arms[i].joint_angles[0], arms[i].joint_rates[0]);
                (i < kArmsPerGroup ? row.root_moment_left : row.root_moment_right) += moment;
                row.root_angles[i] = arms[i].root_angle;
            }
            series.rows.push_back(row);
        }
        if (n == steps) break;

        std::array<double, 2> omega{};
        for (std::size_t g = 0; g < 2; ++g) {
            omega[g] = rpm_to_rad_s(motors[g]->rpm_at(t));
            crank[g] = wrap_angle(crank[g] - omega[g] * dt);
            drive[g] = drive_at(*geoms[g], config.root_map, crank[g], omega[g]);
        }

        for (std::size_t i = 0; i < kArmCount; ++i) {
            const Vec2 e = layout.radial[i];
            next_roots[i] = drive[i / kArmsPerGroup].root;
            ambient[i].velocity = {-(v_lat * e.x), -v_ax};
            ambient[i].spin = -(yaw_rate * e.x);
            ambient[i].pivot = {-rc, 0.0};
        }

        step_arms(config.execution, model, arms, next_roots, ambient, config.env, dt, results);

        // per-group wrench, then left + right
        std::array<BodyWrench, 2> wrench{};
        for (std::size_t g = 0; g < 2; ++g) {
            group_loads.clear();
            for (std::size_t k = 0; k < kArmsPerGroup; ++k) {
                const std::size_t i = g * kArmsPerGroup + k;
                const Vec2 e = layout.radial[i];
                const ArmLoads& loads = results[i].loads;
                for (std::size_t j = 0; j < loads.drag.size(); ++j) {
                    const double r = rc + loads.midpoints[j].x;
                    const Vec2 f = loads.drag[j];
                    group_loads.push_back({{r * e.x, r * e.y, loads.midpoints[j].y},
                                           {-(f.x * e.x), -(f.x * e.y), -f.y}});
                }
            }
            wrench[g] = net_thrust(group_loads);
        }
        const Vec3 force = wrench[0].force + wrench[1].force;
        const Vec3 torque = wrench[0].torque + wrench[1].torque;

        if (planar) {
            const double fx = force.x * ch - force.z * sh;
            const double fz = force.x * sh + force.z * ch;
            const Vec3 drag = body_drag(config.env, {vx, 0.0, vz});
            const double ax = (fx + drag.x) / config.body_mass;  // m/s^2
            const double az = (fz + drag.z) / config.body_mass;
            const double spin_acc = -torque.y * kMm / yaw_inertia;
            vx += dt * ax / kMm;
            vz += dt * az / kMm;
            yaw_rate += dt * spin_acc;
            px += dt * vx;
            pz += dt * vz;
            heading += dt * yaw_rate;
        } else {
            const Vec3 drag = body_drag(config.env, {0.0, 0.0, vz});
            const double az = (force.z + drag.z) / config.body_mass;
            vz += dt * az / kMm;
            pz += dt * vz;
        }

        for (std::size_t i = 0; i < kArmCount; ++i) arms[i] = std::move(results[i].state);
    }
    return series;
}

TimeSeries simulate_steering(const RobotConfig& config, const SimulationParams& params) {
    if (config.mode != SwimMode::planar) {
        throw std::invalid_argument("steering simulation needs planar mode");
    }
    return simulate(config, params);
}

TorqueEstimate motor_torque_estimate(const RobotConfig& config, const TimeSeries& series, double torque_limit) {
    TorqueEstimate est;
    est.limit = torque_limit;
    est.samples.reserve(series.rows.size());
    auto transmission = [&](const MechanismGeometry& geom, double crank) {
        const double s = slider_position(geom, crank);
        return root_angle_slope(geom, config.root_map, s) * slider_velocity(geom, crank, 1.0);
    };
    for (const SwimSample& row : series.rows) {
        TorqueSample ts;
        ts.time = row.time;
        ts.left = row.root_moment_left * transmission(config.mechanism_left, row.crank_left);
        ts.right = row.root_moment_right * transmission(config.mechanism_right, row.crank_right);
        est.peak_left = std::max(est.peak_left, std::abs(ts.left));
        est.peak_right = std::max(est.peak_right, std::abs(ts.right));
        est.samples.push_back(ts);
    }
    est.over_limit = torque_limit > 0.0 && std::max(est.peak_left, est.peak_right) > torque_limit;
    return est;
}

std::vector<ArmFrame> simulate_arm_rig(const ArmRigConfig& config, const SimulationParams& params) {
    check_params(params);
    validate(config.env);
    if (!(config.rpm >= 0.0)) throw std::invalid_argument("rig motor speed must be non-negative");
    const std::size_t stride = sample_stride(params);
    const auto steps = static_cast<std::size_t>(std::llround(params.duration / params.dt));
    const double omega = rpm_to_rad_s(config.rpm);
    const MechanismGeometry& geom = config.mechanism;

    double crank = wrap_angle(extended_crank_angle(geom) - config.initial_cycle_phase);
    GroupDrive drive = drive_at(geom, config.root_map, crank, omega);
    ArmState arm = rest_state(config.arm_model, drive.root.angle);
    arm.root_rate = drive.root.rate;
    const AmbientFlow still{};

    std::vector<ArmFrame> frames;
    frames.reserve(steps / stride + 1);
    for (std::size_t n = 0;; ++n) {
        if (n % stride == 0) {
            ArmFrame f;
            f.time = static_cast<double>(n) * params.dt;
            f.phase = stroke_phase(geom, crank);
            f.cycle_phase = cycle_phase_angle(geom, crank);
            f.state = arm;
            f.state.time = f.time;
            frames.push_back(std::move(f));
        }
        if (n == steps) break;
        crank = wrap_angle(crank - omega * params.dt);
        drive = drive_at(geom, config.root_map, crank, omega);
        arm = step_arm(config.arm_model, arm, drive.root, config.env, still, params.dt);
    }
    return frames;
}

}  // namespace octoswim
