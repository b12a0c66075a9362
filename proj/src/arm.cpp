#include "octoswim/arm.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace octoswim {

namespace {

constexpr double kMm = 1e-3;
constexpr int kMaxSegments = 64;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxSegments, kMaxSegments>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxSegments, 1>;

Vec2 axis_dir(double alpha) { return {std::sin(alpha), -std::cos(alpha)}; }

// Absolute segment angles and rates from the relative joint coordinates.
void absolute_angles(const ArmState& state, Vector& alpha, Vector& alpha_dot) {
    const auto n = static_cast<Eigen::Index>(state.joint_angles.size());
    alpha.resize(n);
    alpha_dot.resize(n);
    double a = state.root_angle;
    double w = state.root_rate;
    for (Eigen::Index j = 0; j < n; ++j) {
        a += state.joint_angles[static_cast<std::size_t>(j)];
        w += state.joint_rates[static_cast<std::size_t>(j)];
        alpha[j] = a;
        alpha_dot[j] = w;
    }
}

void check_state(const ArmModel& model, const ArmState& state) {
    if (state.joint_angles.size() != model.joint_count() || state.joint_rates.size() != model.joint_count()) {
        throw std::invalid_argument("arm state does not match the model's joint count");
    }
}

}  // namespace

void validate(const ArmGeometry& g) {
    if (!(g.length > 0.0)) throw std::invalid_argument("arm length must be positive");
    if (!(g.tip_diameter > 0.0) || !(g.base_diameter > g.tip_diameter)) {
        throw std::invalid_argument("arm must taper: base_diameter > tip_diameter > 0");
    }
    if (!(g.incision_depth >= 0.0) || !(g.incision_depth < 1.0)) {
        throw std::invalid_argument("incision depth fraction must lie in [0, 1)");
    }
    if (g.n_segments < 2 || g.n_segments > kMaxSegments) {
        throw std::invalid_argument("arm needs between 2 and 64 segments");
    }
}

void validate(const ArmMaterial& m) {
    if (!(m.youngs_modulus > 0.0) || !(m.density > 0.0) || !(m.damping_ratio > 0.0)) {
        throw std::invalid_argument("arm material parameters must be strictly positive");
    }
}

double ArmModel::asymmetry_factor() const {
    const double retained = 1.0 - geometry.incision_depth;
    return retained * retained * retained;
}

ArmModel build_arm(const ArmGeometry& geometry, const ArmMaterial& material) {
    validate(geometry);
    validate(material);
    ArmModel m;
    m.geometry = geometry;
    m.material = material;
    const auto n = static_cast<std::size_t>(geometry.n_segments);
    const double l = geometry.length / static_cast<double>(n);
    m.segment_length = l;
    const double factor = m.asymmetry_factor();
    const double e_n_per_mm2 = material.youngs_modulus * 1e-6;

    for (std::size_t i = 0; i < n; ++i) {
        const double s0 = l * static_cast<double>(i);
        const double d0 = geometry.diameter_at(s0);
        const double d1 = geometry.diameter_at(s0 + l);
        const double second_moment = kPi * std::pow(d0, 4) / 64.0;  // mm^4
        const double k = e_n_per_mm2 * second_moment / l;            // N*mm/rad

        const double volume_mm3 = kPi * l / 12.0 * (d0 * d0 + d0 * d1 + d1 * d1);
        const double mass = material.density * volume_mm3 * 1e-9;

        // point mass at the midpoint, rotary inertia about the joint
        const double inertia = mass * (0.5 * l * kMm) * (0.5 * l * kMm);  // kg*m^2
        const double c = 2.0 * material.damping_ratio * std::sqrt(k * kMm * inertia);  // N*m*s/rad

        m.stiffness_closing.push_back(k);
        m.stiffness_opening.push_back(k * factor);
        m.damping.push_back(c / kMm);
        m.segment_mass.push_back(mass);
        m.segment_diameter.push_back(geometry.diameter_at(s0 + 0.5 * l));
    }
    return m;
}

ArmState rest_state(const ArmModel& model, double root_angle) {
    ArmState s;
    s.root_angle = root_angle;
    s.joint_angles.assign(model.joint_count(), 0.0);
    s.joint_rates.assign(model.joint_count(), 0.0);
    return s;
}

double joint_torque(const ArmModel& model, std::size_t joint, double angle, double rate) {
    const double k = angle > 0.0 ? model.stiffness_closing.at(joint) : model.stiffness_opening.at(joint);
    return -k * angle - model.damping.at(joint) * rate;
}

ArmStep step_arm_with_loads(const ArmModel& model, const ArmState& state, const RootDrive& next_root,
                            const FluidEnvironment& env, const AmbientFlow& ambient, double dt) {
    check_state(model, state);
    if (!(dt > 0.0) || dt > 1e-3) {
        throw std::invalid_argument("arm time step must lie in (0, 1e-3] s");
    }
    const auto n = static_cast<Eigen::Index>(model.joint_count());
    const auto un = model.joint_count();
    const double l_mm = model.segment_length;
    const double l = l_mm * kMm;

    Vector alpha;
    Vector alpha_dot;
    absolute_angles(state, alpha, alpha_dot);

    Vector cos_a(n);
    Vector sin_a(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        cos_a[j] = std::cos(alpha[j]);
        sin_a[j] = std::sin(alpha[j]);
    }

    // lumped masses, optionally with isotropic added mass of displaced water
    Vector mass(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = model.segment_diameter[static_cast<std::size_t>(i)] * kMm;
        const double displaced = env.density * kPi * 0.25 * d * d * l;
        mass[i] = model.segment_mass[static_cast<std::size_t>(i)] + env.added_mass_coeff * displaced;
    }

    // midpoint positions (mm) and velocities (mm/s) in the arm plane
    ArmStep out;
    out.loads.midpoints.resize(un);
    out.loads.drag.resize(un);
    Vec2 joint_pos{};
    Vec2 joint_vel{};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const Vec2 axis{sin_a[i], -cos_a[i]};
        const Vec2 tangent{cos_a[i], sin_a[i]};
        const Vec2 mid = joint_pos + axis * (0.5 * l_mm);
        const Vec2 mid_vel = joint_vel + tangent * (0.5 * l_mm * alpha_dot[i]);
        const Vec2 relative = mid_vel - ambient.at(mid);
        out.loads.midpoints[ui] = mid;
        out.loads.drag[ui] = segment_drag(env, {relative, axis, model.segment_diameter[ui], l_mm});
        joint_pos += axis * l_mm;
        joint_vel += tangent * (l_mm * alpha_dot[i]);
    }

    // explicit joint torques (N*m) for the reported root load
    out.loads.root_torque = -joint_torque(model, 0, state.joint_angles[0], state.joint_rates[0]);

    // tail[k] = mass distal to segment k
    Vector tail(n);
    double acc = 0.0;
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        tail[k] = acc;
        acc += mass[k];
    }

    // mass matrix over absolute angles: S_jk cos(alpha_j - alpha_k)
    Matrix m_mat(n, n);
    Vector rhs(n);
    Vec2 distal_force{};
    for (Eigen::Index j = n - 1; j >= 0; --j) {
        const Vec2 f = out.loads.drag[static_cast<std::size_t>(j)];
        const Vec2 tangent{cos_a[j], sin_a[j]};
        double gen = dot(tangent, distal_force * l + f * (0.5 * l));
        for (Eigen::Index k = 0; k < n; ++k) {
            const Eigen::Index far = std::max(j, k);
            const double shape = j == k ? l * l * (0.25 * mass[j] + tail[j]) : l * l * (0.5 * mass[far] + tail[far]);
            const double c = cos_a[j] * cos_a[k] + sin_a[j] * sin_a[k];
            const double s = sin_a[k] * cos_a[j] - cos_a[k] * sin_a[j];  // sin(alpha_k - alpha_j)
            m_mat(j, k) = shape * c;
            gen += shape * alpha_dot[k] * alpha_dot[k] * s;
        }
        rhs[j] = gen;
        distal_force += f;
    }

    // Joint springs and dampers are taken at the end of the step
    // (linearly implicit); drag and velocity-product terms are explicit.
    // With q = B*alpha - e0*root the joint forces enter as B^T * tau.
    Vector spring = Vector::Zero(n);  // N*m/rad, branch picked from the current angle
    Vector damper = Vector::Zero(n);  // N*m*s/rad
    Vector tau_fixed = Vector::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const double q = state.joint_angles[uj];
        spring[j] = (q > 0.0 ? model.stiffness_closing[uj] : model.stiffness_opening[uj]) * kMm;
        damper[j] = model.damping[uj] * kMm;
        const double prev = j == 0 ? next_root.angle : alpha[j - 1];
        tau_fixed[j] = -spring[j] * (alpha[j] - prev);
        if (j == 0) tau_fixed[j] += damper[j] * next_root.rate;
    }

    Matrix system = m_mat;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double g = dt * (damper[j] + dt * spring[j]);
        system(j, j) += g;
        if (j > 0) {
            system(j - 1, j - 1) += g;
            system(j - 1, j) -= g;
            system(j, j - 1) -= g;
        }
        rhs[j] += tau_fixed[j] - (j + 1 < n ? tau_fixed[j + 1] : 0.0);
    }
    rhs = m_mat * alpha_dot + dt * rhs;
    const Vector alpha_dot_next = system.llt().solve(rhs);

    ArmState next;
    next.root_angle = next_root.angle;
    next.root_rate = next_root.rate;
    next.time = state.time + dt;
    next.joint_angles.resize(un);
    next.joint_rates.resize(un);
    double prev_angle = next_root.angle;
    double prev_rate = next_root.rate;
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const double w = alpha_dot_next[j];
        const double a = alpha[j] + dt * w;
        next.joint_angles[uj] = a - prev_angle;
        next.joint_rates[uj] = w - prev_rate;
        prev_angle = a;
        prev_rate = w;
        if (!std::isfinite(a) || !std::isfinite(w) || std::abs(next.joint_angles[uj]) >= kPi) {
            std::ostringstream msg;
            msg << "arm became unstable at t=" << next.time << " s (joint " << j << ")";
            throw ArmUnstable(msg.str(), next.time);
        }
    }
    out.state = std::move(next);
    return out;
}

ArmState step_arm(const ArmModel& model, const ArmState& state, const RootDrive& next_root,
                  const FluidEnvironment& env, const AmbientFlow& ambient, double dt) {
    return step_arm_with_loads(model, state, next_root, env, ambient, dt).state;
}

std::vector<Vec2> midline(const ArmModel& model, const ArmState& state) {
    check_state(model, state);
    std::vector<Vec2> pts;
    pts.reserve(model.joint_count() + 1);
    Vec2 p{};
    pts.push_back(p);
    double alpha = state.root_angle;
    for (double q : state.joint_angles) {
        alpha += q;
        p += axis_dir(alpha) * model.segment_length;
        pts.push_back(p);
    }
    return pts;
}

double arm_energy(const ArmModel& model, const ArmState& state) {
    check_state(model, state);
    Vector alpha;
    Vector alpha_dot;
    absolute_angles(state, alpha, alpha_dot);
    const double l = model.segment_length * kMm;
    double kinetic = 0.0;
    Vec2 joint_vel{};
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        const Vec2 tangent{std::cos(alpha[i]), std::sin(alpha[i])};
        const Vec2 v = joint_vel + tangent * (0.5 * l * alpha_dot[i]);
        kinetic += 0.5 * model.segment_mass[static_cast<std::size_t>(i)] * dot(v, v);
        joint_vel += tangent * (l * alpha_dot[i]);
    }
    double elastic = 0.0;
    for (std::size_t j = 0; j < model.joint_count(); ++j) {
        const double q = state.joint_angles[j];
        const double k = q > 0.0 ? model.stiffness_closing[j] : model.stiffness_opening[j];
        elastic += 0.5 * k * kMm * q * q;
    }
    return kinetic + elastic;
}

ArmState solve_static(const ArmModel& model, double root_angle, const Vec2& tip_force) {
    const auto n = static_cast<Eigen::Index>(model.joint_count());
    const double l = model.segment_length;
    ArmState state = rest_state(model, root_angle);

    for (int iter = 0; iter < 100; ++iter) {
        Vector alpha;
        Vector alpha_dot;
        absolute_angles(state, alpha, alpha_dot);

        // moment of the tip force about each joint and its derivative
        Vector lever_cross(n);
        for (Eigen::Index m = 0; m < n; ++m) {
            const Vec2 tangent{std::cos(alpha[m]), std::sin(alpha[m])};
            lever_cross[m] = l * cross(tangent, tip_force);
        }
        Vector moment(n);
        Vec2 to_tip{};
        for (Eigen::Index j = n - 1; j >= 0; --j) {
            to_tip += axis_dir(alpha[j]) * l;
            moment[j] = cross(to_tip, tip_force);
        }

        Vector residual(n);
        Matrix jac(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto uj = static_cast<std::size_t>(j);
            const double qj = state.joint_angles[uj];
            const bool closing = qj > 0.0 || (qj == 0.0 && moment[j] > 0.0);
            const double k = closing ? model.stiffness_closing[uj] : model.stiffness_opening[uj];
            residual[j] = k * qj - moment[j];
            for (Eigen::Index kk = 0; kk < n; ++kk) {
                double d = 0.0;
                for (Eigen::Index m = std::max(j, kk); m < n; ++m) d += lever_cross[m];
                jac(j, kk) = -d + (kk == j ? k : 0.0);
            }
        }
        const Vector step = jac.partialPivLu().solve(residual);
        double biggest = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            state.joint_angles[static_cast<std::size_t>(j)] -= step[j];
            biggest = std::max(biggest, std::abs(step[j]));
        }
        if (biggest < 1e-15) break;
    }
    return state;
}

}  // namespace octoswim
