#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "octoswim/arm.hpp"

using namespace octoswim;

namespace {

ArmModel arm_with_depth(double d, int n = 10) {
    ArmGeometry g;
    g.incision_depth = d;
    g.n_segments = n;
    return build_arm(g, ArmMaterial{});
}

FluidEnvironment no_fluid() {
    FluidEnvironment env;
    env.cd_normal = 0.0;
    env.ct_tangential = 0.0;
    env.cd_body = 0.0;
    return env;
}

double tip_x(const ArmModel& m, const ArmState& s) { return midline(m, s).back().x; }

// Tip deflection of a tapered cantilever under a small transverse tip load,
// from the Euler-Bernoulli compliance integral (Simpson, fine grid).
double beam_tip_deflection(const ArmGeometry& g, double youngs_pa, double force_n) {
    const double e = youngs_pa * 1e-6;  // N/mm^2
    const int n = 20000;
    const double h = g.length / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double s = i * h;
        const double d = g.diameter_at(s);
        const double inertia = kPi * d * d * d * d / 64.0;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += w * (g.length - s) * (g.length - s) / (e * inertia);
    }
    return force_n * sum * h / 3.0;
}

}  // namespace

TEST_CASE("joint stiffness of the default arm") {
    const ArmModel m = arm_with_depth(0.0);
    const double inertia = kPi * std::pow(30.0, 4) / 64.0;
    CHECK(inertia == doctest::Approx(39760.78).epsilon(1e-6));
    CHECK(m.stiffness_closing[0] == doctest::Approx(1.0 * inertia / 30.0).epsilon(1e-12));
    CHECK(m.stiffness_closing[0] == doctest::Approx(1.325e3).epsilon(1e-3));
    for (std::size_t j = 0; j < m.joint_count(); ++j) {
        CHECK(m.stiffness_opening[j] == m.stiffness_closing[j]);
        if (j > 0) CHECK(m.stiffness_closing[j] < m.stiffness_closing[j - 1]);
    }
}

TEST_CASE("incision asymmetry") {
    const ArmModel m = arm_with_depth(0.7);
    CHECK(m.asymmetry_factor() == doctest::Approx(0.027).epsilon(1e-12));
    for (std::size_t j = 0; j < m.joint_count(); ++j) {
        CHECK(m.stiffness_opening[j] / m.stiffness_closing[j] == doctest::Approx(0.027).epsilon(1e-12));
    }
    const ArmModel shallow = arm_with_depth(0.2);
    const ArmModel plain = arm_with_depth(0.0);
    for (std::size_t j = 0; j < m.joint_count(); ++j) {
        CHECK(shallow.stiffness_opening[j] > m.stiffness_opening[j]);
        CHECK(shallow.stiffness_closing[j] == m.stiffness_closing[j]);
        CHECK(plain.stiffness_opening[j] > shallow.stiffness_opening[j]);
    }
}

TEST_CASE("segment masses add up to the frustum") {
    const ArmModel m = arm_with_depth(0.0);
    double total = 0.0;
    for (double s : m.segment_mass) total += s;
    const double r0 = 15e-3, r1 = 5e-3, len = 0.3;
    const double volume = kPi * len * (r0 * r0 + r0 * r1 + r1 * r1) / 3.0;
    CHECK(total == doctest::Approx(1080.0 * volume).epsilon(1e-12));
}

TEST_CASE("joint torque") {
    const ArmModel m = arm_with_depth(0.7);
    CHECK(joint_torque(m, 3, 0.0, 0.0) == 0.0);
    const double closing = joint_torque(m, 3, 0.05, 0.0);
    const double opening = joint_torque(m, 3, -0.05, 0.0);
    CHECK(closing < 0.0);
    CHECK(opening > 0.0);
    CHECK(std::abs(opening / closing) == doctest::Approx(0.027).epsilon(1e-12));
    const ArmModel sym = arm_with_depth(0.0);
    CHECK(joint_torque(sym, 2, -0.1, 0.0) == -joint_torque(sym, 2, 0.1, 0.0));
    CHECK(joint_torque(sym, 2, 0.0, 1.0) < 0.0);
}

TEST_CASE("midline") {
    const ArmModel m = arm_with_depth(0.4);
    SUBCASE("straight arm hanging down") {
        const auto pts = midline(m, rest_state(m, 0.0));
        REQUIRE(pts.size() == 11);
        CHECK(pts.front().x == 0.0);
        CHECK(pts.front().y == 0.0);
        CHECK(std::abs(pts.back().x) < 1e-12);
        CHECK(pts.back().y == doctest::Approx(-300.0).epsilon(1e-14));
    }
    SUBCASE("straight arm at a root angle") {
        const auto pts = midline(m, rest_state(m, 0.5));
        CHECK(norm(pts.back()) == doctest::Approx(300.0).epsilon(1e-14));
        CHECK(pts.back().x > 0.0);
    }
    SUBCASE("arc length is conserved") {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int i = 0; i < 200; ++i) {
            ArmState s = rest_state(m, u(rng));
            for (double& q : s.joint_angles) q = u(rng);
            const auto pts = midline(m, s);
            double len = 0.0;
            for (std::size_t k = 1; k < pts.size(); ++k) len += norm(pts[k] - pts[k - 1]);
            CHECK(std::abs(len - 300.0) < 1e-9);
        }
    }
}

TEST_CASE("zero-input equilibrium is stationary") {
    const ArmModel m = arm_with_depth(0.7);
    const FluidEnvironment env;
    ArmState s = rest_state(m, 0.3);
    const RootDrive hold{0.3, 0.0};
    for (int i = 0; i < 1000000; ++i) s = step_arm(m, s, hold, env, AmbientFlow{}, 1e-4);
    for (std::size_t j = 0; j < m.joint_count(); ++j) {
        CHECK(s.joint_angles[j] == 0.0);
        CHECK(s.joint_rates[j] == 0.0);
    }
    CHECK(s.root_angle == 0.3);
}

TEST_CASE("free vibration without fluid loses energy every step") {
    for (double d : {0.0, 0.7}) {
        CAPTURE(d);
        const ArmModel m = arm_with_depth(d);
        const FluidEnvironment env = no_fluid();
        ArmState s = solve_static(m, 0.4, {0.02, 0.0});
        const RootDrive hold{0.4, 0.0};
        double e_prev = arm_energy(m, s);
        CHECK(e_prev > 0.0);
        bool monotone = true;
        for (int i = 0; i < 30000; ++i) {
            s = step_arm(m, s, hold, env, AmbientFlow{}, 1e-4);
            const double e = arm_energy(m, s);
            if (e > e_prev * (1.0 + 1e-12)) monotone = false;
            e_prev = e;
        }
        CHECK(monotone);
        CHECK(e_prev < 0.5 * arm_energy(m, solve_static(m, 0.4, {0.02, 0.0})));
    }
}

TEST_CASE("energy decays after a root drive stops") {
    const ArmModel m = arm_with_depth(0.7);
    const FluidEnvironment env = no_fluid();
    ArmState s = rest_state(m, 0.0);
    const double dt = 1e-4, w = 2.0 * kPi * 0.8;
    for (int i = 1; i <= 6000; ++i) {
        const double t = i * dt;
        s = step_arm(m, s, {0.6 * std::sin(w * t), 0.6 * w * std::cos(w * t)}, env, AmbientFlow{}, dt);
    }
    // the drive ends at a crest so the root rate is already small; hold it still
    const RootDrive hold{s.root_angle, 0.0};
    const double e_start = arm_energy(m, s);
    double e_prev = e_start;
    double peak_q = 0.0;
    bool monotone = true;
    for (int i = 0; i < 40000; ++i) {
        s = step_arm(m, s, hold, env, AmbientFlow{}, dt);
        const double e = arm_energy(m, s);
        if (i > 0 && e > e_prev * (1.0 + 1e-12)) monotone = false;
        e_prev = e;
        for (double q : s.joint_angles) peak_q = std::max(peak_q, std::abs(q));
    }
    CHECK(monotone);
    CHECK(peak_q < kPi);
    CHECK(e_prev < 0.25 * e_start);
}

TEST_CASE("quasi-static tip stiffness ratio for a cut arm") {
    const ArmModel m = arm_with_depth(0.7);
    const double force = 2e-4;  // N, keeps the soft-side tip deflection under 5% of the length
    const double closing = tip_x(m, solve_static(m, 0.0, {force, 0.0}));
    const double opening = tip_x(m, solve_static(m, 0.0, {-force, 0.0}));
    CHECK(closing > 0.0);
    CHECK(opening < 0.0);
    CHECK(std::abs(opening) < 0.05 * 300.0);
    const double ratio = std::abs(closing) / std::abs(opening);  // stiffness_open / stiffness_closed
    CHECK(std::abs(ratio / 0.027 - 1.0) < 0.05);
}

TEST_CASE("grid refinement of the static tip deflection") {
    const double force = 1e-3;
    auto deflection = [&](int n) {
        const ArmModel m = arm_with_depth(0.0, n);
        return tip_x(m, solve_static(m, 0.0, {force, 0.0}));
    };
    const double d10 = deflection(10), d20 = deflection(20), d40 = deflection(40);
    CHECK(std::abs(d20 - d10) / std::abs(d20) < 0.05);
    const double beam = beam_tip_deflection(ArmGeometry{}, 1e6, force);
    CHECK(std::abs(d40 - beam) / beam < 0.03);
    CHECK(std::abs(d40 - beam) < std::abs(d10 - beam));
}

TEST_CASE("opening bends more than closing under a sinusoidal drive in water") {
    auto peaks = [](double d) {
        const ArmModel m = arm_with_depth(d);
        const FluidEnvironment env;
        const double dt = 1e-4, w = 2.0 * kPi * 0.8, mid = deg_to_rad(45.0), amp = deg_to_rad(30.0);
        ArmState s = rest_state(m, mid);
        double open_peak = 0.0, close_peak = 0.0;
        for (int i = 1; i <= 50000; ++i) {
            const double t = i * dt;
            const RootDrive r{mid + amp * std::sin(w * t), amp * w * std::cos(w * t)};
            s = step_arm(m, s, r, env, AmbientFlow{}, dt);
            if (t < 1.25) continue;
            double bend = 0.0;
            for (double q : s.joint_angles) bend += q;
            if (r.rate > 0.0) {
                open_peak = std::max(open_peak, -bend);
            } else {
                close_peak = std::max(close_peak, bend);
            }
        }
        return std::pair{open_peak, close_peak};
    };
    const auto [cut_open, cut_close] = peaks(0.7);
    CHECK(cut_open > cut_close);
    const auto [plain_open, plain_close] = peaks(0.0);
    CHECK(plain_open == doctest::Approx(plain_close).epsilon(0.02));
}

TEST_CASE("non-finite drive is reported as instability") {
    const ArmModel m = arm_with_depth(0.0);
    const ArmState s = rest_state(m, 0.0);
    CHECK_THROWS_AS(step_arm(m, s, {std::numeric_limits<double>::quiet_NaN(), 0.0}, FluidEnvironment{},
                             AmbientFlow{}, 1e-4),
                    ArmUnstable);
}

TEST_CASE("input validation") {
    ArmGeometry g;
    g.incision_depth = 1.0;
    CHECK_THROWS_AS(build_arm(g, ArmMaterial{}), std::invalid_argument);
    g = ArmGeometry{};
    g.tip_diameter = 40.0;
    CHECK_THROWS_AS(build_arm(g, ArmMaterial{}), std::invalid_argument);
    g = ArmGeometry{};
    g.n_segments = 1;
    CHECK_THROWS_AS(build_arm(g, ArmMaterial{}), std::invalid_argument);
    ArmMaterial mat;
    mat.youngs_modulus = 0.0;
    CHECK_THROWS_AS(build_arm(ArmGeometry{}, mat), std::invalid_argument);
    const ArmModel m = build_arm(ArmGeometry{}, ArmMaterial{});
    CHECK_THROWS_AS(step_arm(m, rest_state(m, 0.0), {}, FluidEnvironment{}, AmbientFlow{}, 2e-3),
                    std::invalid_argument);
}
