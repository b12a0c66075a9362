#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "octoswim/analysis.hpp"

using namespace octoswim;

namespace {

std::vector<Vec2> transform(const std::vector<Vec2>& pts, double angle, Vec2 shift) {
    std::vector<Vec2> out;
    for (const auto& p : pts) {
        out.push_back({std::cos(angle) * p.x - std::sin(angle) * p.y + shift.x,
                       std::sin(angle) * p.x + std::cos(angle) * p.y + shift.y});
    }
    return out;
}

// Midline made of a +kappa arc over the base 60% and a -kappa arc over the
// tip 40%, unit spacing in arc length.
std::vector<Vec2> s_shape(double kappa, int n, double length) {
    std::vector<Vec2> pts{{0.0, 0.0}};
    double heading = -kPi / 2.0;
    const double h = length / n;
    for (int i = 0; i < n; ++i) {
        const double s = (i + 0.5) * h;
        const double k = s < 0.6 * length ? kappa : -kappa;
        heading += k * h;
        pts.push_back(pts.back() + Vec2{std::cos(heading), std::sin(heading)} * h);
    }
    return pts;
}

SwimSample row_at(double t, double z, double v, double crank) {
    SwimSample r;
    r.time = t;
    r.position = {0.0, 0.0, z};
    r.velocity = v;
    r.crank_left = crank;
    r.crank_right = crank;
    return r;
}

TimeSeries synthetic_series(const MechanismGeometry& g, double rpm, double v0, double duration, double dt) {
    TimeSeries ts;
    ts.sample_interval = dt;
    const double omega = rpm * 2.0 * kPi / 60.0;
    const double start = extended_crank_angle(g);
    const auto n = static_cast<int>(std::llround(duration / dt));
    double crank = start;
    for (int i = 0; i <= n; ++i) {
        const double t = i * dt;
        SwimSample r = row_at(t, v0 * t, v0, crank);
        r.phase_left = r.phase_right = stroke_phase(g, crank);
        ts.rows.push_back(r);
        crank = wrap_angle(crank - omega * dt);
    }
    return ts;
}

}  // namespace

TEST_CASE("curvature of collinear points") {
    const std::vector<Vec2> pts{{0, 0}, {1, 2}, {2.5, 5}, {3, 6}, {10, 20}};
    const CurvatureProfile p = curvature_profile(pts);
    REQUIRE(p.curvature.size() == 3);
    for (double k : p.curvature) CHECK(k == 0.0);
    CHECK(p.arc_position[0] == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("curvature on a circle") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> step(0.05, 0.3);
    std::vector<Vec2> pts;
    double a = 0.3;
    for (int i = 0; i < 20; ++i) {
        pts.push_back({100.0 * std::cos(a) + 7.0, 100.0 * std::sin(a) - 3.0});
        a += step(rng);
    }
    const CurvatureProfile ccw = curvature_profile(pts);
    for (double k : ccw.curvature) CHECK(std::abs(k - 0.01) < 1e-9);
    std::vector<Vec2> rev(pts.rbegin(), pts.rend());
    for (double k : curvature_profile(rev).curvature) CHECK(std::abs(k + 0.01) < 1e-9);
}

TEST_CASE("curvature against finite differences on smooth curves") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> amp(5.0, 40.0), wav(250.0, 600.0), ph(0.0, 2.0 * kPi);
    for (int trial = 0; trial < 20; ++trial) {
        const double A = amp(rng), L = wav(rng), p = ph(rng);
        auto y = [&](double x) { return A * std::sin(x / L * 2.0 * kPi + p); };
        std::vector<Vec2> pts;
        for (int i = 0; i < 31; ++i) {
            const double x = 300.0 * i / 30.0;
            pts.push_back({x, y(x)});
        }
        const CurvatureProfile prof = curvature_profile(pts);
        double kmax = 0.0;
        std::vector<double> fd;
        for (int i = 1; i < 30; ++i) {
            const double x = pts[i].x, h = 1e-3;
            const double d1 = (y(x + h) - y(x - h)) / (2.0 * h);
            const double d2 = (y(x + h) - 2.0 * y(x) + y(x - h)) / (h * h);
            fd.push_back(d2 / std::pow(1.0 + d1 * d1, 1.5));
            kmax = std::max(kmax, std::abs(fd.back()));
        }
        for (std::size_t i = 0; i < fd.size(); ++i) {
            if (std::abs(fd[i]) < 0.3 * kmax) continue;  // relative error is meaningless near inflections
            CHECK(std::abs(prof.curvature[i] - fd[i]) <= 0.02 * std::abs(fd[i]));
        }
    }
}

TEST_CASE("degenerate polylines") {
    CHECK_THROWS_AS(curvature_profile(std::vector<Vec2>{{0, 0}, {1, 1}}), DegenerateGeometry);
    CHECK_THROWS_AS(curvature_profile(std::vector<Vec2>{{0, 0}, {1, 1}, {1, 1}}), DegenerateGeometry);
    CHECK_THROWS_AS(curvature_profile(std::vector<Vec2>{{0, 0}, {1, 1}, {0, 0}}), DegenerateGeometry);
}

TEST_CASE("max curvature trace") {
    const ArmModel m = build_arm(ArmGeometry{}, ArmMaterial{});
    SUBCASE("straight arm reports the tip") {
        const std::vector<std::vector<Vec2>> frames{midline(m, rest_state(m, 0.0))};
        const auto trace = max_curvature_trace(frames);
        CHECK(trace[0].value == 0.0);
        CHECK(trace[0].arc_position == doctest::Approx(270.0));
    }
    SUBCASE("bend at the first interior joint") {
        ArmState s = rest_state(m, 0.0);
        s.joint_angles[1] = 0.3;
        const std::vector<std::vector<Vec2>> frames{midline(m, s)};
        const auto trace = max_curvature_trace(frames);
        CHECK(trace[0].arc_position == doctest::Approx(30.0));
        CHECK(trace[0].sign == 1);
        CHECK(trace[0].value > 0.0);
    }
    SUBCASE("empty series") {
        CHECK_THROWS(max_curvature_trace({}));
    }
}

TEST_CASE("recurve detection") {
    SUBCASE("straight arm") {
        const std::vector<Vec2> pts{{0, 0}, {0, -100}, {0, -200}, {0, -300}};
        CHECK_FALSE(detect_recurve(pts, StrokePhase::recovery).recurve);
    }
    SUBCASE("S-shaped midline") {
        const auto pts = s_shape(5e-3, 30, 300.0);
        const RecurveResult r = detect_recurve(pts, StrokePhase::recovery);
        CHECK(r.recurve);
        CHECK(r.proximal_mean > 0.0);
        CHECK(r.distal_mean < 0.0);
        CHECK(r.distal_mean_abs == doctest::Approx(5e-3).epsilon(1e-3));
        CHECK_FALSE(detect_recurve(pts, StrokePhase::power).recurve);
    }
    SUBCASE("single-sign bend is not a recurve") {
        const auto pts = s_shape(0.0, 30, 300.0);
        CHECK_FALSE(detect_recurve(pts, StrokePhase::recovery).recurve);
    }
    SUBCASE("weak tip reversal stays below the threshold") {
        CHECK_FALSE(detect_recurve(s_shape(5e-4, 30, 300.0), StrokePhase::recovery).recurve);
    }
    SUBCASE("rigid motions do not change the verdict") {
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi), sh(-500.0, 500.0);
        for (double k : {5e-3, 2e-3, 5e-4}) {
            const auto pts = s_shape(k, 30, 300.0);
            const RecurveResult base = detect_recurve(pts, StrokePhase::recovery);
            for (int i = 0; i < 20; ++i) {
                const RecurveResult r =
                    detect_recurve(transform(pts, ang(rng), {sh(rng), sh(rng)}), StrokePhase::recovery);
                CHECK(r.recurve == base.recurve);
                CHECK(r.distal_mean == doctest::Approx(base.distal_mean).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("cycle metrics on synthetic series") {
    const MechanismGeometry g(25.0, 66.0, 40.0);
    SUBCASE("constant velocity") {
        const double v0 = 42.0;
        const TimeSeries ts = synthetic_series(g, 30.0, v0, 9.0, 0.001);
        const auto cycles = cycle_metrics(ts, stroke_characteristics(g), 30.0);
        REQUIRE(cycles.size() == 4);
        CHECK(cycles[0].startup);
        for (const auto& c : cycles) {
            CHECK(c.period == doctest::Approx(2.0).epsilon(1e-3));
            CHECK(c.displacement == doctest::Approx(v0 * c.period).epsilon(1e-12));
            CHECK(c.average_speed == doctest::Approx(v0).epsilon(1e-12));
            CHECK(c.peak_speed == v0);
            CHECK(c.recovery_duration / c.power_duration ==
                  doctest::Approx(stroke_characteristics(g).travel_ratio_k).epsilon(5e-3));
        }
        const SteadyStateSummary s = steady_state(cycles);
        CHECK(s.cycles == 3);
        CHECK(s.mean_average_speed == doctest::Approx(v0));
    }
    SUBCASE("zero motion") {
        const TimeSeries ts = synthetic_series(g, 30.0, 0.0, 6.0, 0.01);
        const auto cycles = cycle_metrics(ts, stroke_characteristics(g), 30.0);
        REQUIRE_FALSE(cycles.empty());
        for (const auto& c : cycles) {
            CHECK(c.displacement == 0.0);
            CHECK(c.average_speed == 0.0);
            CHECK(c.peak_speed == 0.0);
        }
    }
    SUBCASE("too short") {
        const TimeSeries ts = synthetic_series(g, 30.0, 1.0, 3.0, 0.01);
        CHECK_THROWS_AS(cycle_metrics(ts, stroke_characteristics(g), 30.0), SeriesTooShort);
    }
    SUBCASE("stopped motor") {
        const TimeSeries ts = synthetic_series(g, 30.0, 0.0, 3.0, 0.01);
        CHECK(cycle_metrics(ts, stroke_characteristics(g), 0.0).empty());
    }
    SUBCASE("per-cycle displacements telescope") {
        TimeSeries ts = synthetic_series(g, 30.0, 0.0, 12.0, 0.01);
        for (auto& r : ts.rows) r.position.z = 50.0 * r.time + 20.0 * std::sin(3.0 * r.time);
        const auto cycles = cycle_metrics(ts, stroke_characteristics(g), 30.0);
        double sum = 0.0;
        for (const auto& c : cycles) sum += c.displacement;
        const double first = cycles.front().start_time, last = cycles.back().start_time + cycles.back().period;
        auto z_at = [&](double t) {
            for (const auto& r : ts.rows) {
                if (r.time == t) return r.position.z;
            }
            return std::nan("");
        };
        CHECK(sum == doctest::Approx(z_at(last) - z_at(first)).epsilon(1e-12));
    }
}
