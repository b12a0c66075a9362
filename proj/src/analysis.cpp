#include "octoswim/analysis.hpp"

#include <cmath>
#include <sstream>

namespace octoswim {

CurvatureProfile curvature_profile(std::span<const Vec2> polyline) {
    if (polyline.size() < 3) {
        throw DegenerateGeometry("curvature needs at least three points");
    }
    CurvatureProfile out;
    out.arc_position.reserve(polyline.size() - 2);
    out.curvature.reserve(polyline.size() - 2);
    double arc = 0.0;
    for (std::size_t i = 1; i + 1 < polyline.size(); ++i) {
        const Vec2 e1 = polyline[i] - polyline[i - 1];
        const Vec2 e2 = polyline[i + 1] - polyline[i];
        const double l1 = norm(e1);
        const double l2 = norm(e2);
        const double chord = norm(polyline[i + 1] - polyline[i - 1]);
        if (l1 == 0.0 || l2 == 0.0 || chord == 0.0) {
            std::ostringstream msg;
            msg << "repeated or folded points at vertex " << i;
            throw DegenerateGeometry(msg.str());
        }
        arc += l1;
        out.arc_position.push_back(arc);
        // circumscribed circle through three points: kappa = 4 * area / (abc)
        out.curvature.push_back(2.0 * cross(e1, e2) / (l1 * l2 * chord));
    }
    return out;
}

std::vector<MaxCurvature> max_curvature_trace(std::span<const std::vector<Vec2>> frames) {
    if (frames.empty()) throw std::invalid_argument("max curvature trace needs at least one frame");
    std::vector<MaxCurvature> trace;
    trace.reserve(frames.size());
    for (const auto& frame : frames) {
        const CurvatureProfile p = curvature_profile(frame);
        MaxCurvature best;
        best.value = -1.0;
        for (std::size_t i = 0; i < p.curvature.size(); ++i) {
            const double mag = std::abs(p.curvature[i]);
            if (mag >= best.value) {
                best.value = mag;
                best.arc_position = p.arc_position[i];
                best.sign = p.curvature[i] > 0.0 ? 1 : (p.curvature[i] < 0.0 ? -1 : 0);
            }
        }
        trace.push_back(best);
    }
    return trace;
}

RecurveResult detect_recurve(std::span<const Vec2> midline, StrokePhase phase, const RecurveCriteria& criteria) {
    RecurveResult r;
    const CurvatureProfile p = curvature_profile(midline);
    double total = p.arc_position.back() + norm(midline.back() - midline[midline.size() - 2]);

    const double distal_start = (1.0 - criteria.distal_fraction) * total;
    const double proximal_end = criteria.proximal_fraction * total;
    double distal_sum = 0.0, distal_abs = 0.0, proximal_sum = 0.0;
    int distal_n = 0, proximal_n = 0;
    for (std::size_t i = 0; i < p.curvature.size(); ++i) {
        const double s = p.arc_position[i];
        if (s >= distal_start) {
            distal_sum += p.curvature[i];
            distal_abs += std::abs(p.curvature[i]);
            ++distal_n;
        }
        if (s <= proximal_end) {
            proximal_sum += p.curvature[i];
            ++proximal_n;
        }
    }
    if (distal_n > 0) {
        r.distal_mean = distal_sum / distal_n;
        r.distal_mean_abs = distal_abs / distal_n;
    }
    if (proximal_n > 0) r.proximal_mean = proximal_sum / proximal_n;

    r.recurve = phase == StrokePhase::recovery && distal_n > 0 && proximal_n > 0 &&
                r.distal_mean * r.proximal_mean < 0.0 && r.distal_mean_abs >= criteria.kappa_min;
    return r;
}

std::vector<CycleMetrics> cycle_metrics(const TimeSeries& series, const StrokeCharacteristics& mechanism,
                                        double rpm) {
    std::vector<CycleMetrics> out;
    if (!(rpm > 0.0)) return out;
    const auto& rows = series.rows;
    const double period = 60.0 / rpm;
    if (rows.size() < 2 || rows.back().time - rows.front().time < 2.0 * period * (1.0 - 1e-9)) {
        throw SeriesTooShort("cycle metrics need at least two full crank revolutions");
    }

    const double theta1 = deg_to_rad(mechanism.theta1);
    auto phase_of = [&](const SwimSample& r) { return wrap_angle(theta1 - r.crank_left); };

    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double psi = phase_of(rows[i]);
        if (i == 0) {
            if (psi < 1e-9) starts.push_back(0);
        } else if (psi < phase_of(rows[i - 1])) {
            starts.push_back(i);
        }
    }

    for (std::size_t c = 0; c + 1 < starts.size(); ++c) {
        const std::size_t a = starts[c];
        const std::size_t b = starts[c + 1];
        CycleMetrics m;
        m.start_time = rows[a].time;
        m.period = rows[b].time - rows[a].time;
        m.displacement = rows[b].position.z - rows[a].position.z;
        m.average_speed = m.displacement / m.period;
        std::size_t power_samples = 0;
        for (std::size_t i = a; i < b; ++i) {
            if (rows[i].phase_left == StrokePhase::power) ++power_samples;
            const double speed = std::abs(rows[i].velocity);
            if (speed > m.peak_speed || i == a) {
                m.peak_speed = speed;
                m.peak_speed_time = rows[i].time;
                m.peak_speed_phase = rows[i].phase_left;
            }
        }
        m.power_duration = m.period * static_cast<double>(power_samples) / static_cast<double>(b - a);
        m.recovery_duration = m.period - m.power_duration;
        m.startup = c == 0;
        out.push_back(m);
    }
    return out;
}

SteadyStateSummary steady_state(std::span<const CycleMetrics> cycles) {
    SteadyStateSummary s;
    for (const CycleMetrics& c : cycles) {
        if (c.startup) continue;
        ++s.cycles;
        s.mean_displacement += c.displacement;
        s.mean_average_speed += c.average_speed;
        s.max_peak_speed = std::max(s.max_peak_speed, c.peak_speed);
    }
    if (s.cycles > 0) {
        s.mean_displacement /= static_cast<double>(s.cycles);
        s.mean_average_speed /= static_cast<double>(s.cycles);
    }
    return s;
}

}  // namespace octoswim
