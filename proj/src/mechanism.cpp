#include "octoswim/mechanism.hpp"

#include <cmath>
#include <sstream>

#include "octoswim/vec.hpp"

namespace octoswim {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double polar_angle_rad(double a, double b, double e) {
    return std::asin(e / (b - a)) - std::asin(e / (a + b));
}

}  // namespace

MechanismGeometry::MechanismGeometry(double crank_a, double coupler_b, double offset_e)
    : crank_a_(crank_a), coupler_b_(coupler_b), offset_e_(offset_e) {
    if (!(crank_a > 0.0) || !(coupler_b > 0.0) || !(offset_e >= 0.0) || !std::isfinite(crank_a) ||
        !std::isfinite(coupler_b) || !std::isfinite(offset_e)) {
        std::ostringstream msg;
        msg << "linkage lengths must be positive and finite (a=" << crank_a << ", b=" << coupler_b
            << ", e=" << offset_e << ")";
        throw InvalidGeometry(msg.str());
    }
    if (coupler_b < crank_a + offset_e) {
        std::ostringstream msg;
        msg << "crank cannot complete a revolution: need b >= a + e (a=" << crank_a
            << ", b=" << coupler_b << ", e=" << offset_e << ")";
        throw InvalidGeometry(msg.str());
    }
}

const char* to_string(StrokePhase phase) {
    return phase == StrokePhase::power ? "power" : "recovery";
}

double wrap_angle(double rad) {
    double w = std::fmod(rad, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod of a tiny negative value can round up to exactly 2*pi
    if (w >= kTwoPi) w = 0.0;
    return w;
}

double slider_position(const MechanismGeometry& geom, double phi_rad) {
    const double a = geom.crank();
    const double b = geom.coupler();
    const double rise = a * std::sin(phi_rad) - geom.offset();
    // b >= a + e keeps the radicand non-negative; clamp rounding at the limit
    const double radicand = std::max(b * b - rise * rise, 0.0);
    return a * std::cos(phi_rad) + std::sqrt(radicand);
}

double slider_velocity(const MechanismGeometry& geom, double phi_rad, double crank_rate) {
    const double a = geom.crank();
    const double b = geom.coupler();
    const double s = std::sin(phi_rad);
    const double c = std::cos(phi_rad);
    const double rise = a * s - geom.offset();
    const double root = std::sqrt(std::max(b * b - rise * rise, 0.0));
    const double ds_dphi = -a * s - a * c * rise / root;
    return ds_dphi * crank_rate;
}

double slider_max(const MechanismGeometry& geom) {
    const double l = geom.crank() + geom.coupler();
    return std::sqrt(l * l - geom.offset() * geom.offset());
}

double slider_min(const MechanismGeometry& geom) {
    const double l = geom.coupler() - geom.crank();
    return std::sqrt(std::max(l * l - geom.offset() * geom.offset(), 0.0));
}

double extended_crank_angle(const MechanismGeometry& geom) {
    return std::asin(geom.offset() / (geom.crank() + geom.coupler()));
}

double folded_crank_angle(const MechanismGeometry& geom) {
    return kPi + std::asin(geom.offset() / (geom.coupler() - geom.crank()));
}

StrokeCharacteristics stroke_characteristics(const MechanismGeometry& geom) {
    StrokeCharacteristics out;
    const double a = geom.crank();
    const double b = geom.coupler();
    const double e = geom.offset();
    out.theta1 = rad_to_deg(std::asin(e / (a + b)));
    out.theta2 = rad_to_deg(std::asin(e / (b - a)));
    // theta2 >= theta1 for any valid linkage; the angle between the extreme rays is their difference
    out.theta = std::abs(out.theta2 - out.theta1);
    out.phi_push = 180.0 + out.theta;
    out.phi_return = 180.0 - out.theta;
    out.travel_ratio_k = out.phi_push / out.phi_return;
    return out;
}

double travel_ratio_from_polar_angle(double theta_deg) {
    return (180.0 + theta_deg) / (180.0 - theta_deg);
}

double polar_angle_from_k(double k) {
    if (!(k >= 1.0) || !std::isfinite(k)) {
        throw InvalidTarget("travel ratio must be >= 1 (express as slow:fast)");
    }
    return 180.0 * (k - 1.0) / (k + 1.0);
}

MechanismGeometry synthesize_linkage(double target_k, double offset_e, double crank_a) {
    if (!(target_k > 1.0) || !std::isfinite(target_k)) {
        throw InvalidTarget("target travel ratio must exceed 1");
    }
    if (!(offset_e > 0.0) || !(crank_a > 0.0)) {
        throw InvalidGeometry("synthesis needs a positive offset and crank length");
    }
    const double target = deg_to_rad(polar_angle_from_k(target_k));
    const double a = crank_a;
    const double e = offset_e;
    double lo = a + e + 1e-9;
    double hi = 100.0 * (a + e);

    const double theta_lo = polar_angle_rad(a, lo, e);
    const double theta_hi = polar_angle_rad(a, hi, e);
    if (!(theta_lo > theta_hi)) {
        throw std::logic_error("polar angle is not decreasing in coupler length on the bracket");
    }
    if (target > theta_lo || target < theta_hi) {
        const double k_max = travel_ratio_from_polar_angle(rad_to_deg(theta_lo));
        const double k_min = travel_ratio_from_polar_angle(rad_to_deg(theta_hi));
        std::ostringstream msg;
        msg.precision(6);
        msg << "travel ratio " << target_k << " is not reachable with a=" << a << ", e=" << e
            << "; achievable K in [" << k_min << ", " << k_max << "]";
        throw NoSolution(msg.str(), k_min, k_max);
    }

    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (polar_angle_rad(a, mid, e) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return MechanismGeometry(a, 0.5 * (lo + hi), e);
}

StrokeTiming stroke_timing(const MechanismGeometry& geom, double rpm) {
    if (!(rpm > 0.0)) {
        throw std::invalid_argument("stroke timing needs a positive motor speed");
    }
    const StrokeCharacteristics sc = stroke_characteristics(geom);
    StrokeTiming t;
    t.period = 60.0 / rpm;
    t.t_recovery = t.period * sc.phi_push / 360.0;
    t.t_power = t.period * sc.phi_return / 360.0;
    return t;
}

double cycle_phase_angle(const MechanismGeometry& geom, double phi_rad) {
    return wrap_angle(extended_crank_angle(geom) - phi_rad);
}

StrokePhase stroke_phase(const MechanismGeometry& geom, double phi_rad) {
    const double power_arc = kPi - deg_to_rad(stroke_characteristics(geom).theta);
    return cycle_phase_angle(geom, phi_rad) < power_arc ? StrokePhase::power : StrokePhase::recovery;
}

}  // namespace octoswim
