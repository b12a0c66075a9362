#pragma once

// Reference values and brute-force helpers shared by the test binaries. They
// deliberately avoid the library's own closed forms.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

struct LinkageOracle {
    double a, b, e;
    double theta1_deg, theta2_deg, theta_deg, k;
};

// 40-digit arcsin evaluation, rounded to double.
inline constexpr LinkageOracle kPaperLinkages[] = {
    {25.0, 66.0, 40.0, 26.0758388188, 77.3196165082, 51.2437776894, 1.7959813789152573},
    {25.0, 69.4, 40.0, 25.0702279493, 64.2767404781, 39.2065125288, 1.5569364497316151},
    {19.5, 83.0, 40.0, 22.9696765723, 39.0443134691, 16.0746368968, 1.196121412726727},
};

inline constexpr double kSynthesizedCouplerK2 = 65.08075396852633;  // a = 25, e = 40, K = 2
inline constexpr double kSqrt6681 = 81.73738434767778;

// Slider coordinate straight from the triangle: pin at (a cos, a sin), slider
// on y = e at distance b.
inline double slider_by_triangle(double a, double b, double e, double phi) {
    const double px = a * std::cos(phi);
    const double py = a * std::sin(phi);
    return px + std::sqrt(b * b - (e - py) * (e - py));
}

// Golden-section refinement of a dense scan for the extremum of f on [0, 2pi).
inline double extremum_angle(const std::function<double(double)>& f, bool maximum, int samples = 20000) {
    const double two_pi = 2.0 * std::numbers::pi;
    auto g = [&](double x) { return maximum ? -f(x) : f(x); };
    double best = 0.0, best_v = g(0.0);
    for (int i = 1; i < samples; ++i) {
        const double x = two_pi * i / samples;
        const double v = g(x);
        if (v < best_v) {
            best_v = v;
            best = x;
        }
    }
    double lo = best - two_pi / samples, hi = best + two_pi / samples;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double m1 = hi - r * (hi - lo);
        const double m2 = lo + r * (hi - lo);
        if (g(m1) < g(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracle
