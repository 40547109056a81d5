#pragma once

#include <cmath>
#include <numbers>

namespace flutelab {

// Default tolerance for geometric comparisons (distances, angles, residuals).
inline constexpr double kGeomTol = 1e-9;

// Tight tolerance for identities that are exact up to rounding.
inline constexpr double kStrictTol = 1e-12;

inline constexpr double kPi = std::numbers::pi;

// Compensated 2x2 determinant a*d - b*c.  The naive expression loses all
// precision when a*d and b*c nearly cancel; the fma form recovers the
// rounding error of each product.
inline double det2(double a, double b, double c, double d) {
    const double w = b * c;
    const double e = std::fma(b, c, -w);  // exact error of the product b*c
    const double f = std::fma(a, d, -w);  // a*d - b*c up to one rounding
    return f - e;
}

inline bool approx_abs(double x, double y, double tol = kGeomTol) {
    return std::abs(x - y) <= tol;
}

inline bool approx_rel(double x, double y, double tol = kGeomTol) {
    const double scale = std::max(std::abs(x), std::abs(y));
    return std::abs(x - y) <= tol * std::max(1.0, scale);
}

}  // namespace flutelab
