#pragma once

#include <stdexcept>
#include <string>

namespace flutelab {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input violates a precondition (non-positive height, coincident points,
// singular matrix, ...).
struct DegenerateInput : Error {
    using Error::Error;
};

// Two geodesics required to meet inside the plane do not.
struct NotIntersecting : Error {
    using Error::Error;
};

// Endpoint pairs of two geodesics link on the boundary circle, so the
// geodesics cross and no distance between them is defined.
struct Interlaced : Error {
    using Error::Error;
};

// Two geodesics share an endpoint at infinity (asymptotic); distance 0 but
// no common perpendicular.
struct SharedEndpoint : Error {
    using Error::Error;
};

// Angle data does not describe a hyperbolic polygon (angle-sum too large).
struct NotHyperbolic : Error {
    using Error::Error;
};

// Translation length requested for an elliptic element.
struct EllipticNoLength : Error {
    using Error::Error;
};

// Boundary fixed points requested for an elliptic element (its fixed point
// is interior).
struct EllipticFixedPointsComplex : Error {
    using Error::Error;
};

// An inversion/reflection image degenerates (circle through the inversion
// center maps to a line, or a perpendicular bisector is a vertical line
// rather than a circle).
struct DegenerateImage : Error {
    using Error::Error;
};

// The map fixes the basepoint, so no bisector between basepoint and image
// exists.
struct FixedBasepoint : Error {
    using Error::Error;
};

// The orthogonal-foot construction degenerates (the two circles are
// concentric in the defining sense; no finite foot data).
struct DegenerateFoot : Error {
    using Error::Error;
};

// Configuration file / override parse or validation failure.
struct ConfigError : Error {
    int line = 0;    // 1-based; 0 when not tied to a file location
    int column = 0;  // 1-based; 0 when not tied to a file location
    ConfigError(const std::string& what, int line_ = 0, int column_ = 0)
        : Error(what), line(line_), column(column_) {}
};

// The disjointness check of a marked group construction failed.
struct SchottkyViolation : Error {
    std::string circle_a;  // label such as "C_3" or "C'_3"
    std::string circle_b;
    double margin = 0.0;  // signed gap; negative = overlap
    SchottkyViolation(const std::string& what, std::string a, std::string b,
                      double m)
        : Error(what), circle_a(std::move(a)), circle_b(std::move(b)),
          margin(m) {}
};

}  // namespace flutelab
