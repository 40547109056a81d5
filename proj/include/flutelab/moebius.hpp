#pragma once

// Orientation-preserving isometries of the upper half-plane, kept in a
// log-scaled form: the object stores a matrix with max-entry 1 plus a log
// scale s, representing the unit-determinant matrix e^s * stored.  All maps,
// compositions and inversions work on the stored entries, so group elements
// whose genuine coefficients overflow double range stay usable.

#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "flutelab/errors.hpp"
#include "flutelab/numeric.hpp"
#include "flutelab/plane.hpp"

namespace flutelab {

namespace detail {
// Compensated p*q + r*s (one fused rounding instead of three).
inline double dot2c(double p, double q, double r, double s) {
    const double w = p * q;
    const double e = std::fma(p, q, -w);
    return std::fma(r, s, w) + e;
}
}  // namespace detail

class MoebiusTransform {
  public:
    // From an arbitrary positive-determinant matrix; the determinant is
    // evaluated here, so entries must be moderate enough for det(a,b,c,d) to
    // be computed reliably.  For matrices whose determinant is known
    // algebraically use unimodular() or with_known_log_det().
    MoebiusTransform(double a, double b, double c, double d) {
        const double det = det2(a, b, c, d);
        if (!std::isfinite(det) || det <= 0.0)
            throw DegenerateInput("matrix must have positive determinant");
        init(a, b, c, d, -0.5 * std::log(det));
    }

    // Entries trusted to satisfy a*d - b*c = 1 exactly (algebraically); no
    // floating determinant is evaluated.
    static MoebiusTransform unimodular(double a, double b, double c,
                                       double d) {
        MoebiusTransform m(NoInit{});
        m.init(a, b, c, d, 0.0);
        return m;
    }

    // Entries trusted to have determinant exp(log_det) (> 0), with log_det
    // supplied by the caller.
    static MoebiusTransform with_known_log_det(double a, double b, double c,
                                               double d, double log_det) {
        if (!std::isfinite(log_det))
            throw DegenerateInput("log-determinant must be finite");
        MoebiusTransform m(NoInit{});
        m.init(a, b, c, d, -0.5 * log_det);
        return m;
    }

    static MoebiusTransform identity() { return unimodular(1, 0, 0, 1); }

    // The map sending to_zero -> 0 and to_inf -> infinity (positive
    // determinant; third degree of freedom fixed by the rows used).
    static MoebiusTransform boundary_frame(const BoundaryPoint& to_zero,
                                           const BoundaryPoint& to_inf) {
        if (to_zero == to_inf)
            throw DegenerateInput("frame endpoints must differ");
        if (to_zero.is_infinity())
            return MoebiusTransform(0.0, -1.0, 1.0, -to_inf.value());
        if (to_inf.is_infinity())
            return MoebiusTransform(1.0, -to_zero.value(), 0.0, 1.0);
        const double z0 = to_zero.value(), zi = to_inf.value();
        if (z0 < zi) return MoebiusTransform(1.0, -z0, -1.0, zi);
        return MoebiusTransform(1.0, -z0, 1.0, -zi);
    }

    // Stored (normalized) entries and the log scale.
    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return c_; }
    double d() const { return d_; }
    double log_scale() const { return s_; }

    // Genuine unit-determinant coefficients e^s * stored; available only
    // while they are representable.
    std::array<double, 4> unit_det_coeffs() const {
        if (std::abs(s_) > 700.0)
            throw DegenerateInput(
                "unit-determinant coefficients overflow double range");
        const double f = std::exp(s_);
        return {f * a_, f * b_, f * c_, f * d_};
    }

    // Image of an interior point.  The imaginary part carries the only
    // scale-dependent factor, exp(-2s); it underflows (and the result
    // constructor rejects the point) once s exceeds ~354.
    PlanePoint operator()(const PlanePoint& z) const {
        const double p = c_ * z.x + d_;
        const double q = c_ * z.y;
        const double den = p * p + q * q;
        if (den == 0.0)
            throw DegenerateInput("point maps to the boundary pole");
        const double num =
            (a_ * z.x + b_) * p + (a_ * z.y) * (c_ * z.y);
        return PlanePoint(num / den, z.y * std::exp(-2.0 * s_) / den);
    }

    // Boundary action (a t + b)/(c t + d); completely scale-free.
    BoundaryPoint operator()(const BoundaryPoint& t) const {
        if (t.is_infinity()) {
            if (c_ == 0.0) return BoundaryPoint::infinity();
            return BoundaryPoint(a_ / c_);
        }
        const double den = c_ * t.value() + d_;
        if (den == 0.0) return BoundaryPoint::infinity();
        return BoundaryPoint((a_ * t.value() + b_) / den);
    }

    friend MoebiusTransform compose(const MoebiusTransform& m,
                                    const MoebiusTransform& n) {
        using detail::dot2c;
        MoebiusTransform r(NoInit{});
        r.init(dot2c(m.a_, n.a_, m.b_, n.c_), dot2c(m.a_, n.b_, m.b_, n.d_),
               dot2c(m.c_, n.a_, m.d_, n.c_), dot2c(m.c_, n.b_, m.d_, n.d_),
               m.s_ + n.s_);
        return r;
    }

    friend MoebiusTransform invert(const MoebiusTransform& m) {
        MoebiusTransform r(NoInit{});
        r.init(m.d_, -m.b_, -m.c_, m.a_, m.s_);
        return r;
    }

  private:
    struct NoInit {};
    explicit MoebiusTransform(NoInit) {}

    // raw entries plus s_base such that e^{s_base} * raw has determinant 1.
    void init(double a, double b, double c, double d, double s_base) {
        const double m = std::max(std::max(std::abs(a), std::abs(b)),
                                  std::max(std::abs(c), std::abs(d)));
        if (!std::isfinite(m) || m == 0.0)
            throw DegenerateInput("matrix entries unusable");
        a_ = a / m; b_ = b / m; c_ = c / m; d_ = d / m;
        s_ = s_base + std::log(m);
        if (!std::isfinite(s_))
            throw DegenerateInput("matrix scale out of range");
        const double lead = (a_ != 0.0) ? a_ : b_;
        if (lead < 0.0) { a_ = -a_; b_ = -b_; c_ = -c_; d_ = -d_; }
        if (a_ == 0.0) a_ = 0.0;  // normalize -0
        if (b_ == 0.0) b_ = 0.0;
        if (c_ == 0.0) c_ = 0.0;
        if (d_ == 0.0) d_ = 0.0;
    }

    double a_, b_, c_, d_;  // max |entry| = 1, sign-canonicalized
    double s_;              // true matrix = e^s * stored
};

inline PlanePoint apply(const MoebiusTransform& m, const PlanePoint& z) {
    return m(z);
}
inline BoundaryPoint apply(const MoebiusTransform& m, const BoundaryPoint& t) {
    return m(t);
}

// Same element of the isometry group (the matrices agree up to sign)?
inline bool same_transform(const MoebiusTransform& m, const MoebiusTransform& n,
                           double tol = kGeomTol) {
    if (std::abs(m.log_scale() - n.log_scale()) > tol) return false;
    const double dp = std::max(
        std::max(std::abs(m.a() - n.a()), std::abs(m.b() - n.b())),
        std::max(std::abs(m.c() - n.c()), std::abs(m.d() - n.d())));
    const double dm = std::max(
        std::max(std::abs(m.a() + n.a()), std::abs(m.b() + n.b())),
        std::max(std::abs(m.c() + n.c()), std::abs(m.d() + n.d())));
    return std::min(dp, dm) <= tol;
}

// log |trace| of the unit-determinant matrix, safe at any scale; -inf for
// traceless matrices.
inline double log_abs_trace(const MoebiusTransform& m) {
    const double t = std::abs(m.a() + m.d());
    if (t == 0.0) return -std::numeric_limits<double>::infinity();
    return m.log_scale() + std::log(t);
}

// Diagnostic: drift of the invariant log det(stored) = -2s.  Meaningful only
// while exp(-2|s|) stays above the cancellation floor of the stored entries
// (roughly |s| < 17).  Far outside that domain the report is large or
// infinite, never spuriously small; in the transition band it is noise.
inline double log_det_drift(const MoebiusTransform& m) {
    const double det = det2(m.a(), m.b(), m.c(), m.d());
    if (!(det > 0.0)) return std::numeric_limits<double>::infinity();
    return std::abs(2.0 * m.log_scale() + std::log(det));
}

// ---------------------------------------------------------------------------
// Classification

enum class IsometryClass { Identity, Elliptic, Parabolic, Hyperbolic };

inline IsometryClass classify(const MoebiusTransform& m,
                              double tol = kGeomTol) {
    const double lt = log_abs_trace(m);
    if (lt > 100.0) return IsometryClass::Hyperbolic;
    const double tr = std::exp(lt);  // |trace|, modest by now
    if (tr > 2.0 + tol) return IsometryClass::Hyperbolic;
    if (tr < 2.0 - tol) return IsometryClass::Elliptic;
    if (std::abs(m.b()) <= tol && std::abs(m.c()) <= tol &&
        std::abs(m.a() - m.d()) <= tol)
        return IsometryClass::Identity;
    return IsometryClass::Parabolic;
}

// Length of translation along the axis of a hyperbolic element; 0 for
// parabolic and identity; elliptic elements have none.
inline double translation_length(const MoebiusTransform& m,
                                 double tol = kGeomTol) {
    switch (classify(m, tol)) {
        case IsometryClass::Identity:
        case IsometryClass::Parabolic:
            return 0.0;
        case IsometryClass::Elliptic:
            throw EllipticNoLength("elliptic elements have no axis");
        case IsometryClass::Hyperbolic:
            break;
    }
    const double lt = log_abs_trace(m);
    if (lt > 30.0) return 2.0 * lt;  // acosh(x) -> log(2x); error < 1e-26
    return 2.0 * std::acosh(0.5 * std::exp(lt));
}

// Boundary fixed points as (repelling, attracting).  Parabolic elements
// return their single point twice.
inline std::pair<BoundaryPoint, BoundaryPoint> fixed_points(
    const MoebiusTransform& m, double tol = kGeomTol) {
    const IsometryClass cls = classify(m, tol);
    if (cls == IsometryClass::Identity)
        throw DegenerateInput("identity fixes every point");
    if (cls == IsometryClass::Elliptic)
        throw EllipticFixedPointsComplex("elliptic fixed point is interior");

    const double a = m.a(), b = m.b(), c = m.c(), d = m.d();
    if (c == 0.0) {
        // Fixes infinity; infinity attracts iff |a| > |d|.
        if (cls == IsometryClass::Parabolic || a == d)
            return {BoundaryPoint::infinity(), BoundaryPoint::infinity()};
        const BoundaryPoint other(b / (d - a));
        if (std::abs(a) > std::abs(d))
            return {other, BoundaryPoint::infinity()};
        return {BoundaryPoint::infinity(), other};
    }

    // Roots of c z^2 + (d - a) z - b = 0.
    const double B = d - a;
    const double disc = std::max(B * B + 4.0 * b * c, 0.0);
    if (cls == IsometryClass::Parabolic || disc == 0.0) {
        const BoundaryPoint p(-B / (2.0 * c));
        return {p, p};
    }
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (B + std::copysign(sq, B));
    double x1, x2;
    if (q == 0.0) {
        x1 = x2 = 0.0;
    } else {
        x1 = q / c;
        x2 = -b / q;
    }
    // The attracting point has the larger |c x + d| (derivative < 1 there).
    const double w1 = std::abs(c * x1 + d);
    const double w2 = std::abs(c * x2 + d);
    if (w1 > w2) return {BoundaryPoint(x2), BoundaryPoint(x1)};
    return {BoundaryPoint(x1), BoundaryPoint(x2)};
}

// ---------------------------------------------------------------------------
// Reflections (orientation-reversing isometries)

class Reflection {
  public:
    static Reflection in_vertical_line(double x0) {
        Reflection r;
        r.vertical_ = true;
        r.x0_ = x0;
        return r;
    }

    // Inversion in a circle centered on the real axis.
    static Reflection in_circle(const EuclideanCircle& c) {
        Reflection r;
        r.vertical_ = false;
        r.x0_ = c.center;
        r.radius_ = c.radius;
        return r;
    }

    static Reflection in_geodesic(const Geodesic& g) {
        if (g.is_vertical()) return in_vertical_line(g.foot());
        return in_circle(g.circle());
    }

    bool is_vertical() const { return vertical_; }
    double mirror_x() const { return x0_; }
    double mirror_radius() const {
        if (vertical_) throw DegenerateInput("vertical mirror has no radius");
        return radius_;
    }

    PlanePoint operator()(const PlanePoint& z) const {
        if (vertical_) return PlanePoint(2.0 * x0_ - z.x, z.y);
        const double dx = z.x - x0_;
        const double n = dx * dx + z.y * z.y;
        const double f = (radius_ * radius_) / n;
        return PlanePoint(x0_ + f * dx, f * z.y);
    }

    BoundaryPoint operator()(const BoundaryPoint& t) const {
        if (vertical_) {
            if (t.is_infinity()) return BoundaryPoint::infinity();
            return BoundaryPoint(2.0 * x0_ - t.value());
        }
        if (t.is_infinity()) return BoundaryPoint(x0_);
        const double dx = t.value() - x0_;
        if (dx == 0.0) return BoundaryPoint::infinity();
        return BoundaryPoint(x0_ + (radius_ * radius_) / dx);
    }

    // Image of a circle.  Throws DegenerateImage when the circle passes
    // through the inversion center (the image is a line).
    EuclideanCircle operator()(const EuclideanCircle& c) const {
        if (vertical_)
            return EuclideanCircle(2.0 * x0_ - c.center, c.radius);
        const double dx = c.center - x0_;
        const double k = dx * dx - c.radius * c.radius;
        if (k == 0.0)
            throw DegenerateImage("circle through inversion center");
        const double f = (radius_ * radius_) / k;
        return EuclideanCircle(x0_ + f * dx, std::abs(f) * c.radius);
    }

  private:
    Reflection() = default;
    bool vertical_ = true;
    double x0_ = 0.0;
    double radius_ = 1.0;
};

// ---------------------------------------------------------------------------
// Perpendicular bisector half-planes

// The set of points at least as close to `basepoint` as to `image`, bounded
// by the equidistance circle.
struct BisectorHalfplane {
    EuclideanCircle boundary;
    PlanePoint basepoint;
    PlanePoint image;

    // Compares hyperbolic distances to the two centers, so the verdict is
    // scale-invariant even when the boundary circle is astronomically large.
    Region classify(const PlanePoint& z, double tol = kGeomTol) const {
        const double gap = dist(z, basepoint) - dist(z, image);
        if (std::abs(gap) <= tol) return Region::Boundary;
        return gap < 0.0 ? Region::Inside : Region::Outside;
    }
};

// Equidistance circle between p and its image under m.  Throws
// FixedBasepoint when m fixes p and DegenerateImage when the bisector is a
// vertical line (equal heights) rather than a circle.
inline BisectorHalfplane bisector_halfplane(const PlanePoint& p,
                                            const MoebiusTransform& m) {
    const PlanePoint q = m(p);
    if (dist(p, q) <= 1e-13) throw FixedBasepoint("map fixes the basepoint");
    const double denom = q.y - p.y;
    if (denom == 0.0)
        throw DegenerateImage("equal-height pair: bisector is a vertical line");
    const double E = (p.x * q.y - q.x * p.y) / denom;
    const double F =
        (q.y * (p.x * p.x + p.y * p.y) - p.y * (q.x * q.x + q.y * q.y)) /
        denom;
    const double r2 = E * E - F;
    if (!(r2 > 0.0) || !std::isfinite(r2))
        throw DegenerateImage("bisector circle degenerates");
    return BisectorHalfplane{EuclideanCircle(E, std::sqrt(r2)), p, q};
}

}  // namespace flutelab
