#pragma once

// Upper half-plane model: points x + iy with y > 0, boundary R u {inf}.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "flutelab/errors.hpp"
#include "flutelab/numeric.hpp"

namespace flutelab {

// ---------------------------------------------------------------------------
// Boundary points

class BoundaryPoint {
  public:
    // Implicit: a finite real is a boundary point.
    BoundaryPoint(double v) : value_(v) {
        if (!std::isfinite(v))
            throw DegenerateInput("boundary point must be finite; use "
                                  "BoundaryPoint::infinity()");
    }

    static BoundaryPoint infinity() {
        BoundaryPoint p;
        p.inf_ = true;
        return p;
    }

    bool is_infinity() const { return inf_; }

    double value() const {
        if (inf_)
            throw DegenerateInput("value() called on the point at infinity");
        return value_;
    }

    friend bool operator==(const BoundaryPoint& a, const BoundaryPoint& b) {
        if (a.inf_ || b.inf_) return a.inf_ && b.inf_;
        return a.value_ == b.value_;
    }

    // Linear order with infinity greatest; used for cyclic arrangements.
    friend bool operator<(const BoundaryPoint& a, const BoundaryPoint& b) {
        if (a.inf_) return false;
        if (b.inf_) return true;
        return a.value_ < b.value_;
    }

  private:
    BoundaryPoint() : value_(0.0) {}
    double value_;
    bool inf_ = false;
};

// Chordal metric on the boundary circle; bounded, treats infinity like any
// other point.
inline double chordal(const BoundaryPoint& a, const BoundaryPoint& b) {
    if (a.is_infinity() && b.is_infinity()) return 0.0;
    if (a.is_infinity()) return 1.0 / std::hypot(1.0, b.value());
    if (b.is_infinity()) return 1.0 / std::hypot(1.0, a.value());
    const double x = a.value(), y = b.value();
    const double na = std::hypot(1.0, x), nb = std::hypot(1.0, y);
    // divide by the larger normalizer first: symmetric and overflow-free
    return (std::abs(x - y) / std::max(na, nb)) / std::min(na, nb);
}

// ---------------------------------------------------------------------------
// Interior points

struct PlanePoint {
    double x;
    double y;  // strictly positive

    PlanePoint(double x_, double y_) : x(x_), y(y_) {
        if (!std::isfinite(x) || !std::isfinite(y) || y <= 0.0)
            throw DegenerateInput("plane point needs finite x and y > 0");
    }
};

inline double dist(const PlanePoint& z, const PlanePoint& w) {
    const double dx = z.x - w.x;
    const double dy = z.y - w.y;
    const double u = (dx * dx + dy * dy) / (2.0 * z.y * w.y);
    // arccosh(1 + u) written to stay accurate for small u.
    return std::log1p(u + std::sqrt(u * (u + 2.0)));
}

// ---------------------------------------------------------------------------
// Circles (Euclidean data; used for bisector boundaries, disjointness
// reports, reflections and rendering)

// Center sits on the real axis, so the circle is orthogonal to it: these are
// the carriers of non-vertical geodesics and of bisector boundaries.
struct EuclideanCircle {
    double center;
    double radius;

    EuclideanCircle(double c, double r) : center(c), radius(r) {
        if (!std::isfinite(c) || !std::isfinite(r) || r <= 0.0)
            throw DegenerateInput("circle needs finite center and radius > 0");
    }
};

enum class Region { Inside, Boundary, Outside };

// ---------------------------------------------------------------------------
// Geodesics

class Geodesic {
  public:
    Geodesic(BoundaryPoint a, BoundaryPoint b) : e1_(a), e2_(b) {
        if (a == b) throw DegenerateInput("geodesic endpoints must differ");
        if (e1_.is_infinity()) std::swap(e1_, e2_);
        if (!e2_.is_infinity() && e2_ < e1_) std::swap(e1_, e2_);
    }

    const BoundaryPoint& e1() const { return e1_; }
    const BoundaryPoint& e2() const { return e2_; }

    bool is_vertical() const { return e2_.is_infinity(); }

    // Foot of a vertical geodesic on the real axis.
    double foot() const {
        if (!is_vertical())
            throw DegenerateInput("foot() needs a vertical geodesic");
        return e1_.value();
    }

    // Center/radius of the semicircle carrying a non-vertical geodesic.
    double center() const {
        require_circle();
        return 0.5 * (e1_.value() + e2_.value());
    }
    double radius() const {
        require_circle();
        return 0.5 * (e2_.value() - e1_.value());
    }
    EuclideanCircle circle() const {
        return EuclideanCircle(center(), radius());
    }

    friend bool operator==(const Geodesic& g, const Geodesic& h) {
        return g.e1_ == h.e1_ && g.e2_ == h.e2_;
    }

  private:
    void require_circle() const {
        if (is_vertical())
            throw DegenerateInput(
                "center()/radius() need a non-vertical geodesic");
    }
    BoundaryPoint e1_, e2_;  // canonical: e1 < e2, infinity stored as e2
};

// Signed-parameter unit-speed point on a geodesic.  The parameter runs from
// e1 (t -> -inf) to e2 (t -> +inf); t = 0 is the summit (or height 1 on a
// vertical).
inline PlanePoint point_at(const Geodesic& g, double t) {
    if (g.is_vertical()) return PlanePoint(g.foot(), std::exp(t));
    const double r = g.radius();
    return PlanePoint(g.center() + r * std::tanh(t), r / std::cosh(t));
}

// Distance from a point to a complete geodesic.
inline double dist_to_geodesic(const PlanePoint& z, const Geodesic& g) {
    double s;  // sinh of the distance
    if (g.is_vertical()) {
        s = std::abs(z.x - g.foot()) / z.y;
    } else {
        const double dx = z.x - g.center();
        const double r = g.radius();
        s = std::abs(dx * dx + z.y * z.y - r * r) / (2.0 * r * z.y);
    }
    return std::asinh(s);
}

// The geodesic through interior point z having xi as one endpoint.
inline Geodesic geodesic_through(const PlanePoint& z, const BoundaryPoint& xi) {
    if (xi.is_infinity())
        return Geodesic(BoundaryPoint(z.x), BoundaryPoint::infinity());
    const double v = xi.value();
    if (z.x == v)
        return Geodesic(BoundaryPoint(v), BoundaryPoint::infinity());
    const double c = (z.x * z.x + z.y * z.y - v * v) / (2.0 * (z.x - v));
    return Geodesic(xi, BoundaryPoint(2.0 * c - v));
}

// Interior intersection point of two geodesics.
inline PlanePoint geodesic_intersection(const Geodesic& g, const Geodesic& h) {
    if (g == h) throw DegenerateInput("geodesics coincide");
    if (g.is_vertical() && h.is_vertical())
        throw NotIntersecting("parallel vertical geodesics");
    if (g.is_vertical() || h.is_vertical()) {
        const Geodesic& vert = g.is_vertical() ? g : h;
        const Geodesic& circ = g.is_vertical() ? h : g;
        const double x = vert.foot();
        const double dx = x - circ.center();
        const double y2 = circ.radius() * circ.radius() - dx * dx;
        if (y2 <= 0.0) throw NotIntersecting("geodesics do not meet");
        return PlanePoint(x, std::sqrt(y2));
    }
    const double c1 = g.center(), r1 = g.radius();
    const double c2 = h.center(), r2 = h.radius();
    if (c1 == c2) throw NotIntersecting("concentric geodesics");
    const double x =
        (r1 * r1 - r2 * r2 + c2 * c2 - c1 * c1) / (2.0 * (c2 - c1));
    const double dx = x - c1;
    const double y2 = r1 * r1 - dx * dx;
    if (y2 <= 0.0) throw NotIntersecting("geodesics do not meet");
    return PlanePoint(x, std::sqrt(y2));
}

// ---------------------------------------------------------------------------
// Cross-ratio

// [a; b; c; d] = (a-c)(b-d) / ((a-d)(b-c)), with the usual limits when one
// argument is infinity.
inline double cross_ratio(const BoundaryPoint& a, const BoundaryPoint& b,
                          const BoundaryPoint& c, const BoundaryPoint& d) {
    const int infinities = int(a.is_infinity()) + int(b.is_infinity()) +
                           int(c.is_infinity()) + int(d.is_infinity());
    if (infinities > 1)
        throw DegenerateInput("cross-ratio needs distinct points");
    if (a == d || b == c)
        throw DegenerateInput("cross-ratio pole: a == d or b == c");
    if (a.is_infinity())
        return (b.value() - d.value()) / (b.value() - c.value());
    if (b.is_infinity())
        return (a.value() - c.value()) / (a.value() - d.value());
    if (c.is_infinity())
        return (b.value() - d.value()) / (a.value() - d.value());
    if (d.is_infinity())
        return (a.value() - c.value()) / (b.value() - c.value());
    const double av = a.value(), bv = b.value(), cv = c.value(),
                 dv = d.value();
    return ((av - cv) * (bv - dv)) / ((av - dv) * (bv - cv));
}

// True iff the endpoint pairs of g and h separate each other on the boundary
// circle (equivalently: the geodesics cross).
inline bool endpoints_interlace(const Geodesic& g, const Geodesic& h) {
    return cross_ratio(g.e1(), g.e2(), h.e1(), h.e2()) < 0.0;
}

// ---------------------------------------------------------------------------
// Angle between crossing geodesics

// Four boundary points in cyclic order a, c, b, d with {a, b} the endpoints
// of the first geodesic and {c, d} of the second (so the labels alternate).
struct BoundaryQuadruple {
    BoundaryPoint a, c, b, d;
};

// Canonical alternating arrangement of the endpoints of two crossing
// geodesics: cyclic order with infinity greatest, starting at an endpoint of
// the first geodesic.
inline BoundaryQuadruple cyclic_ordering(const Geodesic& g, const Geodesic& h) {
    const std::array<BoundaryPoint, 4> pts = {g.e1(), g.e2(), h.e1(), h.e2()};
    for (int i = 0; i < 2; ++i)
        for (int j = 2; j < 4; ++j)
            if (pts[i] == pts[j])
                throw SharedEndpoint("geodesics share an endpoint");

    std::array<int, 4> idx = {0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(),
              [&](int i, int j) { return pts[i] < pts[j]; });
    for (int start = 0; start < 4; ++start) {
        bool ok = true;
        for (int k = 0; k < 4; ++k) {
            const bool first = idx[(start + k) % 4] < 2;  // endpoint of g?
            if (first != (k % 2 == 0)) { ok = false; break; }
        }
        if (!ok) continue;
        return BoundaryQuadruple{pts[idx[start % 4]], pts[idx[(start + 1) % 4]],
                                 pts[idx[(start + 2) % 4]],
                                 pts[idx[(start + 3) % 4]]};
    }
    throw NotIntersecting("geodesic endpoints do not interlace");
}

// Angle at the intersection, read off the boundary: with the alternating
// arrangement (a, c, b, d), the value t = [a; c; d; b] lies in (0, 1) and
// cos(angle) = 2t - 1.  Orthogonal exactly when t = 1/2.
inline double angle_between(const BoundaryQuadruple& q) {
    const double t = cross_ratio(q.a, q.c, q.d, q.b);
    if (!(t > 0.0 && t < 1.0))
        throw NotIntersecting("quadruple is not in crossing position");
    return std::acos(std::clamp(2.0 * t - 1.0, -1.0, 1.0));
}

inline double angle_between(const Geodesic& g, const Geodesic& h) {
    return angle_between(cyclic_ordering(g, h));
}

// Same angle with a caller-supplied arrangement: {a, b} must be the endpoints
// of the first geodesic and {c, d} of the second.  The two cyclic readings of
// a crossing give supplementary angles; the caller's choice decides which.
inline double angle_between(const Geodesic& g, const Geodesic& h,
                            const BoundaryQuadruple& q) {
    if (g == h) throw NotIntersecting("geodesics coincide");
    for (const BoundaryPoint& p : {g.e1(), g.e2()})
        for (const BoundaryPoint& r : {h.e1(), h.e2()})
            if (p == r) throw NotIntersecting("geodesics are asymptotic");
    const bool ab_first = (q.a == g.e1() && q.b == g.e2()) ||
                          (q.a == g.e2() && q.b == g.e1());
    const bool cd_second = (q.c == h.e1() && q.d == h.e2()) ||
                           (q.c == h.e2() && q.d == h.e1());
    if (!ab_first || !cd_second)
        throw DegenerateInput("ordering must pair {a, b} with the first "
                              "geodesic and {c, d} with the second");
    if (!endpoints_interlace(g, h))
        throw NotIntersecting("geodesics do not cross");
    return angle_between(q);
}

// ---------------------------------------------------------------------------
// Distance between disjoint geodesics

// For disjoint geodesics the endpoint cross-ratio t = [e1; e2; f1; f2]
// (folded into (0,1) by t -> 1/t if needed) satisfies t = tanh^2(d/2), and
// the complementary arrangement gives cosh^2(d/2); we invert the first.
inline double dist_between_geodesics(const Geodesic& g, const Geodesic& h) {
    for (const BoundaryPoint& p : {g.e1(), g.e2()})
        for (const BoundaryPoint& q : {h.e1(), h.e2()})
            if (p == q)
                throw SharedEndpoint("geodesics share an endpoint");
    double t = cross_ratio(g.e1(), g.e2(), h.e1(), h.e2());
    if (t < 0.0)
        throw Interlaced("geodesics cross; no distance between them");
    if (t > 1.0) t = 1.0 / t;
    if (t == 0.0 || t == 1.0)
        throw DegenerateInput("degenerate endpoint configuration");
    return 2.0 * std::atanh(std::sqrt(t));
}

// ---------------------------------------------------------------------------
// Busemann cocycle

// B_xi(z, w): how much farther z is from xi than w is (renormalized limit of
// distance differences).  Exact cocycle: B(z,w) + B(w,v) = B(z,v).
inline double busemann(const BoundaryPoint& xi, const PlanePoint& z,
                       const PlanePoint& w) {
    if (xi.is_infinity()) return std::log(w.y) - std::log(z.y);
    const double v = xi.value();
    const double zx = z.x - v, wx = w.x - v;
    const double nz = zx * zx + z.y * z.y;
    const double nw = wx * wx + w.y * w.y;
    if (nz == 0.0 || nw == 0.0)
        throw DegenerateInput("busemann base must differ from the points");
    return (std::log(nz) - std::log(z.y)) - (std::log(nw) - std::log(w.y));
}

// ---------------------------------------------------------------------------
// Polygon area from the angle defect

inline double polygon_area(const std::vector<double>& angles) {
    if (angles.size() < 3)
        throw DegenerateInput("polygon needs at least 3 vertices");
    double sum = 0.0;
    for (double a : angles) {
        if (!(a >= 0.0 && a < kPi))
            throw DegenerateInput("vertex angle must lie in [0, pi)");
        sum += a;
    }
    const double area = kPi * (double(angles.size()) - 2.0) - sum;
    if (area <= 0.0)
        throw NotHyperbolic("angle sum admits no hyperbolic polygon");
    return area;
}

// ---------------------------------------------------------------------------
// Horocycles

// level is the Busemann value (base point vs reference i) shared by every
// point of the horocycle.  Larger level = deeper toward the base point's
// opposite side... concretely: base infinity at level L is the line
// Im z = exp(-L).
struct Horocycle {
    BoundaryPoint base;
    double level;
};

inline double horocycle_level_of(const BoundaryPoint& base,
                                 const PlanePoint& z) {
    return busemann(base, z, PlanePoint(0.0, 1.0));
}

inline Horocycle horocycle_through(const BoundaryPoint& base,
                                   const PlanePoint& z) {
    return Horocycle{base, horocycle_level_of(base, z)};
}

// Euclidean diameter of the horocycle circle tangent at a finite base.
inline double horocycle_diameter(const Horocycle& h) {
    if (h.base.is_infinity())
        throw DegenerateInput("horocycle at infinity is a line, not a circle");
    const double v = h.base.value();
    return (1.0 + v * v) * std::exp(h.level);
}

// Parametrized point: for base infinity the parameter is the x coordinate;
// for a finite base it is the angle around the circle measured from the
// tangency point.
inline PlanePoint horocycle_point_at(const Horocycle& h, double s) {
    if (h.base.is_infinity()) return PlanePoint(s, std::exp(-h.level));
    const double rad = 0.5 * horocycle_diameter(h);
    const double y = rad * (1.0 - std::cos(s));
    if (y <= 0.0)
        throw DegenerateInput("parameter hits the horocycle base point");
    return PlanePoint(h.base.value() + rad * std::sin(s), y);
}

inline bool horocycle_contains(const Horocycle& h, const PlanePoint& z,
                               double tol = kGeomTol) {
    return std::abs(horocycle_level_of(h.base, z) - h.level) <= tol;
}

}  // namespace flutelab
