#pragma once

// Unit tangent vectors, the geodesic and horocycle flows, and quotient-side
// quantities (distance, injectivity radius, thinness along a ray) computed
// over finite word balls of a marked group.

#include <algorithm>
#include <cmath>
#include <vector>

#include "flutelab/errors.hpp"
#include "flutelab/flute.hpp"
#include "flutelab/moebius.hpp"
#include "flutelab/plane.hpp"
#include "flutelab/words.hpp"

namespace flutelab {

// ---------------------------------------------------------------------------
// Unit tangent vectors

// A unit tangent vector, stored as base point plus the forward ideal
// endpoint of its geodesic; the backward endpoint is derived (or validated)
// so the triple stays consistent.
struct UnitTangent {
    PlanePoint base;
    BoundaryPoint forward;
    BoundaryPoint backward;

    UnitTangent(const PlanePoint& base_, const BoundaryPoint& forward_)
        : base(base_), forward(forward_), backward(0.0) {
        const Geodesic g = geodesic_through(base_, forward_);
        backward = (g.e1() == forward_) ? g.e2() : g.e1();
    }

    UnitTangent(const PlanePoint& base_, const BoundaryPoint& forward_,
                const BoundaryPoint& backward_)
        : base(base_), forward(forward_), backward(backward_) {
        if (forward_ == backward_)
            throw DegenerateInput("tangent endpoints must differ");
        if (dist_to_geodesic(base_, Geodesic(forward_, backward_)) > 1e-9)
            throw DegenerateInput("base point is off the tangent geodesic");
    }
};

inline UnitTangent apply(const MoebiusTransform& m, const UnitTangent& u) {
    return UnitTangent(m(u.base), m(u.forward), m(u.backward));
}

namespace detail {

// Canonical frame taking (backward, forward) to (0, inf).  Both flows act
// on the framed picture and are invariant under the residual dilation
// freedom, so the choice of frame never leaks into results.
inline MoebiusTransform tangent_frame(const UnitTangent& u) {
    return MoebiusTransform::boundary_frame(u.backward, u.forward);
}

}  // namespace detail

// Time-t geodesic flow: slide the base point distance |t| along the
// tangent geodesic, toward `forward` when t > 0.  Endpoints are preserved.
inline UnitTangent geodesic_flow(const UnitTangent& u, double t) {
    if (std::abs(t) > 600.0)
        throw DegenerateInput("flow time exceeds representable range");
    const MoebiusTransform frame = detail::tangent_frame(u);
    const PlanePoint w = frame(u.base);
    const double lift = std::exp(t);
    const PlanePoint moved(w.x * lift, w.y * lift);
    return UnitTangent(invert(frame)(moved), u.forward, u.backward);
}

// Arclength-s horocycle flow along the horocycle centered at `forward`
// through the base point.  The forward endpoint is preserved; the backward
// endpoint moves with the vector.
inline UnitTangent horocycle_flow(const UnitTangent& u, double s) {
    const MoebiusTransform frame = detail::tangent_frame(u);
    const PlanePoint w = frame(u.base);
    const PlanePoint moved(w.x + s * w.y, w.y);
    return UnitTangent(invert(frame)(moved), u.forward);
}

// ---------------------------------------------------------------------------
// Quotient-side quantities

// Distance between the images of z and w on the quotient by the group,
// estimated from below-by-truncation: min over all reduced words of length
// <= wordRadius (identity included) of dist(z, gamma w).
inline double quotient_distance(const PlanePoint& z, const PlanePoint& w,
                                const GroupTruncation& g, int wordRadius) {
    double best = dist(z, w);
    visit_reduced_words(
        g.generators, wordRadius,
        [&](const Word&, const MoebiusTransform& m) {
            try {
                best = std::min(best, dist(z, m(w)));
            } catch (const DegenerateInput&) {
                // Image collapsed below double range; it cannot be nearest.
            }
        });
    return best;
}

// Injectivity radius proxy at x: min over nonidentity reduced words of
// dist(x, gamma x).  (Reduced words are nonidentity in a free group.)
inline double injectivity_radius(const PlanePoint& x,
                                 const GroupTruncation& g, int wordRadius) {
    if (g.generators.empty() || wordRadius < 1)
        return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    visit_reduced_words(
        g.generators, wordRadius,
        [&](const Word&, const MoebiusTransform& m) {
            try {
                best = std::min(best, dist(x, m(x)));
            } catch (const DegenerateInput&) {
            }
        });
    return best;
}

// Injectivity-radius profile along the forward ray of u, on an even time
// grid.  runningMinTail[k] = min of inj[k..]; its limit (approximated by
// liminfProxy, the minimum over the last quarter of the grid) is the
// asymptotic-thinness proxy at this truncation.
struct RayProfile {
    std::vector<double> times;
    std::vector<double> inj;
    std::vector<double> runningMinTail;
    double liminfProxy = 0.0;
    int wordRadius = 0;
    int genCount = 0;
};

inline RayProfile thinness_profile(const UnitTangent& u,
                                   const GroupTruncation& g, double tMax,
                                   int steps, int wordRadius) {
    if (!(tMax > 0.0) || steps < 2)
        throw DegenerateInput("profile needs tMax > 0 and steps >= 2");
    RayProfile prof;
    prof.wordRadius = wordRadius;
    prof.genCount = int(g.generators.size());
    prof.times.reserve(std::size_t(steps));
    prof.inj.reserve(std::size_t(steps));
    for (int k = 0; k < steps; ++k) {
        const double t = tMax * double(k) / double(steps - 1);
        const UnitTangent moved = geodesic_flow(u, t);
        prof.times.push_back(t);
        prof.inj.push_back(injectivity_radius(moved.base, g, wordRadius));
    }
    prof.runningMinTail.assign(prof.inj.size(), 0.0);
    double rm = std::numeric_limits<double>::infinity();
    for (std::size_t k = prof.inj.size(); k-- > 0;) {
        rm = std::min(rm, prof.inj[k]);
        prof.runningMinTail[k] = rm;
    }
    const std::size_t quarter = std::max<std::size_t>(1, prof.inj.size() / 4);
    prof.liminfProxy = *std::min_element(prof.inj.end() - quarter,
                                         prof.inj.end());
    return prof;
}

// Deficit of the forward ray against quotient distance:
// C = max over the grid of (t - quotient_distance(u(0), u(t))).  A bounded
// deficit witnesses quasi-minimizing behaviour at this truncation; a
// deficit that keeps growing linearly (tail slope near 1) does not, and is
// flagged.
struct QuasiMinimizingReport {
    double c = 0.0;
    double tailSlope = 0.0;  // least-squares slope of the deficit, last half
    bool flagged = false;    // true when the deficit looks unbounded
    double tMax = 0.0;
    int steps = 0;
    int wordRadius = 0;
};

inline QuasiMinimizingReport quasi_minimizing_constant(
    const UnitTangent& u, const GroupTruncation& g, double tMax, int steps,
    int wordRadius) {
    if (!(tMax > 0.0) || steps < 4)
        throw DegenerateInput("deficit scan needs tMax > 0 and steps >= 4");
    QuasiMinimizingReport rep;
    rep.tMax = tMax;
    rep.steps = steps;
    rep.wordRadius = wordRadius;

    std::vector<double> times, deficit;
    times.reserve(std::size_t(steps));
    deficit.reserve(std::size_t(steps));
    for (int k = 0; k < steps; ++k) {
        const double t = tMax * double(k) / double(steps - 1);
        const UnitTangent moved = geodesic_flow(u, t);
        const double qd = quotient_distance(u.base, moved.base, g, wordRadius);
        times.push_back(t);
        deficit.push_back(t - qd);
        rep.c = std::max(rep.c, t - qd);
    }

    const std::size_t half = std::size_t(steps) / 2;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = double(steps - half);
    for (std::size_t k = half; k < std::size_t(steps); ++k) {
        sx += times[k];
        sy += deficit[k];
        sxx += times[k] * times[k];
        sxy += times[k] * deficit[k];
    }
    const double denom = m * sxx - sx * sx;
    rep.tailSlope = (denom != 0.0) ? (m * sxy - sx * sy) / denom : 0.0;
    rep.flagged = rep.tailSlope > 0.5;
    return rep;
}

}  // namespace flutelab
