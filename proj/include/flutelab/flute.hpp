#pragma once

// Marked generator families for flute-type surfaces, two constructions:
//
//  * build_untwisted: generators f_n paired with points p_n marching out a
//    geodesic ray toward a boundary point, with perpendicular-bisector
//    circles C_n, C'_n around the basepoint i.  The full per-step numeric
//    trail is kept in a ConstructionTrace.
//
//  * build_twisted_delta: the integer-indexed family h_p with a fixed twist
//    parameter delta > 1 and the index recurrence p_1 = 1 + floor((delta-1)/2),
//    p_{n+1} = 1 + floor((delta+1) p_n / (delta-1)).
//
// Plus the structural checks both constructions are expected to satisfy:
// circle disjointness (Schottky position), a common-orthogonal coefficient
// test, axis nesting, and fundamental-domain membership.

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "flutelab/errors.hpp"
#include "flutelab/moebius.hpp"
#include "flutelab/numeric.hpp"
#include "flutelab/plane.hpp"

namespace flutelab {

// ---------------------------------------------------------------------------
// Untwisted construction

struct UntwistedFluteParams {
    // Default schedule: xi grows fast enough that the 2N circles stay
    // pairwise disjoint (a plain geometric schedule 4^n fails; see
    // check_schottky), eps_n = 4^-n.
    std::function<double(int)> xi = [](int n) {
        return std::pow(4.0, 0.5 * double(n) * double(n + 3));
    };
    std::function<double(int)> eps = [](int n) {
        return std::pow(4.0, -double(n));
    };
    int N = 8;
    // When set, the builder throws SchottkyViolation as soon as two of the
    // 2N bisector circles fail to be externally disjoint.  Disable to study
    // schedules that violate disjointness.
    bool enforceDisjoint = true;
};

struct ConstructionStep {
    int n = 0;
    double xi = 0.0;
    double eps = 0.0;
    double I = 0.0;  // height of p_n:  I = exp(-eps)
    double Y = 0.0;  // real part of p_n
    double X = 0.0;  // center of C_n
    double R = 0.0;  // radius of C_n
    PlanePoint p;
    EuclideanCircle C;   // bisector of the pair (i, f_n^{-1} i)
    EuclideanCircle Cp;  // bisector of the pair (i, f_n i)
    double Xp = 0.0;     // center of C'_n
    double K = 0.0;      // radius of C'_n
    MoebiusTransform f;
    std::array<double, 4> Mp{};  // unit-determinant coefficients of f_n
    double mpTrace = 0.0;        // |trace| of Mp

    ConstructionStep()
        : p(0.0, 1.0), C(0.0, 1.0), Cp(0.0, 1.0),
          f(MoebiusTransform::identity()) {}
};

using ConstructionTrace = std::vector<ConstructionStep>;

struct UntwistedProvenance {
    ConstructionTrace steps;
    // Least index such that |trace(Mp_m)| >= 5 for every m >= it; N+1 when
    // the bound is not yet reached at the truncation.
    int traceBoundIndex = 1;
};

// ---------------------------------------------------------------------------
// Twisted family

struct TwistedDeltaParams {
    double delta = 3.0;  // > 1
    int N = 6;
    bool enforceDisjoint = true;  // isometric-circle disjointness
};

struct TwistedProvenance {
    double delta = 0.0;
    std::vector<double> p;  // index sequence, exact while representable
};

struct HCoefficients {
    double a, b, c, d;
};

inline HCoefficients h_coefficients(double p, double delta) {
    if (!(delta > 1.0))
        throw DegenerateInput("twisted family needs delta > 1");
    if (!(p >= 1.0)) throw DegenerateInput("index p must be >= 1");
    const double p2p1 = p * p + 1.0;
    const double b = p + p2p1 * delta;
    if (!std::isfinite(p2p1) || !std::isfinite(b))
        throw DegenerateInput("index p too large for double coefficients");
    return {delta + 2.0 * p / p2p1, b, 1.0 / p, p2p1 / p};
}

// det = 1 exactly as an identity in p; the constructor trusts it.
inline MoebiusTransform h_generator(double p, double delta) {
    const HCoefficients h = h_coefficients(p, delta);
    return MoebiusTransform::unimodular(h.a, h.b, h.c, h.d);
}

// First `count` values of the index recurrence.  Integral delta runs in
// exact 128-bit integer arithmetic (each value converted to double once, at
// the end); non-integral delta uses the floor recurrence on doubles.
inline std::vector<double> delta_p_sequence(double delta, int count) {
    if (!(delta > 1.0))
        throw DegenerateInput("twisted family needs delta > 1");
    if (count < 0) throw DegenerateInput("count must be >= 0");
    std::vector<double> out;
    out.reserve(std::size_t(count));
    if (count == 0) return out;

    if (delta == std::floor(delta) && delta <= 1e15) {
        using U = unsigned __int128;
        const U d = U(delta);
        const U limit = ~U(0) / (d + 1) - 1;
        U p = 1 + (d - 1) / 2;
        for (int i = 0; i < count; ++i) {
            out.push_back(double(p));
            if (i + 1 == count) break;
            if (p > limit)
                throw DegenerateInput(
                    "index sequence exceeds exact integer range");
            p = 1 + ((d + 1) * p) / (d - 1);
        }
        return out;
    }

    double p = 1.0 + std::floor((delta - 1.0) / 2.0);
    for (int i = 0; i < count; ++i) {
        out.push_back(p);
        if (i + 1 == count) break;
        p = 1.0 + std::floor((delta + 1.0) * p / (delta - 1.0));
        if (!std::isfinite(p))
            throw DegenerateInput("index sequence overflows double range");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Marked group truncation

struct GroupTruncation {
    std::vector<MoebiusTransform> generators;
    std::vector<int> labels;  // 1-based construction indices
    std::variant<UntwistedProvenance, TwistedProvenance> provenance;

    bool is_untwisted() const {
        return std::holds_alternative<UntwistedProvenance>(provenance);
    }
    const ConstructionTrace& trace() const {
        if (!is_untwisted())
            throw DegenerateInput("no construction trace: twisted family");
        return std::get<UntwistedProvenance>(provenance).steps;
    }
    int trace_bound_index() const {
        if (!is_untwisted())
            throw DegenerateInput("no construction trace: twisted family");
        return std::get<UntwistedProvenance>(provenance).traceBoundIndex;
    }
    const TwistedProvenance& twisted() const {
        if (is_untwisted())
            throw DegenerateInput("no index sequence: untwisted family");
        return std::get<TwistedProvenance>(provenance);
    }
};

// ---------------------------------------------------------------------------
// Disjointness (Schottky position)

enum class CircleFamily {
    Auto,      // Bisector for untwisted, Isometric for twisted
    Bisector,  // perpendicular bisectors around the basepoint
    Isometric  // |cz+d| = 1 circles of the unit-determinant coefficients
};

struct LabeledCircle {
    std::string label;
    EuclideanCircle circle;
};

struct PairMargin {
    std::string a;
    std::string b;
    double margin;  // |center gap| - radius sum; > 0 means disjoint
};

struct SchottkyReport {
    CircleFamily family = CircleFamily::Bisector;  // resolved family
    std::vector<LabeledCircle> circles;            // 2N labeled circles
    std::vector<PairMargin> pairs;                 // all unordered pairs
    double minMargin = std::numeric_limits<double>::infinity();
    std::string minPairA, minPairB;
    bool pass = true;  // every margin > 0
};

namespace detail {

inline SchottkyReport margins_of(std::vector<LabeledCircle> circles,
                                 CircleFamily family) {
    SchottkyReport rep;
    rep.family = family;
    rep.circles = std::move(circles);
    const std::size_t n = rep.circles.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const EuclideanCircle& a = rep.circles[i].circle;
            const EuclideanCircle& b = rep.circles[j].circle;
            const double margin =
                std::abs(a.center - b.center) - (a.radius + b.radius);
            rep.pairs.push_back(
                {rep.circles[i].label, rep.circles[j].label, margin});
            if (margin < rep.minMargin) {
                rep.minMargin = margin;
                rep.minPairA = rep.circles[i].label;
                rep.minPairB = rep.circles[j].label;
            }
            if (!(margin > 0.0)) rep.pass = false;
        }
    }
    return rep;
}

}  // namespace detail

// Pairwise external disjointness of the 2N marked circles.  Failures are
// report entries, never exceptions; degenerate inputs (a generator fixing
// the basepoint, or lacking an isometric circle) still throw.
inline SchottkyReport check_schottky(const GroupTruncation& g,
                                     const PlanePoint& basepoint,
                                     CircleFamily family = CircleFamily::Auto) {
    if (family == CircleFamily::Auto)
        family = g.is_untwisted() ? CircleFamily::Bisector
                                  : CircleFamily::Isometric;
    std::vector<LabeledCircle> circles;
    circles.reserve(2 * g.generators.size());
    for (std::size_t k = 0; k < g.generators.size(); ++k) {
        const std::string tag = std::to_string(g.labels[k]);
        const MoebiusTransform& m = g.generators[k];
        if (family == CircleFamily::Bisector) {
            circles.push_back(
                {"C_" + tag, bisector_halfplane(basepoint, invert(m)).boundary});
            circles.push_back(
                {"C'_" + tag, bisector_halfplane(basepoint, m).boundary});
        } else {
            const std::array<double, 4> u = m.unit_det_coeffs();
            if (u[2] == 0.0)
                throw DegenerateInput(
                    "generator fixes infinity: no isometric circle");
            const double r = 1.0 / std::abs(u[2]);
            circles.push_back(
                {"I_" + tag, EuclideanCircle(-u[3] / u[2], r)});
            circles.push_back(
                {"I'_" + tag, EuclideanCircle(u[0] / u[2], r)});
        }
    }
    return detail::margins_of(std::move(circles), family);
}

// ---------------------------------------------------------------------------
// Builders

inline GroupTruncation build_untwisted(const UntwistedFluteParams& params) {
    if (!params.xi || !params.eps)
        throw DegenerateInput("schedule callbacks must be set");
    if (params.N < 0) throw DegenerateInput("N must be >= 0");

    UntwistedProvenance prov;
    GroupTruncation g;
    double prevXi = 1.0;
    double prevEps = std::numeric_limits<double>::infinity();

    for (int n = 1; n <= params.N; ++n) {
        ConstructionStep st;
        st.n = n;
        st.xi = params.xi(n);
        st.eps = params.eps(n);
        if (!(st.xi > 1.0) || !std::isfinite(st.xi))
            throw DegenerateInput("xi values must be finite and > 1");
        if (!(st.eps > 0.0) || !std::isfinite(st.eps))
            throw DegenerateInput("eps values must be finite and > 0");
        if (!(st.xi > prevXi))
            throw DegenerateInput("xi values must increase strictly");
        if (!(st.eps < prevEps))
            throw DegenerateInput("eps values must decrease strictly");
        prevXi = st.xi;
        prevEps = st.eps;

        st.I = std::exp(-st.eps);
        const double oneMinusI = -std::expm1(-st.eps);  // 1 - I, no rounding loss
        const double c0 = 0.5 * (st.xi - 1.0 / st.xi);
        const double rho = 0.5 * (st.xi + 1.0 / st.xi);
        st.Y = c0 + std::sqrt((rho - st.I) * (rho + st.I));
        st.X = st.Y / oneMinusI;
        if (!std::isfinite(st.X) || !std::isfinite(st.X * st.X))
            throw DegenerateInput("schedule exceeds double range");
        st.R = std::sqrt(st.I) * std::hypot(1.0, st.X);
        // R^2 - X^2 = I - X^2 (1 - I), evaluated without cancellation.
        const double D = st.I - (st.X * st.X) * oneMinusI;
        const double denom = (st.X * st.X) * oneMinusI - st.I;  // X^2 - R^2 > 0
        st.p = PlanePoint(st.Y, st.I);
        st.C = EuclideanCircle(st.X, st.R);
        st.Xp = st.X / denom;
        st.K = st.R / denom;
        st.Cp = EuclideanCircle(st.Xp, st.K);
        const double logDet = -st.eps + std::log1p(st.X * st.X);
        st.f = MoebiusTransform::with_known_log_det(1.0, -st.X, st.X, D,
                                                    logDet);
        st.Mp = {1.0 / st.R, -st.X / st.R, st.X / st.R, D / st.R};
        st.mpTrace = std::abs(1.0 + D) / st.R;

        prov.steps.push_back(st);
        g.generators.push_back(st.f);
        g.labels.push_back(n);
    }

    prov.traceBoundIndex = params.N + 1;
    for (int n = params.N; n >= 1; --n) {
        if (prov.steps[std::size_t(n) - 1].mpTrace >= 5.0)
            prov.traceBoundIndex = n;
        else
            break;
    }

    std::vector<LabeledCircle> circles;
    circles.reserve(2 * prov.steps.size());
    for (const ConstructionStep& st : prov.steps) {
        const std::string tag = std::to_string(st.n);
        circles.push_back({"C_" + tag, st.C});
        circles.push_back({"C'_" + tag, st.Cp});
    }
    const SchottkyReport rep =
        detail::margins_of(std::move(circles), CircleFamily::Bisector);
    if (params.enforceDisjoint && !rep.pass)
        throw SchottkyViolation("marked circles overlap: " + rep.minPairA +
                                    " vs " + rep.minPairB,
                                rep.minPairA, rep.minPairB, rep.minMargin);

    g.provenance = std::move(prov);
    return g;
}

inline GroupTruncation build_twisted_delta(const TwistedDeltaParams& params) {
    if (params.N < 0) throw DegenerateInput("N must be >= 0");
    TwistedProvenance prov;
    prov.delta = params.delta;
    prov.p = delta_p_sequence(params.delta, params.N);

    GroupTruncation g;
    for (int n = 1; n <= params.N; ++n) {
        g.generators.push_back(h_generator(prov.p[std::size_t(n) - 1],
                                           params.delta));
        g.labels.push_back(n);
    }
    g.provenance = std::move(prov);

    if (params.enforceDisjoint && params.N > 0) {
        const SchottkyReport rep =
            check_schottky(g, PlanePoint(0.0, 1.0), CircleFamily::Isometric);
        if (!rep.pass)
            throw SchottkyViolation("isometric circles overlap: " +
                                        rep.minPairA + " vs " + rep.minPairB,
                                    rep.minPairA, rep.minPairB, rep.minMargin);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Common-orthogonal coefficient test

struct UntwistedCheckRow {
    int label = 0;
    int relationCase = 0;
    double residual = 0.0;     // as printed for the case
    double residualAlt = 0.0;  // second reading (case 3 only; else = residual)
    double axisAngle = 0.0;    // angle between axis and candidate, NaN if none
    std::string note;
    bool pass = false;
};

struct UntwistedCheckReport {
    int relationCase = 0;
    std::vector<UntwistedCheckRow> rows;
    double maxResidual = 0.0;  // max over rows of min(residual, residualAlt)
    bool pass = true;
};

// Tests whether every generator's axis admits `orthogonal` as a common
// orthogonal geodesic, through the coefficient identities:
//   case 1, candidate (0, inf):        a = d
//   case 2, candidate (alpha, beta):   (a-d)(alpha+beta) + 2b = 2 alpha beta c
//   case 3, candidate (alpha, inf):    a - d = 2c   [alt reading: a - d = 2 alpha c]
// and cross-checks that the axis meets the candidate at a right angle.
inline UntwistedCheckReport check_untwisted(const GroupTruncation& g,
                                            const Geodesic& orthogonal,
                                            double tol = kGeomTol) {
    UntwistedCheckReport rep;
    double alpha = 0.0, beta = 0.0;
    if (orthogonal.is_vertical()) {
        alpha = orthogonal.e1().value();
        rep.relationCase = (alpha == 0.0) ? 1 : 3;
    } else {
        alpha = orthogonal.e1().value();
        beta = orthogonal.e2().value();
        rep.relationCase = 2;
    }

    for (std::size_t k = 0; k < g.generators.size(); ++k) {
        UntwistedCheckRow row;
        row.label = g.labels[k];
        row.relationCase = rep.relationCase;
        row.axisAngle = std::numeric_limits<double>::quiet_NaN();
        const MoebiusTransform& m = g.generators[k];

        try {
            const std::array<double, 4> u = m.unit_det_coeffs();
            const double a = u[0], b = u[1], c = u[2], d = u[3];
            switch (rep.relationCase) {
                case 1:
                    row.residual = std::abs(a - d);
                    row.residualAlt = row.residual;
                    break;
                case 2:
                    row.residual = std::abs((a - d) * (alpha + beta) +
                                            2.0 * b - 2.0 * alpha * beta * c);
                    row.residualAlt = row.residual;
                    break;
                case 3:
                    row.residual = std::abs(a - d - 2.0 * c);
                    row.residualAlt = std::abs(a - d - 2.0 * alpha * c);
                    break;
            }
        } catch (const DegenerateInput&) {
            row.residual = std::numeric_limits<double>::infinity();
            row.residualAlt = row.residual;
            row.note = "coefficients exceed double range";
        }

        bool angleOk = false;
        try {
            const auto fixed = fixed_points(m);
            const Geodesic axis(fixed.first, fixed.second);
            row.axisAngle = angle_between(axis, orthogonal);
            angleOk = std::abs(row.axisAngle - 0.5 * kPi) <= tol;
            if (!angleOk && row.note.empty()) row.note = "axis not orthogonal";
        } catch (const Error& e) {
            if (row.note.empty())
                row.note = std::string("axis degenerate: ") + e.what();
        }

        const double best = std::min(row.residual, row.residualAlt);
        row.pass = (best <= tol) && angleOk;
        rep.maxResidual = std::max(rep.maxResidual, best);
        if (!row.pass) rep.pass = false;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Axis nesting

struct AxisInterval {
    int label = 0;
    double lo = 0.0;
    double hi = 0.0;  // +inf when the axis ends at infinity
};

struct NestedPairRow {
    int a = 0;
    int b = 0;
    std::string relation;  // "disjoint", "nested", "crossing", "degenerate"
    bool ok = false;
};

struct NestednessReport {
    std::vector<AxisInterval> axes;
    std::vector<NestedPairRow> pairs;
    bool pass = true;
};

// Axis endpoint intervals must be pairwise nested or disjoint; a partial
// crossing breaks the flute pattern.
inline NestednessReport check_nested(const GroupTruncation& g) {
    NestednessReport rep;
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.generators.size(); ++k) {
        const auto fixed = fixed_points(g.generators[k]);
        double lo = fixed.first.is_infinity() ? inf : fixed.first.value();
        double hi = fixed.second.is_infinity() ? inf : fixed.second.value();
        if (lo > hi) std::swap(lo, hi);
        rep.axes.push_back({g.labels[k], lo, hi});
    }
    for (std::size_t i = 0; i < rep.axes.size(); ++i) {
        for (std::size_t j = i + 1; j < rep.axes.size(); ++j) {
            const AxisInterval& A = rep.axes[i];
            const AxisInterval& B = rep.axes[j];
            NestedPairRow row;
            row.a = A.label;
            row.b = B.label;
            if (A.lo == A.hi || B.lo == B.hi) {
                row.relation = "degenerate";
                row.ok = false;
            } else if (A.hi <= B.lo || B.hi <= A.lo) {
                row.relation = "disjoint";
                row.ok = true;
            } else if ((B.lo <= A.lo && A.hi <= B.hi) ||
                       (A.lo <= B.lo && B.hi <= A.hi)) {
                row.relation = "nested";
                row.ok = true;
            } else {
                row.relation = "crossing";
                row.ok = false;
            }
            if (!row.ok) rep.pass = false;
            rep.pairs.push_back(std::move(row));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Fundamental domain membership

// Membership in the intersection of all 2N bisector half-planes around
// `basepoint`: Outside any -> Outside; on any boundary (while inside the
// rest) -> Boundary; otherwise Inside.
inline Region fundamental_domain_contains(const PlanePoint& z,
                                          const GroupTruncation& g,
                                          const PlanePoint& basepoint,
                                          double tol = kGeomTol) {
    bool onBoundary = false;
    for (const MoebiusTransform& m : g.generators) {
        for (const bool inverse : {false, true}) {
            const BisectorHalfplane h =
                bisector_halfplane(basepoint, inverse ? invert(m) : m);
            switch (h.classify(z, tol)) {
                case Region::Outside:
                    return Region::Outside;
                case Region::Boundary:
                    onBoundary = true;
                    break;
                case Region::Inside:
                    break;
            }
        }
    }
    return onBoundary ? Region::Boundary : Region::Inside;
}

}  // namespace flutelab
