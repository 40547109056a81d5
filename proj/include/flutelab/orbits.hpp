#pragma once

// Orbit experiments anchored at the upward vertical ray: Busemann levels of
// inverse orbits, convergence tests for candidate horocycle-return times,
// finite-truncation scans for the set of such times, and boundary-orbit
// censuses.  Every scan here sees only a finite word ball; reports say so.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "flutelab/dynamics.hpp"
#include "flutelab/errors.hpp"
#include "flutelab/flute.hpp"
#include "flutelab/moebius.hpp"
#include "flutelab/plane.hpp"
#include "flutelab/words.hpp"

namespace flutelab {

// ---------------------------------------------------------------------------
// Busemann level of an inverse orbit point

// B_inf(m^{-1} i, i) = log(A^2 + C^2) for the unit-determinant first column
// (A, C) of m, evaluated scale-safely from the stored normalized entries.
inline double busemann_shift(const MoebiusTransform& m) {
    return 2.0 * m.log_scale() +
           std::log(m.a() * m.a() + m.c() * m.c());
}

// ---------------------------------------------------------------------------
// Word schemas for the twisted family

struct PowerTowerSchema {
    int n = 1;  // base index into the delta recurrence
    int k = 0;  // tower height: letters h_q with q = p_n^(2^l), l = 0..k
};

struct SingleGeneratorSchema {
    int n = 1;
};

struct CustomSchema {
    std::vector<double> indices;  // explicit letter indices, left to right
};

using WordSchema =
    std::variant<PowerTowerSchema, SingleGeneratorSchema, CustomSchema>;

// Matrix of the scheduled word, letters composed left to right (the first
// index is the outermost factor).
inline MoebiusTransform word_matrix(const WordSchema& schema, double delta) {
    if (const auto* pt = std::get_if<PowerTowerSchema>(&schema)) {
        if (pt->n < 1 || pt->k < 0)
            throw DegenerateInput("power tower needs n >= 1 and k >= 0");
        const std::vector<double> p = delta_p_sequence(delta, pt->n);
        double q = p.back();
        MoebiusTransform m = h_generator(q, delta);
        for (int l = 1; l <= pt->k; ++l) {
            q = q * q;
            if (!std::isfinite(q))
                throw DegenerateInput("tower index overflows double range");
            m = compose(m, h_generator(q, delta));
        }
        return m;
    }
    if (const auto* sg = std::get_if<SingleGeneratorSchema>(&schema)) {
        if (sg->n < 1) throw DegenerateInput("generator index must be >= 1");
        return h_generator(delta_p_sequence(delta, sg->n).back(), delta);
    }
    const auto& custom = std::get<CustomSchema>(schema);
    if (custom.indices.empty())
        throw DegenerateInput("custom schema needs at least one index");
    MoebiusTransform m = h_generator(custom.indices.front(), delta);
    for (std::size_t i = 1; i < custom.indices.size(); ++i)
        m = compose(m, h_generator(custom.indices[i], delta));
    return m;
}

// ---------------------------------------------------------------------------
// Busemann levels along a power-tower family

struct WordLimitSeries {
    std::vector<int> n;
    std::vector<double> B;  // Busemann level per n
    double tail = 0.0;      // last value
    double target = 0.0;    // 2 log(delta (delta+1)^k)
    double absError = 0.0;  // |tail - target|
    bool nonConvergent = false;
};

inline WordLimitSeries busemann_along_words(int k, double delta, int nFrom,
                                            int nTo,
                                            double oscillationTol = 1e-6) {
    if (nFrom < 1 || nTo < nFrom)
        throw DegenerateInput("need 1 <= nFrom <= nTo");
    if (k < 0) throw DegenerateInput("tower height must be >= 0");
    WordLimitSeries series;
    for (int n = nFrom; n <= nTo; ++n) {
        series.n.push_back(n);
        series.B.push_back(
            busemann_shift(word_matrix(PowerTowerSchema{n, k}, delta)));
    }
    series.tail = series.B.back();
    series.target =
        2.0 * (std::log(delta) + double(k) * std::log(delta + 1.0));
    series.absError = std::abs(series.tail - series.target);
    // Flag a tail that moves more than the tolerance AND is not contracting
    // against the preceding window; a slow monotone approach is convergent.
    const std::size_t window = std::min<std::size_t>(5, series.B.size());
    const auto [lo, hi] = std::minmax_element(series.B.end() - window,
                                              series.B.end());
    const double lastRange = *hi - *lo;
    series.nonConvergent = lastRange > oscillationTol;
    if (series.nonConvergent && series.B.size() >= 2 * window) {
        const auto [plo, phi] = std::minmax_element(
            series.B.end() - 2 * window, series.B.end() - window);
        series.nonConvergent = lastRange > 0.5 * (*phi - *plo);
    }
    return series;
}

// ---------------------------------------------------------------------------
// Convergence test for a candidate return time

enum class TunvStatus {
    Passed,
    ConditionOneFailed,  // boundary images do not approach the target point
    ConditionTwoFailed,  // Busemann levels do not settle
    NotDistinct,         // sequence elements repeat (recurrence test only)
    DegenerateConstant   // constant sequence: trivially convergent, flagged
};

struct TunvReport {
    TunvStatus status = TunvStatus::Passed;
    double t = 0.0;                   // level estimate (last value)
    std::vector<double> boundaryGaps; // chordal(gamma_n(inf), alpha(inf))
    std::vector<double> levels;       // B-level of gamma_n minus that of alpha
    double gapTail = 0.0;             // mean gap over the last quarter
    double levelOscillation = 0.0;    // max - min level over the last quarter
};

// Checks the two-part criterion for t being a return time witnessed by
// (gamma_n) relative to alpha: (i) gamma_n(inf) -> alpha(inf), and
// (ii) B_inf(gamma_n^{-1} i, alpha^{-1} i) -> t.  Requires u to point at
// infinity (the scan frame); finite truncation, so trends only.
inline TunvReport tunv_test(const UnitTangent& u,
                            const MoebiusTransform& alpha,
                            const std::vector<MoebiusTransform>& seq,
                            double boundaryTol = 1e-2,
                            double levelTol = 1e-3) {
    if (!u.forward.is_infinity())
        throw DegenerateInput("test frame expects the ray pointing at infinity");
    if (seq.empty()) throw DegenerateInput("empty sequence");

    TunvReport rep;
    const BoundaryPoint target = alpha(BoundaryPoint::infinity());
    const double alphaLevel = busemann_shift(alpha);
    for (const MoebiusTransform& m : seq) {
        rep.boundaryGaps.push_back(chordal(m(BoundaryPoint::infinity()),
                                           target));
        rep.levels.push_back(busemann_shift(m) - alphaLevel);
    }
    rep.t = rep.levels.back();

    const std::size_t quarter =
        std::max<std::size_t>(1, seq.size() / 4);
    double gapSum = 0.0;
    for (std::size_t i = seq.size() - quarter; i < seq.size(); ++i)
        gapSum += rep.boundaryGaps[i];
    rep.gapTail = gapSum / double(quarter);
    const auto [lo, hi] = std::minmax_element(rep.levels.end() - quarter,
                                              rep.levels.end());
    rep.levelOscillation = *hi - *lo;

    bool constant = true;
    for (std::size_t i = 1; i < seq.size() && constant; ++i)
        constant = same_transform(seq[i], seq[0]);
    if (constant)
        rep.status = TunvStatus::DegenerateConstant;
    else if (rep.gapTail > boundaryTol)
        rep.status = TunvStatus::ConditionOneFailed;
    else if (rep.levelOscillation > levelTol)
        rep.status = TunvStatus::ConditionTwoFailed;
    else
        rep.status = TunvStatus::Passed;
    return rep;
}

struct RecurrenceReport {
    TunvStatus status = TunvStatus::Passed;
    double t = 0.0;
    bool pass = false;  // distinct, convergent, and t within tolerance of 0
    TunvReport detail;
};

// Recurrence of the upward ray: pairwise-distinct sequence, boundary images
// approaching infinity, Busemann levels approaching 0.
inline RecurrenceReport recurrence_test(
    const UnitTangent& u, const std::vector<MoebiusTransform>& seq,
    double boundaryTol = 1e-2, double levelTol = 1e-3) {
    RecurrenceReport rep;
    for (std::size_t i = 0; i < seq.size(); ++i)
        for (std::size_t j = i + 1; j < seq.size(); ++j)
            if (same_transform(seq[i], seq[j])) {
                rep.status = TunvStatus::NotDistinct;
                rep.pass = false;
                return rep;
            }
    rep.detail = tunv_test(u, MoebiusTransform::identity(), seq, boundaryTol,
                           levelTol);
    rep.status = rep.detail.status;
    rep.t = rep.detail.t;
    rep.pass = (rep.status == TunvStatus::Passed) &&
               (std::abs(rep.t) <= levelTol);
    return rep;
}

// ---------------------------------------------------------------------------
// Coefficient-pattern diagnostics

// Limit patterns for coefficient sequences (a_n, b_n, c_n, d_n):
//   pattern 1: b -> 0, c -> 0            (levels return to the start height)
//   pattern 2: b -> -alpha^2 c, c, d nonzero
//   pattern 3: b -> -alpha^2 c, d -> 0
// alpha^2 is fitted as -mean(bc)/mean(c^2); residuals are averaged over the
// witnesses whose unit-determinant coefficients are representable.
struct CoefficientDiagnostic {
    double residualCase1 = 0.0;
    double residualCase2 = 0.0;
    double residualCase3 = 0.0;
    double alphaSq = 0.0;
    int bestCase = 0;       // argmin of the residuals; 0 when unavailable
    bool divergent = false; // some witness has |log scale| > 300
};

namespace detail {

inline CoefficientDiagnostic diagnose_coefficients(
    const std::vector<std::array<double, 4>>& coeffs, bool anyDivergent) {
    CoefficientDiagnostic diag;
    diag.divergent = anyDivergent;
    if (coeffs.empty()) return diag;

    double meanBC = 0.0, meanC2 = 0.0;
    for (const auto& u : coeffs) {
        meanBC += u[1] * u[2];
        meanC2 += u[2] * u[2];
    }
    meanBC /= double(coeffs.size());
    meanC2 /= double(coeffs.size());
    diag.alphaSq = (meanC2 > 0.0) ? -meanBC / meanC2 : 0.0;

    for (const auto& u : coeffs) {
        const double a = u[0], b = u[1], c = u[2], d = u[3];
        diag.residualCase1 += std::abs(b) + std::abs(c);
        diag.residualCase2 += std::abs(b + diag.alphaSq * c) +
                              std::abs(a * d - (1.0 + diag.alphaSq * c * c));
        diag.residualCase3 += std::abs(d) + std::abs(b + diag.alphaSq * c);
    }
    diag.residualCase1 /= double(coeffs.size());
    diag.residualCase2 /= double(coeffs.size());
    diag.residualCase3 /= double(coeffs.size());

    diag.bestCase = 1;
    double best = diag.residualCase1;
    if (diag.residualCase2 < best) { best = diag.residualCase2; diag.bestCase = 2; }
    if (diag.residualCase3 < best) { best = diag.residualCase3; diag.bestCase = 3; }
    return diag;
}

// Single-linkage clustering of pre-sorted values: a new cluster starts
// whenever the gap to the previous value exceeds epsilon.  Returns
// [begin, end) index ranges into the sorted order.
inline std::vector<std::pair<std::size_t, std::size_t>> cluster_sorted(
    const std::vector<double>& sorted, double epsilon) {
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= sorted.size(); ++i) {
        if (i == sorted.size() || sorted[i] - sorted[i - 1] > epsilon) {
            ranges.push_back({begin, i});
            begin = i;
        }
    }
    return ranges;
}

inline double median_of_sorted_range(const std::vector<double>& sorted,
                                     std::size_t begin, std::size_t end) {
    const std::size_t m = end - begin;
    if (m % 2 == 1) return sorted[begin + m / 2];
    return 0.5 * (sorted[begin + m / 2 - 1] + sorted[begin + m / 2]);
}

inline const char* kScanCaveat =
    "finite-truncation evidence only: candidates come from a finite word "
    "ball and a finite boundary window; they are neither complete nor "
    "certified limits";

// Return-time sets are closed under addition.  For candidate sums that land
// inside the observed level range but match no cluster, emit a descriptive
// note; missing witnesses at this truncation are expected, never a failure.
inline std::vector<std::string> additivity_notes(
    const std::vector<double>& centers, double lo, double hi,
    double epsilon) {
    std::vector<std::string> notes;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        for (std::size_t j = i; j < centers.size(); ++j) {
            const double sum = centers[i] + centers[j];
            if (sum < lo - epsilon || sum > hi + epsilon) continue;
            bool matched = false;
            for (const double c : centers)
                if (std::abs(c - sum) <= epsilon) {
                    matched = true;
                    break;
                }
            if (matched) continue;
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "sum %.6f of candidates %.6f and %.6f lies in the "
                          "observed range but matches no cluster; longer "
                          "words may witness it",
                          sum, centers[i], centers[j]);
            notes.emplace_back(buf);
        }
    }
    return notes;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Return-time scan over a word ball

struct ScanWitness {
    Word word;       // the escaping word gamma
    Word alphaWord;  // reference word alpha (empty = identity)
    double B = 0.0;         // level relative to alpha
    double boundary = 0.0;  // |gamma(inf)|, +inf when gamma fixes infinity
};

struct ScanCandidate {
    double t = 0.0;       // median level of the cluster
    double spread = 0.0;  // max - min level over the cluster
    std::vector<ScanWitness> witnesses;
    CoefficientDiagnostic diag;
};

struct ScanReport {
    std::vector<ScanCandidate> candidates;  // ascending in t
    int wordRadius = 0;
    int alphaWordRadius = 0;
    double boundaryWindow = 0.0;
    double clusterEpsilon = 0.0;
    int minWitnesses = 0;
    std::uint64_t wordsVisited = 0;
    std::uint64_t wordsKept = 0;  // level records pooled over reference words
    std::vector<std::string> additivityNotes;
    std::string caveat;
};

// Scans the word ball for candidate return times: keeps words whose
// boundary image has escaped past the window (the finite stand-in for
// "tends to infinity"), clusters their Busemann levels, and reports every
// cluster with enough witnesses, together with coefficient diagnostics.
// With alphaWordRadius > 0 the scan also pools levels relative to every
// reference word alpha in that ball (escape then means the boundary image
// approaches alpha(inf) in the chordal metric); off by default for cost.
inline ScanReport tu_scan(const UnitTangent& u, const GroupTruncation& g,
                          int wordRadius, double boundaryWindow,
                          double clusterEpsilon = 0.05, int minWitnesses = 3,
                          int alphaWordRadius = 0) {
    if (!u.forward.is_infinity())
        throw DegenerateInput("scan frame expects the ray pointing at infinity");
    if (!(boundaryWindow > 0.0) || !(clusterEpsilon > 0.0) ||
        minWitnesses < 1 || alphaWordRadius < 0)
        throw DegenerateInput("scan parameters must be positive");

    ScanReport rep;
    rep.wordRadius = wordRadius;
    rep.alphaWordRadius = alphaWordRadius;
    rep.boundaryWindow = boundaryWindow;
    rep.clusterEpsilon = clusterEpsilon;
    rep.minWitnesses = minWitnesses;
    rep.caveat = detail::kScanCaveat;

    struct Entry {
        Word word;
        MoebiusTransform m = MoebiusTransform::identity();
        BoundaryPoint image = BoundaryPoint::infinity();
        double B = 0.0;
        double boundary = 0.0;
        std::array<double, 4> coeffs{};
        bool divergent = false;
    };
    const std::vector<Entry> entries = map_reduced_words<Entry>(
        g.generators, wordRadius,
        [&](const Word& w, const MoebiusTransform& m) {
            Entry e;
            e.word = w;
            e.m = m;
            e.image = m(BoundaryPoint::infinity());
            e.boundary = e.image.is_infinity()
                             ? std::numeric_limits<double>::infinity()
                             : std::abs(e.image.value());
            e.B = busemann_shift(m);
            e.divergent = std::abs(m.log_scale()) > 300.0;
            if (!e.divergent) e.coeffs = m.unit_det_coeffs();
            return e;
        });
    rep.wordsVisited = entries.size();

    struct LevelRecord {
        double level;
        std::size_t entry;
        const Word* alphaWord;  // nullptr = identity reference
    };
    static const Word kIdentityWord;
    std::vector<LevelRecord> records;
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].boundary > boundaryWindow)
            records.push_back({entries[i].B, i, nullptr});

    std::vector<std::pair<Word, MoebiusTransform>> alphas;
    if (alphaWordRadius > 0) {
        visit_reduced_words(g.generators, alphaWordRadius,
                            [&](const Word& w, const MoebiusTransform& m) {
                                alphas.emplace_back(w, m);
                            });
        for (const auto& alpha : alphas) {
            const BoundaryPoint target = alpha.second(BoundaryPoint::infinity());
            const double alphaLevel = busemann_shift(alpha.second);
            for (std::size_t i = 0; i < entries.size(); ++i) {
                const Entry& e = entries[i];
                if (same_transform(e.m, alpha.second)) continue;
                if (chordal(e.image, target) > 1.0 / boundaryWindow) continue;
                records.push_back({e.B - alphaLevel, i, &alpha.first});
            }
        }
    }
    rep.wordsKept = records.size();
    if (records.empty()) return rep;

    std::sort(records.begin(), records.end(),
              [](const LevelRecord& a, const LevelRecord& b) {
                  return a.level < b.level;
              });
    std::vector<double> values;
    values.reserve(records.size());
    for (const LevelRecord& r : records) values.push_back(r.level);

    for (const auto& [begin, end] :
         detail::cluster_sorted(values, clusterEpsilon)) {
        if (end - begin < std::size_t(minWitnesses)) continue;
        ScanCandidate cand;
        cand.t = detail::median_of_sorted_range(values, begin, end);
        cand.spread = values[end - 1] - values[begin];
        std::vector<std::array<double, 4>> coeffs;
        bool anyDivergent = false;
        for (std::size_t k = begin; k < end; ++k) {
            const Entry& e = entries[records[k].entry];
            const Word& aw =
                records[k].alphaWord ? *records[k].alphaWord : kIdentityWord;
            cand.witnesses.push_back(
                {e.word, aw, records[k].level, e.boundary});
            if (e.divergent)
                anyDivergent = true;
            else
                coeffs.push_back(e.coeffs);
        }
        cand.diag = detail::diagnose_coefficients(coeffs, anyDivergent);
        rep.candidates.push_back(std::move(cand));
    }

    std::vector<double> centers;
    for (const ScanCandidate& c : rep.candidates) centers.push_back(c.t);
    rep.additivityNotes = detail::additivity_notes(
        centers, values.front(), values.back(), clusterEpsilon);
    return rep;
}

// ---------------------------------------------------------------------------
// Window sweep

struct ScanSweep {
    std::array<double, 3> windows{};
    std::vector<ScanReport> reports;       // one per window
    std::vector<double> stableCandidates;  // t present in all three windows
    std::string caveat;
};

// Runs the scan at windows {w, 10w, 100w}: limits are not decidable from
// finite data, and widening the window exposes candidates whose witnesses
// stop qualifying.  A candidate is called stable when each window produces
// a cluster within clusterEpsilon of its level.
inline ScanSweep tu_scan_sweep(const UnitTangent& u, const GroupTruncation& g,
                               int wordRadius, double baseWindow = 100.0,
                               double clusterEpsilon = 0.05,
                               int minWitnesses = 3) {
    ScanSweep sweep;
    sweep.windows = {baseWindow, 10.0 * baseWindow, 100.0 * baseWindow};
    sweep.caveat = detail::kScanCaveat;
    for (const double w : sweep.windows)
        sweep.reports.push_back(
            tu_scan(u, g, wordRadius, w, clusterEpsilon, minWitnesses));
    for (const ScanCandidate& cand : sweep.reports[0].candidates) {
        bool everywhere = true;
        for (std::size_t r = 1; r < sweep.reports.size() && everywhere; ++r) {
            bool found = false;
            for (const ScanCandidate& other : sweep.reports[r].candidates)
                if (std::abs(other.t - cand.t) <= clusterEpsilon) {
                    found = true;
                    break;
                }
            everywhere = found;
        }
        if (everywhere) sweep.stableCandidates.push_back(cand.t);
    }
    return sweep;
}

// ---------------------------------------------------------------------------
// Power-tower scan for the twisted family

struct PowerTowerWitness {
    int n = 0;
    int k = 0;
    double B = 0.0;
    double boundary = 0.0;
};

struct PowerTowerCandidate {
    double t = 0.0;
    double spread = 0.0;
    std::vector<PowerTowerWitness> witnesses;
    CoefficientDiagnostic diag;
};

struct PowerTowerScanReport {
    std::vector<PowerTowerCandidate> candidates;
    int nMax = 0;
    int kMax = 0;
    double boundaryWindow = 0.0;
    double clusterEpsilon = 0.0;
    int minWitnesses = 0;
    std::vector<std::string> additivityNotes;
    std::string caveat;
};

// Same scan restricted to the structured two-parameter word family
// (base index n, tower height k) instead of a whole word ball.
inline PowerTowerScanReport tu_scan_power_tower(double delta, int nMax = 20,
                                                int kMax = 3,
                                                double boundaryWindow = 100.0,
                                                double clusterEpsilon = 0.05,
                                                int minWitnesses = 3) {
    if (nMax < 1 || kMax < 0)
        throw DegenerateInput("need nMax >= 1 and kMax >= 0");
    PowerTowerScanReport rep;
    rep.nMax = nMax;
    rep.kMax = kMax;
    rep.boundaryWindow = boundaryWindow;
    rep.clusterEpsilon = clusterEpsilon;
    rep.minWitnesses = minWitnesses;
    rep.caveat = detail::kScanCaveat;

    struct Entry {
        PowerTowerWitness w;
        std::array<double, 4> coeffs;
        bool divergent;
    };
    std::vector<Entry> kept;
    for (int n = 1; n <= nMax; ++n) {
        for (int k = 0; k <= kMax; ++k) {
            MoebiusTransform m = MoebiusTransform::identity();
            try {
                m = word_matrix(PowerTowerSchema{n, k}, delta);
            } catch (const DegenerateInput&) {
                continue;  // tower index beyond double range at this (n, k)
            }
            const BoundaryPoint image = m(BoundaryPoint::infinity());
            const double boundary =
                image.is_infinity() ? std::numeric_limits<double>::infinity()
                                    : std::abs(image.value());
            if (!(boundary > boundaryWindow)) continue;
            Entry e;
            e.w = {n, k, busemann_shift(m), boundary};
            e.divergent = std::abs(m.log_scale()) > 300.0;
            e.coeffs = e.divergent ? std::array<double, 4>{0, 0, 0, 0}
                                   : m.unit_det_coeffs();
            kept.push_back(std::move(e));
        }
    }
    if (kept.empty()) return rep;

    std::sort(kept.begin(), kept.end(),
              [](const Entry& a, const Entry& b) { return a.w.B < b.w.B; });
    std::vector<double> values;
    values.reserve(kept.size());
    for (const Entry& e : kept) values.push_back(e.w.B);

    for (const auto& [begin, end] :
         detail::cluster_sorted(values, clusterEpsilon)) {
        if (end - begin < std::size_t(minWitnesses)) continue;
        PowerTowerCandidate cand;
        cand.t = detail::median_of_sorted_range(values, begin, end);
        cand.spread = values[end - 1] - values[begin];
        std::vector<std::array<double, 4>> coeffs;
        bool anyDivergent = false;
        for (std::size_t i = begin; i < end; ++i) {
            cand.witnesses.push_back(kept[i].w);
            if (kept[i].divergent)
                anyDivergent = true;
            else
                coeffs.push_back(kept[i].coeffs);
        }
        cand.diag = detail::diagnose_coefficients(coeffs, anyDivergent);
        rep.candidates.push_back(std::move(cand));
    }

    std::vector<double> centers;
    for (const PowerTowerCandidate& c : rep.candidates)
        centers.push_back(c.t);
    rep.additivityNotes = detail::additivity_notes(
        centers, values.front(), values.back(), clusterEpsilon);
    return rep;
}

// ---------------------------------------------------------------------------
// Foot of the common orthogonal, and its angle

struct FootAngle {
    double beta = 0.0;  // second endpoint of the foot geodesic
    Geodesic foot;      // geodesic (beta, x/2)
    double theta = 0.0; // angle against the upward vertical at the crossing

    FootAngle(double beta_, const Geodesic& foot_, double theta_)
        : beta(beta_), foot(foot_), theta(theta_) {}
};

// For an axis (y, x) with 0 < y < x, the geodesic through (beta, x/2) with
// beta = -x^2/(2y) + 3x/2 meets the axis orthogonally; theta is the angle
// it makes with the vertical (0, inf).
inline FootAngle orthogonal_foot_angle(const Geodesic& axis) {
    if (axis.is_vertical())
        throw DegenerateInput("axis endpoints must both be finite");
    const double y = axis.e1().value();
    const double x = axis.e2().value();
    if (!(0.0 < y && y < x))
        throw DegenerateInput("axis endpoints must satisfy 0 < y < x");
    const double beta = x * (3.0 * y - x) / (2.0 * y);
    const double half = 0.5 * x;
    if (x == 2.0 * y || beta == half)
        throw DegenerateFoot("foot endpoints coincide (x = 2y)");
    const Geodesic foot{BoundaryPoint(beta), BoundaryPoint(half)};
    if (beta >= 0.0)
        throw NotIntersecting("foot geodesic misses the upward vertical");
    const double t = cross_ratio(BoundaryPoint(beta), BoundaryPoint(0.0),
                                 BoundaryPoint::infinity(),
                                 BoundaryPoint(half));
    const double theta = std::acos(std::clamp(2.0 * t - 1.0, -1.0, 1.0));
    return FootAngle(beta, foot, theta);
}

// ---------------------------------------------------------------------------
// Boundary-orbit census

struct StripCensus {
    int octave = 0;  // strip [2^octave, 2^(octave+1)) of image heights
    double lo = 0.0;
    double hi = 0.0;
    std::uint64_t count = 0;
    double maxAbsRe = 0.0;
};

struct LimitPointReport {
    double supIm = 1.0;  // over the orbit of i, identity included
    std::vector<StripCensus> strips;
    // Horizontal escape within the most populated strip: bounded heights
    // with growing |Re| indicate escape along the surface, not up the cusp.
    double escapeEvidence = 0.0;
    int wordRadius = 0;
    std::uint64_t orbitCount = 0;
};

inline LimitPointReport limit_point_diagnostic(const GroupTruncation& g,
                                               int wordRadius) {
    LimitPointReport rep;
    rep.wordRadius = wordRadius;
    const PlanePoint base(0.0, 1.0);

    struct Acc {
        std::uint64_t count = 0;
        double maxAbsRe = 0.0;
    };
    std::map<int, Acc> strips;
    auto absorb = [&](const PlanePoint& z) {
        rep.orbitCount += 1;
        rep.supIm = std::max(rep.supIm, z.y);
        const int octave = int(std::floor(std::log2(z.y)));
        Acc& acc = strips[octave];
        acc.count += 1;
        acc.maxAbsRe = std::max(acc.maxAbsRe, std::abs(z.x));
    };
    absorb(base);
    visit_reduced_words(g.generators, wordRadius,
                        [&](const Word&, const MoebiusTransform& m) {
                            try {
                                absorb(m(base));
                            } catch (const DegenerateInput&) {
                            }
                        });

    std::uint64_t bestCount = 0;
    for (const auto& [octave, acc] : strips) {
        StripCensus strip;
        strip.octave = octave;
        strip.lo = std::exp2(double(octave));
        strip.hi = std::exp2(double(octave + 1));
        strip.count = acc.count;
        strip.maxAbsRe = acc.maxAbsRe;
        rep.strips.push_back(strip);
        if (acc.count > bestCount) {
            bestCount = acc.count;
            rep.escapeEvidence = acc.maxAbsRe;
        }
    }
    return rep;
}

}  // namespace flutelab
