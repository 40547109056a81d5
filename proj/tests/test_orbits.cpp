#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstdint>

#include "flutelab/orbits.hpp"
#include "oracles.hpp"

using namespace flutelab;

namespace {

const PlanePoint kI(0.0, 1.0);
const UnitTangent kUp(kI, BoundaryPoint::infinity());

bool close_rel(double got, double want, double rel) {
    return std::abs(got - want) <= rel * std::max(1.0, std::abs(want));
}

}  // namespace

TEST_CASE("busemann shift agrees with exact rational coefficients",
          "[orbits][shift]") {
    // Single letters.
    for (const int delta : {2, 3, 5}) {
        const std::vector<oracle::BigInt> ps =
            oracle::p_sequence(oracle::BigInt(delta), 12);
        for (const oracle::BigInt& p : ps) {
            const double lib = busemann_shift(
                h_generator(oracle::to_d(oracle::BigFloat(p)), double(delta)));
            const double want =
                oracle::busemann_shift_of(oracle::h_letter(p, delta));
            REQUIRE(close_rel(lib, want, 1e-12));
        }
    }

    // A composed word, against the exact rational product.
    const MoebiusTransform tower =
        word_matrix(PowerTowerSchema{1, 2}, 3.0);
    const auto u = tower.unit_det_coeffs();
    REQUIRE(u[0] == Catch::Approx(72.06412866216526).epsilon(1e-13));
    REQUIRE(u[1] == Catch::Approx(18241.469301470588).epsilon(1e-13));
    REQUIRE(u[2] == Catch::Approx(9.7575836146715496).epsilon(1e-13));
    REQUIRE(u[3] == Catch::Approx(2469.9342830882351).epsilon(1e-13));
    REQUIRE(busemann_shift(tower) ==
            Catch::Approx(8.5732803018731953).epsilon(1e-13));
    const oracle::RatMatrix exact = oracle::mul(
        oracle::mul(oracle::h_letter(2, 3), oracle::h_letter(4, 3)),
        oracle::h_letter(16, 3));
    REQUIRE(oracle::det(exact) == 1);
    REQUIRE(close_rel(busemann_shift(tower),
                      oracle::busemann_shift_of(exact), 1e-13));
}

TEST_CASE("word schemas compose letters left to right", "[orbits][schema]") {
    REQUIRE(same_transform(word_matrix(SingleGeneratorSchema{2}, 3.0),
                           h_generator(5.0, 3.0), 1e-12));
    const MoebiusTransform custom =
        word_matrix(CustomSchema{{2.0, 4.0, 16.0}}, 3.0);
    REQUIRE(same_transform(custom, word_matrix(PowerTowerSchema{1, 2}, 3.0),
                           1e-12));

    REQUIRE_THROWS_AS(word_matrix(CustomSchema{{}}, 3.0), DegenerateInput);
    REQUIRE_THROWS_AS(word_matrix(PowerTowerSchema{0, 0}, 3.0),
                      DegenerateInput);
    REQUIRE_THROWS_AS(word_matrix(PowerTowerSchema{1, -1}, 3.0),
                      DegenerateInput);
    REQUIRE_THROWS_AS(word_matrix(SingleGeneratorSchema{0}, 3.0),
                      DegenerateInput);
    // Squaring the index 40 times overflows double range.
    REQUIRE_THROWS_AS(word_matrix(PowerTowerSchema{20, 40}, 3.0),
                      DegenerateInput);
}

TEST_CASE("busemann levels along power towers settle on 2 log(delta (delta+1)^k)",
          "[orbits][series]") {
    const double kTails[4] = {2.1972254250471295, 4.9698140413236871,
                              7.7424027635634332, 10.51499148580325};
    for (int k = 0; k <= 3; ++k) {
        const WordLimitSeries series = busemann_along_words(k, 3.0, 1, 20);
        REQUIRE(series.n.size() == 20);
        REQUIRE_FALSE(series.nonConvergent);
        REQUIRE(series.tail == Catch::Approx(kTails[k]).epsilon(1e-13));
        REQUIRE(series.target ==
                Catch::Approx(2.0 * (std::log(3.0) +
                                     k * std::log(4.0))).epsilon(1e-14));
        REQUIRE(series.absError < 1e-2);
    }

    // The ground-level error shrinks strictly from n = 5 on.
    const WordLimitSeries base = busemann_along_words(0, 3.0, 1, 20);
    for (std::size_t j = 4; j + 1 < base.B.size(); ++j) {
        const double errHere = std::abs(base.B[j] - base.target);
        const double errNext = std::abs(base.B[j + 1] - base.target);
        REQUIRE(errNext < errHere);
    }
    REQUIRE(std::abs(base.B.back() - base.target) ==
            Catch::Approx(8.477109e-07).epsilon(1e-5));

    REQUIRE_THROWS_AS(busemann_along_words(0, 3.0, 5, 4), DegenerateInput);
    REQUIRE_THROWS_AS(busemann_along_words(-1, 3.0, 1, 20), DegenerateInput);
}

TEST_CASE("return-time test separates its failure modes", "[orbits][tunv]") {
    // Towers of height 1 witness the level 2 log(delta (delta+1)).
    std::vector<MoebiusTransform> towers;
    for (int n = 5; n <= 20; ++n)
        towers.push_back(word_matrix(PowerTowerSchema{n, 1}, 3.0));
    const TunvReport good =
        tunv_test(kUp, MoebiusTransform::identity(), towers);
    REQUIRE(good.status == TunvStatus::Passed);
    REQUIRE(good.t == Catch::Approx(4.9698140413236871).epsilon(1e-13));
    REQUIRE(good.levelOscillation <= 1e-5);
    REQUIRE(good.boundaryGaps.size() == towers.size());

    // The flute generators' boundary images stay near 0, far from infinity.
    const GroupTruncation flute = build_untwisted({});
    const RecurrenceReport bad = recurrence_test(kUp, flute.generators);
    REQUIRE(bad.status == TunvStatus::ConditionOneFailed);
    REQUIRE_FALSE(bad.pass);
    REQUIRE(bad.t == Catch::Approx(1.5258789048289145e-05).epsilon(1e-12));

    // A designed recurrence: b, c -> 0 with a d -> 1.
    std::vector<MoebiusTransform> designed;
    for (int n = 1; n <= 40; ++n) {
        const double c = 1.0 / n;
        const double b = 1.0 / double(n) / double(n);
        const double d = 1.0 + 1.0 / n;
        const double a = (1.0 + b * c) / d;
        designed.push_back(MoebiusTransform::unimodular(a, b, c, d));
    }
    const RecurrenceReport rec = recurrence_test(kUp, designed, 1e-1, 5e-2);
    REQUIRE(rec.status == TunvStatus::Passed);
    REQUIRE(rec.pass);
    REQUIRE(rec.t == Catch::Approx(-0.048697570800079998).epsilon(1e-13));

    // Repeats and constants are their own verdicts.
    const MoebiusTransform h2 = h_generator(2.0, 3.0);
    const MoebiusTransform h5 = h_generator(5.0, 3.0);
    const RecurrenceReport rep =
        recurrence_test(kUp, {h2, h5, h2});
    REQUIRE(rep.status == TunvStatus::NotDistinct);
    REQUIRE_FALSE(rep.pass);
    const TunvReport constant =
        tunv_test(kUp, MoebiusTransform::identity(), {h2, h2, h2});
    REQUIRE(constant.status == TunvStatus::DegenerateConstant);

    const UnitTangent sideways(kI, BoundaryPoint(1.0));
    REQUIRE_THROWS_AS(tunv_test(sideways, MoebiusTransform::identity(),
                                {h2, h5}),
                      DegenerateInput);
    REQUIRE_THROWS_AS(tunv_test(kUp, MoebiusTransform::identity(), {}),
                      DegenerateInput);
}

TEST_CASE("word-ball scan on a single dilation finds no clusters",
          "[orbits][scan]") {
    const double e = std::exp(1.0);
    GroupTruncation cyc;
    cyc.generators = {MoebiusTransform::unimodular(e, 0.0, 0.0, 1.0 / e)};
    cyc.labels = {1};
    const ScanReport rep = tu_scan(kUp, cyc, 3, 100.0);
    REQUIRE(rep.wordsVisited == 6);
    REQUIRE(rep.wordsKept == 6);  // powers fix infinity, so all escape
    REQUIRE(rep.candidates.empty());  // levels 2k never cluster
    REQUIRE(rep.caveat.find("finite-truncation") != std::string::npos);

    REQUIRE_THROWS_AS(tu_scan(UnitTangent(kI, BoundaryPoint(1.0)), cyc, 3,
                              100.0),
                      DegenerateInput);
    REQUIRE_THROWS_AS(tu_scan(kUp, cyc, 3, -1.0), DegenerateInput);
    REQUIRE_THROWS_AS(tu_scan(kUp, cyc, 3, 100.0, 0.0), DegenerateInput);
}

TEST_CASE("window sweep over the untwisted word ball", "[orbits][scan]") {
    const GroupTruncation flute = build_untwisted({});
    const ScanSweep sweep = tu_scan_sweep(kUp, flute, 3);
    REQUIRE(sweep.windows == std::array<double, 3>{100.0, 1000.0, 10000.0});
    REQUIRE(sweep.reports.size() == 3);

    const std::uint64_t kept[3] = {1687, 1679, 1542};
    const std::size_t clusters[3] = {137, 137, 117};
    for (std::size_t r = 0; r < 3; ++r) {
        REQUIRE(sweep.reports[r].wordsVisited == 3856);
        REQUIRE(sweep.reports[r].wordsKept == kept[r]);
        REQUIRE(sweep.reports[r].candidates.size() == clusters[r]);
        REQUIRE(sweep.reports[r].caveat.find("finite-truncation") !=
                std::string::npos);
    }

    REQUIRE(sweep.stableCandidates.size() == 116);
    REQUIRE(sweep.stableCandidates[0] ==
            Catch::Approx(0.015640258789034078).epsilon(1e-12));
    REQUIRE(sweep.stableCandidates[1] ==
            Catch::Approx(5.416817633083518).epsilon(1e-12));
    REQUIRE(sweep.stableCandidates[2] ==
            Catch::Approx(25.023633853536836).epsilon(1e-12));
    REQUIRE(sweep.stableCandidates[3] ==
            Catch::Approx(25.222576827266018).epsilon(1e-12));
    REQUIRE(sweep.stableCandidates[4] ==
            Catch::Approx(30.387905845282852).epsilon(1e-12));
    REQUIRE(sweep.stableCandidates[5] ==
            Catch::Approx(38.878979037613462).epsilon(1e-12));
    for (std::size_t k = 0; k + 1 < sweep.stableCandidates.size(); ++k)
        REQUIRE(sweep.stableCandidates[k] < sweep.stableCandidates[k + 1]);
}

TEST_CASE("power-tower scan recovers the level ladder", "[orbits][scan]") {
    const PowerTowerScanReport rep = tu_scan_power_tower(3.0);
    REQUIRE(rep.nMax == 20);
    REQUIRE(rep.kMax == 3);
    REQUIRE(rep.candidates.size() == 4);

    const double kT[4] = {2.1973873543082298, 4.9699557553039639,
                          7.7425444754735082, 10.515133197713283};
    const double kSpread[4] = {0.0282049, 0.0253857, 0.0253293, 0.0253293};
    for (std::size_t j = 0; j < 4; ++j) {
        const PowerTowerCandidate& c = rep.candidates[j];
        REQUIRE(c.t == Catch::Approx(kT[j]).epsilon(1e-13));
        REQUIRE(c.spread == Catch::Approx(kSpread[j]).margin(5e-7));
        REQUIRE(c.witnesses.size() == 16);
        REQUIRE(c.diag.bestCase == 1);
        // Each level sits close to 2 log(delta (delta+1)^k).
        const double target = 2.0 * (std::log(3.0) + j * std::log(4.0));
        REQUIRE(std::abs(c.t - target) < 5e-2);
    }

    REQUIRE(rep.additivityNotes.size() == 4);
    REQUIRE(rep.additivityNotes[0] ==
            "sum 4.394775 of candidates 2.197387 and 2.197387 lies in the "
            "observed range but matches no cluster; longer words may witness "
            "it");
    REQUIRE(rep.additivityNotes[1].find("7.167343") != std::string::npos);
    REQUIRE(rep.additivityNotes[2].find("9.939932") != std::string::npos);
    REQUIRE(rep.additivityNotes[3].find("9.939912") != std::string::npos);
    REQUIRE(rep.caveat.find("finite-truncation") != std::string::npos);

    REQUIRE_THROWS_AS(tu_scan_power_tower(3.0, 0), DegenerateInput);
    REQUIRE_THROWS_AS(tu_scan_power_tower(3.0, 20, -1), DegenerateInput);
}

TEST_CASE("orthogonal foot angle grows along widening axes",
          "[orbits][foot]") {
    const FootAngle m2 =
        orthogonal_foot_angle(Geodesic(BoundaryPoint(0.5), BoundaryPoint(2.0)));
    REQUIRE(m2.beta == -1.0);
    REQUIRE(m2.theta == Catch::Approx(0.5 * kPi).epsilon(1e-14));

    const FootAngle m3 = orthogonal_foot_angle(
        Geodesic(BoundaryPoint(1.0 / 3.0), BoundaryPoint(3.0)));
    REQUIRE(m3.beta == -9.0);
    REQUIRE(m3.theta == Catch::Approx(2.366399280279432).epsilon(1e-14));

    double prev = 0.0;
    for (int m = 2; m <= 50; ++m) {
        const FootAngle fa = orthogonal_foot_angle(
            Geodesic(BoundaryPoint(1.0 / m), BoundaryPoint(double(m))));
        REQUIRE(fa.theta > prev);
        REQUIRE(fa.foot.e1().value() == fa.beta);
        REQUIRE(fa.foot.e2().value() == 0.5 * m);
        prev = fa.theta;
    }
    const FootAngle m50 = orthogonal_foot_angle(
        Geodesic(BoundaryPoint(0.02), BoundaryPoint(50.0)));
    REQUIRE(m50.beta == -62425.0);
    REQUIRE(m50.theta == Catch::Approx(3.1015739736324437).epsilon(1e-14));
    REQUIRE(m50.theta > 3.0);

    REQUIRE_THROWS_AS(orthogonal_foot_angle(Geodesic(
                          BoundaryPoint(1.0), BoundaryPoint::infinity())),
                      DegenerateInput);
    REQUIRE_THROWS_AS(orthogonal_foot_angle(Geodesic(BoundaryPoint(-1.0),
                                                     BoundaryPoint(2.0))),
                      DegenerateInput);
    REQUIRE_THROWS_AS(orthogonal_foot_angle(Geodesic(BoundaryPoint(1.0),
                                                     BoundaryPoint(2.0))),
                      DegenerateFoot);
    REQUIRE_THROWS_AS(orthogonal_foot_angle(Geodesic(BoundaryPoint(1.0),
                                                     BoundaryPoint(2.5))),
                      NotIntersecting);
}

TEST_CASE("boundary-orbit census of the twisted family", "[orbits][census]") {
    const GroupTruncation g = build_twisted_delta({3.0, 40, false});

    const LimitPointReport r1 = limit_point_diagnostic(g, 1);
    REQUIRE(r1.supIm == 1.0);  // nothing climbs above the basepoint
    REQUIRE(r1.orbitCount == 81);
    REQUIRE(r1.strips.size() == 42);
    REQUIRE(r1.escapeEvidence ==
            Catch::Approx(2.7200830941290674e24).epsilon(1e-12));
    REQUIRE(r1.wordRadius == 1);

    const LimitPointReport r2 = limit_point_diagnostic(g, 2);
    REQUIRE(r2.supIm == 1.0);
    REQUIRE(r2.orbitCount == 6401);
    REQUIRE(r2.strips.size() == 148);
    REQUIRE(r2.escapeEvidence ==
            Catch::Approx(2.7200830941290674e24).epsilon(1e-10));

    const LimitPointReport r3 = limit_point_diagnostic(g, 3);
    REQUIRE(r3.supIm == 1.0);
    REQUIRE(r3.orbitCount == 505681);
    REQUIRE(r3.strips.size() == 244);
    REQUIRE(r3.escapeEvidence ==
            Catch::Approx(2.7200830941290674e24).epsilon(1e-10));

    std::uint64_t total = 0;
    for (const StripCensus& s : r3.strips) {
        REQUIRE(s.lo == std::exp2(double(s.octave)));
        REQUIRE(s.hi == 2.0 * s.lo);
        total += s.count;
    }
    REQUIRE(total == r3.orbitCount);
}
