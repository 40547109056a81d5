#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "flutelab/moebius.hpp"
#include "oracles.hpp"

using namespace flutelab;

namespace {
MoebiusTransform dilation_e() {
    const double e = std::exp(1.0);
    return MoebiusTransform::unimodular(e, 0.0, 0.0, 1.0 / e);
}
}  // namespace

TEST_CASE("construction normalizes scale and sign", "[moebius][core]") {
    const MoebiusTransform m(2.0, 0.0, 0.0, 0.5);
    REQUIRE(m.a() == 1.0);
    REQUIRE(m.b() == 0.0);
    REQUIRE(m.c() == 0.0);
    REQUIRE(m.d() == 0.25);
    REQUIRE(m.log_scale() == Catch::Approx(std::log(2.0)).epsilon(1e-15));

    const auto coeffs = m.unit_det_coeffs();
    REQUIRE(coeffs[0] == Catch::Approx(2.0).epsilon(1e-15));
    REQUIRE(coeffs[3] == Catch::Approx(0.5).epsilon(1e-15));

    // A global sign change is the same isometry and the same stored matrix.
    const MoebiusTransform n(-2.0, 0.0, 0.0, -0.5);
    REQUIRE(n.a() == 1.0);
    REQUIRE(same_transform(m, n));

    REQUIRE_THROWS_AS(MoebiusTransform(1.0, 0.0, 0.0, -1.0), DegenerateInput);
    REQUIRE_THROWS_AS(MoebiusTransform(1.0, 2.0, 2.0, 4.0), DegenerateInput);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(MoebiusTransform::with_known_log_det(1, 0, 0, 1, nan),
                      DegenerateInput);
}

TEST_CASE("composition acts as the matrix product", "[moebius][core]") {
    auto rg = oracle::rng(31);
    const MoebiusTransform id = MoebiusTransform::identity();
    for (int k = 0; k < 200; ++k) {
        const MoebiusTransform m = oracle::random_hyperbolic(rg);
        const MoebiusTransform n = oracle::random_hyperbolic(rg);
        const MoebiusTransform mn = compose(m, n);
        const PlanePoint z = oracle::random_point(rg);
        const PlanePoint via = m(n(z));
        const PlanePoint direct = mn(z);
        // relative per coordinate: the hyperbolic metric divides by the
        // image height, which legitimately amplifies absolute error
        REQUIRE(std::abs(via.x - direct.x) <=
                1e-10 * std::max(1.0, std::abs(direct.x)));
        REQUIRE(std::abs(via.y - direct.y) <= 1e-10 * direct.y);

        const BoundaryPoint t = oracle::random_boundary(rg);
        if (!mn(t).is_infinity() && !m(n(t)).is_infinity())
            REQUIRE(chordal(mn(t), m(n(t))) <= 1e-9);

        REQUIRE(same_transform(compose(m, id), m, 1e-12));
        REQUIRE(same_transform(compose(id, m), m, 1e-12));
        REQUIRE(same_transform(compose(m, invert(m)), id, 1e-10));
        const PlanePoint back = invert(m)(m(z));
        REQUIRE(dist(back, z) <= 1e-9);
    }
}

TEST_CASE("associativity within tolerance", "[moebius][core]") {
    auto rg = oracle::rng(32);
    for (int k = 0; k < 100; ++k) {
        const MoebiusTransform a = oracle::random_hyperbolic(rg);
        const MoebiusTransform b = oracle::random_hyperbolic(rg);
        const MoebiusTransform c = oracle::random_hyperbolic(rg);
        REQUIRE(same_transform(compose(compose(a, b), c),
                               compose(a, compose(b, c)), 1e-10));
    }
}

TEST_CASE("boundary action with poles", "[moebius][boundary]") {
    const MoebiusTransform shift = MoebiusTransform::unimodular(1, 1, 0, 1);
    REQUIRE(shift(BoundaryPoint(2.0)).value() == 3.0);
    REQUIRE(shift(BoundaryPoint::infinity()).is_infinity());

    const MoebiusTransform inv = MoebiusTransform::unimodular(0, -1, 1, 0);
    REQUIRE(inv(BoundaryPoint(0.0)).is_infinity());
    REQUIRE(inv(BoundaryPoint::infinity()).value() == 0.0);
    REQUIRE(inv(BoundaryPoint(1.0)).value() == -1.0);
    REQUIRE(inv(PlanePoint(0.0, 1.0)).y == 1.0);  // z -> -1/z fixes i
}

TEST_CASE("huge group elements stay usable through the log scale",
          "[moebius][scale]") {
    MoebiusTransform m = dilation_e();
    for (int k = 0; k < 7; ++k) m = compose(m, m);  // dilation by e^128
    // The boundary action never needs the scale.
    REQUIRE(m(BoundaryPoint(0.0)).value() == 0.0);
    REQUIRE(m(BoundaryPoint::infinity()).is_infinity());
    for (int k = 0; k < 3; ++k) m = compose(m, m);  // dilation by e^1024
    REQUIRE(m.log_scale() == Catch::Approx(1024.0).margin(1e-9));
    REQUIRE(log_abs_trace(m) == Catch::Approx(1024.0).margin(1e-9));
    REQUIRE(classify(m) == IsometryClass::Hyperbolic);
    REQUIRE(translation_length(m) == Catch::Approx(2048.0).margin(1e-6));
    REQUIRE_THROWS_AS(m.unit_det_coeffs(), DegenerateInput);
    // The interior image's height underflows past double range.
    REQUIRE_THROWS_AS(m(PlanePoint(0.0, 1.0)), DegenerateInput);
}

TEST_CASE("determinant drift stays negligible over long products",
          "[moebius][scale]") {
    REQUIRE(log_det_drift(MoebiusTransform::identity()) == 0.0);
    const double theta = 0.1;
    const MoebiusTransform rot = MoebiusTransform::unimodular(
        std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta));
    MoebiusTransform chain = MoebiusTransform::identity();
    for (int k = 0; k < 64; ++k) chain = compose(chain, rot);
    REQUIRE(log_det_drift(chain) <= 1e-12);

    // Mixed chains: the drift stays clean while the scale keeps the stored
    // determinant above the cancellation floor, and once the scale is far
    // past it the diagnostic saturates loudly instead of under-reporting.
    auto rg = oracle::rng(33);
    MoebiusTransform mixed = MoebiusTransform::identity();
    int inDomain = 0;
    for (int k = 0; k < 64; ++k) {
        mixed = compose(mixed, oracle::random_hyperbolic(rg));
        if (std::abs(mixed.log_scale()) < 6.0) {
            REQUIRE(log_det_drift(mixed) <= 1e-10);
            ++inDomain;
        }
    }
    REQUIRE(inDomain >= 2);
    REQUIRE(std::abs(mixed.log_scale()) > 40.0);
    REQUIRE(log_det_drift(mixed) > 1.0);  // saturated, possibly infinite
}

TEST_CASE("classification of the four isometry classes", "[moebius][classify]") {
    REQUIRE(classify(MoebiusTransform::identity()) == IsometryClass::Identity);
    REQUIRE(classify(MoebiusTransform::unimodular(1, 1, 0, 1)) ==
            IsometryClass::Parabolic);
    REQUIRE(classify(MoebiusTransform::unimodular(1, 0, 1, 1)) ==
            IsometryClass::Parabolic);
    const double th = 0.3;
    const MoebiusTransform rot = MoebiusTransform::unimodular(
        std::cos(th), -std::sin(th), std::sin(th), std::cos(th));
    REQUIRE(classify(rot) == IsometryClass::Elliptic);
    REQUIRE(classify(dilation_e()) == IsometryClass::Hyperbolic);
    // Near-identity noise below tolerance still reads as the identity.
    REQUIRE(classify(MoebiusTransform::unimodular(1.0, 1e-12, 0.0, 1.0)) ==
            IsometryClass::Identity);
}

TEST_CASE("translation length of a dilation", "[moebius][classify]") {
    REQUIRE(translation_length(dilation_e()) ==
            Catch::Approx(2.0).margin(1e-14));
    REQUIRE(translation_length(MoebiusTransform::unimodular(1, 1, 0, 1)) ==
            0.0);
    REQUIRE(translation_length(MoebiusTransform::identity()) == 0.0);
    const MoebiusTransform rot = MoebiusTransform::unimodular(
        std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3));
    REQUIRE_THROWS_AS(translation_length(rot), EllipticNoLength);

    // Conjugation preserves the length.
    auto rg = oracle::rng(34);
    for (int k = 0; k < 100; ++k) {
        const MoebiusTransform m = oracle::random_hyperbolic(rg);
        const MoebiusTransform g = oracle::random_hyperbolic(rg);
        const MoebiusTransform conj = compose(g, compose(m, invert(g)));
        REQUIRE(translation_length(conj) ==
                Catch::Approx(translation_length(m)).margin(1e-8));
    }
}

TEST_CASE("fixed points are ordered repelling then attracting",
          "[moebius][classify]") {
    const auto [rep, att] = fixed_points(dilation_e());
    REQUIRE(rep.value() == 0.0);
    REQUIRE(att.is_infinity());

    const auto [p1, p2] =
        fixed_points(MoebiusTransform::unimodular(1, 1, 0, 1));
    REQUIRE(p1.is_infinity());
    REQUIRE(p2.is_infinity());

    // Conjugate the dilation so its axis runs from -1 to 3.
    const MoebiusTransform frame =
        MoebiusTransform::boundary_frame(BoundaryPoint(-1.0),
                                         BoundaryPoint(3.0));
    const MoebiusTransform m =
        compose(invert(frame), compose(dilation_e(), frame));
    const auto [r2, a2] = fixed_points(m);
    REQUIRE(r2.value() == Catch::Approx(-1.0).margin(1e-9));
    REQUIRE(a2.value() == Catch::Approx(3.0).margin(1e-9));
    const auto [r3, a3] = fixed_points(invert(m));
    REQUIRE(r3.value() == Catch::Approx(3.0).margin(1e-9));
    REQUIRE(a3.value() == Catch::Approx(-1.0).margin(1e-9));

    REQUIRE_THROWS_AS(fixed_points(MoebiusTransform::identity()),
                      DegenerateInput);
    const MoebiusTransform rot = MoebiusTransform::unimodular(
        std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3));
    REQUIRE_THROWS_AS(fixed_points(rot), EllipticFixedPointsComplex);
}

TEST_CASE("log |trace| handles traceless and huge elements",
          "[moebius][classify]") {
    const MoebiusTransform quarter = MoebiusTransform::unimodular(0, -1, 1, 0);
    REQUIRE(std::isinf(log_abs_trace(quarter)));
    REQUIRE(log_abs_trace(quarter) < 0.0);
    const double e = std::exp(1.0);
    REQUIRE(log_abs_trace(dilation_e()) ==
            Catch::Approx(std::log(e + 1.0 / e)).epsilon(1e-14));
}

TEST_CASE("boundary frames send the requested points", "[moebius][frame]") {
    const BoundaryPoint inf = BoundaryPoint::infinity();
    struct Case { BoundaryPoint z0, zi; };
    const Case cases[] = {{BoundaryPoint(-1.0), BoundaryPoint(3.0)},
                          {BoundaryPoint(3.0), BoundaryPoint(-1.0)},
                          {inf, BoundaryPoint(2.0)},
                          {BoundaryPoint(2.0), inf}};
    for (const Case& cs : cases) {
        const MoebiusTransform f =
            MoebiusTransform::boundary_frame(cs.z0, cs.zi);
        if (f(cs.z0).is_infinity()) {
            FAIL("to_zero mapped to infinity");
        } else {
            REQUIRE(f(cs.z0).value() == Catch::Approx(0.0).margin(1e-12));
        }
        REQUIRE(f(cs.zi).is_infinity());
    }
    REQUIRE_THROWS_AS(MoebiusTransform::boundary_frame(inf, inf),
                      DegenerateInput);
}

TEST_CASE("reflections are involutions", "[moebius][reflection]") {
    auto rg = oracle::rng(35);
    const Reflection inUnit =
        Reflection::in_circle(EuclideanCircle(0.0, 1.0));
    REQUIRE(inUnit(PlanePoint(0.0, 2.0)).y == 0.5);
    REQUIRE(inUnit(PlanePoint(0.0, 1.0)).y == 1.0);  // mirror point fixed

    for (int k = 0; k < 200; ++k) {
        const PlanePoint z = oracle::random_point(rg);
        const Reflection rv =
            Reflection::in_vertical_line(oracle::uniform(rg, -3.0, 3.0));
        const PlanePoint zv = rv(rv(z));
        REQUIRE(zv.x == Catch::Approx(z.x).margin(1e-12));
        REQUIRE(zv.y == z.y);

        const EuclideanCircle mirror(oracle::uniform(rg, -3.0, 3.0),
                                     std::exp(oracle::uniform(rg, -1.0, 1.5)));
        const Reflection rc = Reflection::in_circle(mirror);
        const PlanePoint zc = rc(rc(z));
        REQUIRE(dist(zc, z) <= 1e-10);

        const BoundaryPoint t = oracle::random_boundary(rg);
        const BoundaryPoint tc = rc(rc(t));
        if (!tc.is_infinity())
            REQUIRE(chordal(tc, t) <= 1e-9);
    }

    // in_geodesic dispatches on the carrier.
    const Reflection g1 = Reflection::in_geodesic(
        Geodesic(BoundaryPoint(2.0), BoundaryPoint::infinity()));
    REQUIRE(g1.is_vertical());
    REQUIRE(g1.mirror_x() == 2.0);
    REQUIRE_THROWS_AS(g1.mirror_radius(), DegenerateInput);
    const Reflection g2 = Reflection::in_geodesic(
        Geodesic(BoundaryPoint(-1.0), BoundaryPoint(1.0)));
    REQUIRE_FALSE(g2.is_vertical());
    REQUIRE(g2.mirror_radius() == 1.0);
}

TEST_CASE("reflection of circles", "[moebius][reflection]") {
    const Reflection inUnit =
        Reflection::in_circle(EuclideanCircle(0.0, 1.0));
    const EuclideanCircle img = inUnit(EuclideanCircle(3.0, 1.0));
    REQUIRE(img.center == 3.0 / 8.0);
    REQUIRE(img.radius == 1.0 / 8.0);
    const EuclideanCircle back = inUnit(img);
    REQUIRE(back.center == Catch::Approx(3.0).margin(1e-12));
    REQUIRE(back.radius == Catch::Approx(1.0).margin(1e-12));
    // A circle through the inversion center has a line as image.
    REQUIRE_THROWS_AS(inUnit(EuclideanCircle(1.0, 1.0)), DegenerateImage);

    const Reflection rv = Reflection::in_vertical_line(2.0);
    const EuclideanCircle shifted = rv(EuclideanCircle(3.0, 1.0));
    REQUIRE(shifted.center == 1.0);
    REQUIRE(shifted.radius == 1.0);
}

TEST_CASE("bisector of a dilation at i", "[moebius][bisector]") {
    const MoebiusTransform m = MoebiusTransform::unimodular(2, 0, 0, 0.5);
    const PlanePoint i(0.0, 1.0);
    REQUIRE(m(i).x == 0.0);
    REQUIRE(m(i).y == Catch::Approx(4.0).epsilon(1e-15));

    const BisectorHalfplane half = bisector_halfplane(i, m);
    REQUIRE(half.boundary.center == 0.0);
    REQUIRE(half.boundary.radius == 2.0);
    REQUIRE(half.classify(PlanePoint(0.0, 2.0)) == Region::Boundary);
    REQUIRE(half.classify(PlanePoint(1.2, 1.6)) == Region::Boundary);
    REQUIRE(half.classify(PlanePoint(0.0, 3.0)) == Region::Outside);
    REQUIRE(half.classify(PlanePoint(0.0, 0.5)) == Region::Inside);

    REQUIRE_THROWS_AS(bisector_halfplane(i, MoebiusTransform::identity()),
                      FixedBasepoint);
    // Rotation about i fixes the basepoint too.
    const MoebiusTransform rot = MoebiusTransform::unimodular(
        std::cos(0.4), -std::sin(0.4), std::sin(0.4), std::cos(0.4));
    REQUIRE_THROWS_AS(bisector_halfplane(i, rot), FixedBasepoint);
    // A horizontal translation gives an equal-height pair.
    REQUIRE_THROWS_AS(
        bisector_halfplane(i, MoebiusTransform::unimodular(1, 1, 0, 1)),
        DegenerateImage);
}

TEST_CASE("bisector verdicts are scale-invariant", "[moebius][bisector]") {
    // Conjugating by a big dilation keeps verdicts consistent: the boundary
    // circle blows up but classification compares hyperbolic distances.
    const MoebiusTransform big = MoebiusTransform::unimodular(1e8, 0, 0, 1e-8);
    const MoebiusTransform m = MoebiusTransform::unimodular(2, 0, 0, 0.5);
    const MoebiusTransform conj = compose(big, compose(m, invert(big)));
    const PlanePoint p = big(PlanePoint(0.0, 1.0));
    const BisectorHalfplane half = bisector_halfplane(p, conj);
    REQUIRE(half.classify(big(PlanePoint(0.0, 2.0))) == Region::Boundary);
    REQUIRE(half.classify(big(PlanePoint(0.0, 3.0))) == Region::Outside);
    REQUIRE(half.classify(big(PlanePoint(0.0, 0.5))) == Region::Inside);
}
