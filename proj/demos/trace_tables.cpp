// Builds both explicit families and prints their construction tables:
// the untwisted flute's circle data, traces, and translation lengths, and
// the twisted delta-family's index sequence and coefficients.

#include <cstdio>

#include "flutelab/flute.hpp"

using namespace flutelab;

int main() {
    const GroupTruncation flute = build_untwisted({});
    std::printf("untwisted flute, default schedule, N = %zu\n",
                flute.generators.size());
    std::printf("%3s %14s %14s %14s %14s %14s %14s\n", "n", "X_n", "R_n",
                "X'_n", "K_n", "|trace|", "length");
    for (const ConstructionStep& s : flute.trace()) {
        std::printf("%3d %14.6e %14.6e %14.6e %14.6e %14.6e %14.6f\n", s.n,
                    s.X, s.R, s.Xp, s.K, s.mpTrace, translation_length(s.f));
    }
    std::printf("trace >= 5 from index %d on\n", flute.trace_bound_index());

    const SchottkyReport schottky =
        check_schottky(flute, PlanePoint(0.0, 1.0));
    std::printf("schottky: %s, min margin %.6e at %s vs %s\n\n",
                schottky.pass ? "pass" : "FAIL", schottky.minMargin,
                schottky.minPairA.c_str(), schottky.minPairB.c_str());

    const double delta = 3.0;
    const GroupTruncation twisted = build_twisted_delta({delta, 6, true});
    std::printf("twisted family, delta = %g, N = %zu\n", delta,
                twisted.generators.size());
    std::printf("%3s %12s %14s %14s %14s\n", "n", "p_n", "a", "c", "length");
    const TwistedProvenance& prov = twisted.twisted();
    for (std::size_t k = 0; k < twisted.generators.size(); ++k) {
        const auto u = twisted.generators[k].unit_det_coeffs();
        std::printf("%3zu %12.0f %14.10f %14.10f %14.6f\n", k + 1, prov.p[k],
                    u[0], u[2], translation_length(twisted.generators[k]));
    }
    return 0;
}
