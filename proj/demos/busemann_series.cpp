// Prints the Busemann levels B(inf, w^{-1} i, i) along the power-tower
// words of the twisted delta-family, one table per tower height, together
// with the analytic target 2 log(delta (delta+1)^k).

#include <cmath>
#include <cstdio>

#include "flutelab/orbits.hpp"

using namespace flutelab;

int main() {
    const double delta = 3.0;
    for (int k = 0; k <= 3; ++k) {
        const WordLimitSeries series =
            busemann_along_words(k, delta, 1, 20);
        std::printf("k = %d, target 2 log(delta (delta+1)^k) = %.12f\n", k,
                    series.target);
        for (std::size_t j = 0; j < series.n.size(); ++j) {
            std::printf("  n = %2d  B = %.12f  |B - target| = %.3e\n",
                        series.n[j], series.B[j],
                        std::abs(series.B[j] - series.target));
        }
        std::printf("  tail %.12f, |error| %.3e%s\n\n", series.tail,
                    series.absError,
                    series.nonConvergent ? "  (non-convergent)" : "");
    }
    return 0;
}
