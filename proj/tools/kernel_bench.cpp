// Compares the OpenMP factor-table kernels against the serial reference
// kernels over growing table sizes and verifies they agree bit for bit.

#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"

#include "dynjt/potential.hpp"
#include "dynjt/rng.hpp"
#include "dynjt/stopwatch.hpp"

using namespace dynjt;

namespace {

Potential random_potential(int vars, SplitMix64& rng) {
    std::vector<VarId> scope;
    std::vector<int> cards;
    for (int v = 0; v < vars; ++v) {
        scope.push_back(v);
        cards.push_back(2);
    }
    std::vector<double> values(std::size_t{1} << vars);
    for (double& x : values) x = rng.next_double();
    return Potential(scope, cards, values);
}

double time_ms(int reps, const std::function<void()>& fn) {
    const Stopwatch sw(true);
    for (int r = 0; r < reps; ++r) fn();
    return static_cast<double>(sw.micros()) / 1000.0 / reps;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"factor-kernel benchmark: OpenMP vs serial reference"};
    int minExp = 12, maxExp = 22, reps = 5;
    app.add_option("--min-exp", minExp, "smallest table size as a power of two");
    app.add_option("--max-exp", maxExp, "largest table size as a power of two");
    app.add_option("--reps", reps, "repetitions per measurement");
    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (compiled without OpenMP)\n");
#endif
    std::printf("%10s %12s %12s %8s %12s %12s %8s %6s\n", "cells", "mul_omp_ms", "mul_ref_ms", "speedup",
                "marg_omp_ms", "marg_ref_ms", "speedup", "equal");

    SplitMix64 rng(42);
    for (int exp = minExp; exp <= maxExp; exp += 2) {
        // p over vars [0, exp-4), q overlapping the tail and adding 4 more
        Potential p = random_potential(exp - 4, rng);
        std::vector<VarId> qScope;
        std::vector<int> qCards;
        for (int v = exp - 8; v < exp; ++v) {
            qScope.push_back(v);
            qCards.push_back(2);
        }
        std::vector<double> qValues(std::size_t{1} << 8);
        for (double& x : qValues) x = rng.next_double();
        const Potential q(qScope, qCards, std::vector<double>(qValues.begin(), qValues.end()));

        OpCounter c;
        const Potential prodOmp = multiply(p, q, c);
        const Potential prodRef = ref::multiply(p, q, c);
        std::vector<VarId> keep(prodOmp.scope().begin(), prodOmp.scope().begin() + exp / 2);
        const Potential margOmp = marginalize(prodOmp, keep, c);
        const Potential margRef = ref::marginalize(prodOmp, keep, c);
        const bool equal = prodOmp.values() == prodRef.values() && margOmp.values() == margRef.values();

        const double mulOmp = time_ms(reps, [&] { multiply(p, q, c); });
        const double mulRef = time_ms(reps, [&] { ref::multiply(p, q, c); });
        const double margOmpMs = time_ms(reps, [&] { marginalize(prodOmp, keep, c); });
        const double margRefMs = time_ms(reps, [&] { ref::marginalize(prodOmp, keep, c); });

        std::printf("%10zu %12.3f %12.3f %8.2f %12.3f %12.3f %8.2f %6s\n", prodOmp.size(), mulOmp, mulRef,
                    mulRef / mulOmp, margOmpMs, margRefMs, margRefMs / margOmpMs, equal ? "yes" : "NO");
        if (!equal) return 1;
    }
    return 0;
}
