#include "dynjt/benchgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dynjt/rng.hpp"

namespace dynjt {

BeliefNetwork generate_network(const GenSpec& spec) {
    if (spec.node_count <= 4) throw std::invalid_argument("node count must exceed 4");
    if (spec.width < 1) throw std::invalid_argument("width must be at least 1");
    if (spec.cardinality < 2) throw std::invalid_argument("cardinality must be at least 2");
    double distSum = 0.0;
    for (double p : spec.family_dist) {
        if (p < 0.0) throw std::invalid_argument("family distribution entries must be nonnegative");
        distSum += p;
    }
    if (std::fabs(distSum - 1.0) > 1e-9) throw std::invalid_argument("family distribution must sum to 1");

    const int n = spec.node_count;
    const int card = spec.cardinality;
    std::vector<Variable> vars;
    vars.reserve(static_cast<std::size_t>(n));
    std::vector<Cpt> cpts(static_cast<std::size_t>(n));

    const SplitMix64 base(spec.seed);
    for (VarId t = 0; t < n; ++t) {
        vars.push_back({t, "n" + std::to_string(t), card});
        SplitMix64 rng = base.split(static_cast<std::uint64_t>(t));

        const double u = rng.next_double();
        int drawn = 0;
        double cum = 0.0;
        for (std::size_t k = 0; k < spec.family_dist.size(); ++k) {
            cum += spec.family_dist[k];
            if (u < cum) {
                drawn = static_cast<int>(k);
                break;
            }
        }

        std::vector<VarId> pool;
        for (VarId p = std::max(0, t - spec.width); p < t; ++p) pool.push_back(p);
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(drawn), pool.size());
        std::vector<VarId> parents = sample_without_replacement(std::move(pool), k, rng);
        std::sort(parents.begin(), parents.end());

        std::size_t rows = 1;
        for (std::size_t i = 0; i < parents.size(); ++i) rows *= static_cast<std::size_t>(card);
        std::vector<double> table(rows * static_cast<std::size_t>(card));
        for (std::size_t r = 0; r < rows; ++r) {
            double sum = 0.0;
            for (int s = 0; s < card; ++s) {
                const double x = rng.next_double();
                table[r * static_cast<std::size_t>(card) + static_cast<std::size_t>(s)] = x;
                sum += x;
            }
            if (sum <= 0.0) {  // vanishing odds, but keep rows well-formed
                for (int s = 0; s < card; ++s)
                    table[r * static_cast<std::size_t>(card) + static_cast<std::size_t>(s)] = 1.0 / card;
            } else {
                for (int s = 0; s < card; ++s)
                    table[r * static_cast<std::size_t>(card) + static_cast<std::size_t>(s)] /= sum;
            }
        }
        cpts[static_cast<std::size_t>(t)] = {t, std::move(parents), std::move(table)};
    }
    return BeliefNetwork(std::move(vars), std::move(cpts));
}

}  // namespace dynjt
