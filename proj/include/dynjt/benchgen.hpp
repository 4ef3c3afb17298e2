#pragma once

#include <array>
#include <cstdint>

#include "dynjt/network.hpp"

namespace dynjt {

// Population parameters for random network generation. familyDist is the
// distribution over parent counts 0..4; width is the sliding window of recent
// predecessors a node may draw parents from, so smaller windows concentrate
// the connectivity.
struct GenSpec {
    int node_count = 50;
    std::array<double, 5> family_dist{0.20, 0.10, 0.25, 0.35, 0.10};
    int width = 5;
    int cardinality = 2;
    std::uint64_t seed = 1;
};

// Deterministic per seed, with an independent stream per node: node t draws a
// parent count from family_dist (clamped to the available pool), picks that
// many distinct parents uniformly from the `width` most recent predecessors,
// and fills each CPT row by normalizing independent uniform(0,1) draws.
BeliefNetwork generate_network(const GenSpec& spec);

}  // namespace dynjt
