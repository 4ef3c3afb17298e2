#pragma once

// shared fixtures and comparison helpers for the test binaries

#include <cmath>
#include <string>
#include <vector>

#include "dynjt/benchgen.hpp"
#include "dynjt/network.hpp"
#include "dynjt/potential.hpp"
#include "dynjt/pruning.hpp"
#include "dynjt/rng.hpp"

namespace testutil {

using namespace dynjt;

// Four binary nodes: A -> B, A -> C, {B, C} -> D.
inline std::string diamond_text() {
    return "# four-node diamond\n"
           "var A 2\n"
           "var B 2\n"
           "var C 2\n"
           "var D 2\n"
           "cpt A [] : 0.3 0.7\n"
           "cpt B [A] : 0.2 0.8 0.6 0.4\n"
           "cpt C [A] : 0.9 0.1 0.25 0.75\n"
           "cpt D [B C] : 0.5 0.5 0.7 0.3 0.1 0.9 0.4 0.6\n";
}

inline BeliefNetwork diamond_network() { return parse_network(diamond_text()); }

// Four binary nodes: A -> B, B -> C, A -> D, C -> D. With the chain
// A-B-C-D as spanning tree the dropped edge is A -> D.
inline BeliefNetwork square_network() {
    return parse_network(
        "var A 2\n"
        "var B 2\n"
        "var C 2\n"
        "var D 2\n"
        "cpt A [] : 0.6 0.4\n"
        "cpt B [A] : 0.1 0.9 0.8 0.2\n"
        "cpt C [B] : 0.35 0.65 0.55 0.45\n"
        "cpt D [A C] : 0.2 0.8 0.7 0.3 0.45 0.55 0.9 0.1\n");
}

// X0 -> X1 -> ... -> X(n-1), binary.
inline BeliefNetwork chain_network(int n) {
    std::string text;
    for (int i = 0; i < n; ++i) text += "var X" + std::to_string(i) + " 2\n";
    text += "cpt X0 [] : 0.4 0.6\n";
    for (int i = 1; i < n; ++i)
        text += "cpt X" + std::to_string(i) + " [X" + std::to_string(i - 1) + "] : 0.3 0.7 0.8 0.2\n";
    return parse_network(text);
}

// root R with leaves L1..Lk
inline BeliefNetwork star_network(int leaves) {
    std::string text = "var R 2\n";
    for (int i = 1; i <= leaves; ++i) text += "var L" + std::to_string(i) + " 2\n";
    text += "cpt R [] : 0.25 0.75\n";
    for (int i = 1; i <= leaves; ++i)
        text += "cpt L" + std::to_string(i) + " [R] : 0.15 0.85 0.65 0.35\n";
    return parse_network(text);
}

// largest |a - b| over aligned cells; the potentials must cover the same
// variable set but may order their scopes differently
inline double max_abs_diff(const Potential& a, const Potential& b) {
    if (a.scope().size() != b.scope().size()) return 1e300;
    std::vector<std::size_t> bStride(a.scope().size(), 0);
    {
        std::vector<std::size_t> own(b.scope().size(), 1);
        for (int k = static_cast<int>(b.scope().size()) - 2; k >= 0; --k)
            own[static_cast<std::size_t>(k)] =
                own[static_cast<std::size_t>(k) + 1] *
                static_cast<std::size_t>(b.cards()[static_cast<std::size_t>(k) + 1]);
        for (std::size_t i = 0; i < a.scope().size(); ++i) {
            const int pos = b.position_of(a.scope()[i]);
            if (pos < 0) return 1e300;
            bStride[i] = own[static_cast<std::size_t>(pos)];
        }
    }
    double worst = 0.0;
    for (std::size_t cell = 0; cell < a.size(); ++cell) {
        std::size_t rem = cell, bIdx = 0;
        for (int k = static_cast<int>(a.cards().size()) - 1; k >= 0; --k) {
            const auto ku = static_cast<std::size_t>(k);
            bIdx += (rem % static_cast<std::size_t>(a.cards()[ku])) * bStride[ku];
            rem /= static_cast<std::size_t>(a.cards()[ku]);
        }
        worst = std::max(worst, std::fabs(a.values()[cell] - b.values()[bIdx]));
    }
    return worst;
}

// random query: each node is evidence with probability pEvidence and a target
// with probability pTarget; at least one target always
inline Query random_query(const BeliefNetwork& net, SplitMix64& rng, double pEvidence = 0.2,
                          double pTarget = 0.2) {
    Query q;
    for (VarId i = 0; i < net.num_vars(); ++i) {
        if (rng.next_double() < pEvidence) q.evidence[i] = rng.next_int(net.cardinality(i));
        if (rng.next_double() < pTarget) q.targets.push_back(i);
    }
    if (q.targets.empty()) q.targets.push_back(rng.next_int(net.num_vars()));
    canonicalize(q.targets);
    return q;
}

inline BeliefNetwork random_network(int nodes, int width, int cardinality, std::uint64_t seed) {
    GenSpec spec;
    spec.node_count = nodes;
    spec.width = width;
    spec.cardinality = cardinality;
    spec.seed = seed;
    return generate_network(spec);
}

}  // namespace testutil
