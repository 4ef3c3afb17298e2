#pragma once

#include <vector>

#include "dynjt/jointree.hpp"
#include "dynjt/network.hpp"

namespace dynjt {

// Evidence instantiation plus the targets whose posteriors are wanted. The
// two sets may overlap.
struct Query {
    Instantiation evidence;
    IdSet targets;
};

// throws std::invalid_argument on out-of-range ids or states
void check_query(const BeliefNetwork& net, const Query& q);

int evidence_state(const Query& q, VarId i);  // -1 when unobserved

struct PrunedState {
    std::vector<char> flags;  // 1 = pruned
    IdSet nodes;              // sorted pruned ids

    static PrunedState none(int n) { return {std::vector<char>(static_cast<std::size_t>(n), 0), {}}; }
    bool is_pruned(VarId i) const { return flags[static_cast<std::size_t>(i)] != 0; }
};

// Fixpoint of removing leaf nodes outside evidence-union-targets; linear in
// the network size.
PrunedState prune_dag(const BeliefNetwork& net, const Query& q);

// Tree structure untouched; hypernodes of pruned nodes emptied, separators
// and cliques rederived.
struct ReconfiguredJointree {
    PrunedState pruned;
    SeparatorMap separators;
    CliqueMap cliques;
};

ReconfiguredJointree reconfigure(const BasicJointree& t, const PrunedState& pruned);

}  // namespace dynjt
