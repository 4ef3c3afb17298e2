#include "dynjt/pruning.hpp"

#include <stdexcept>

namespace dynjt {

void check_query(const BeliefNetwork& net, const Query& q) {
    const int n = net.num_vars();
    for (const auto& [var, state] : q.evidence) {
        if (var < 0 || var >= n) throw std::invalid_argument("evidence variable id out of range");
        if (state < 0 || state >= net.cardinality(var))
            throw std::invalid_argument("evidence state out of range for '" + net.variable(var).name + "'");
    }
    for (VarId t : q.targets)
        if (t < 0 || t >= n) throw std::invalid_argument("target variable id out of range");
}

int evidence_state(const Query& q, VarId i) {
    const auto it = q.evidence.find(i);
    return it == q.evidence.end() ? -1 : it->second;
}

PrunedState prune_dag(const BeliefNetwork& net, const Query& q) {
    const int n = net.num_vars();
    PrunedState out = PrunedState::none(n);
    std::vector<char> keep(static_cast<std::size_t>(n), 0);
    for (const auto& [var, state] : q.evidence) keep[static_cast<std::size_t>(var)] = 1;
    for (VarId t : q.targets) keep[static_cast<std::size_t>(t)] = 1;

    std::vector<int> liveChildren(static_cast<std::size_t>(n));
    for (VarId i = 0; i < n; ++i)
        liveChildren[static_cast<std::size_t>(i)] = static_cast<int>(net.children(i).size());

    std::vector<VarId> stack;
    for (VarId i = 0; i < n; ++i)
        if (liveChildren[static_cast<std::size_t>(i)] == 0 && !keep[static_cast<std::size_t>(i)])
            stack.push_back(i);
    while (!stack.empty()) {
        const VarId v = stack.back();
        stack.pop_back();
        if (out.flags[static_cast<std::size_t>(v)]) continue;
        out.flags[static_cast<std::size_t>(v)] = 1;
        for (VarId p : net.cpt(v).parents)
            if (--liveChildren[static_cast<std::size_t>(p)] == 0 && !keep[static_cast<std::size_t>(p)] &&
                !out.flags[static_cast<std::size_t>(p)])
                stack.push_back(p);
    }
    for (VarId i = 0; i < n; ++i)
        if (out.flags[static_cast<std::size_t>(i)]) out.nodes.push_back(i);
    return out;
}

ReconfiguredJointree reconfigure(const BasicJointree& t, const PrunedState& pruned) {
    ReconfiguredJointree r;
    r.pruned = pruned;
    r.separators = separators_fast(t, pruned.flags);
    r.cliques = cliques(t, r.separators, pruned.flags);
    return r;
}

}  // namespace dynjt
