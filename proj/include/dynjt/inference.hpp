#pragma once

#include <map>
#include <memory>
#include <vector>

#include "dynjt/jointree.hpp"
#include "dynjt/network.hpp"
#include "dynjt/potential.hpp"
#include "dynjt/pruning.hpp"

namespace dynjt {

struct EngineOptions {
    bool reconfigure = true;  // false = static-jointree baseline
    bool cache = true;        // cross-query message reuse
    bool timing = true;       // capture wall-clock phase timings
};

enum class CacheAction { Reuse, Marginalize, Recompute };

struct MessageEvent {
    VarId from = 0;
    VarId to = 0;
    CacheAction action = CacheAction::Recompute;
};

struct QueryStats {
    std::uint64_t additions = 0;
    std::uint64_t multiplications = 0;
    int messages_computed = 0;
    int messages_reused = 0;
    int messages_marginalized = 0;
    int max_separator_size = 0;
    std::int64_t reconfig_micros = 0;
    std::int64_t inference_micros = 0;
};

struct QueryResult {
    std::map<VarId, Potential> posteriors;  // per target, scope {target}
    double evidence_probability = 1.0;
    QueryStats stats;
};

// Answers query streams over a fixed basic jointree. With reconfiguration on,
// each query prunes the dag, empties the pruned hypernodes and rederives
// separators; with it off the engine is the static baseline. Messages are
// computed demand-driven (each directed edge at most once per query) and kept
// across queries: a stored message whose source side saw no evidence or
// pruned-flag change is reused outright when its separator is unchanged, and
// summed down to the new separator when that separator shrank.
//
// One engine processes one query at a time; the cache is stateful across
// queries. Independent engines may share the network and tree, which are
// immutable.
class InferenceEngine {
public:
    InferenceEngine(std::shared_ptr<const BeliefNetwork> net, std::shared_ptr<const BasicJointree> tree,
                    EngineOptions options = {});

    QueryResult answer_query(const Query& q);

    // Stepwise pieces of answer_query, exposed for inspection and tests.
    void configure_for(const Query& q);
    std::pair<Potential, double> node_distribution(VarId target);
    const Potential& local_potential(VarId i);

    // Nodes whose local potential differs between the two queries: an
    // evidence change or (with reconfiguration on) a pruned-flag flip.
    IdSet compute_dirty_set(const Query& q_old, const Query& q_new) const;

    // Cache-independent recomputation under the current configuration; the
    // verification oracle for reuse and marginalized reuse.
    Potential recompute_message_fresh(VarId from, VarId to) const;

    // The stored message for a directed edge, or nullptr when the slot is
    // empty; inspection only.
    const Potential* cached_message(VarId from, VarId to) const;

    const SeparatorMap& current_separators() const { return seps_; }
    const CliqueMap& current_cliques() const { return cliques_; }
    const PrunedState& current_pruned() const { return pruned_; }
    const std::vector<MessageEvent>& last_events() const { return events_; }
    const OpCounter& counter() const { return counter_; }
    std::uint64_t epoch() const { return epoch_; }
    const BasicJointree& tree() const { return *tree_; }
    const BeliefNetwork& network() const { return *net_; }
    const EngineOptions& options() const { return opt_; }

private:
    struct LocalSlot {
        Potential pot;
        int ev = -2;
        bool pruned = false;
        bool built = false;
    };
    struct MsgSlot {
        Potential msg;
        IdSet sep;
        std::uint64_t epoch = 0;
        bool present = false;
    };

    int slot_index(VarId from, int edge) const;
    const IdSet& edge_separator(int edge) const { return seps_[static_cast<std::size_t>(edge)]; }
    const Potential& demand_message(VarId from, VarId to);
    Potential clique_product(VarId i, VarId excluded);
    void invalidate_dirty_sides(const Query& q_new, const PrunedState& pruned_new);

    std::shared_ptr<const BeliefNetwork> net_;
    std::shared_ptr<const BasicJointree> tree_;
    EngineOptions opt_;

    OpCounter counter_;
    std::uint64_t epoch_ = 0;
    SeparatorMap seps_;
    CliqueMap cliques_;
    PrunedState pruned_;
    Query query_;
    bool has_query_ = false;

    std::vector<LocalSlot> local_;
    std::vector<MsgSlot> slots_;  // two per tree edge
    std::vector<MessageEvent> events_;
    QueryStats stats_;

    // transition scratch
    std::vector<char> dirty_, down_, up_;
};

}  // namespace dynjt
