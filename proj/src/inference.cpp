#include "dynjt/inference.hpp"

#include <algorithm>
#include <stdexcept>

#include "dynjt/stopwatch.hpp"

namespace dynjt {

InferenceEngine::InferenceEngine(std::shared_ptr<const BeliefNetwork> net,
                                 std::shared_ptr<const BasicJointree> tree, EngineOptions options)
    : net_(std::move(net)), tree_(std::move(tree)), opt_(options) {
    const int n = tree_->n;
    if (n != net_->num_vars()) throw std::invalid_argument("jointree does not match the network");
    pruned_ = PrunedState::none(n);
    seps_ = separators_fast(*tree_, pruned_.flags);
    cliques_ = cliques(*tree_, seps_, pruned_.flags);
    local_.resize(static_cast<std::size_t>(n));
    slots_.resize(tree_->edges.size() * 2);
    dirty_.resize(static_cast<std::size_t>(n));
    down_.resize(static_cast<std::size_t>(n));
    up_.resize(static_cast<std::size_t>(n));
}

int InferenceEngine::slot_index(VarId from, int edge) const {
    return edge * 2 + (tree_->edges[static_cast<std::size_t>(edge)].u == from ? 0 : 1);
}

IdSet InferenceEngine::compute_dirty_set(const Query& q_old, const Query& q_new) const {
    const int n = tree_->n;
    PrunedState po = PrunedState::none(n), pn = PrunedState::none(n);
    if (opt_.reconfigure) {
        po = prune_dag(*net_, q_old);
        pn = prune_dag(*net_, q_new);
    }
    IdSet dirty;
    for (VarId i = 0; i < n; ++i) {
        if (evidence_state(q_old, i) != evidence_state(q_new, i) || po.is_pruned(i) != pn.is_pruned(i))
            dirty.push_back(i);
    }
    return dirty;
}

// Clears every directed-edge slot whose source side contains a node whose
// local potential changes in this transition. Source-side dirtiness for all
// 2(n-1) directed edges comes from one rooted aggregation plus one reroot
// pass.
void InferenceEngine::invalidate_dirty_sides(const Query& q_new, const PrunedState& pruned_new) {
    const int n = tree_->n;
    bool any = false;
    for (VarId i = 0; i < n; ++i) {
        dirty_[static_cast<std::size_t>(i)] =
            (evidence_state(query_, i) != evidence_state(q_new, i) ||
             pruned_.is_pruned(i) != pruned_new.is_pruned(i))
                ? 1
                : 0;
        any = any || dirty_[static_cast<std::size_t>(i)];
    }
    if (!any) return;

    // down[v]: dirtiness within the subtree at v
    for (auto it = tree_->bfs_order.rbegin(); it != tree_->bfs_order.rend(); ++it) {
        const VarId v = *it;
        char d = dirty_[static_cast<std::size_t>(v)];
        for (VarId c : tree_->tree_children[static_cast<std::size_t>(v)])
            d = static_cast<char>(d | down_[static_cast<std::size_t>(c)]);
        down_[static_cast<std::size_t>(v)] = d;
    }
    // up[v]: dirtiness strictly outside the subtree at v
    for (const VarId v : tree_->bfs_order) {
        if (tree_->parent_node[static_cast<std::size_t>(v)] < 0) up_[static_cast<std::size_t>(v)] = 0;
        const auto& ch = tree_->tree_children[static_cast<std::size_t>(v)];
        if (ch.empty()) continue;
        int dirtyChildren = 0;
        for (VarId c : ch) dirtyChildren += down_[static_cast<std::size_t>(c)] ? 1 : 0;
        const char base = static_cast<char>(up_[static_cast<std::size_t>(v)] | dirty_[static_cast<std::size_t>(v)]);
        for (VarId c : ch) {
            const int siblings = dirtyChildren - (down_[static_cast<std::size_t>(c)] ? 1 : 0);
            up_[static_cast<std::size_t>(c)] = static_cast<char>(base | (siblings > 0 ? 1 : 0));
        }
    }

    for (std::size_t e = 0; e < tree_->edges.size(); ++e) {
        const VarId u = tree_->edges[e].u;
        const VarId v = tree_->edges[e].v;
        // child endpoint in the rooting
        const VarId c = tree_->parent_node[static_cast<std::size_t>(u)] == v ? u : v;
        const VarId p = c == u ? v : u;
        // message c -> p draws on c's subtree; p -> c on everything else
        if (down_[static_cast<std::size_t>(c)]) slots_[static_cast<std::size_t>(slot_index(c, static_cast<int>(e)))].present = false;
        if (up_[static_cast<std::size_t>(c)] || dirty_[static_cast<std::size_t>(p)])
            slots_[static_cast<std::size_t>(slot_index(p, static_cast<int>(e)))].present = false;
    }
}

void InferenceEngine::configure_for(const Query& q) {
    check_query(*net_, q);
    const int n = tree_->n;

    stats_ = QueryStats{};
    PrunedState prunedNew = PrunedState::none(n);
    if (opt_.reconfigure) {
        const Stopwatch sw(opt_.timing);
        prunedNew = prune_dag(*net_, q);
        SeparatorMap sepsNew = separators_fast(*tree_, prunedNew.flags);
        cliques_ = cliques(*tree_, sepsNew, prunedNew.flags);
        stats_.reconfig_micros = sw.micros();

        if (!opt_.cache) {
            for (auto& s : slots_) s.present = false;
        } else if (has_query_) {
            invalidate_dirty_sides(q, prunedNew);
        }
        seps_ = std::move(sepsNew);
        pruned_ = std::move(prunedNew);
    } else {
        // static baseline: separators and pruning never change
        if (!opt_.cache) {
            for (auto& s : slots_) s.present = false;
        } else if (has_query_) {
            invalidate_dirty_sides(q, pruned_);
        }
    }

    ++epoch_;
    for (const auto& s : seps_)
        stats_.max_separator_size = std::max(stats_.max_separator_size, static_cast<int>(s.size()));
    events_.clear();
    query_ = q;
    has_query_ = true;
}

const Potential& InferenceEngine::local_potential(VarId i) {
    LocalSlot& s = local_[static_cast<std::size_t>(i)];
    const bool pr = pruned_.is_pruned(i);
    const int ev = pr ? -1 : evidence_state(query_, i);
    if (s.built && s.pruned == pr && s.ev == ev) return s.pot;
    if (pr) {
        s.pot = unit_potential();
    } else {
        s.pot = from_cpt(net_->cpt(i), *net_);
        if (ev >= 0) s.pot = reduce_evidence(s.pot, i, ev, counter_);
    }
    s.built = true;
    s.pruned = pr;
    s.ev = ev;
    return s.pot;
}

namespace {
bool is_unit(const Potential& p) { return p.is_scalar() && p.values()[0] == 1.0; }
}  // namespace

// Product of the local potential and the settled incoming messages, skipping
// the excluded neighbor. Exact unit-scalar factors (pruned regions) are
// identities and contribute no work.
Potential InferenceEngine::clique_product(VarId i, VarId excluded) {
    std::vector<const Potential*> factors;
    const Potential& phi = local_potential(i);
    if (!is_unit(phi)) factors.push_back(&phi);
    for (const auto& [k, ke] : tree_->adj[static_cast<std::size_t>(i)]) {
        if (k == excluded) continue;
        const Potential& m = slots_[static_cast<std::size_t>(slot_index(k, ke))].msg;
        if (!is_unit(m)) factors.push_back(&m);
    }
    if (factors.empty()) return unit_potential();
    Potential pot = *factors[0];
    for (std::size_t f = 1; f < factors.size(); ++f) pot = multiply(pot, *factors[f], counter_);
    return pot;
}

const Potential& InferenceEngine::demand_message(VarId from, VarId to) {
    struct Item {
        VarId i, j;
        bool expanded;
    };
    std::vector<Item> stack{{from, to, false}};
    while (!stack.empty()) {
        const VarId i = stack.back().i;
        const VarId j = stack.back().j;
        const bool expanded = stack.back().expanded;
        const int e = tree_->edge_between(i, j);
        {
            MsgSlot& slot = slots_[static_cast<std::size_t>(slot_index(i, e))];
            if (slot.present && slot.epoch == epoch_) {  // already settled this query
                stack.pop_back();
                continue;
            }
            if (!expanded) {
                if (slot.present) {
                    // cross-query probe: the source side is clean, or the slot
                    // would have been invalidated at the transition
                    const IdSet& sepNow = edge_separator(e);
                    if (slot.sep == sepNow) {
                        slot.epoch = epoch_;
                        ++stats_.messages_reused;
                        events_.push_back({i, j, CacheAction::Reuse});
                        stack.pop_back();
                        continue;
                    }
                    if (sepNow.size() < slot.sep.size() && is_subset(sepNow, slot.sep)) {
                        slot.msg = marginalize(slot.msg, sepNow, counter_);
                        slot.sep = sepNow;
                        slot.epoch = epoch_;
                        ++stats_.messages_marginalized;
                        events_.push_back({i, j, CacheAction::Marginalize});
                        stack.pop_back();
                        continue;
                    }
                    slot.present = false;  // separator grew or crossed: recompute
                }
                stack.back().expanded = true;
                bool waiting = false;
                for (const auto& [k, ke] : tree_->adj[static_cast<std::size_t>(i)]) {
                    if (k == j) continue;
                    const MsgSlot& ks = slots_[static_cast<std::size_t>(slot_index(k, ke))];
                    if (!(ks.present && ks.epoch == epoch_)) {
                        stack.push_back({k, i, false});
                        waiting = true;
                    }
                }
                if (waiting) continue;
            }
        }
        // inputs settled: combine the local potential with every incoming
        // message except the recipient's, then sum down to the separator
        Potential pot = clique_product(i, j);
        MsgSlot& target = slots_[static_cast<std::size_t>(slot_index(i, e))];
        target.msg = marginalize(pot, edge_separator(e), counter_);
        target.sep = edge_separator(e);
        target.epoch = epoch_;
        target.present = true;
        ++stats_.messages_computed;
        events_.push_back({i, j, CacheAction::Recompute});
        stack.pop_back();
    }
    return slots_[static_cast<std::size_t>(slot_index(from, tree_->edge_between(from, to)))].msg;
}

std::pair<Potential, double> InferenceEngine::node_distribution(VarId target) {
    if (target < 0 || target >= tree_->n) throw std::invalid_argument("target id out of range");
    if (pruned_.is_pruned(target)) throw std::invalid_argument("target is pruned under the current query");
    for (const auto& [k, e] : tree_->adj[static_cast<std::size_t>(target)]) (void)demand_message(k, target);
    const Potential pot = clique_product(target, -1);
    const Potential dist = marginalize(pot, {target}, counter_);
    return normalize(dist);
}

QueryResult InferenceEngine::answer_query(const Query& q) {
    const Stopwatch total(opt_.timing);
    const OpCounter before = counter_;
    configure_for(q);
    QueryResult res;
    for (VarId t : q.targets) {
        auto [post, z] = node_distribution(t);
        res.evidence_probability = z;
        res.posteriors.emplace(t, std::move(post));
    }
    stats_.additions = counter_.additions - before.additions;
    stats_.multiplications = counter_.multiplications - before.multiplications;
    stats_.inference_micros = std::max<std::int64_t>(0, total.micros() - stats_.reconfig_micros);
    res.stats = stats_;
    return res;
}

const Potential* InferenceEngine::cached_message(VarId from, VarId to) const {
    const int e = tree_->edge_between(from, to);
    if (e < 0) return nullptr;
    const MsgSlot& slot = slots_[static_cast<std::size_t>(slot_index(from, e))];
    return slot.present ? &slot.msg : nullptr;
}

Potential InferenceEngine::recompute_message_fresh(VarId from, VarId to) const {
    OpCounter scratch;
    auto local = [&](VarId i) -> Potential {
        if (pruned_.is_pruned(i)) return unit_potential();
        Potential p = from_cpt(net_->cpt(i), *net_);
        const int ev = evidence_state(query_, i);
        return ev >= 0 ? reduce_evidence(p, i, ev, scratch) : p;
    };
    // plain recursion; verification runs on desk-scale trees
    auto compute = [&](auto&& self, VarId i, VarId j) -> Potential {
        Potential pot = local(i);
        for (const auto& [k, ke] : tree_->adj[static_cast<std::size_t>(i)]) {
            if (k == j) continue;
            const Potential m = self(self, k, i);
            pot = multiply(pot, m, scratch);
        }
        const int e = tree_->edge_between(i, j);
        return marginalize(pot, seps_[static_cast<std::size_t>(e)], scratch);
    };
    return compute(compute, from, to);
}

}  // namespace dynjt
