#include "dynjt/jointree.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

#include "dynjt/rng.hpp"

namespace dynjt {
namespace {

struct UnionFind {
    std::vector<int> parent, rank_;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)), rank_(static_cast<std::size_t>(n), 0) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rank_[static_cast<std::size_t>(a)] < rank_[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        if (rank_[static_cast<std::size_t>(a)] == rank_[static_cast<std::size_t>(b)]) ++rank_[static_cast<std::size_t>(a)];
        return true;
    }
};

bool pruned_at(const std::vector<char>& pruned, VarId i) {
    return !pruned.empty() && pruned[static_cast<std::size_t>(i)] != 0;
}

}  // namespace

FamilyGraph build_family_graph(const BeliefNetwork& net) {
    FamilyGraph fg;
    fg.n = net.num_vars();
    fg.labels.reserve(static_cast<std::size_t>(fg.n));
    for (VarId i = 0; i < fg.n; ++i) fg.labels.push_back(family(net, i));
    for (VarId child = 0; child < fg.n; ++child)
        for (VarId p : net.cpt(child).parents) fg.edges.emplace_back(p, child);
    return fg;
}

const char* to_string(TreeStrategy s) {
    switch (s) {
        case TreeStrategy::MinimizeLostNodes: return "minimize-lost-nodes";
        case TreeStrategy::Random: return "random";
        case TreeStrategy::LoopCutsetGuided: return "loop-cutset-guided";
    }
    return "?";
}

TreeStrategy strategy_from_string(const std::string& name) {
    if (name == "minimize-lost-nodes") return TreeStrategy::MinimizeLostNodes;
    if (name == "random") return TreeStrategy::Random;
    if (name == "loop-cutset-guided") return TreeStrategy::LoopCutsetGuided;
    throw std::invalid_argument("unknown spanning-tree strategy '" + name + "'");
}

IdSet lost_set(const FamilyGraph& fg, const std::vector<std::pair<VarId, VarId>>& kept) {
    std::set<std::pair<VarId, VarId>> keep(kept.begin(), kept.end());
    IdSet lost;
    for (const auto& e : fg.edges)
        if (!keep.count(e)) lost.push_back(e.first);
    canonicalize(lost);
    return lost;
}

IdSet greedy_loop_cutset(const FamilyGraph& fg) {
    const int n = fg.n;
    // adjacency with direction flags; the candidate rule below needs live
    // in-degrees
    std::vector<std::vector<std::pair<VarId, bool>>> adj(static_cast<std::size_t>(n));
    for (const auto& e : fg.edges) {
        adj[static_cast<std::size_t>(e.first)].emplace_back(e.second, true);   // outgoing
        adj[static_cast<std::size_t>(e.second)].emplace_back(e.first, false);  // incoming
    }
    std::vector<int> deg(static_cast<std::size_t>(n), 0), indeg(static_cast<std::size_t>(n), 0);
    std::vector<char> alive(static_cast<std::size_t>(n), 1);
    for (VarId i = 0; i < n; ++i) {
        deg[static_cast<std::size_t>(i)] = static_cast<int>(adj[static_cast<std::size_t>(i)].size());
        for (const auto& [j, out] : adj[static_cast<std::size_t>(i)])
            if (!out) ++indeg[static_cast<std::size_t>(i)];
    }
    int remaining = n;
    auto remove_node = [&](VarId v) {
        alive[static_cast<std::size_t>(v)] = 0;
        --remaining;
        for (const auto& [u, out] : adj[static_cast<std::size_t>(v)]) {
            if (!alive[static_cast<std::size_t>(u)]) continue;
            --deg[static_cast<std::size_t>(u)];
            if (out) --indeg[static_cast<std::size_t>(u)];
        }
    };

    IdSet cut;
    for (;;) {
        // strip everything on no cycle
        bool stripped = true;
        while (stripped) {
            stripped = false;
            for (VarId v = 0; v < n; ++v)
                if (alive[static_cast<std::size_t>(v)] && deg[static_cast<std::size_t>(v)] <= 1) {
                    remove_node(v);
                    stripped = true;
                }
        }
        if (remaining == 0) break;
        // pick the busiest node among those with at most one live incoming
        // edge; such a node has an outgoing edge on every remaining cycle
        // through it, and a source of the live sub-dag always qualifies
        VarId best = -1;
        for (VarId v = 0; v < n; ++v) {
            if (!alive[static_cast<std::size_t>(v)] || indeg[static_cast<std::size_t>(v)] > 1) continue;
            if (best < 0 || deg[static_cast<std::size_t>(v)] > deg[static_cast<std::size_t>(best)]) best = v;
        }
        if (best < 0) throw std::logic_error("loop-cutset selection exhausted");
        cut.push_back(best);
        remove_node(best);
    }
    canonicalize(cut);
    return cut;
}

int BasicJointree::edge_between(VarId a, VarId b) const {
    for (const auto& [nbr, e] : adj[static_cast<std::size_t>(a)])
        if (nbr == b) return e;
    return -1;
}

namespace {

BasicJointree assemble_tree(const FamilyGraph& fg, const std::vector<char>& keep, UnionFind& uf,
                            IdSet cutset) {
    const int n = fg.n;
    BasicJointree t;
    t.n = n;
    t.hypernodes = fg.labels;
    t.loop_cutset = std::move(cutset);
    std::vector<std::pair<VarId, VarId>> keptPairs;
    for (std::size_t e = 0; e < fg.edges.size(); ++e)
        if (keep[e]) {
            t.edges.push_back({fg.edges[e].first, fg.edges[e].second, false});
            keptPairs.push_back(fg.edges[e]);
        }
    t.lost = lost_set(fg, keptPairs);

    // link remaining components through zero-separator virtual edges
    std::vector<VarId> reps;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (VarId i = 0; i < n; ++i) {
        const int r = uf.find(i);
        if (!seen[static_cast<std::size_t>(r)]) {
            seen[static_cast<std::size_t>(r)] = 1;
            reps.push_back(i);  // ascending scan, so this is the component minimum
        }
    }
    for (std::size_t k = 1; k < reps.size(); ++k) {
        t.edges.push_back({reps[k - 1], reps[k], true});
        uf.unite(reps[k - 1], reps[k]);
    }
    if (static_cast<int>(t.edges.size()) != n - 1) throw std::logic_error("spanning tree edge count mismatch");

    // occurrence lists: s sits exactly in its own family and its children's
    t.occurs_in.assign(static_cast<std::size_t>(n), {});
    for (VarId k = 0; k < n; ++k)
        for (VarId s : fg.labels[static_cast<std::size_t>(k)]) t.occurs_in[static_cast<std::size_t>(s)].push_back(k);

    t.adj.assign(static_cast<std::size_t>(n), {});
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
        t.adj[static_cast<std::size_t>(t.edges[e].u)].emplace_back(t.edges[e].v, static_cast<int>(e));
        t.adj[static_cast<std::size_t>(t.edges[e].v)].emplace_back(t.edges[e].u, static_cast<int>(e));
    }
    for (auto& a : t.adj) std::sort(a.begin(), a.end());

    t.parent_node.assign(static_cast<std::size_t>(n), -1);
    t.parent_edge.assign(static_cast<std::size_t>(n), -1);
    t.tree_children.assign(static_cast<std::size_t>(n), {});
    t.bfs_order.clear();
    t.bfs_order.reserve(static_cast<std::size_t>(n));
    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    std::queue<VarId> q;
    q.push(0);
    visited[0] = 1;
    while (!q.empty()) {
        const VarId v = q.front();
        q.pop();
        t.bfs_order.push_back(v);
        for (const auto& [u, e] : t.adj[static_cast<std::size_t>(v)]) {
            if (visited[static_cast<std::size_t>(u)]) continue;
            visited[static_cast<std::size_t>(u)] = 1;
            t.parent_node[static_cast<std::size_t>(u)] = v;
            t.parent_edge[static_cast<std::size_t>(u)] = e;
            t.tree_children[static_cast<std::size_t>(v)].push_back(u);
            q.push(u);
        }
    }
    return t;
}

}  // namespace

BasicJointree tree_from_kept_edges(const FamilyGraph& fg,
                                   const std::vector<std::pair<VarId, VarId>>& kept) {
    std::set<std::pair<VarId, VarId>> all(fg.edges.begin(), fg.edges.end());
    std::vector<char> keep(fg.edges.size(), 0);
    UnionFind uf(fg.n);
    for (const auto& e : kept) {
        if (!all.count(e)) throw std::invalid_argument("kept edge is not a family-graph edge");
        if (!uf.unite(e.first, e.second)) throw std::invalid_argument("kept edges close a cycle");
    }
    for (std::size_t e = 0; e < fg.edges.size(); ++e)
        keep[e] = std::find(kept.begin(), kept.end(), fg.edges[e]) != kept.end() ? 1 : 0;
    return assemble_tree(fg, keep, uf, {});
}

BasicJointree spanning_tree(const FamilyGraph& fg, TreeStrategy strategy, std::uint64_t seed) {
    const int n = fg.n;
    if (n == 0) throw std::invalid_argument("empty family graph");
    const std::size_t m = fg.edges.size();
    std::vector<char> keep(m, 0);
    UnionFind uf(n);
    auto try_keep = [&](std::size_t e) {
        if (uf.unite(fg.edges[e].first, fg.edges[e].second)) keep[e] = 1;
    };

    std::vector<std::vector<std::size_t>> outEdges(static_cast<std::size_t>(n));
    for (std::size_t e = 0; e < m; ++e) outEdges[static_cast<std::size_t>(fg.edges[e].first)].push_back(e);
    // edge lists are already ordered by child id within each node (cpt order
    // groups by child ascending), but sort to make that explicit
    for (auto& es : outEdges)
        std::sort(es.begin(), es.end(),
                  [&](std::size_t a, std::size_t b) { return fg.edges[a].second < fg.edges[b].second; });
    auto by_outdeg = [&](std::vector<VarId>& order) {
        std::sort(order.begin(), order.end(), [&](VarId a, VarId b) {
            const auto da = outEdges[static_cast<std::size_t>(a)].size();
            const auto db = outEdges[static_cast<std::size_t>(b)].size();
            return da != db ? da > db : a < b;
        });
    };

    IdSet cut;
    switch (strategy) {
        case TreeStrategy::MinimizeLostNodes: {
            std::vector<VarId> order(static_cast<std::size_t>(n));
            std::iota(order.begin(), order.end(), 0);
            by_outdeg(order);
            for (VarId v : order)
                for (std::size_t e : outEdges[static_cast<std::size_t>(v)]) try_keep(e);
            break;
        }
        case TreeStrategy::Random: {
            std::vector<std::size_t> perm(m);
            std::iota(perm.begin(), perm.end(), 0);
            SplitMix64 rng(seed);
            for (std::size_t i = m; i > 1; --i)
                std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.next_below(i))]);
            for (std::size_t e : perm) try_keep(e);
            break;
        }
        case TreeStrategy::LoopCutsetGuided: {
            cut = greedy_loop_cutset(fg);
            for (std::size_t e = 0; e < m; ++e) {
                if (contains(cut, fg.edges[e].first)) continue;
                if (!uf.unite(fg.edges[e].first, fg.edges[e].second))
                    throw std::logic_error("cutset does not break every cycle");
                keep[e] = 1;
            }
            std::vector<VarId> order(cut.begin(), cut.end());
            by_outdeg(order);
            for (VarId v : order)
                for (std::size_t e : outEdges[static_cast<std::size_t>(v)]) try_keep(e);
            break;
        }
    }

    return assemble_tree(fg, keep, uf, std::move(cut));
}

SeparatorMap separators_direct(const BasicJointree& t, const std::vector<char>& pruned) {
    const int n = t.n;
    auto label = [&](VarId i) -> IdSet {
        return pruned_at(pruned, i) ? IdSet{} : t.hypernodes[static_cast<std::size_t>(i)];
    };
    std::vector<IdSet> below(static_cast<std::size_t>(n)), above(static_cast<std::size_t>(n));
    for (auto it = t.bfs_order.rbegin(); it != t.bfs_order.rend(); ++it) {
        const VarId v = *it;
        below[static_cast<std::size_t>(v)] = label(v);
        for (VarId c : t.tree_children[static_cast<std::size_t>(v)])
            set_union_into(below[static_cast<std::size_t>(v)], below[static_cast<std::size_t>(c)]);
    }
    for (VarId v : t.bfs_order) {
        const auto& ch = t.tree_children[static_cast<std::size_t>(v)];
        if (ch.empty()) continue;
        IdSet base = set_union(above[static_cast<std::size_t>(v)], label(v));
        std::vector<IdSet> suffix(ch.size() + 1);
        for (std::size_t k = ch.size(); k-- > 0;)
            suffix[k] = set_union(suffix[k + 1], below[static_cast<std::size_t>(ch[k])]);
        IdSet prefix;
        for (std::size_t k = 0; k < ch.size(); ++k) {
            above[static_cast<std::size_t>(ch[k])] = set_union(set_union(base, prefix), suffix[k + 1]);
            set_union_into(prefix, below[static_cast<std::size_t>(ch[k])]);
        }
    }
    SeparatorMap seps(t.edges.size());
    for (VarId v : t.bfs_order) {
        if (t.parent_node[static_cast<std::size_t>(v)] < 0) continue;
        seps[static_cast<std::size_t>(t.parent_edge[static_cast<std::size_t>(v)])] =
            set_intersection(below[static_cast<std::size_t>(v)], above[static_cast<std::size_t>(v)]);
    }
    return seps;
}

SeparatorMap separators_fast(const BasicJointree& t, const std::vector<char>& pruned) {
    const int n = t.n;
    SeparatorMap seps(t.edges.size());
    auto unpruned = [&](VarId x) { return !pruned_at(pruned, x); };

    std::vector<char> isLost(static_cast<std::size_t>(n), 0);
    for (VarId s : t.lost) isLost[static_cast<std::size_t>(s)] = 1;

    // a variable outside the lost set can only appear on its own kept
    // outgoing edges, which are exactly its tree links to its children
    IdSet occ;
    for (VarId s = 0; s < n; ++s) {
        if (isLost[static_cast<std::size_t>(s)]) continue;
        const IdSet& all = t.occurs_in[static_cast<std::size_t>(s)];
        if (all.size() < 2) continue;
        occ.clear();
        for (VarId x : all)
            if (unpruned(x)) occ.push_back(x);
        if (occ.size() < 2) continue;
        for (VarId x : occ) {
            if (x == s) continue;
            const int e = t.edge_between(s, x);
            seps[static_cast<std::size_t>(e)].push_back(s);
        }
    }

    // lost variables can span arbitrary tree paths: mark the minimal subtree
    // connecting their unpruned occurrences via subtree counts
    std::vector<int> cnt(static_cast<std::size_t>(n), 0);
    for (VarId s : t.lost) {
        occ.clear();
        for (VarId x : t.occurs_in[static_cast<std::size_t>(s)])
            if (unpruned(x)) occ.push_back(x);
        if (occ.size() < 2) continue;
        std::fill(cnt.begin(), cnt.end(), 0);
        for (VarId x : occ) cnt[static_cast<std::size_t>(x)] = 1;
        for (auto it = t.bfs_order.rbegin(); it != t.bfs_order.rend(); ++it) {
            const VarId v = *it;
            const VarId p = t.parent_node[static_cast<std::size_t>(v)];
            if (p >= 0) cnt[static_cast<std::size_t>(p)] += cnt[static_cast<std::size_t>(v)];
        }
        const int total = static_cast<int>(occ.size());
        for (VarId v : t.bfs_order) {
            if (t.parent_node[static_cast<std::size_t>(v)] < 0) continue;
            const int c = cnt[static_cast<std::size_t>(v)];
            if (c > 0 && c < total)
                seps[static_cast<std::size_t>(t.parent_edge[static_cast<std::size_t>(v)])].push_back(s);
        }
    }

    for (auto& s : seps) canonicalize(s);
    return seps;
}

CliqueMap cliques(const BasicJointree& t, const SeparatorMap& seps, const std::vector<char>& pruned) {
    CliqueMap cl(static_cast<std::size_t>(t.n));
    for (VarId i = 0; i < t.n; ++i) {
        cl[static_cast<std::size_t>(i)] = pruned_at(pruned, i) ? IdSet{} : t.hypernodes[static_cast<std::size_t>(i)];
        for (const auto& [nbr, e] : t.adj[static_cast<std::size_t>(i)])
            set_union_into(cl[static_cast<std::size_t>(i)], seps[static_cast<std::size_t>(e)]);
    }
    return cl;
}

std::vector<std::string> validate_jointree(const BasicJointree& t, const CliqueMap& cl,
                                           const BeliefNetwork& net, const std::vector<char>& pruned) {
    std::vector<std::string> out;
    const int n = t.n;

    for (VarId i = 0; i < n; ++i) {
        if (pruned_at(pruned, i)) continue;
        const IdSet fam = family(net, i);
        bool found = false;
        for (VarId k = 0; k < n && !found; ++k) found = is_subset(fam, cl[static_cast<std::size_t>(k)]);
        if (!found)
            out.push_back("family of '" + net.variable(i).name + "' is not contained in any clique");
    }

    for (VarId v = 0; v < n; ++v) {
        std::vector<VarId> occ;
        for (VarId k = 0; k < n; ++k)
            if (contains(cl[static_cast<std::size_t>(k)], v)) occ.push_back(k);
        if (occ.size() <= 1) continue;
        std::vector<char> inOcc(static_cast<std::size_t>(n), 0), seen(static_cast<std::size_t>(n), 0);
        for (VarId k : occ) inOcc[static_cast<std::size_t>(k)] = 1;
        std::vector<VarId> stack{occ[0]};
        seen[static_cast<std::size_t>(occ[0])] = 1;
        std::size_t reached = 0;
        while (!stack.empty()) {
            const VarId k = stack.back();
            stack.pop_back();
            ++reached;
            for (const auto& [u, e] : t.adj[static_cast<std::size_t>(k)])
                if (inOcc[static_cast<std::size_t>(u)] && !seen[static_cast<std::size_t>(u)]) {
                    seen[static_cast<std::size_t>(u)] = 1;
                    stack.push_back(u);
                }
        }
        if (reached != occ.size())
            out.push_back("variable '" + net.variable(v).name +
                          "' violates the running intersection property");
    }
    return out;
}

std::string dump_jointree(const BeliefNetwork& net, const BasicJointree& t, const SeparatorMap& seps,
                          const CliqueMap& cl, const std::vector<char>& pruned) {
    auto names = [&](const IdSet& s) {
        std::string out = "{";
        for (VarId v : s) {
            out += ' ';
            out += net.variable(v).name;
        }
        out += s.empty() ? "}" : " }";
        return out;
    };
    std::string out;
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
        out += "edge " + net.variable(t.edges[e].u).name + " " + net.variable(t.edges[e].v).name;
        if (t.edges[e].virtual_link) out += " (virtual)";
        out += " sep " + names(seps[e]) + "\n";
    }
    for (VarId i = 0; i < t.n; ++i) {
        const bool pr = !pruned.empty() && pruned[static_cast<std::size_t>(i)];
        out += "node " + net.variable(i).name + " hyper " +
               names(pr ? IdSet{} : t.hypernodes[static_cast<std::size_t>(i)]) + " clique " +
               names(cl[static_cast<std::size_t>(i)]) + "\n";
    }
    out += "lost " + names(t.lost) + "\n";
    return out;
}

}  // namespace dynjt
