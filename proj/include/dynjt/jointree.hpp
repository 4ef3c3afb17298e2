#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dynjt/idset.hpp"
#include "dynjt/network.hpp"

namespace dynjt {

// The network's dag with each node labeled by its family.
struct FamilyGraph {
    int n = 0;
    std::vector<std::pair<VarId, VarId>> edges;  // directed (parent, child)
    std::vector<IdSet> labels;                   // labels[i] = family of i
};

FamilyGraph build_family_graph(const BeliefNetwork& net);

enum class TreeStrategy {
    MinimizeLostNodes,  // keep high-out-degree nodes' edges first
    Random,             // seeded uniform edge order
    LoopCutsetGuided,   // drop only edges leaving a greedy loop cutset
};

const char* to_string(TreeStrategy s);
TreeStrategy strategy_from_string(const std::string& name);

struct TreeEdge {
    VarId u = 0;  // dag parent for real edges, lower endpoint for virtual links
    VarId v = 0;
    bool virtual_link = false;  // zero-separator connector between components
};

// Spanning tree of the family graph. Hypernodes equal the families; `lost`
// is the set of nodes that lost at least one outgoing edge. Disconnected
// inputs are linked into one tree with virtual edges whose separators are
// always empty.
struct BasicJointree {
    int n = 0;
    std::vector<IdSet> hypernodes;
    std::vector<TreeEdge> edges;  // n-1 edges
    IdSet lost;
    IdSet loop_cutset;  // filled by the loop-cutset strategy only

    // occurs_in[s] = tree nodes whose hypernode contains s, i.e. s and its
    // dag children; fixed across queries
    std::vector<IdSet> occurs_in;

    // adjacency and a rooting at node 0, shared by everything downstream
    std::vector<std::vector<std::pair<VarId, int>>> adj;  // (neighbor, edge index), sorted
    std::vector<VarId> parent_node;                       // -1 at the root
    std::vector<int> parent_edge;
    std::vector<std::vector<VarId>> tree_children;
    std::vector<VarId> bfs_order;

    int edge_between(VarId a, VarId b) const;  // -1 when not adjacent
};

BasicJointree spanning_tree(const FamilyGraph& fg, TreeStrategy strategy, std::uint64_t seed = 0);

// Builds the jointree over an explicitly chosen acyclic subset of family-graph
// edges; handy for pinning a particular tree in tests and tools.
BasicJointree tree_from_kept_edges(const FamilyGraph& fg,
                                   const std::vector<std::pair<VarId, VarId>>& kept);

// Nodes with at least one outgoing dag edge outside `kept`.
IdSet lost_set(const FamilyGraph& fg, const std::vector<std::pair<VarId, VarId>>& kept);

// Greedy loop cutset of the family graph: every undirected cycle contains a
// cutset node with an outgoing edge on that cycle.
IdSet greedy_loop_cutset(const FamilyGraph& fg);

using SeparatorMap = std::vector<IdSet>;  // by tree-edge index
using CliqueMap = std::vector<IdSet>;     // by node

// `pruned` flags empty hypernodes per query; pass {} for no pruning.

// Reference implementation: two depth-first label accumulations per Def-style
// side unions. Quadratic-ish and kept as the oracle for separators_fast.
SeparatorMap separators_direct(const BasicJointree& t, const std::vector<char>& pruned = {});

// Occurrence-subtree marking: a variable joins the separator of every tree
// edge on the minimal subtree connecting the unpruned hypernodes that contain
// it. Only nodes in `lost` can reach edges beyond their own, so the cost is
// O(n * (|lost| + avg out-degree)).
SeparatorMap separators_fast(const BasicJointree& t, const std::vector<char>& pruned = {});

CliqueMap cliques(const BasicJointree& t, const SeparatorMap& seps, const std::vector<char>& pruned = {});

// Empty iff every unpruned family is contained in some clique and every
// variable's cliques form a connected subtree.
std::vector<std::string> validate_jointree(const BasicJointree& t, const CliqueMap& cl,
                                           const BeliefNetwork& net,
                                           const std::vector<char>& pruned = {});

// Text dump used by the build/prune subcommands: one line per edge with its
// separator, one line per node with hypernode and clique, then the lost set.
std::string dump_jointree(const BeliefNetwork& net, const BasicJointree& t, const SeparatorMap& seps,
                          const CliqueMap& cl, const std::vector<char>& pruned = {});

}  // namespace dynjt
