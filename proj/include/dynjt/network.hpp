#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynjt/idset.hpp"

namespace dynjt {

struct Variable {
    VarId id = 0;
    std::string name;
    int cardinality = 2;
};

// Conditional probability table. The flat table is indexed by
//   row(parent instantiation) * card(child) + child state
// with parent instantiations ranked mixed-radix, first listed parent most
// significant. Every row sums to 1.
struct Cpt {
    VarId child = 0;
    std::vector<VarId> parents;
    std::vector<double> table;
};

// Hard assignment of states to a subset of variables.
using Instantiation = std::map<VarId, int>;

class BeliefNetwork {
public:
    BeliefNetwork() = default;

    // Requires one CPT per variable, ordered by child id, with parent ids in
    // range. Everything else (cards, acyclicity, normalization, ...) is
    // reported by validate_network rather than enforced here, so invalid
    // networks can be built and inspected.
    BeliefNetwork(std::vector<Variable> variables, std::vector<Cpt> cpts);

    int num_vars() const { return static_cast<int>(vars_.size()); }
    const std::vector<Variable>& variables() const { return vars_; }
    const Variable& variable(VarId i) const { return vars_.at(static_cast<std::size_t>(i)); }
    const Cpt& cpt(VarId i) const { return cpts_.at(static_cast<std::size_t>(i)); }
    const std::vector<Cpt>& cpts() const { return cpts_; }
    const std::vector<VarId>& children(VarId i) const { return children_.at(static_cast<std::size_t>(i)); }
    int cardinality(VarId i) const { return variable(i).cardinality; }
    bool is_leaf(VarId i) const { return children(i).empty(); }
    bool is_root(VarId i) const { return cpt(i).parents.empty(); }
    std::optional<VarId> find(const std::string& name) const;

private:
    std::vector<Variable> vars_;
    std::vector<Cpt> cpts_;  // cpts_[i].child == i
    std::vector<std::vector<VarId>> children_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_ = 0;
    int column_ = 0;
};

// Line-oriented text format:
//   var <name> <cardinality>
//   cpt <child> [<parent> ...] : <p1> ... <pm>
// '#' starts a comment, all var lines precede all cpt lines, and declaration
// order assigns ids. Throws ParseError with line/column on any defect,
// including CPT rows that do not sum to 1 and cyclic parent structures.
BeliefNetwork parse_network(const std::string& text);
BeliefNetwork load_network(const std::string& path);

// Inverse of parse_network. Probabilities are printed with 17 significant
// digits so parse(serialize(net)) reproduces the tables bit for bit.
std::string serialize_network(const BeliefNetwork& net);
void save_network(const BeliefNetwork& net, const std::string& path);

// The node together with its parents.
IdSet family(const BeliefNetwork& net, VarId i);

// One entry per violated invariant; empty means the network is valid.
std::vector<std::string> validate_network(const BeliefNetwork& net);

}  // namespace dynjt
