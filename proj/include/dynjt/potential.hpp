#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dynjt/idset.hpp"
#include "dynjt/network.hpp"

namespace dynjt {

// Scalar-operation tally for one inference session. Additions and
// multiplications only; normalization divisions are not tracked.
struct OpCounter {
    std::uint64_t additions = 0;
    std::uint64_t multiplications = 0;
    std::uint64_t total() const { return additions + multiplications; }
};

class ZeroEvidenceError : public std::runtime_error {
public:
    ZeroEvidenceError() : std::runtime_error("evidence has probability zero") {}
};

// Factor table over an ordered variable scope. Values are flat in mixed-radix
// order with the first scope variable most significant; an empty scope is a
// single scalar.
class Potential {
public:
    Potential() : values_{1.0} {}  // the unit potential
    Potential(std::vector<VarId> scope, std::vector<int> cards, std::vector<double> values);

    const std::vector<VarId>& scope() const { return scope_; }
    const std::vector<int>& cards() const { return cards_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    bool is_scalar() const { return scope_.empty(); }

    int position_of(VarId v) const;  // -1 when absent
    bool has(VarId v) const { return position_of(v) >= 0; }
    double sum() const;

private:
    std::vector<VarId> scope_;
    std::vector<int> cards_;
    std::vector<double> values_;
};

Potential unit_potential();

// Scope is the CPT's parents followed by its child; with that order the value
// layout coincides with the CPT table layout.
Potential from_cpt(const Cpt& cpt, const BeliefNetwork& net);

// Pointwise product. Result scope is p's scope followed by q's new variables
// in q's order; one multiplication charged per result cell.
Potential multiply(const Potential& p, const Potential& q, OpCounter& counter);

// Sum out everything not in keep; the result scope is exactly keep, which
// must be a duplicate-free subset of p's scope. Additions charged as
// |p| - |result| cells.
Potential marginalize(const Potential& p, const std::vector<VarId>& keep, OpCounter& counter);

// Zero out all cells inconsistent with var = state (indicator likelihood);
// charged like a multiply by the indicator.
Potential reduce_evidence(const Potential& p, VarId var, int state, OpCounter& counter);

// Scale to sum 1; returns the scaled potential and the original sum. Throws
// ZeroEvidenceError when the potential is identically zero.
std::pair<Potential, double> normalize(const Potential& p);

// Serial reference kernels: the plain nested-loop forms, kept permanently as
// the oracle the optimized kernels are tested against and as the baseline in
// the kernel benchmark. Bit-identical to the production kernels.
namespace ref {
Potential multiply(const Potential& p, const Potential& q, OpCounter& counter);
Potential marginalize(const Potential& p, const std::vector<VarId>& keep, OpCounter& counter);
}  // namespace ref

}  // namespace dynjt
