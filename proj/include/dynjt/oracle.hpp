#pragma once

#include "dynjt/network.hpp"
#include "dynjt/potential.hpp"
#include "dynjt/pruning.hpp"

namespace dynjt {

// Brute-force joint enumeration, the ground truth the engine is checked
// against. Guarded to small state spaces; not an inference fallback.

// Product of all CPT potentials; throws std::length_error beyond 2^24 joint
// states.
Potential enumerate_joint(const BeliefNetwork& net);

// Condition the joint on the query's evidence, marginalize to the target,
// normalize. Throws ZeroEvidenceError when the evidence has no mass.
Potential oracle_posterior(const BeliefNetwork& net, const Query& q, VarId target);

// Total mass consistent with the evidence.
double oracle_evidence_probability(const BeliefNetwork& net, const Query& q);

}  // namespace dynjt
