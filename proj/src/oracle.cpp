#include "dynjt/oracle.hpp"

#include <stdexcept>

namespace dynjt {
namespace {

constexpr std::size_t kStateGuard = std::size_t{1} << 24;

Potential joint_with_evidence(const BeliefNetwork& net, const Instantiation& evidence) {
    Potential joint = enumerate_joint(net);
    OpCounter scratch;
    for (const auto& [var, state] : evidence) joint = reduce_evidence(joint, var, state, scratch);
    return joint;
}

}  // namespace

Potential enumerate_joint(const BeliefNetwork& net) {
    std::size_t states = 1;
    for (const auto& v : net.variables()) {
        states *= static_cast<std::size_t>(v.cardinality);
        if (states > kStateGuard) throw std::length_error("joint state space exceeds the enumeration guard");
    }
    OpCounter scratch;
    Potential joint = unit_potential();
    for (VarId i = 0; i < net.num_vars(); ++i) joint = multiply(joint, from_cpt(net.cpt(i), net), scratch);
    return joint;
}

Potential oracle_posterior(const BeliefNetwork& net, const Query& q, VarId target) {
    check_query(net, q);
    OpCounter scratch;
    const Potential joint = joint_with_evidence(net, q.evidence);
    return normalize(marginalize(joint, {target}, scratch)).first;
}

double oracle_evidence_probability(const BeliefNetwork& net, const Query& q) {
    check_query(net, q);
    return joint_with_evidence(net, q.evidence).sum();
}

}  // namespace dynjt
