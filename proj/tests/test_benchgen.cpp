#include "doctest.h"

#include "dynjt/benchgen.hpp"
#include "dynjt/jointree.hpp"
#include "dynjt/rng.hpp"

#include "helpers.hpp"

using namespace dynjt;

TEST_SUITE("benchgen") {

TEST_CASE("identical seeds give identical networks") {
    GenSpec spec;
    spec.node_count = 50;
    spec.seed = 7;
    const BeliefNetwork a = generate_network(spec);
    const BeliefNetwork b = generate_network(spec);
    CHECK(serialize_network(a) == serialize_network(b));

    spec.seed = 8;
    const BeliefNetwork c = generate_network(spec);
    CHECK(serialize_network(a) != serialize_network(c));
}

TEST_CASE("generated networks validate cleanly") {
    SplitMix64 rng(64);
    for (int round = 0; round < 30; ++round) {
        GenSpec spec;
        spec.node_count = 5 + static_cast<int>(rng.next_below(60));
        spec.width = 1 + static_cast<int>(rng.next_below(12));
        spec.cardinality = 2 + static_cast<int>(rng.next_below(2));
        spec.seed = rng.next_u64();
        CHECK(validate_network(generate_network(spec)).empty());
    }
}

TEST_CASE("width one restricts parents to the immediate predecessor") {
    GenSpec spec;
    spec.node_count = 40;
    spec.width = 1;
    spec.seed = 11;
    const BeliefNetwork net = generate_network(spec);
    for (VarId i = 0; i < net.num_vars(); ++i) {
        const auto& parents = net.cpt(i).parents;
        CHECK(parents.size() <= 1);
        if (!parents.empty()) CHECK(parents[0] == i - 1);
    }
}

TEST_CASE("parents stay inside the window") {
    GenSpec spec;
    spec.node_count = 60;
    spec.width = 4;
    spec.seed = 17;
    const BeliefNetwork net = generate_network(spec);
    for (VarId i = 0; i < net.num_vars(); ++i)
        for (VarId p : net.cpt(i).parents) {
            CHECK(p < i);
            CHECK(p >= i - 4);
        }
}

TEST_CASE("parent-count frequencies track the distribution") {
    GenSpec spec;
    spec.node_count = 10000;
    spec.width = 6;  // window of at least 4, so only early nodes clamp
    spec.seed = 23;
    const BeliefNetwork net = generate_network(spec);
    std::array<int, 5> counts{};
    int usable = 0;
    for (VarId i = 4; i < net.num_vars(); ++i) {  // skip the clamped prefix
        ++usable;
        ++counts[net.cpt(i).parents.size()];
    }
    const std::array<double, 5> expect{0.20, 0.10, 0.25, 0.35, 0.10};
    for (std::size_t k = 0; k < 5; ++k) {
        const double freq = static_cast<double>(counts[k]) / usable;
        CHECK(std::fabs(freq - expect[k]) <= 0.02);
    }
}

TEST_CASE("invalid specs are rejected") {
    GenSpec spec;
    spec.node_count = 3;
    CHECK_THROWS_AS((void)generate_network(spec), std::invalid_argument);
    spec.node_count = 10;
    spec.width = 0;
    CHECK_THROWS_AS((void)generate_network(spec), std::invalid_argument);
    spec.width = 2;
    spec.family_dist = {0.5, 0.5, 0.5, 0.0, 0.0};
    CHECK_THROWS_AS((void)generate_network(spec), std::invalid_argument);
}

TEST_CASE("wider windows produce larger separators") {
    // the width knob controls connectivity: variables drawn from a wider
    // window span longer stretches of the tree, so the maximal separator
    // grows with width (sample means over 40 networks per width)
    const std::vector<int> widths{3, 8, 20};
    std::vector<double> meanMaxSep;
    for (int width : widths) {
        double total = 0.0;
        for (int k = 0; k < 40; ++k) {
            GenSpec spec;
            spec.node_count = 50;
            spec.width = width;
            spec.seed = 100000ULL * static_cast<std::uint64_t>(width) + static_cast<std::uint64_t>(k);
            const BeliefNetwork net = generate_network(spec);
            const BasicJointree t =
                spanning_tree(build_family_graph(net), TreeStrategy::MinimizeLostNodes);
            std::size_t maxSep = 0;
            for (const auto& s : separators_fast(t)) maxSep = std::max(maxSep, s.size());
            total += static_cast<double>(maxSep);
        }
        meanMaxSep.push_back(total / 40.0);
    }
    for (std::size_t k = 1; k < meanMaxSep.size(); ++k) CHECK(meanMaxSep[k] > meanMaxSep[k - 1]);
}

}  // TEST_SUITE
