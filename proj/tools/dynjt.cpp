// dynjt: build, prune, query and benchmark dynamic jointrees from the
// command line.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dynjt/benchgen.hpp"
#include "dynjt/harness.hpp"
#include "dynjt/inference.hpp"
#include "dynjt/oracle.hpp"

namespace {

using namespace dynjt;

Instantiation parse_evidence(const BeliefNetwork& net, const std::string& text) {
    Instantiation out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        pos = comma == std::string::npos ? text.size() : comma + 1;
        if (item.empty()) continue;
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("evidence", "expected name=state in '" + item + "'");
        const std::string name = item.substr(0, eq);
        const auto id = net.find(name);
        if (!id) throw CLI::ValidationError("evidence", "unknown variable '" + name + "'");
        out[*id] = std::stoi(item.substr(eq + 1));
    }
    return out;
}

IdSet parse_targets(const BeliefNetwork& net, const std::string& text) {
    IdSet out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string name = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        pos = comma == std::string::npos ? text.size() : comma + 1;
        if (name.empty()) continue;
        const auto id = net.find(name);
        if (!id) throw CLI::ValidationError("targets", "unknown variable '" + name + "'");
        out.push_back(*id);
    }
    canonicalize(out);
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic jointree inference for discrete belief networks"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a random belief network");
    int genNodes = 50, genWidth = 5, genCard = 2;
    std::uint64_t genSeed = 1;
    std::string genOut;
    gen->add_option("--nodes", genNodes, "number of nodes")->required();
    gen->add_option("--width", genWidth, "parent window (connectivity)");
    gen->add_option("--seed", genSeed, "generator seed");
    gen->add_option("--cardinality", genCard, "states per variable");
    gen->add_option("--out", genOut, "output network file")->required();

    // build
    auto* build = app.add_subcommand("build", "build a jointree and dump its structure");
    std::string buildNet, buildStrategy = "minimize-lost-nodes", buildDump;
    std::uint64_t buildSeed = 0;
    build->add_option("--net", buildNet, "network file")->required();
    build->add_option("--strategy", buildStrategy, "minimize-lost-nodes | random | loop-cutset-guided");
    build->add_option("--seed", buildSeed, "seed for the random strategy");
    build->add_option("--dump-tree", buildDump, "write the dump here instead of stdout");

    // prune
    auto* prune = app.add_subcommand("prune", "prune a network for a query and dump the reconfigured tree");
    std::string pruneNet, pruneEvidence, pruneTargets, pruneStrategy = "minimize-lost-nodes";
    std::uint64_t pruneSeed = 0;
    prune->add_option("--net", pruneNet, "network file")->required();
    prune->add_option("--evidence", pruneEvidence, "comma list of name=state");
    prune->add_option("--targets", pruneTargets, "comma list of names");
    prune->add_option("--strategy", pruneStrategy, "spanning-tree strategy");
    prune->add_option("--seed", pruneSeed, "seed for the random strategy");

    // query
    auto* query = app.add_subcommand("query", "compute posteriors for target nodes");
    std::string queryNet, queryEvidence, queryTargets, queryStrategy = "minimize-lost-nodes";
    std::uint64_t querySeed = 0;
    bool queryStatic = false, queryNoCache = false, queryStats = false, queryOracle = false;
    query->add_option("--net", queryNet, "network file")->required();
    query->add_option("--evidence", queryEvidence, "comma list of name=state");
    query->add_option("--targets", queryTargets, "comma list of names")->required();
    query->add_option("--strategy", queryStrategy, "spanning-tree strategy");
    query->add_option("--seed", querySeed, "seed for the random strategy");
    query->add_flag("--static", queryStatic, "disable jointree reconfiguration");
    query->add_flag("--no-cache", queryNoCache, "disable cross-query message reuse");
    query->add_flag("--stats", queryStats, "emit operation counts and timings as JSON");
    query->add_flag("--oracle", queryOracle, "cross-check posteriors against joint enumeration");

    // bench
    auto* bench = app.add_subcommand("bench", "run both experiment protocols over generated network sets");
    std::string benchSets, benchCsv, benchJson, benchStrategy = "minimize-lost-nodes";
    std::uint64_t benchSeed = 1;
    bool benchNoTiming = false, benchSerial = false;
    bench->add_option("--sets", benchSets, "set config: one 'nodes width count cardinality' per line")->required();
    bench->add_option("--out-csv", benchCsv, "CSV report path");
    bench->add_option("--out-json", benchJson, "JSON report path");
    bench->add_option("--seed", benchSeed, "master seed");
    bench->add_option("--strategy", benchStrategy, "spanning-tree strategy");
    bench->add_flag("--no-timing", benchNoTiming, "skip wall clocks; output depends only on the seed");
    bench->add_flag("--serial", benchSerial, "process networks on a single thread");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            GenSpec spec;
            spec.node_count = genNodes;
            spec.width = genWidth;
            spec.cardinality = genCard;
            spec.seed = genSeed;
            save_network(generate_network(spec), genOut);
            std::cout << "wrote " << genOut << "\n";
        } else if (*build) {
            const BeliefNetwork net = load_network(buildNet);
            const BasicJointree tree =
                spanning_tree(build_family_graph(net), strategy_from_string(buildStrategy), buildSeed);
            const SeparatorMap seps = separators_fast(tree);
            const std::string dump = dump_jointree(net, tree, seps, cliques(tree, seps));
            if (buildDump.empty())
                std::cout << dump;
            else
                write_text(buildDump, dump);
        } else if (*prune) {
            const BeliefNetwork net = load_network(pruneNet);
            const BasicJointree tree =
                spanning_tree(build_family_graph(net), strategy_from_string(pruneStrategy), pruneSeed);
            Query q{parse_evidence(net, pruneEvidence), parse_targets(net, pruneTargets)};
            check_query(net, q);
            const PrunedState pruned = prune_dag(net, q);
            const ReconfiguredJointree r = reconfigure(tree, pruned);
            std::cout << "pruned {";
            for (VarId v : pruned.nodes) std::cout << ' ' << net.variable(v).name;
            std::cout << (pruned.nodes.empty() ? "}\n" : " }\n");
            std::cout << dump_jointree(net, tree, r.separators, r.cliques, pruned.flags);
        } else if (*query) {
            auto net = std::make_shared<const BeliefNetwork>(load_network(queryNet));
            auto tree = std::make_shared<const BasicJointree>(
                spanning_tree(build_family_graph(*net), strategy_from_string(queryStrategy), querySeed));
            Query q{parse_evidence(*net, queryEvidence), parse_targets(*net, queryTargets)};
            if (q.targets.empty()) throw CLI::ValidationError("targets", "at least one target is required");
            InferenceEngine engine(net, tree, EngineOptions{!queryStatic, !queryNoCache, true});
            const QueryResult res = engine.answer_query(q);
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", res.evidence_probability);
            std::cout << "Pr(evidence) = " << buf << "\n";
            double worst = 0.0;
            bool oracleOk = queryOracle;
            for (const auto& [t, post] : res.posteriors) {
                std::cout << "posterior " << net->variable(t).name << " :";
                for (double v : post.values()) {
                    std::snprintf(buf, sizeof buf, " %.17g", v);
                    std::cout << buf;
                }
                std::cout << "\n";
            }
            if (queryOracle) {
                try {
                    for (const auto& [t, post] : res.posteriors) {
                        const Potential expect = oracle_posterior(*net, q, t);
                        for (std::size_t c = 0; c < post.size(); ++c)
                            worst = std::max(worst, std::fabs(post.values()[c] - expect.values()[c]));
                    }
                } catch (const std::length_error& ex) {
                    oracleOk = false;
                    std::cout << "oracle unavailable: " << ex.what() << "\n";
                }
                if (oracleOk) {
                    std::snprintf(buf, sizeof buf, "%.3g", worst);
                    std::cout << "oracle max |delta| = " << buf << "\n";
                }
            }
            if (queryStats) {
                nlohmann::ordered_json stats{{"additions", res.stats.additions},
                                             {"multiplications", res.stats.multiplications},
                                             {"messages_computed", res.stats.messages_computed},
                                             {"messages_reused", res.stats.messages_reused},
                                             {"messages_marginalized", res.stats.messages_marginalized},
                                             {"max_separator_size", res.stats.max_separator_size},
                                             {"reconfig_micros", res.stats.reconfig_micros},
                                             {"inference_micros", res.stats.inference_micros}};
                std::cout << stats.dump() << "\n";
            }
        } else if (*bench) {
            std::ifstream in(benchSets, std::ios::binary);
            if (!in) throw std::runtime_error("cannot open '" + benchSets + "'");
            std::ostringstream ss;
            ss << in.rdbuf();
            SuiteOptions options;
            options.seed = benchSeed;
            options.timing = !benchNoTiming;
            options.parallel = !benchSerial;
            options.strategy = strategy_from_string(benchStrategy);
            const SuiteResult result = run_suite(parse_set_config(ss.str()), options);
            const std::string csv = suite_csv(result);
            if (!benchCsv.empty()) write_text(benchCsv, csv);
            if (!benchJson.empty()) write_text(benchJson, suite_json(result));
            std::cout << csv;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
