#include "dynjt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "dynjt/rng.hpp"

#include "json.hpp"

namespace dynjt {
namespace {

// replay a prepared stream on one engine, optionally comparing posteriors
// against a reference run cell for cell
RunRecord run_stream(const std::shared_ptr<const BeliefNetwork>& net,
                     const std::shared_ptr<const BasicJointree>& tree, const std::vector<Query>& stream,
                     bool reconfigure, bool timing,
                     std::vector<std::map<VarId, Potential>>* capture,
                     const std::vector<std::map<VarId, Potential>>* reference, double* maxDelta) {
    InferenceEngine engine(net, tree, EngineOptions{reconfigure, true, timing});
    RunRecord rec;
    rec.mode = reconfigure ? RunMode::Dynamic : RunMode::Static;
    for (std::size_t qi = 0; qi < stream.size(); ++qi) {
        QueryResult res = engine.answer_query(stream[qi]);
        rec.additions += res.stats.additions;
        rec.multiplications += res.stats.multiplications;
        rec.max_separator_size = std::max(rec.max_separator_size, res.stats.max_separator_size);
        rec.reconfig_micros += res.stats.reconfig_micros;
        rec.inference_micros += res.stats.inference_micros;
        if (reference) {
            const auto& ref = (*reference)[qi];
            for (const auto& [t, post] : res.posteriors) {
                const auto& other = ref.at(t);
                for (std::size_t c = 0; c < post.size(); ++c)
                    *maxDelta = std::max(*maxDelta, std::fabs(post.values()[c] - other.values()[c]));
            }
        }
        if (capture) capture->push_back(std::move(res.posteriors));
    }
    return rec;
}

ExperimentResult run_both_modes(const std::shared_ptr<const BeliefNetwork>& net,
                                const std::shared_ptr<const BasicJointree>& tree,
                                const std::vector<Query>& stream, bool timing) {
    ExperimentResult out;
    std::vector<std::map<VarId, Potential>> dynPosteriors;
    dynPosteriors.reserve(stream.size());
    out.dynamic_run = run_stream(net, tree, stream, true, timing, &dynPosteriors, nullptr, nullptr);
    out.static_run =
        run_stream(net, tree, stream, false, timing, nullptr, &dynPosteriors, &out.max_posterior_delta);
    return out;
}

}  // namespace

ExperimentResult experiment1(std::shared_ptr<const BeliefNetwork> net,
                             std::shared_ptr<const BasicJointree> tree, bool timing) {
    std::vector<Query> stream;
    for (VarId i = 0; i < net->num_vars(); ++i)
        if (net->is_leaf(i)) stream.push_back(Query{{}, {i}});
    if (stream.empty()) throw std::invalid_argument("experiment 1 needs at least one leaf node");
    return run_both_modes(net, tree, stream, timing);
}

ExperimentResult experiment2(std::shared_ptr<const BeliefNetwork> net,
                             std::shared_ptr<const BasicJointree> tree, std::uint64_t seed, bool timing) {
    IdSet roots, nonRoots;
    for (VarId i = 0; i < net->num_vars(); ++i) (net->is_root(i) ? roots : nonRoots).push_back(i);
    if (roots.empty()) throw std::invalid_argument("experiment 2 needs at least one root node");
    if (nonRoots.empty()) throw std::invalid_argument("experiment 2 needs non-root nodes");

    const std::size_t k = (nonRoots.size() + 9) / 10;  // ceil(10%)
    SplitMix64 rng(seed);
    std::vector<Query> stream;
    for (int rep = 0; rep < 5; ++rep) {
        const std::vector<VarId> picked = sample_without_replacement(nonRoots, k, rng);
        Instantiation e;
        for (VarId v : picked) e[v] = rng.next_int(net->cardinality(v));
        stream.push_back(Query{e, roots});
        for (VarId v : picked) {
            // redraw uniformly among the other states, so the value really changes
            const int card = net->cardinality(v);
            int s = rng.next_int(card - 1);
            if (s >= e[v]) ++s;
            e[v] = s;
            stream.push_back(Query{e, roots});
        }
    }
    return run_both_modes(net, tree, stream, timing);
}

SuiteResult run_suite(const std::vector<BenchSetSpec>& sets, const SuiteOptions& options) {
    SuiteResult result;
    result.sets = sets;
    result.options = options;
    result.exp1_runs.resize(sets.size());
    result.exp2_runs.resize(sets.size());
    for (std::size_t s = 0; s < sets.size(); ++s) {
        result.exp1_runs[s].resize(static_cast<std::size_t>(sets[s].count));
        result.exp2_runs[s].resize(static_cast<std::size_t>(sets[s].count));
    }

    std::vector<std::pair<int, int>> jobs;
    for (std::size_t s = 0; s < sets.size(); ++s)
        for (int k = 0; k < sets[s].count; ++k) jobs.emplace_back(static_cast<int>(s), k);

    const SplitMix64 base(options.seed);
    std::string firstError;

#pragma omp parallel for schedule(dynamic) if (options.parallel)
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const auto [s, k] = jobs[j];
        try {
            const BenchSetSpec& set = result.sets[static_cast<std::size_t>(s)];
            SplitMix64 netRng = base.split(static_cast<std::uint64_t>(s)).split(static_cast<std::uint64_t>(k));
            GenSpec gen;
            gen.node_count = set.nodes;
            gen.width = set.width;
            gen.cardinality = set.cardinality;
            gen.seed = netRng.next_u64();
            const std::uint64_t treeSeed = netRng.next_u64();
            const std::uint64_t expSeed = netRng.next_u64();

            auto net = std::make_shared<const BeliefNetwork>(generate_network(gen));
            auto tree = std::make_shared<const BasicJointree>(
                spanning_tree(build_family_graph(*net), options.strategy, treeSeed));

            ExperimentResult r1 = experiment1(net, tree, options.timing);
            ExperimentResult r2 = experiment2(net, tree, expSeed, options.timing);
            r1.dynamic_run.network_id = r1.static_run.network_id = k;
            r2.dynamic_run.network_id = r2.static_run.network_id = k;
            result.exp1_runs[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)] = r1;
            result.exp2_runs[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)] = r2;
        } catch (const std::exception& ex) {
#pragma omp critical
            if (firstError.empty()) firstError = ex.what();
        }
    }
    if (!firstError.empty()) throw std::runtime_error("benchmark run failed: " + firstError);

    auto aggregate = [&](int expId, const std::vector<std::vector<ExperimentResult>>& runs,
                         std::vector<SetReport>& out) {
        for (std::size_t s = 0; s < sets.size(); ++s) {
            SetReport rep;
            rep.set_index = static_cast<int>(s);
            rep.experiment = expId;
            rep.spec = sets[s];
            double sumSaving = 0.0, sumDyn = 0.0, sumStat = 0.0;
            std::int64_t reconfig = 0, inference = 0;
            for (const ExperimentResult& r : runs[s]) {
                const double saving = r.saving_factor();
                sumSaving += saving;
                rep.max_saving = std::max(rep.max_saving, saving);
                sumDyn += r.dynamic_run.max_separator_size;
                sumStat += r.static_run.max_separator_size;
                reconfig += r.dynamic_run.reconfig_micros;
                inference += r.dynamic_run.inference_micros;
            }
            const double n = static_cast<double>(runs[s].size());
            if (n > 0) {
                rep.avg_saving = sumSaving / n;
                rep.avg_max_sep_dynamic = sumDyn / n;
                rep.avg_max_sep_static = sumStat / n;
            }
            rep.reconfig_time_pct =
                inference > 0 ? 100.0 * static_cast<double>(reconfig) / static_cast<double>(inference) : 0.0;
            out.push_back(rep);
        }
    };
    aggregate(1, result.exp1_runs, result.exp1);
    aggregate(2, result.exp2_runs, result.exp2);
    return result;
}

std::vector<BenchSetSpec> parse_set_config(const std::string& text) {
    std::vector<BenchSetSpec> sets;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        BenchSetSpec s;
        if (!(ls >> s.nodes)) continue;  // blank line
        if (!(ls >> s.width >> s.count >> s.cardinality))
            throw std::runtime_error("set config line " + std::to_string(lineNo) +
                                     ": expected 'nodes width count cardinality'");
        sets.push_back(s);
    }
    return sets;
}

std::string suite_csv(const SuiteResult& result) {
    std::string out =
        "set_id,nodes,width,avg_saving,max_saving,avg_max_sep_dynamic,avg_max_sep_static,reconfig_time_pct\n";
    char buf[256];
    auto emit = [&](const std::vector<SetReport>& reports) {
        for (const SetReport& r : reports) {
            std::snprintf(buf, sizeof buf, "exp%d_set%d,%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.experiment,
                          r.set_index + 1, r.spec.nodes, r.spec.width, r.avg_saving, r.max_saving,
                          r.avg_max_sep_dynamic, r.avg_max_sep_static, r.reconfig_time_pct);
            out += buf;
        }
    };
    emit(result.exp1);
    emit(result.exp2);
    return out;
}

std::string suite_json(const SuiteResult& result) {
    using json = nlohmann::ordered_json;
    json root;
    root["seed"] = result.options.seed;
    root["strategy"] = to_string(result.options.strategy);
    root["timing"] = result.options.timing;
    auto recordJson = [](const RunRecord& r) {
        return json{{"mode", r.mode == RunMode::Dynamic ? "dynamic" : "static"},
                    {"additions", r.additions},
                    {"multiplications", r.multiplications},
                    {"max_separator_size", r.max_separator_size},
                    {"reconfig_micros", r.reconfig_micros},
                    {"inference_micros", r.inference_micros}};
    };
    auto reportJson = [](const SetReport& r) {
        return json{{"experiment", r.experiment},
                    {"set", r.set_index + 1},
                    {"nodes", r.spec.nodes},
                    {"width", r.spec.width},
                    {"count", r.spec.count},
                    {"cardinality", r.spec.cardinality},
                    {"avg_saving", r.avg_saving},
                    {"max_saving", r.max_saving},
                    {"avg_max_sep_dynamic", r.avg_max_sep_dynamic},
                    {"avg_max_sep_static", r.avg_max_sep_static},
                    {"reconfig_time_pct", r.reconfig_time_pct}};
    };
    json sets = json::array();
    for (std::size_t s = 0; s < result.sets.size(); ++s) {
        json setJson;
        setJson["exp1"] = reportJson(result.exp1[s]);
        setJson["exp2"] = reportJson(result.exp2[s]);
        json nets = json::array();
        for (std::size_t k = 0; k < result.exp1_runs[s].size(); ++k) {
            const ExperimentResult& r1 = result.exp1_runs[s][k];
            const ExperimentResult& r2 = result.exp2_runs[s][k];
            nets.push_back(json{{"network", k},
                                {"exp1_saving", r1.saving_factor()},
                                {"exp2_saving", r2.saving_factor()},
                                {"exp1_dynamic", recordJson(r1.dynamic_run)},
                                {"exp1_static", recordJson(r1.static_run)},
                                {"exp2_dynamic", recordJson(r2.dynamic_run)},
                                {"exp2_static", recordJson(r2.static_run)}});
        }
        setJson["networks"] = std::move(nets);
        sets.push_back(std::move(setJson));
    }
    root["sets"] = std::move(sets);
    return root.dump(2) + "\n";
}

}  // namespace dynjt
