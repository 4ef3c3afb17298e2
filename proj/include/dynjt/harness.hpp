#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dynjt/benchgen.hpp"
#include "dynjt/inference.hpp"

namespace dynjt {

enum class RunMode { Dynamic, Static };

struct RunRecord {
    int network_id = 0;
    RunMode mode = RunMode::Dynamic;
    std::uint64_t additions = 0;
    std::uint64_t multiplications = 0;
    int max_separator_size = 0;
    std::int64_t reconfig_micros = 0;
    std::int64_t inference_micros = 0;

    std::uint64_t ops() const { return additions + multiplications; }
};

// One network, one query stream, replayed on a reconfiguring engine and on a
// static one (both with message caching). The comparison is cost-only, so the
// largest posterior disagreement is tracked as a sanity signal.
struct ExperimentResult {
    RunRecord dynamic_run;
    RunRecord static_run;
    double max_posterior_delta = 0.0;

    double saving_factor() const {
        return dynamic_run.ops() == 0 ? 1.0
                                      : static_cast<double>(static_run.ops()) /
                                            static_cast<double>(dynamic_run.ops());
    }
};

// Prior of every leaf node, one query per leaf, no evidence.
ExperimentResult experiment1(std::shared_ptr<const BeliefNetwork> net,
                             std::shared_ptr<const BasicJointree> tree, bool timing = true);

// Evidence churn: five repetitions of (instantiate 10% of the non-root nodes
// at random, query all roots, then redraw each evidence value in turn and
// re-query). Deterministic per seed.
ExperimentResult experiment2(std::shared_ptr<const BeliefNetwork> net,
                             std::shared_ptr<const BasicJointree> tree, std::uint64_t seed,
                             bool timing = true);

struct BenchSetSpec {
    int nodes = 50;
    int width = 5;
    int count = 50;
    int cardinality = 2;
};

struct SetReport {
    int set_index = 0;
    int experiment = 1;
    BenchSetSpec spec;
    double avg_saving = 0.0;
    double max_saving = 0.0;
    double avg_max_sep_dynamic = 0.0;
    double avg_max_sep_static = 0.0;
    double reconfig_time_pct = 0.0;
};

struct SuiteOptions {
    std::uint64_t seed = 1;
    bool timing = true;    // off: clocks are never read and output is byte-reproducible
    bool parallel = true;  // spread networks across OpenMP threads
    TreeStrategy strategy = TreeStrategy::MinimizeLostNodes;
};

struct SuiteResult {
    std::vector<BenchSetSpec> sets;
    SuiteOptions options;
    std::vector<SetReport> exp1, exp2;                          // per set
    std::vector<std::vector<ExperimentResult>> exp1_runs, exp2_runs;  // [set][network]
};

SuiteResult run_suite(const std::vector<BenchSetSpec>& sets, const SuiteOptions& options = {});

// One set per line: "nodes width count cardinality"; '#' comments.
std::vector<BenchSetSpec> parse_set_config(const std::string& text);

std::string suite_csv(const SuiteResult& result);
std::string suite_json(const SuiteResult& result);

}  // namespace dynjt
