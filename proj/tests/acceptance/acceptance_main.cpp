// Acceptance suite: verifies the harness contracts end to end and reproduces
// the qualitative parallelism/heterogeneity findings on the embedded engine.
// Prints one PASS/FAIL line per criterion; exit code 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "corpus/store.hpp"
#include "dataflow/validate.hpp"
#include "enumerate/enumerate.hpp"
#include "exec/runner.hpp"
#include "harness/stages.hpp"
#include "metrics/metrics.hpp"
#include "ml/features.hpp"
#include "ml/train.hpp"
#include "workload/selectivity.hpp"
#include "workload/stream.hpp"

#include "reference_eval.hpp"

using namespace pdsp;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int number;
    std::string description;
    std::function<void()> body;
};

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool condition, const std::string& detail) {
    if (!condition) throw CheckFailure(detail);
}

template <class T>
std::string str(const T& v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

ClusterProfile one_node(int cores, double speed = 1.0) {
    ClusterProfile c;
    c.name = "bignode";
    c.nodes.push_back(NodeProfile{"big", cores, speed, 256, 1024, 0.0, 0.0});
    return c;
}

// Desk-scale generator ranges: windows short enough to fire within the run
// horizon, rates high enough to exercise queueing but small enough to finish
// in seconds.
GeneratorConfig desk_generator(std::uint64_t seed, std::vector<std::string> structures,
                               std::size_t count) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.structures = std::move(structures);
    cfg.count = count;
    cfg.event_rates = {1000, 2000, 5000, 10000};
    cfg.window_durations_ms = {50, 100, 150, 200, 325};
    cfg.window_lengths_tuples = {2, 3, 5, 7, 10, 17, 25};
    cfg.arrivals = {ArrivalKind::Poisson};
    cfg.selectivity_sample = 2000;
    return cfg;
}

std::multiset<std::string> multiset_of(const std::vector<std::string>& v) {
    return {v.begin(), v.end()};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    expect(static_cast<bool>(in), "cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// ---------------------------------------------------------------------------

void criterion_category_mapping() {
    const std::vector<std::pair<int, const char*>> table = {
        {1, "XS"},  {7, "XS"},  {8, "S"},   {15, "S"},  {16, "M"},   {31, "M"},
        {32, "L"},  {63, "L"},  {64, "XL"}, {127, "XL"}, {128, "XXL"}, {500, "XXL"},
    };
    for (auto [degree, expected] : table) {
        std::string got = parallelism_category_name(categorize_parallelism(degree));
        expect(got == expected, "degree " + str(degree) + " mapped to " + got + ", expected " + expected);
    }
}

void criterion_workload_validity() {
    GeneratorConfig cfg;
    cfg.seed = 20240901;
    cfg.structures = synthetic_structure_tags();
    cfg.count = 1000;
    auto plans = generate_corpus(cfg);
    expect(plans.size() == 1000, "plan count " + str(plans.size()));

    std::size_t filters = 0;
    for (const auto& plan : plans) {
        auto report = validate_plan(plan);
        expect(report.ok(), plan.id + ": " + report.joined());
        for (const auto& op : plan.operators) {
            if (op.kind != OpKind::Filter) continue;
            ++filters;
            const auto* src = upstream_source_of(plan, op.id);
            expect(src != nullptr, plan.id + "/" + op.id + ": no upstream source");
            auto est = estimate_selectivity(*op.filter, plan.streams.at(src->id), 777000 + filters,
                                            10000);
            expect(est.value > 0.0,
                   plan.id + "/" + op.id + ": zero selectivity on a fresh 10k-tuple sample");
        }
    }
    expect(filters > 1000, "unexpectedly few filters: " + str(filters));
    std::cout << "    [1000 plans valid; " << filters << " filters all selective]\n";
}

void criterion_enumeration_counts() {
    // three stateless enumerable operators
    QueryPlan plan;
    plan.id = "count-check";
    plan.structure_tag = "3-chained-filter";
    plan.operators.push_back([] {
        OperatorSpec s;
        s.id = "src";
        s.kind = OpKind::Source;
        return s;
    }());
    std::string prev = "src";
    for (int i = 0; i < 3; ++i) {
        OperatorSpec f;
        f.id = "f" + str(i);
        f.kind = OpKind::Filter;
        f.inbound.kind = PartitioningKind::Rebalance;
        f.filter = FilterSpec{0, FilterFn::Ge, Value{std::int64_t{0}}, 1.0};
        plan.operators.push_back(f);
        plan.edges.push_back({prev, f.id});
        prev = f.id;
    }
    OperatorSpec sink;
    sink.id = "sink";
    sink.kind = OpKind::Sink;
    sink.inbound.kind = PartitioningKind::Rebalance;
    plan.operators.push_back(sink);
    plan.edges.push_back({prev, "sink"});
    StreamSpec stream;
    stream.schema.fields = {DataType::Integer};
    stream.event_rate = 1000;
    plan.streams["src"] = stream;
    require_valid(plan);

    RuleContext ctx;

    // Exhaustive with per-operator range sizes (3, 2, 2) -> 12 distinct plans
    EnumerationStrategy exhaustive;
    exhaustive.kind = StrategyKind::Exhaustive;
    exhaustive.degree_min = 1;
    exhaustive.degree_max = 3;
    exhaustive.per_op_ranges["f1"] = {1, 2};
    exhaustive.per_op_ranges["f2"] = {1, 2};
    expect(count_enumeration(plan, exhaustive) == std::uint64_t{12},
           "exhaustive count != 12");
    auto e = enumerate(plan, exhaustive, ctx, 1);
    std::set<std::vector<int>> distinct;
    std::size_t emitted = 0;
    while (e->has_next()) {
        auto p = e->next();
        ++emitted;
        distinct.insert({p.find_op("f0")->parallelism, p.find_op("f1")->parallelism,
                         p.find_op("f2")->parallelism});
    }
    expect(emitted == 12, "exhaustive emitted " + str(emitted));
    expect(distinct.size() == 12, "exhaustive assignments not distinct: " + str(distinct.size()));

    // MinAvgMax over [1, 16]: 1, 8 (round half to even), 16
    EnumerationStrategy mam;
    mam.kind = StrategyKind::MinAvgMax;
    mam.degree_min = 1;
    mam.degree_max = 16;
    auto m = enumerate(plan, mam, ctx, 1);
    std::vector<int> cycle;
    while (m->has_next()) cycle.push_back(m->next().find_op("f0")->parallelism);
    expect(cycle == std::vector<int>{1, 8, 16},
           "min-avg-max cycle was " + str(cycle.size()) + " plans: " +
               (cycle.size() == 3 ? str(cycle[0]) + "," + str(cycle[1]) + "," + str(cycle[2]) : ""));

    // Increasing: sum of range sizes
    EnumerationStrategy inc;
    inc.kind = StrategyKind::Increasing;
    inc.degree_min = 2;
    inc.degree_max = 5;
    inc.per_op_ranges["f2"] = {1, 2};
    auto expected_total = count_enumeration(plan, inc);
    expect(expected_total == std::uint64_t{4 + 4 + 2}, "increasing count wrong");
    auto i = enumerate(plan, inc, ctx, 1);
    std::size_t inc_emitted = 0;
    while (i->has_next()) {
        i->next();
        ++inc_emitted;
    }
    expect(inc_emitted == *expected_total, "increasing emitted " + str(inc_emitted));
}

void criterion_semantic_determinism() {
    auto cfg = desk_generator(888, {"linear", "2-chained-filter", "3-chained-filter", "2-way-join",
                                    "3-way-join"},
                              20);
    cfg.event_rates = {500, 800, 1000}; // <= 10^3 tuples per source over 1 s
    // few keys and short windows so every count window fills within the horizon
    cfg.key_cardinality = 10;
    cfg.window_lengths_tuples = {2, 3, 5};
    cfg.window_durations_ms = {50, 100, 150};
    cfg.min_filter_selectivity = 0.3;
    auto plans = generate_corpus(cfg);
    auto cluster = one_node(128);
    CostModelParams cost;

    std::size_t total_checked = 0;
    for (std::size_t idx = 0; idx < plans.size(); ++idx) {
        const auto& base = plans[idx];
        RunOptions opt;
        opt.duration_us = 1e6;
        opt.seed = 4000 + idx;
        opt.collect_outputs = true;

        auto reference_run = run_sim(base, cluster, cost, opt);
        auto expected = reference::expected_sink_outputs(base, opt.seed, opt.duration_us);
        expect(multiset_of(reference_run.outputs) == multiset_of(expected),
               base.id + ": engine outputs differ from the brute-force reference (" +
                   str(reference_run.outputs.size()) + " vs " + str(expected.size()) + ")");
        expect(reference_run.sink_deliveries > 0, base.id + ": no deliveries");

        for (int degree : {4, 8}) {
            EnumerationStrategy s;
            s.kind = StrategyKind::ParameterBased;
            s.degree_min = 1;
            s.degree_max = 8;
            for (const auto& op_id : enumerable_operators(base, s)) s.assignments[op_id] = degree;
            RuleContext ctx;
            auto parallel = enumerate(base, s, ctx, 1)->next();

            auto sim = run_sim(parallel, cluster, cost, opt);
            expect(sim.output_digest == reference_run.output_digest,
                   base.id + " degree " + str(degree) + ": sim digest changed");

            RunOptions topt = opt;
            topt.collect_outputs = false;
            topt.time_scale = 0.001;
            // semantics is what is under test; give the bounded channels
            // enough headroom that skewed hash routing cannot stall the merge
            topt.queue_capacity = 1 << 20;
            auto threads = run_threads(parallel, cluster, cost, topt);
            expect(threads.output_digest == reference_run.output_digest,
                   base.id + " degree " + str(degree) + ": thread digest changed");
        }
        ++total_checked;
    }
    std::cout << "    [" << total_checked << " plans identical across degrees {1,4,8}, sim vs "
              << "threads, and the reference evaluator]\n";
}

// saturated 2-way join; per-instance capacity 10k tuples/s (100 us service)
QueryPlan saturated_join_plan(double per_source_rate) {
    QueryPlan plan;
    plan.id = "saturated-join";
    plan.structure_tag = "2-way-join";
    for (int s = 0; s < 2; ++s) {
        OperatorSpec src;
        src.id = "src" + str(s);
        src.kind = OpKind::Source;
        plan.operators.push_back(src);
        StreamSpec stream;
        stream.schema.fields = {DataType::Integer, DataType::Double};
        stream.event_rate = per_source_rate;
        stream.arrival = ArrivalKind::Uniform;
        stream.key_cardinality = 10000;
        plan.streams[src.id] = stream;

        OperatorSpec f;
        f.id = "filter" + str(s);
        f.kind = OpKind::Filter;
        f.inbound.kind = PartitioningKind::Rebalance;
        f.filter = FilterSpec{0, FilterFn::Ge, Value{std::int64_t{0}}, 1.0};
        plan.operators.push_back(f);
        plan.edges.push_back({src.id, f.id});
    }
    OperatorSpec join;
    join.id = "join";
    join.kind = OpKind::WindowJoin;
    join.inbound.kind = PartitioningKind::Hashing;
    join.inbound.key_field = 0;
    join.join = JoinSpec{WindowSpec{WindowKind::Tumbling, WindowPolicy::Time, 100, std::nullopt}, 0, 0,
                         "filter0"};
    plan.operators.push_back(join);
    plan.edges.push_back({"filter0", "join"});
    plan.edges.push_back({"filter1", "join"});
    OperatorSpec sink;
    sink.id = "sink";
    sink.kind = OpKind::Sink;
    sink.inbound.kind = PartitioningKind::Rebalance;
    plan.operators.push_back(sink);
    plan.edges.push_back({"join", "sink"});
    require_valid(plan);
    return plan;
}

CostModelParams join_capacity_costs() {
    CostModelParams cost;
    cost.join_tuple_cost = 100.0; // one instance sustains 10k tuples/s
    cost.filter_cost = 1.0;
    cost.join_match_cost = 1.0;
    return cost;
}

double median_latency_at_degree(const QueryPlan& base, int join_degree, const ClusterProfile& cluster,
                                const CostModelParams& cost, ExecMode mode, int runs,
                                double* mean_of_medians = nullptr) {
    EnumerationStrategy s;
    s.kind = StrategyKind::ParameterBased;
    s.degree_min = 1;
    s.degree_max = 64;
    s.assignments = {{"filter0", 4}, {"filter1", 4}, {"join", join_degree}};
    RuleContext ctx;
    auto plan = enumerate(base, s, ctx, 1)->next();
    RunOptions opt;
    opt.duration_us = 2e6;
    opt.seed = 71;
    auto protocol = run_protocol(plan, cluster, cost, opt, mode, runs, false);
    if (mean_of_medians) *mean_of_medians = protocol.mean_of_medians;
    return protocol.latency.run_medians[0];
}

void criterion_parallelism_speedup() {
    // combined source rate 80k/s = 8x one join instance's 10k/s capacity
    auto base = saturated_join_plan(40000.0);
    auto cluster = one_node(128);
    auto cost = join_capacity_costs();

    std::map<int, double> median_by_degree;
    for (int degree : {1, 2, 4, 8, 16, 32, 64})
        median_by_degree[degree] =
            median_latency_at_degree(base, degree, cluster, cost, ExecMode::Sim, 1);

    double at1 = median_by_degree[1];
    double at8 = median_by_degree[8];
    expect(at8 <= 0.5 * at1, "median at degree 8 (" + str(at8) + ") not <= 0.5x degree 1 (" +
                                 str(at1) + ")");

    int best_degree = 1;
    for (auto [degree, median] : median_by_degree)
        if (median < median_by_degree[best_degree]) best_degree = degree;
    expect(median_by_degree[64] >= median_by_degree[best_degree],
           "median at 64 below the knee minimum");
    std::ostringstream sweep;
    for (auto [degree, median] : median_by_degree) sweep << " p" << degree << "=" << median;
    std::cout << "    [median latency by degree (us):" << sweep.str() << "; knee at p"
              << best_degree << "]\n";
}

void criterion_heterogeneity_direction() {
    auto base = saturated_join_plan(40000.0);
    auto cost = join_capacity_costs();
    double mean_m510 = 0, mean_c6525 = 0;
    median_latency_at_degree(base, 8, resolve_cluster("m510x10"), cost, ExecMode::Sim, 3,
                             &mean_m510);
    median_latency_at_degree(base, 8, resolve_cluster("c6525_25gx10"), cost, ExecMode::Sim, 3,
                             &mean_c6525);
    expect(mean_c6525 <= mean_m510,
           "c6525_25g mean-of-medians (" + str(mean_c6525) + ") exceeds m510 (" + str(mean_m510) + ")");
    std::cout << "    [mean-of-medians us: c6525_25g=" << mean_c6525 << " m510=" << mean_m510
              << "]\n";
}

void criterion_metric_contracts() {
    expect(q_error(10, 10).value == 1.0, "q(10,10) != 1");
    expect(q_error(2, 8).value == 4.0, "q(2,8) != 4");
    expect(q_error(8, 2).value == 4.0, "q(8,2) != 4");

    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        double c = rng.uniform(1e-3, 1e6);
        double chat = rng.uniform(1e-3, 1e6);
        double a = rng.uniform(0.01, 100.0);
        double lhs = q_error(a * c, a * chat).value;
        double rhs = q_error(c, chat).value;
        expect(std::abs(lhs - rhs) <= 1e-9 * std::max(lhs, rhs),
               "scale invariance violated at pair " + str(i));
    }
    for (int i = 0; i < 1000; ++i) {
        std::size_t n = 1 + rng.below(64);
        std::vector<double> samples;
        for (std::size_t k = 0; k < n; ++k) samples.push_back(rng.uniform(0, 1e6));
        auto s = summarize_latency(samples);
        expect(s.min <= s.p50 && s.p50 <= s.p95 && s.p95 <= s.p99 && s.p99 <= s.max,
               "percentile monotonicity violated at set " + str(i));
    }
}

HarnessConfig desk_harness(std::uint64_t seed) {
    HarnessConfig config;
    config.generator = desk_generator(seed, {"linear", "2-way-join"}, 500);
    // per-key volume must cover the largest count window even behind a
    // selective filter, so windows fire within the one-second horizon
    config.generator.event_rates = {2000, 5000, 10000};
    config.generator.window_lengths_tuples = {2, 3, 5};
    config.generator.min_filter_selectivity = 0.2;
    config.duration_s = 1.0;
    config.protocol_runs = 3;
    config.strategy.strategy.kind = StrategyKind::RuleBased;
    config.strategy.strategy.degree_min = 1;
    config.strategy.strategy.degree_max = 16;
    config.strategy.per_core_capacity = 500.0; // spreads rule-based degrees over [1, 16]
    config.cluster = "m510x10";
    config.results_dir = "";
    config.split.seed = seed;
    config.train.seed = seed;
    return config;
}

void criterion_learned_pipeline() {
    fs::path dir = "/tmp/pdsp_acceptance_c8";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto config = desk_harness(31337);

    auto gen = stage_generate(config, (dir / "plans.jsonl").string());
    expect(gen["plans"] == 500, "expected 500 plans");
    auto run_summary = stage_run(config, (dir / "plans.jsonl").string(), (dir / "corpus.jsonl").string());
    expect(run_summary["failures"].empty(), "run failures: " + run_summary["failures"].dump());
    expect(run_summary["records"].get<std::size_t>() >= 500,
           "corpus smaller than 500 records: " + run_summary["records"].dump());

    auto records = CorpusStore::load((dir / "corpus.jsonl").string());
    auto split = split_records(records, config.split);

    TrainConfig tc = config.train;
    tc.kind = ModelKind::MeanBaseline;
    auto baseline = train(records, split, tc);
    double baseline_q50 = evaluate(baseline, records, split.test).overall.median;

    std::map<std::string, double> q50_by_model;
    for (auto kind : {ModelKind::LR, ModelKind::MLP, ModelKind::RF, ModelKind::GNN}) {
        TrainConfig mc = config.train;
        mc.kind = kind;
        auto model = train(records, split, mc);
        expect(model.stopped_epoch <= model.best_epoch + 101,
               std::string(model_kind_name(kind)) + ": early stopping bound violated (stopped " +
                   str(model.stopped_epoch) + ", best " + str(model.best_epoch) + ")");
        double q50 = evaluate(model, records, split.test).overall.median;
        q50_by_model[model_kind_name(kind)] = q50;
        expect(q50 < baseline_q50, std::string(model_kind_name(kind)) + " median q-error " + str(q50) +
                                       " not below baseline " + str(baseline_q50));
    }
    expect(q50_by_model["gnn"] <= 2.0, "gnn median test q-error " + str(q50_by_model["gnn"]) + " > 2.0");

    std::ostringstream line;
    for (auto& [name, q] : q50_by_model) line << ' ' << name << "=" << q;
    std::cout << "    [baseline q50=" << baseline_q50 << ";" << line.str() << "]\n";
    fs::remove_all(dir);
}

void criterion_gradient_correctness() {
    Rng rng(7);
    // MLP
    {
        Mlp net({8, 12, 1}, rng);
        std::vector<std::vector<double>> xs;
        std::vector<double> ys;
        for (int n = 0; n < 6; ++n) {
            std::vector<double> x(8);
            for (auto& v : x) v = rng.uniform(-1, 1);
            xs.push_back(x);
            ys.push_back(rng.uniform(-1, 1));
        }
        std::vector<double> grad;
        net.loss_and_grad(xs, ys, grad);
        auto params = net.params();
        const double h = 1e-6;
        for (int probe = 0; probe < 110; ++probe) {
            std::size_t k = rng.below(params.size());
            auto plus = params, minus = params;
            plus[k] += h;
            minus[k] -= h;
            std::vector<double> tmp;
            net.set_params(plus);
            double lp = net.loss_and_grad(xs, ys, tmp);
            net.set_params(minus);
            double lm = net.loss_and_grad(xs, ys, tmp);
            net.set_params(params);
            double numeric = (lp - lm) / (2 * h);
            double rel =
                std::abs(numeric - grad[k]) / std::max(1e-8, std::abs(numeric) + std::abs(grad[k]));
            expect(rel < 1e-4, "mlp gradient mismatch at coordinate " + str(k) + ": rel " + str(rel));
        }
    }
    // GNN
    {
        Gnn net(static_cast<int>(node_feature_names().size()), 8, 2, rng);
        GeneratorConfig cfg = desk_generator(55, {"linear", "2-way-join"}, 4);
        auto plans = generate_corpus(cfg);
        std::vector<PlanGraph> graphs;
        std::vector<double> ys;
        for (const auto& plan : plans) {
            RunRecord r;
            r.plan = plan;
            r.cluster = resolve_cluster("m510x10");
            r.cluster_name = r.cluster.name;
            auto g = featurize_graph(r);
            for (auto& f : g.node_features)
                for (auto& v : f) v = rng.uniform(-1, 1);
            graphs.push_back(std::move(g));
            ys.push_back(rng.uniform(-1, 1));
        }
        std::vector<double> grad;
        net.loss_and_grad(graphs, ys, grad);
        auto params = net.params();
        const double h = 1e-6;
        for (int probe = 0; probe < 110; ++probe) {
            std::size_t k = rng.below(params.size());
            auto plus = params, minus = params;
            plus[k] += h;
            minus[k] -= h;
            std::vector<double> tmp;
            net.set_params(plus);
            double lp = net.loss_and_grad(graphs, ys, tmp);
            net.set_params(minus);
            double lm = net.loss_and_grad(graphs, ys, tmp);
            net.set_params(params);
            double numeric = (lp - lm) / (2 * h);
            double rel =
                std::abs(numeric - grad[k]) / std::max(1e-8, std::abs(numeric) + std::abs(grad[k]));
            expect(rel < 1e-4, "gnn gradient mismatch at coordinate " + str(k) + ": rel " + str(rel));
        }
    }
}

void criterion_strategy_comparison() {
    fs::path dir = "/tmp/pdsp_acceptance_c10";
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto config = desk_harness(4242);
    config.generator.count = 120;
    config.train.kind = ModelKind::GNN;
    config.train.max_epochs = 200;

    auto plans_path = (dir / "plans.jsonl").string();
    stage_generate(config, plans_path);

    std::vector<std::pair<std::string, std::string>> corpora;
    for (std::string strategy : {"rule", "random"}) {
        HarnessConfig sc = config;
        sc.strategy.strategy.kind = strategy_kind_from_name(strategy);
        std::string corpus = (dir / ("corpus_" + strategy + ".jsonl")).string();
        auto summary = stage_run(sc, plans_path, corpus);
        expect(summary["failures"].empty(), strategy + " run failures");
        corpora.push_back({strategy, corpus});
    }
    auto a = CorpusStore::load(corpora[0].second);
    auto b = CorpusStore::load(corpora[1].second);
    expect(a.size() == b.size(), "corpora sizes differ");

    auto csv = stage_compare(config, corpora);
    std::istringstream lines(csv);
    std::string header, row_rule, row_random;
    std::getline(lines, header);
    std::getline(lines, row_rule);
    std::getline(lines, row_random);
    expect(header == kCompareCsvHeader, "comparison header mismatch: " + header);
    expect(row_rule.rfind("rule,", 0) == 0 && row_random.rfind("random,", 0) == 0,
           "comparison rows malformed");
    std::string extra;
    expect(!std::getline(lines, extra) || extra.empty(), "more than two comparison rows");

    // finite q-errors and recorded wall time
    auto parse_row = [](const std::string& row) {
        std::vector<std::string> cells;
        std::stringstream ss(row);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    for (const auto& row : {row_rule, row_random}) {
        auto cells = parse_row(row);
        expect(cells.size() == 6, "row cell count");
        expect(std::stod(cells[2]) > 0, "wall time not recorded");
        for (int c : {3, 4, 5})
            expect(std::isfinite(std::stod(cells[static_cast<std::size_t>(c)])), "non-finite q-error");
    }
    // directional observation (reported, not asserted: measurement-dependent)
    auto rule_q = std::stod(parse_row(row_rule)[3]);
    auto random_q = std::stod(parse_row(row_random)[3]);
    std::cout << "    [rule q50=" << rule_q << ", random q50=" << random_q << " -> "
              << (rule_q <= random_q ? "rule-based at or below random, matching the reported trend"
                                     : "random below rule-based on this desk-scale corpus")
              << "]\n";
    fs::remove_all(dir);
}

void criterion_pipeline_determinism() {
    auto config = desk_harness(999);
    config.generator.count = 40;
    config.train.max_epochs = 150;
    config.pipeline_models = {"lr", "mlp", "rf", "gnn"};

    fs::path dir_a = "/tmp/pdsp_acceptance_c11_a";
    fs::path dir_b = "/tmp/pdsp_acceptance_c11_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    auto summary_a = stage_pipeline(config, dir_a.string());
    auto summary_b = stage_pipeline(config, dir_b.string());

    for (const char* name : {"plans.jsonl", "corpus_rule.jsonl", "corpus_random.jsonl"}) {
        auto a = read_file((dir_a / name).string());
        auto b = read_file((dir_b / name).string());
        expect(a == b, std::string(name) + " differs between identical pipeline runs");
        expect(!a.empty(), std::string(name) + " is empty");
    }

    auto records = CorpusStore::load((dir_a / "corpus_rule.jsonl").string());
    for (const char* model_name : {"lr", "mlp", "rf", "gnn"}) {
        auto model_a = TrainedModel::load((dir_a / ("model_" + std::string(model_name) + ".json")).string());
        auto model_b = TrainedModel::load((dir_b / ("model_" + std::string(model_name) + ".json")).string());
        for (std::size_t i = 0; i < records.size(); i += 7)
            expect(predict(model_a, records[i]) == predict(model_b, records[i]),
                   std::string(model_name) + " predictions differ between pipeline runs");
    }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

void criterion_arrival_statistics() {
    StreamSpec s;
    s.schema.fields = {DataType::Integer};
    s.event_rate = 1000.0;
    s.arrival = ArrivalKind::Poisson;
    const std::size_t n = 100000;
    auto tuples = generate_stream(s, 14, n);

    double mean_gap_us = tuples.back().event_ts / static_cast<double>(n - 1);
    expect(std::abs(mean_gap_us - 1000.0) / 1000.0 < 0.05,
           "mean rate off by more than 5%: gap " + str(mean_gap_us) + " us");

    std::map<std::int64_t, double> counts;
    for (const auto& t : tuples) counts[static_cast<std::int64_t>(t.event_ts / 1e6)]++;
    counts.erase(std::prev(counts.end()));
    double mean = 0, var = 0;
    for (auto& [sec, c] : counts) mean += c;
    mean /= static_cast<double>(counts.size());
    for (auto& [sec, c] : counts) var += (c - mean) * (c - mean);
    var /= static_cast<double>(counts.size());
    double dispersion = var / mean;
    expect(dispersion >= 0.9 && dispersion <= 1.1,
           "dispersion index " + str(dispersion) + " outside [0.9, 1.1]");
    std::cout << "    [mean inter-arrival " << mean_gap_us << " us, dispersion " << dispersion
              << "]\n";
}

} // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> criteria = {
        {1, "parallelism-category mapping matches the table", criterion_category_mapping},
        {2, "1000 synthetic plans valid with selective filters", criterion_workload_validity},
        {3, "enumeration strategy counts", criterion_enumeration_counts},
        {4, "semantic determinism across degrees, modes, and the reference evaluator",
         criterion_semantic_determinism},
        {5, "parallelism speedup and tipping point on a saturated join", criterion_parallelism_speedup},
        {6, "heterogeneity direction: c6525_25g at or below m510", criterion_heterogeneity_direction},
        {7, "metric contracts (q-error and nearest-rank percentiles)", criterion_metric_contracts},
        {8, "learned-model pipeline beats the mean baseline at desk scale",
         criterion_learned_pipeline},
        {9, "MLP and GNN analytic gradients match finite differences", criterion_gradient_correctness},
        {10, "rule-based vs random strategy comparison table", criterion_strategy_comparison},
        {11, "pipeline determinism: byte-identical corpora, identical predictions",
         criterion_pipeline_determinism},
        {12, "poisson arrival statistics (rate and dispersion)", criterion_arrival_statistics},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (only != 0 && criterion.number != only) continue;
        auto started = std::chrono::steady_clock::now();
        try {
            criterion.body();
            double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            std::cout << "PASS criterion " << criterion.number << ": " << criterion.description
                      << " (" << secs << " s)\n";
        } catch (const std::exception& e) {
            double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            std::cout << "FAIL criterion " << criterion.number << ": " << criterion.description
                      << " (" << secs << " s)\n        " << e.what() << "\n";
            ++failures;
        }
        std::cout.flush();
    }
    if (failures == 0)
        std::cout << "acceptance: all criteria passed\n";
    else
        std::cout << "acceptance: " << failures << " criteria failed\n";
    return failures == 0 ? 0 : 1;
}
