#include <filesystem>
#include <fstream>
#include <sstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kbfuse/aligngraph.hpp"
#include "kbfuse/evalkit.hpp"
#include "kbfuse/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kbfuse;

namespace {

pipeline::PipelineConfig load_config(const std::string& config_path) {
    if (config_path.empty()) return {};
    return pipeline::PipelineConfig::load_file(config_path);
}

pipeline::Engine make_engine(const pipeline::PipelineConfig& cfg) {
    if (cfg.corpus_path.empty()) throw pipeline::ConfigError("config is missing \"corpus\"");
    Corpus corpus = Corpus::load_file(cfg.corpus_path, cfg.declared_kbs);
    std::optional<ScoreTable> ret, rank;
    if (cfg.retriever_scores_path) ret = ScoreTable::load_file(*cfg.retriever_scores_path);
    if (cfg.ranker_scores_path) rank = ScoreTable::load_file(*cfg.ranker_scores_path);
    return pipeline::Engine(std::move(corpus), cfg.scorer, std::move(ret), std::move(rank));
}

void validate_golds(const Corpus& corpus, const QuerySet& qs) {
    for (const auto& [qid, gold] : qs.golds) {
        for (const auto& id : gold.evidence_chunk_ids) {
            if (!corpus.find(id))
                throw CorpusError("gold evidence chunk \"" + id + "\" of query \"" + qid +
                                  "\" does not resolve in the corpus");
        }
    }
}

std::string strategy_dir(const pipeline::PipelineConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

std::string strategy_name(const pipeline::PipelineConfig& cfg) {
    if (cfg.strategy == pipeline::Strategy::single_kb) return "single_kb_" + cfg.single_kb;
    return std::string(pipeline::to_string(cfg.strategy));
}

int cmd_gen_bench(const std::string& out_dir, evalkit::BenchSpec spec) {
    const auto bench = evalkit::gen_benchmark(spec);
    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "corpus.jsonl");
        bench.corpus.write_jsonl(out);
    }
    {
        std::ofstream out(fs::path(out_dir) / "queries.jsonl");
        bench.queries.write_jsonl(out);
    }
    std::cout << "benchmark: " << bench.corpus.size() << " chunks, " << bench.queries.queries.size()
              << " queries -> " << out_dir << "\n";
    return 0;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

int cmd_build(const pipeline::PipelineConfig& cfg) {
    const auto engine = make_engine(cfg);
    const fs::path dir = fs::path(cfg.out_dir) / "artifacts";
    fs::create_directories(dir);

    json manifest;
    for (const auto& kb : engine.scorers.indexed_kbs()) {
        std::ostringstream dump;
        engine.scorers.index(kb).dump(dump);
        const auto path = dir / ("index_" + kb + ".json");
        std::ofstream out(path);
        out << dump.str();
        manifest["indexes"][kb] = {{"path", path.string()},
                                   {"chunks", engine.scorers.index(kb).num_chunks()},
                                   {"fnv1a", fnv1a(dump.str())}};
    }
    {
        std::ostringstream dump;
        engine.graph.dump(dump);
        const auto path = dir / "aligngraph.json";
        std::ofstream out(path);
        out << dump.str();
        manifest["graph"] = {{"path", path.string()},
                             {"chunk_nodes", engine.graph.chunk_count()},
                             {"entity_nodes", engine.graph.entity_count()},
                             {"edges", engine.graph.edge_count()},
                             {"fnv1a", fnv1a(dump.str())}};
    }
    for (const auto& kb : engine.scorers.empty_kbs()) manifest["empty_kbs"].push_back(kb);
    std::ofstream mout(dir / "manifest.json");
    mout << manifest.dump(2) << '\n';
    std::cout << "artifacts -> " << dir.string() << "\n";
    return 0;
}

int cmd_build_graph(const pipeline::PipelineConfig& cfg) {
    const auto engine = make_engine(cfg);
    const fs::path dir = fs::path(cfg.out_dir) / "artifacts";
    fs::create_directories(dir);
    std::ofstream out(dir / "aligngraph.json");
    engine.graph.dump(out);
    std::cout << "graph: " << engine.graph.chunk_count() << " chunk nodes, "
              << engine.graph.entity_count() << " entity nodes, " << engine.graph.edge_count()
              << " edges\n";
    return 0;
}

int cmd_run(const pipeline::PipelineConfig& cfg) {
    const auto engine = make_engine(cfg);
    const auto qs = QuerySet::load_file(cfg.queries_path);
    validate_golds(engine.corpus, qs);
    const auto result = pipeline::run_all(engine, qs.queries, cfg);
    const auto dir = strategy_dir(cfg, strategy_name(cfg));
    pipeline::write_run(result, engine.corpus, cfg, dir);
    std::cout << "ran " << qs.queries.size() << " queries (" << strategy_name(cfg) << ") -> " << dir
              << "\n";
    return 0;
}

int cmd_route(const pipeline::PipelineConfig& cfg, const std::string& query_id) {
    const auto engine = make_engine(cfg);
    const auto qs = QuerySet::load_file(cfg.queries_path);
    for (const auto& q : qs.queries) {
        if (!query_id.empty() && q.query_id != query_id) continue;
        const auto decision = daks::route(engine.corpus, engine.scorers, q, cfg.daks);
        json j;
        j["query_id"] = q.query_id;
        j["scores"] = decision.scores;
        j["probs"] = decision.probs;
        j["budgets"] = decision.budgets;
        j["ranking"] = decision.ranking;
        j["k_major"] = decision.k_major;
        json feats = json::object();
        for (const auto& [kb, f] : decision.features)
            feats[kb] = {{"peak", f.peak},
                         {"topm_mean", f.topm_mean},
                         {"margin", f.margin},
                         {"entropy", f.entropy},
                         {"coverage", f.coverage}};
        j["features"] = std::move(feats);
        json pool = json::array();
        for (const auto& p : decision.dense_pool)
            pool.push_back({{"chunk_id", p.chunk_id}, {"kb", p.kb}, {"score", p.score}});
        j["dense_pool"] = std::move(pool);
        std::cout << j.dump() << "\n";
    }
    return 0;
}

int cmd_pack(const pipeline::PipelineConfig& cfg, const std::string& query_id) {
    const auto engine = make_engine(cfg);
    const auto qs = QuerySet::load_file(cfg.queries_path);
    for (const auto& q : qs.queries) {
        if (q.query_id != query_id) continue;
        const auto trace = pipeline::run_query(engine, q, cfg);
        std::cout << trace.to_json(engine.corpus).dump(2) << "\n";
        return 0;
    }
    throw CorpusError("query \"" + query_id + "\" not found in " + cfg.queries_path);
}

int cmd_eval(const pipeline::PipelineConfig& cfg, std::vector<std::string> strategies) {
    const auto qs = QuerySet::load_file(cfg.queries_path);
    if (strategies.empty()) {
        for (const auto& e : fs::directory_iterator(cfg.out_dir)) {
            if (e.is_directory() && fs::exists(e.path() / "packed_evidence.jsonl"))
                strategies.push_back(e.path().filename().string());
        }
        std::sort(strategies.begin(), strategies.end());
    }
    if (strategies.empty()) throw pipeline::ConfigError("no run outputs found under " + cfg.out_dir);

    std::vector<evalkit::StrategyMetrics> rows;
    json report;
    for (const auto& name : strategies) {
        const auto outs = pipeline::load_outcomes(strategy_dir(cfg, name));
        evalkit::StrategyMetrics m;
        m.strategy = name;
        m.routing = evalkit::routing_metrics(outs, qs.golds, cfg.eval_k, cfg.dense_kb,
                                             cfg.authoritative_kbs);
        m.evidence = evalkit::evidence_metrics(outs, qs.golds, cfg.eval_k);
        report[name] = {{"primary_acc", m.routing.primary_acc},
                        {"top2_hit", m.routing.top2_hit},
                        {"edr", m.routing.edr},
                        {"auth_cov", m.routing.auth_cov},
                        {"auth_population", m.routing.auth_population},
                        {"ev_recall_at_k", m.evidence.ev_recall_at_k},
                        {"ev_ndcg_at_k", m.evidence.ev_ndcg_at_k},
                        {"cross_ev_at_k", m.evidence.cross_ev_at_k},
                        {"cross_population", m.evidence.cross_population},
                        {"n_queries", m.routing.n_queries},
                        {"k", cfg.eval_k}};
        rows.push_back(std::move(m));
    }
    const auto table = evalkit::metrics_table(rows);
    fs::create_directories(cfg.out_dir);
    {
        std::ofstream out(fs::path(cfg.out_dir) / "metrics.json");
        out << report.dump(2) << '\n';
    }
    {
        std::ofstream out(fs::path(cfg.out_dir) / "metrics.txt");
        out << table;
    }
    std::cout << table;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-KB retrieval orchestration: routing, fusion, packing, evaluation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("-c,--config", config_path, "pipeline config JSON")->envname("KBFUSE_CONFIG");

    // shared overrides
    std::string corpus_path, queries_path, out_dir, strategy, bridge, single_kb;
    int workers = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--corpus", corpus_path, "corpus JSONL path");
        cmd->add_option("--queries", queries_path, "queries JSONL path");
        cmd->add_option("--out-dir", out_dir, "output directory");
        cmd->add_option("--workers", workers, "worker threads (0 = hardware)");
    };

    auto* gen = app.add_subcommand("gen-bench", "generate the synthetic benchmark");
    evalkit::BenchSpec spec;
    std::string gen_out = "bench";
    gen->add_option("--out-dir", gen_out, "output directory");
    gen->add_option("--seed", spec.seed, "generator seed");
    gen->add_option("--queries", spec.n_queries, "number of queries");
    gen->add_option("--density-bias", spec.density_bias, "encyclopedia term-concentration ratio (>= 1)");
    gen->add_option("--kb-size-e", spec.kb_sizes["E"], "encyclopedia chunk count");
    gen->add_option("--kb-size-t", spec.kb_sizes["T"], "classics chunk count");
    gen->add_option("--kb-size-p", spec.kb_sizes["P"], "clinical-papers chunk count");

    auto* build = app.add_subcommand("build", "build index and graph artifacts");
    add_common(build);
    auto* build_graph = app.add_subcommand("build-graph", "build only the alignment graph dump");
    add_common(build_graph);

    auto* run = app.add_subcommand("run", "run the retrieval pipeline over all queries");
    add_common(run);
    run->add_option("--strategy", strategy,
                    "single_kb:<id> | merged | uniform | naive_concat | score_only_rerank | daks | "
                    "daks_graph_full");
    run->add_option("--bridge", bridge, "off | on | auto");

    std::string query_id;
    auto* route = app.add_subcommand("route", "emit routing traces");
    add_common(route);
    route->add_option("--query-id", query_id, "restrict to one query");

    auto* pack = app.add_subcommand("pack", "debug a single query end to end");
    add_common(pack);
    pack->add_option("--query-id", query_id, "query to pack")->required();
    pack->add_option("--strategy", strategy, "strategy override");
    pack->add_option("--bridge", bridge, "off | on | auto");

    auto* eval = app.add_subcommand("eval", "compute metrics over existing runs");
    add_common(eval);
    std::vector<std::string> eval_strategies;
    eval->add_option("--strategies", eval_strategies, "strategy directories to evaluate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_bench(gen_out, spec);

        auto cfg = load_config(config_path);
        if (!corpus_path.empty()) cfg.corpus_path = corpus_path;
        if (!queries_path.empty()) cfg.queries_path = queries_path;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (workers >= 0) cfg.workers = workers;
        if (!strategy.empty()) {
            const auto parsed = pipeline::strategy_from_string(strategy);
            if (!parsed) throw pipeline::ConfigError("unknown strategy \"" + strategy + "\"");
            cfg.strategy = *parsed;
            if (strategy.rfind("single_kb:", 0) == 0)
                cfg.single_kb = strategy.substr(std::string("single_kb:").size());
        }
        if (!bridge.empty()) {
            if (bridge == "off") cfg.bridge = pipeline::BridgeMode::off;
            else if (bridge == "on") cfg.bridge = pipeline::BridgeMode::on;
            else if (bridge == "auto") cfg.bridge = pipeline::BridgeMode::auto_on_cross;
            else throw pipeline::ConfigError("bridge must be off|on|auto");
        }
        if (cfg.out_dir.empty()) cfg.out_dir = "out";

        if (build->parsed()) return cmd_build(cfg);
        if (build_graph->parsed()) return cmd_build_graph(cfg);
        if (run->parsed()) return cmd_run(cfg);
        if (route->parsed()) return cmd_route(cfg, query_id);
        if (pack->parsed()) return cmd_pack(cfg, query_id);
        if (eval->parsed()) return cmd_eval(cfg, eval_strategies);
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
