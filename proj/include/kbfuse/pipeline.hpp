#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kbfuse/aligngraph.hpp"
#include "kbfuse/consolidate.hpp"
#include "kbfuse/corpus.hpp"
#include "kbfuse/daks.hpp"
#include "kbfuse/evalkit.hpp"
#include "kbfuse/packer.hpp"
#include "kbfuse/scorers.hpp"

namespace kbfuse::pipeline {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Strategy {
    single_kb,         // all budget into one KB
    merged,            // pooled index over all KBs, no routing
    uniform,           // equal per-KB budgets, no routing
    naive_concat,      // equal budgets, raw score order, no caps or coverage
    score_only_rerank, // routed pool, consolidation, fused base score, no coverage
    daks,              // routed pool + coverage-aware packing
    daks_graph_full,   // routed pool + graph-support fusion + coverage packing
};

std::string_view to_string(Strategy s);
std::optional<Strategy> strategy_from_string(std::string_view s);

enum class BridgeMode { off, on, auto_on_cross };

struct PipelineConfig {
    std::string corpus_path;
    std::string queries_path;
    std::string out_dir;
    std::optional<std::string> retriever_scores_path;
    std::optional<std::string> ranker_scores_path;
    std::vector<KbId> declared_kbs;  // empty = take from corpus

    ScorerConfig scorer;
    daks::DaksConfig daks;
    consolidate::ConsolidateConfig consolidate;
    aligngraph::FusionConfig fusion;
    packer::PackConfig pack;

    int eval_k = 5;
    bool enable_ranker = false;
    BridgeMode bridge = BridgeMode::auto_on_cross;
    Strategy strategy = Strategy::daks_graph_full;
    KbId single_kb;  // required when strategy == single_kb
    int workers = 0; // 0 = hardware concurrency

    KbId dense_kb = "E";
    std::vector<KbId> authoritative_kbs{"T", "P"};

    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig load_file(const std::string& path);
    nlohmann::json to_json() const;
};

/// Full per-query record: every intermediate score is kept so any reported
/// number can be audited by hand from the trace file.
struct QueryTrace {
    std::string query_id;
    Strategy strategy = Strategy::daks_graph_full;
    std::optional<daks::RoutingDecision> routing;
    std::vector<KbId> kb_ranking;               // strategy-level KB order
    std::vector<KbId> predicted_required;       // coverage targets (may be empty)
    std::vector<consolidate::Candidate> candidates;
    std::vector<aligngraph::RankedChunk> ranked;
    std::vector<std::string> bridge_added;      // chunk ids pulled only by traversal
    packer::PackedEvidence packed;
    std::vector<KbId> skipped_empty_kbs;

    nlohmann::json to_json(const Corpus& corpus) const;
    evalkit::QueryOutcome outcome() const;
};

/// Prebuilt shared state for a run.
struct Engine {
    Corpus corpus;
    Scorers scorers;
    aligngraph::AlignmentGraph graph;

    Engine(Corpus c, ScorerConfig cfg, std::optional<ScoreTable> ret, std::optional<ScoreTable> rank);
};

QueryTrace run_query(const Engine& engine, const Query& q, const PipelineConfig& cfg);

struct RunResult {
    std::vector<QueryTrace> traces;  // query order
};

/// Runs every query (worker pool; deterministic order in the result).
RunResult run_all(const Engine& engine, const std::vector<Query>& queries, const PipelineConfig& cfg);

/// Writes one trace JSON per query plus the packed-evidence JSONL.
void write_run(const RunResult& result, const Corpus& corpus, const PipelineConfig& cfg,
               const std::string& strategy_dir);

std::vector<evalkit::QueryOutcome> outcomes(const RunResult& result);

/// Reads outcomes back from a strategy directory written by write_run.
std::vector<evalkit::QueryOutcome> load_outcomes(const std::string& strategy_dir);

}  // namespace kbfuse::pipeline
