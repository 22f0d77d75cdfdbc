#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kbfuse/corpus.hpp"
#include "kbfuse/packer.hpp"

namespace kbfuse::evalkit {

struct KeyMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GoldMissing : std::runtime_error {
    explicit GoldMissing(const std::string& qid)
        : std::runtime_error("no gold label for query \"" + qid + "\"") {}
};
struct InvalidSpec : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-query pipeline outcome, as consumed by the metric suite (read back
/// from trace files or passed in-process).
struct QueryOutcome {
    std::string query_id;
    std::vector<KbId> kb_ranking;             // descending routing score
    std::vector<packer::PackedChunk> evidence;  // packed order
};

struct RoutingMetrics {
    double primary_acc = 0.0;
    double top2_hit = 0.0;
    double edr = 0.0;       // dense-KB share of the top-K evidence
    double auth_cov = 0.0;  // authoritative evidence present in top-K
    int n_queries = 0;
    int auth_population = 0;  // queries whose gold primary is authoritative
};

struct EvidenceMetrics {
    double ev_recall_at_k = 0.0;
    double ev_ndcg_at_k = 0.0;
    double cross_ev_at_k = 0.0;
    int k = 5;
    int n_queries = 0;
    int cross_population = 0;  // queries with >= 2 required KBs
};

/// PrimaryAcc / Top2Hit from the KB ranking; EDR = mean share of dense_kb
/// chunks among the top-min(K, |evidence|) packed chunks (0 for empty
/// evidence); AuthCov = over queries whose gold primary is in auth_kbs, the
/// fraction with at least one top-K chunk from an authoritative KB.
RoutingMetrics routing_metrics(const std::vector<QueryOutcome>& outcomes,
                               const std::map<std::string, GoldLabel>& golds, int k,
                               const KbId& dense_kb = "E",
                               const std::vector<KbId>& auth_kbs = {"T", "P"});

/// Recall@k over gold chunk ids; NDCG@k with binary gains and IDCG over
/// min(k, |gold|) positions; CrossEv@k = all required KBs appear among the
/// top-k evidence KB labels, averaged over queries with >= 2 required KBs.
EvidenceMetrics evidence_metrics(const std::vector<QueryOutcome>& outcomes,
                                 const std::map<std::string, GoldLabel>& golds, int k);

/// Binary-gain NDCG for one ranked id list.
double ndcg_at_k(const std::vector<std::string>& ranked_ids,
                 const std::vector<std::string>& gold_ids, int k);

struct BenchSpec {
    int n_queries = 500;
    std::array<double, 4> type_mix{0.25, 0.25, 0.25, 0.25};  // definition, classics, clinical, cross
    std::map<KbId, int> kb_sizes{{"E", 2800}, {"T", 2300}, {"P", 2300}};
    double density_bias = 2.0;  // term-concentration ratio of E vs T/P chunks
    std::uint64_t seed = 42;
};

struct Benchmark {
    Corpus corpus;
    QuerySet queries;
};

/// Seeded synthetic three-KB benchmark. E chunks are short and term-dense
/// (by density_bias); T/P chunks are longer with distributed terms; topics
/// plant typed entities across KBs so that graph traversal can bridge them.
/// Identical spec -> byte-identical serialized output.
Benchmark gen_benchmark(const BenchSpec& spec);

struct StrategyMetrics {
    std::string strategy;
    RoutingMetrics routing;
    EvidenceMetrics evidence;
};

/// Aligned text table, one strategy per row.
std::string metrics_table(const std::vector<StrategyMetrics>& rows);

}  // namespace kbfuse::evalkit
