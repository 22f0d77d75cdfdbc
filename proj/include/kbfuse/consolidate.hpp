#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kbfuse/corpus.hpp"
#include "kbfuse/daks.hpp"

namespace kbfuse::consolidate {

enum class Origin { dense, expansion, bridge };

std::string_view to_string(Origin o);

struct Candidate {
    std::string chunk_id;
    KbId kb;
    Origin origin = Origin::dense;
    double raw_ret = 0.0;            // retriever score, scorer scale
    std::optional<double> raw_rank;  // ranker score when a ranker is present
    double s_ret_hat = 0.0;          // min-max within the candidate set
    double s_rank_hat = 0.5;         // 0.5 when no ranker
    double s_base = 0.0;             // mu * s_ret_hat + (1 - mu) * s_rank_hat
};

struct ConsolidateConfig {
    double mu = 0.7;
    double jaccard_dup_threshold = 0.9;
    int shingle_size = 5;
    int doc_cap = 3;
};

/// Union of the pool with each member's structural neighbors. Expansion
/// members carry no retriever score yet; fill_retriever_scores gives them a
/// fresh one (inheriting the seed's score would overweight long sections).
std::vector<Candidate> expand(const Corpus& corpus, const std::vector<daks::PooledChunk>& dense_pool);

/// Fills raw_ret (and raw_rank) from a per-chunk lookup; used for expansion
/// and bridge members that were never scored by the probe.
void fill_retriever_scores(std::vector<Candidate>& cands,
                           const std::function<double(const std::string&)>& ret_score,
                           const std::function<std::optional<double>(const std::string&)>& rank_score);

/// Normalizes each score family within the candidate set and fuses:
/// s_base = mu * s_ret_hat + (1 - mu) * s_rank_hat. Without a ranker every
/// s_rank_hat is 0.5, so the fused order equals the retriever order.
void base_scores(std::vector<Candidate>& cands, double mu);

/// Near-duplicate removal (character-shingle Jaccard, transitive groups keep
/// the highest s_base) followed by a per-document cap, then
/// (s_base desc, chunk_id asc) ordering. Idempotent.
std::vector<Candidate> dedup_and_cap(std::vector<Candidate> cands, const Corpus& corpus,
                                     const ConsolidateConfig& cfg);

/// Shingle-set Jaccard between two texts under the configured shingle size.
double shingle_jaccard(const std::string& a, const std::string& b, int shingle_size);

}  // namespace kbfuse::consolidate
