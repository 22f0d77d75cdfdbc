#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kbfuse/corpus.hpp"

namespace kbfuse {

enum class ScoreSource { retriever, ranker };

struct ScoredChunk {
    std::string chunk_id;
    double score = 0.0;
    ScoreSource source = ScoreSource::retriever;
};

/// Lexical scorer parameters (BM25 family).
struct ScorerConfig {
    double k1 = 1.2;
    double b = 0.75;
};

struct EmptyKb : std::runtime_error {
    explicit EmptyKb(const KbId& kb) : std::runtime_error("KB \"" + kb + "\" has no chunks"), kb_id(kb) {}
    KbId kb_id;
};
struct EmptyList : std::runtime_error {
    EmptyList() : std::runtime_error("empty score list") {}
};
struct MissingIndex : std::runtime_error {
    explicit MissingIndex(const KbId& kb) : std::runtime_error("no index for KB \"" + kb + "\""), kb_id(kb) {}
    KbId kb_id;
};

/// Deterministic inverted index over one KB's chunks.
///
/// Term space: code-point bigrams of the NFC text plus whole entity names;
/// both live in one string space, so a two-character entity name is the same
/// term as the equal bigram. A one-code-point text contributes that single
/// code point as its only text term.
///
/// score() evaluates, per chunk:
///   sum over distinct query terms t of
///     qtf(t) * idf(t) * tf(t) * (k1 + 1) / (tf(t) + k1 * (1 - b + b * dl / avgdl))
/// with idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)), dl = chunk term count.
class LexIndex {
public:
    static LexIndex build(const Corpus& corpus, const KbId& kb, ScorerConfig cfg = {});
    /// One index over every chunk of the corpus (pooled retrieval).
    static LexIndex build_merged(const Corpus& corpus, ScorerConfig cfg = {});

    /// Scores every indexed chunk: score descending, chunk_id ascending.
    /// Chunks sharing no term with the query score 0.
    std::vector<ScoredChunk> score(const Query& q) const;

    const KbId& kb() const { return kb_; }
    std::size_t num_chunks() const { return chunk_ids_.size(); }
    std::optional<int> doc_freq(const std::string& term) const;
    double avg_doc_len() const { return avgdl_; }

    /// Stable JSON dump: term table with document frequencies and postings.
    void dump(std::ostream& out) const;

private:
    LexIndex(const Corpus& corpus, std::vector<std::size_t> members, KbId kb, ScorerConfig cfg);

    KbId kb_;
    ScorerConfig cfg_;
    std::vector<std::string> chunk_ids_;                            // ascending; local id = position
    std::vector<int> doc_len_;                                      // term tokens per chunk
    double avgdl_ = 1.0;
    std::map<std::string, std::vector<std::pair<int, int>>> post_;  // term -> [(local, tf)]
};

/// Query-side term multiset: bigrams of the NFC text (with multiplicity)
/// plus one occurrence per entity name.
std::map<std::string, int> query_terms(const Query& q);
std::map<std::string, int> chunk_terms(const Chunk& c);

/// Min-max normalization over the list: (s - min) / (max - min); all 0.5
/// when max == min. Input order (and tie order) preserved.
std::vector<ScoredChunk> normalize(std::vector<ScoredChunk> scores);
std::vector<double> normalize_values(std::vector<double> values);

/// Externally produced scores, one JSONL record per (query, chunk):
/// {"query_id": str, "chunk_id": str, "score": num}. Chunks without a
/// record score 0.
class ScoreTable {
public:
    static ScoreTable load_jsonl(std::istream& in);
    static ScoreTable load_file(const std::string& path);
    std::optional<double> lookup(const std::string& query_id, const std::string& chunk_id) const;
    std::size_t size() const { return scores_.size(); }

private:
    std::map<std::pair<std::string, std::string>, double> scores_;
};

/// Retrieval facade the pipeline works against: built-in lexical indexes per
/// KB (plus a merged one), optionally overridden by external retriever
/// scores, optionally carrying an external ranker table.
class Scorers {
public:
    Scorers(const Corpus& corpus, ScorerConfig cfg,
            std::optional<ScoreTable> retriever_scores = std::nullopt,
            std::optional<ScoreTable> ranker_scores = std::nullopt);

    /// All chunks of one KB, score descending / chunk_id ascending.
    std::vector<ScoredChunk> rank_kb(const Query& q, const KbId& kb) const;
    /// All chunks of the corpus under the merged index (or external scores).
    std::vector<ScoredChunk> rank_merged(const Query& q) const;

    bool has_ranker() const { return ranker_scores_.has_value(); }
    std::optional<double> ranker_score(const std::string& query_id, const std::string& chunk_id) const;

    /// True when raw retriever scores share one scale across KBs.
    bool cross_kb_comparable() const { return !retriever_scores_.has_value(); }

    /// KBs that have at least one chunk (declared-but-empty KBs are not
    /// routable and are reported separately).
    const std::vector<KbId>& indexed_kbs() const { return indexed_kbs_; }
    const std::vector<KbId>& empty_kbs() const { return empty_kbs_; }
    const LexIndex& index(const KbId& kb) const;  // throws MissingIndex

private:
    const Corpus* corpus_;
    std::map<KbId, LexIndex> indexes_;
    std::optional<LexIndex> merged_;
    std::vector<KbId> indexed_kbs_;
    std::vector<KbId> empty_kbs_;
    std::optional<ScoreTable> retriever_scores_;
    std::optional<ScoreTable> ranker_scores_;
};

}  // namespace kbfuse
