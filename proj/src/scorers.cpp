#include "kbfuse/scorers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "kbfuse/text.hpp"

namespace kbfuse {

using nlohmann::json;

namespace {

std::map<std::string, int> terms_of(const std::string& txt, const std::vector<EntityRef>& entities) {
    std::map<std::string, int> terms;
    for (auto& bg : text::char_bigrams(txt)) ++terms[bg];
    for (const auto& e : entities) ++terms[e.name];
    return terms;
}

void sort_scored(std::vector<ScoredChunk>& v) {
    std::sort(v.begin(), v.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    });
}

}  // namespace

std::map<std::string, int> query_terms(const Query& q) { return terms_of(q.text, q.entities); }
std::map<std::string, int> chunk_terms(const Chunk& c) { return terms_of(c.text, c.entities); }

LexIndex::LexIndex(const Corpus& corpus, std::vector<std::size_t> members, KbId kb, ScorerConfig cfg)
    : kb_(std::move(kb)), cfg_(cfg) {
    std::vector<const Chunk*> chunks;
    chunks.reserve(members.size());
    for (std::size_t i : members) chunks.push_back(&corpus.chunks()[i]);
    std::sort(chunks.begin(), chunks.end(),
              [](const Chunk* a, const Chunk* b) { return a->chunk_id < b->chunk_id; });

    long long total_len = 0;
    for (int local = 0; local < static_cast<int>(chunks.size()); ++local) {
        const Chunk& c = *chunks[local];
        chunk_ids_.push_back(c.chunk_id);
        int dl = 0;
        for (const auto& [term, tf] : chunk_terms(c)) {
            post_[term].emplace_back(local, tf);
            dl += tf;
        }
        doc_len_.push_back(dl);
        total_len += dl;
    }
    avgdl_ = chunk_ids_.empty() ? 1.0
                                : std::max(1e-9, static_cast<double>(total_len) / chunk_ids_.size());
}

LexIndex LexIndex::build(const Corpus& corpus, const KbId& kb, ScorerConfig cfg) {
    const auto& members = corpus.kb_chunks(kb);
    if (members.empty()) throw EmptyKb(kb);
    return LexIndex(corpus, members, kb, cfg);
}

LexIndex LexIndex::build_merged(const Corpus& corpus, ScorerConfig cfg) {
    std::vector<std::size_t> all(corpus.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    if (all.empty()) throw EmptyKb("*");
    return LexIndex(corpus, all, "*", cfg);
}

std::vector<ScoredChunk> LexIndex::score(const Query& q) const {
    const std::size_t n = chunk_ids_.size();
    std::vector<double> acc(n, 0.0);
    const double N = static_cast<double>(n);
    for (const auto& [term, qtf] : query_terms(q)) {
        auto it = post_.find(term);
        if (it == post_.end()) continue;
        const auto& postings = it->second;
        const double df = static_cast<double>(postings.size());
        const double idf = std::log(1.0 + (N - df + 0.5) / (df + 0.5));
        for (const auto& [local, tf] : postings) {
            const double norm = cfg_.k1 * (1.0 - cfg_.b + cfg_.b * doc_len_[local] / avgdl_);
            acc[local] += qtf * idf * (tf * (cfg_.k1 + 1.0)) / (tf + norm);
        }
    }
    std::vector<ScoredChunk> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({chunk_ids_[i], acc[i], ScoreSource::retriever});
    sort_scored(out);
    return out;
}

std::optional<int> LexIndex::doc_freq(const std::string& term) const {
    auto it = post_.find(term);
    if (it == post_.end()) return std::nullopt;
    return static_cast<int>(it->second.size());
}

void LexIndex::dump(std::ostream& out) const {
    json j;
    j["format"] = "kbfuse-lexindex-v1";
    j["kb"] = kb_;
    j["k1"] = cfg_.k1;
    j["b"] = cfg_.b;
    j["chunks"] = chunk_ids_;
    j["doc_len"] = doc_len_;
    j["avgdl"] = avgdl_;
    json terms = json::object();
    for (const auto& [term, postings] : post_) {
        json plist = json::array();
        for (const auto& [local, tf] : postings) plist.push_back({local, tf});
        terms[term] = {{"df", postings.size()}, {"postings", plist}};
    }
    j["terms"] = std::move(terms);
    out << j.dump() << '\n';
}

std::vector<double> normalize_values(std::vector<double> values) {
    if (values.empty()) throw EmptyList();
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double lo = *mn, hi = *mx;
    if (hi == lo) {
        std::fill(values.begin(), values.end(), 0.5);
        return values;
    }
    for (double& v : values) v = (v - lo) / (hi - lo);
    return values;
}

std::vector<ScoredChunk> normalize(std::vector<ScoredChunk> scores) {
    if (scores.empty()) throw EmptyList();
    std::vector<double> vals;
    vals.reserve(scores.size());
    for (const auto& s : scores) vals.push_back(s.score);
    vals = normalize_values(std::move(vals));
    for (std::size_t i = 0; i < scores.size(); ++i) scores[i].score = vals[i];
    return scores;
}

ScoreTable ScoreTable::load_jsonl(std::istream& in) {
    ScoreTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SchemaError(line_no, e.what());
        }
        if (!j.contains("query_id") || !j.contains("chunk_id") || !j.contains("score"))
            throw SchemaError(line_no, "score record needs query_id, chunk_id, score");
        if (!j["score"].is_number()) throw SchemaError(line_no, "\"score\" must be a number");
        const double s = j["score"].get<double>();
        if (!std::isfinite(s)) throw SchemaError(line_no, "\"score\" must be finite");
        t.scores_[{j["query_id"].get<std::string>(), j["chunk_id"].get<std::string>()}] = s;
    }
    return t;
}

ScoreTable ScoreTable::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open score file: " + path);
    return load_jsonl(in);
}

std::optional<double> ScoreTable::lookup(const std::string& query_id, const std::string& chunk_id) const {
    auto it = scores_.find({query_id, chunk_id});
    if (it == scores_.end()) return std::nullopt;
    return it->second;
}

Scorers::Scorers(const Corpus& corpus, ScorerConfig cfg, std::optional<ScoreTable> retriever_scores,
                 std::optional<ScoreTable> ranker_scores)
    : corpus_(&corpus),
      retriever_scores_(std::move(retriever_scores)),
      ranker_scores_(std::move(ranker_scores)) {
    for (const auto& kb : corpus.kb_ids()) {
        if (corpus.kb_chunks(kb).empty()) {
            empty_kbs_.push_back(kb);
            continue;
        }
        indexes_.emplace(kb, LexIndex::build(corpus, kb, cfg));
        indexed_kbs_.push_back(kb);
    }
    if (corpus.size() > 0) merged_.emplace(LexIndex::build_merged(corpus, cfg));
}

std::vector<ScoredChunk> Scorers::rank_kb(const Query& q, const KbId& kb) const {
    if (retriever_scores_) {
        std::vector<ScoredChunk> out;
        for (std::size_t i : corpus_->kb_chunks(kb)) {
            const auto& c = corpus_->chunks()[i];
            const auto s = retriever_scores_->lookup(q.query_id, c.chunk_id);
            out.push_back({c.chunk_id, s.value_or(0.0), ScoreSource::retriever});
        }
        if (out.empty()) throw MissingIndex(kb);
        sort_scored(out);
        return out;
    }
    return index(kb).score(q);
}

std::vector<ScoredChunk> Scorers::rank_merged(const Query& q) const {
    if (retriever_scores_) {
        std::vector<ScoredChunk> out;
        for (const auto& c : corpus_->chunks()) {
            const auto s = retriever_scores_->lookup(q.query_id, c.chunk_id);
            out.push_back({c.chunk_id, s.value_or(0.0), ScoreSource::retriever});
        }
        sort_scored(out);
        return out;
    }
    if (!merged_) throw MissingIndex("*");
    return merged_->score(q);
}

std::optional<double> Scorers::ranker_score(const std::string& query_id, const std::string& chunk_id) const {
    if (!ranker_scores_) return std::nullopt;
    return ranker_scores_->lookup(query_id, chunk_id);
}

const LexIndex& Scorers::index(const KbId& kb) const {
    auto it = indexes_.find(kb);
    if (it == indexes_.end()) throw MissingIndex(kb);
    return it->second;
}

}  // namespace kbfuse
