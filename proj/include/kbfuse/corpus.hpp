#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kbfuse {

using KbId = std::string;

enum class EntityType { Disease, Symptom, Drug, Formula, Therapy, Concept, Other };

std::string_view to_string(EntityType t);
std::optional<EntityType> entity_type_from_string(std::string_view s);

/// Typed entity, identified by the (name, type) pair. Names are stored in
/// canonical form (text::normalize_entity_name).
struct EntityRef {
    std::string name;
    EntityType type = EntityType::Other;

    static EntityRef make(std::string_view raw_name, EntityType type);
    auto operator<=>(const EntityRef&) const = default;
};

struct Chunk {
    std::string chunk_id;
    KbId kb;
    std::string doc_id;
    std::vector<std::string> path;       // structural section path; empty for flat docs
    std::string text;
    std::vector<EntityRef> entities;     // sorted, unique
    int token_len = 0;
};

struct Query {
    std::string query_id;
    std::string text;
    std::vector<EntityRef> entities;     // sorted, unique
};

enum class QuestionType { definition, classics_principle, clinical_evidence, cross_kb_synthesis };

std::string_view to_string(QuestionType t);
std::optional<QuestionType> question_type_from_string(std::string_view s);

struct GoldLabel {
    std::string query_id;
    KbId primary_kb;
    std::vector<KbId> required_kbs;              // sorted, unique, non-empty
    std::vector<std::string> evidence_chunk_ids; // sorted, unique, non-empty
    QuestionType question_type = QuestionType::definition;
};

struct CorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DuplicateChunkId : CorpusError {
    explicit DuplicateChunkId(const std::string& id)
        : CorpusError("duplicate chunk_id \"" + id + "\""), chunk_id(id) {}
    std::string chunk_id;
};
struct UnknownKb : CorpusError {
    UnknownKb(const std::string& kb, const std::string& chunk_id)
        : CorpusError("chunk \"" + chunk_id + "\" references undeclared KB \"" + kb + "\""),
          kb_id(kb) {}
    std::string kb_id;
};
struct SchemaError : CorpusError {
    SchemaError(std::size_t line_no, const std::string& what)
        : CorpusError("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
    std::size_t line;
};

/// Number of Unicode scalar values of text after NFC. The unit of the
/// packing budget.
int compute_token_len(std::string_view text);

/// Immutable multi-KB chunk collection. Indexed by chunk_id, by KB, and by
/// (kb, doc_id) in ingestion order. Safe for concurrent reads after load.
class Corpus {
public:
    /// Parses chunk JSONL. declared_kbs, when non-empty, is the closed KB
    /// set; chunks outside it raise UnknownKb. When empty, the KB set is
    /// whatever the stream contains. Any violation rejects the whole stream.
    static Corpus load_jsonl(std::istream& in, std::vector<KbId> declared_kbs = {});
    static Corpus load_file(const std::string& path, std::vector<KbId> declared_kbs = {});
    static Corpus from_chunks(std::vector<Chunk> chunks, std::vector<KbId> declared_kbs = {});

    void write_jsonl(std::ostream& out) const;

    const std::vector<Chunk>& chunks() const { return chunks_; }
    std::size_t size() const { return chunks_.size(); }

    const Chunk* find(std::string_view chunk_id) const;
    const Chunk& at(std::string_view chunk_id) const;  // throws CorpusError if absent

    /// Declared (or observed) KB tags, ascending.
    const std::vector<KbId>& kb_ids() const { return kb_ids_; }
    /// Chunk indices of one KB in ingestion order; empty vector for a
    /// declared-but-empty KB.
    const std::vector<std::size_t>& kb_chunks(const KbId& kb) const;

    /// Structural neighborhood: previous/next chunk (ingestion order) with
    /// the same (kb, doc_id) and the same full path, plus any chunk of the
    /// same doc whose path is the immediate parent prefix. Never contains
    /// the chunk itself.
    std::vector<const Chunk*> neighbors(const Chunk& c) const;

private:
    std::vector<Chunk> chunks_;
    std::vector<KbId> kb_ids_;
    std::map<std::string, std::size_t, std::less<>> by_id_;
    std::map<KbId, std::vector<std::size_t>> by_kb_;
    std::map<std::pair<KbId, std::string>, std::vector<std::size_t>> by_doc_;

    void build_indexes(std::vector<KbId> declared_kbs);
};

/// Query JSONL: one Query per line, with an optional embedded gold label.
struct QuerySet {
    std::vector<Query> queries;
    std::map<std::string, GoldLabel> golds;  // by query_id; absent if no gold

    static QuerySet load_jsonl(std::istream& in);
    static QuerySet load_file(const std::string& path);
    void write_jsonl(std::ostream& out) const;
};

}  // namespace kbfuse
