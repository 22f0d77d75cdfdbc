#include "kbfuse/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "kbfuse/text.hpp"

namespace kbfuse {

using nlohmann::json;

namespace {

constexpr std::pair<EntityType, std::string_view> kEntityTypes[] = {
    {EntityType::Disease, "Disease"},   {EntityType::Symptom, "Symptom"},
    {EntityType::Drug, "Drug"},         {EntityType::Formula, "Formula"},
    {EntityType::Therapy, "Therapy"},   {EntityType::Concept, "Concept"},
    {EntityType::Other, "Other"},
};

constexpr std::pair<QuestionType, std::string_view> kQuestionTypes[] = {
    {QuestionType::definition, "definition"},
    {QuestionType::classics_principle, "classics_principle"},
    {QuestionType::clinical_evidence, "clinical_evidence"},
    {QuestionType::cross_kb_synthesis, "cross_kb_synthesis"},
};

void sort_unique_entities(std::vector<EntityRef>& es) {
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
}

std::vector<EntityRef> parse_entities(const json& j, std::size_t line_no) {
    std::vector<EntityRef> out;
    if (!j.is_array()) throw SchemaError(line_no, "\"entities\" must be an array");
    for (const auto& e : j) {
        if (!e.is_object() || !e.contains("name") || !e.contains("type"))
            throw SchemaError(line_no, "entity record needs \"name\" and \"type\"");
        if (!e["name"].is_string() || !e["type"].is_string())
            throw SchemaError(line_no, "entity \"name\"/\"type\" must be strings");
        const auto type = entity_type_from_string(e["type"].get<std::string>());
        if (!type)
            throw SchemaError(line_no, "unknown entity type \"" + e["type"].get<std::string>() + "\"");
        EntityRef ref;
        try {
            ref = EntityRef::make(e["name"].get<std::string>(), *type);
        } catch (const std::exception& ex) {
            throw SchemaError(line_no, ex.what());
        }
        out.push_back(std::move(ref));
    }
    sort_unique_entities(out);
    return out;
}

std::string require_string(const json& j, const char* key, std::size_t line_no) {
    if (!j.contains(key)) throw SchemaError(line_no, std::string("missing field \"") + key + "\"");
    if (!j[key].is_string()) throw SchemaError(line_no, std::string("field \"") + key + "\" must be a string");
    return j[key].get<std::string>();
}

json entities_to_json(const std::vector<EntityRef>& es) {
    json arr = json::array();
    for (const auto& e : es) arr.push_back({{"name", e.name}, {"type", std::string(to_string(e.type))}});
    return arr;
}

}  // namespace

std::string_view to_string(EntityType t) {
    for (const auto& [v, s] : kEntityTypes)
        if (v == t) return s;
    return "Other";
}

std::optional<EntityType> entity_type_from_string(std::string_view s) {
    for (const auto& [v, n] : kEntityTypes)
        if (n == s) return v;
    return std::nullopt;
}

std::string_view to_string(QuestionType t) {
    for (const auto& [v, s] : kQuestionTypes)
        if (v == t) return s;
    return "definition";
}

std::optional<QuestionType> question_type_from_string(std::string_view s) {
    for (const auto& [v, n] : kQuestionTypes)
        if (n == s) return v;
    return std::nullopt;
}

EntityRef EntityRef::make(std::string_view raw_name, EntityType type) {
    EntityRef ref;
    ref.name = text::normalize_entity_name(raw_name);
    ref.type = type;
    if (ref.name.empty()) throw CorpusError("entity name empty after normalization");
    return ref;
}

int compute_token_len(std::string_view s) {
    return static_cast<int>(text::codepoint_count(text::nfc(s)));
}

Corpus Corpus::load_jsonl(std::istream& in, std::vector<KbId> declared_kbs) {
    std::vector<Chunk> chunks;
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
        if (!j.is_object()) throw SchemaError(line_no, "record must be a JSON object");

        Chunk c;
        c.chunk_id = require_string(j, "chunk_id", line_no);
        c.kb = require_string(j, "kb", line_no);
        c.doc_id = require_string(j, "doc_id", line_no);
        c.text = require_string(j, "text", line_no);
        if (c.chunk_id.empty()) throw SchemaError(line_no, "\"chunk_id\" must be non-empty");
        if (c.kb.empty()) throw SchemaError(line_no, "\"kb\" must be non-empty");
        if (!text::is_valid_utf8(c.text)) throw SchemaError(line_no, "\"text\" is not valid UTF-8");

        if (j.contains("path")) {
            if (!j["path"].is_array()) throw SchemaError(line_no, "\"path\" must be an array of strings");
            for (const auto& p : j["path"]) {
                if (!p.is_string()) throw SchemaError(line_no, "\"path\" must be an array of strings");
                c.path.push_back(p.get<std::string>());
            }
        }
        if (j.contains("entities")) c.entities = parse_entities(j["entities"], line_no);

        if (j.contains("token_len")) {
            if (!j["token_len"].is_number_integer())
                throw SchemaError(line_no, "\"token_len\" must be an integer");
            c.token_len = j["token_len"].get<int>();
            if (c.token_len < 0) throw SchemaError(line_no, "\"token_len\" must be non-negative");
            if (c.token_len == 0 && !c.text.empty())
                throw SchemaError(line_no, "\"token_len\" must be positive for non-empty text");
        } else {
            c.token_len = compute_token_len(c.text);
        }
        chunks.push_back(std::move(c));
    }
    return from_chunks(std::move(chunks), std::move(declared_kbs));
}

Corpus Corpus::load_file(const std::string& path, std::vector<KbId> declared_kbs) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open corpus file: " + path);
    return load_jsonl(in, std::move(declared_kbs));
}

Corpus Corpus::from_chunks(std::vector<Chunk> chunks, std::vector<KbId> declared_kbs) {
    Corpus c;
    c.chunks_ = std::move(chunks);
    for (auto& ch : c.chunks_) sort_unique_entities(ch.entities);
    c.build_indexes(std::move(declared_kbs));
    return c;
}

void Corpus::build_indexes(std::vector<KbId> declared_kbs) {
    const bool closed_set = !declared_kbs.empty();
    std::set<KbId> kbs(declared_kbs.begin(), declared_kbs.end());
    for (std::size_t i = 0; i < chunks_.size(); ++i) {
        const Chunk& c = chunks_[i];
        if (closed_set && !kbs.count(c.kb)) throw UnknownKb(c.kb, c.chunk_id);
        if (!by_id_.emplace(c.chunk_id, i).second) throw DuplicateChunkId(c.chunk_id);
        if (!closed_set) kbs.insert(c.kb);
        by_kb_[c.kb].push_back(i);
        by_doc_[{c.kb, c.doc_id}].push_back(i);
    }
    kb_ids_.assign(kbs.begin(), kbs.end());
    for (const auto& kb : kb_ids_) by_kb_[kb];  // materialize empty KBs
}

const Chunk* Corpus::find(std::string_view chunk_id) const {
    auto it = by_id_.find(chunk_id);
    return it == by_id_.end() ? nullptr : &chunks_[it->second];
}

const Chunk& Corpus::at(std::string_view chunk_id) const {
    const Chunk* c = find(chunk_id);
    if (!c) throw CorpusError("unknown chunk_id \"" + std::string(chunk_id) + "\"");
    return *c;
}

const std::vector<std::size_t>& Corpus::kb_chunks(const KbId& kb) const {
    static const std::vector<std::size_t> kEmpty;
    auto it = by_kb_.find(kb);
    return it == by_kb_.end() ? kEmpty : it->second;
}

std::vector<const Chunk*> Corpus::neighbors(const Chunk& c) const {
    std::vector<const Chunk*> out;
    auto it = by_doc_.find({c.kb, c.doc_id});
    if (it == by_doc_.end()) return out;
    const auto& doc = it->second;

    // prev/next among the doc's chunks sharing the full path
    const Chunk* prev = nullptr;
    const Chunk* next = nullptr;
    bool seen_self = false;
    for (std::size_t idx : doc) {
        const Chunk& other = chunks_[idx];
        if (&other == &c) {
            seen_self = true;
            continue;
        }
        if (other.path != c.path) continue;
        if (!seen_self) {
            prev = &other;
        } else if (!next) {
            next = &other;
        }
    }
    if (prev) out.push_back(prev);
    if (next) out.push_back(next);

    // parent-section chunks: path equal to c.path minus its last element
    if (!c.path.empty()) {
        const std::vector<std::string> parent(c.path.begin(), c.path.end() - 1);
        for (std::size_t idx : doc) {
            const Chunk& other = chunks_[idx];
            if (&other != &c && other.path == parent) out.push_back(&other);
        }
    }
    return out;
}

void Corpus::write_jsonl(std::ostream& out) const {
    for (const Chunk& c : chunks_) {
        json j;
        j["chunk_id"] = c.chunk_id;
        j["kb"] = c.kb;
        j["doc_id"] = c.doc_id;
        j["path"] = c.path;
        j["text"] = c.text;
        j["entities"] = entities_to_json(c.entities);
        j["token_len"] = c.token_len;
        out << j.dump() << '\n';
    }
}

QuerySet QuerySet::load_jsonl(std::istream& in) {
    QuerySet qs;
    std::string line;
    std::size_t line_no = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SchemaError(line_no, e.what());
        }
        Query q;
        q.query_id = require_string(j, "query_id", line_no);
        q.text = require_string(j, "text", line_no);
        if (q.text.empty()) throw SchemaError(line_no, "query \"text\" must be non-empty");
        if (!seen.insert(q.query_id).second)
            throw SchemaError(line_no, "duplicate query_id \"" + q.query_id + "\"");
        if (j.contains("entities")) q.entities = parse_entities(j["entities"], line_no);

        if (j.contains("gold")) {
            const json& g = j["gold"];
            GoldLabel gold;
            gold.query_id = q.query_id;
            gold.primary_kb = require_string(g, "primary_kb", line_no);
            if (!g.contains("required_kbs") || !g["required_kbs"].is_array() || g["required_kbs"].empty())
                throw SchemaError(line_no, "gold \"required_kbs\" must be a non-empty array");
            for (const auto& k : g["required_kbs"]) gold.required_kbs.push_back(k.get<std::string>());
            std::sort(gold.required_kbs.begin(), gold.required_kbs.end());
            gold.required_kbs.erase(std::unique(gold.required_kbs.begin(), gold.required_kbs.end()),
                                    gold.required_kbs.end());
            if (!g.contains("evidence_chunk_ids") || !g["evidence_chunk_ids"].is_array() ||
                g["evidence_chunk_ids"].empty())
                throw SchemaError(line_no, "gold \"evidence_chunk_ids\" must be a non-empty array");
            for (const auto& e : g["evidence_chunk_ids"])
                gold.evidence_chunk_ids.push_back(e.get<std::string>());
            std::sort(gold.evidence_chunk_ids.begin(), gold.evidence_chunk_ids.end());
            gold.evidence_chunk_ids.erase(
                std::unique(gold.evidence_chunk_ids.begin(), gold.evidence_chunk_ids.end()),
                gold.evidence_chunk_ids.end());
            const auto qt = question_type_from_string(require_string(g, "question_type", line_no));
            if (!qt) throw SchemaError(line_no, "unknown question_type");
            gold.question_type = *qt;
            if (std::find(gold.required_kbs.begin(), gold.required_kbs.end(), gold.primary_kb) ==
                gold.required_kbs.end())
                throw SchemaError(line_no, "primary_kb must be in required_kbs");
            if (gold.question_type == QuestionType::cross_kb_synthesis && gold.required_kbs.size() < 2)
                throw SchemaError(line_no, "cross_kb_synthesis requires at least two required KBs");
            qs.golds.emplace(q.query_id, std::move(gold));
        }
        qs.queries.push_back(std::move(q));
    }
    return qs;
}

QuerySet QuerySet::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open query file: " + path);
    return load_jsonl(in);
}

void QuerySet::write_jsonl(std::ostream& out) const {
    for (const Query& q : queries) {
        json j;
        j["query_id"] = q.query_id;
        j["text"] = q.text;
        j["entities"] = entities_to_json(q.entities);
        auto it = golds.find(q.query_id);
        if (it != golds.end()) {
            const GoldLabel& g = it->second;
            j["gold"] = {{"primary_kb", g.primary_kb},
                         {"required_kbs", g.required_kbs},
                         {"evidence_chunk_ids", g.evidence_chunk_ids},
                         {"question_type", std::string(to_string(g.question_type))}};
        }
        out << j.dump() << '\n';
    }
}

}  // namespace kbfuse
