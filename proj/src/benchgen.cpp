#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "kbfuse/evalkit.hpp"
#include "kbfuse/rng.hpp"
#include "kbfuse/text.hpp"

namespace kbfuse::evalkit {

namespace {

// Tuning constants of the generative model. Chunk text is built from
// synthetic two-code-point "words" drawn from the CJK block, joined by a
// separator, so the bigram scorer sees word-like term statistics.
struct Knobs {
    int words_per_topic = 3;
    int alt_words_per_topic = 2;    // secondary phrasing for gapped cross golds
    int n_background_words = 1200;
    int n_background_entities = 300;
    int base_len_words = 40;        // T/P chunk length before jitter
    int gold_occ = 5;               // topic-word slots planted in a gold chunk
    int adj_occ = 2;                // slots in the follow-up chunk
    int related_occ = 3;            // slots in a related/survey chunk
    int mirror_occ = 4;             // the encyclopedia entry that gets mirrored
    int e_related = 3;              // encyclopedia presence per non-definition topic
    int sibling_related = 2;        // related chunks in the other authoritative KB
    int primary_related = 3;        // related chunks next to the gold
    double len_jitter = 0.2;
    double gap_fraction = 0.6;      // cross queries with an entity-only secondary gold
    int t_docs_per_background = 5;  // chunks per background doc
    int p_docs_per_background = 4;
};

constexpr char32_t kWordBase = 0x4E00;    // topic + background words
constexpr char32_t kEntityBase = 0x9000;  // entity-name code points
const std::string kSep = "\xE3\x80\x81";  // U+3001 ideographic comma

std::string word_str(int index) {
    const char32_t a = kWordBase + static_cast<char32_t>(2 * index);
    const char32_t b = kWordBase + static_cast<char32_t>(2 * index + 1);
    return text::encode_utf8({a, b});
}

std::string entity_name(int index) {
    const char32_t a = kEntityBase + static_cast<char32_t>(3 * index);
    return text::encode_utf8({a, a + 1, a + 2});
}

std::string join_words(const std::vector<int>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += kSep;
        out += word_str(words[i]);
    }
    return out;
}

// Skewed background word draw (head-heavy, Zipf-flavored).
int background_word(Rng& rng, const Knobs& k, int background_base) {
    const double u = rng.real();
    return background_base + static_cast<int>(u * u * k.n_background_words);
}

struct TopicWords {
    std::vector<int> main;  // primary phrasing
    std::vector<int> alt;   // secondary phrasing (gapped golds)
};

// Chunk text: `occ` topic-word slots cycling over `topic_words`, padded to
// `len_words` with background words, deterministically interleaved.
std::string make_text(Rng& rng, const Knobs& k, const std::vector<int>& topic_words, int occ,
                      int len_words, int background_base) {
    std::vector<int> slots;
    slots.reserve(len_words);
    for (int i = 0; i < occ && !topic_words.empty(); ++i)
        slots.push_back(topic_words[i % topic_words.size()]);
    while (static_cast<int>(slots.size()) < len_words)
        slots.push_back(background_word(rng, k, background_base));
    rng.shuffle(slots);
    return join_words(slots);
}

int jittered(Rng& rng, const Knobs& k, int base) {
    const double f = 1.0 + k.len_jitter * (2.0 * rng.real() - 1.0);
    return std::max(4, static_cast<int>(std::lround(base * f)));
}

struct Builder {
    const BenchSpec& spec;
    const Knobs& knobs;
    Rng& rng;
    std::vector<Chunk> chunks;
    std::map<KbId, int> counters;
    int background_word_base = 0;

    std::string next_id(const KbId& kb) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%s-%05d", kb.c_str(), counters[kb]++);
        return buf;
    }

    int e_len() const {
        const double bias = std::max(1.0, spec.density_bias);
        return std::max(6, static_cast<int>(std::lround(knobs.base_len_words / bias)));
    }

    std::string add(const KbId& kb, const std::string& doc_id, std::vector<std::string> path,
                    std::string chunk_text, std::vector<EntityRef> entities) {
        Chunk c;
        c.chunk_id = next_id(kb);
        c.kb = kb;
        c.doc_id = doc_id;
        c.path = std::move(path);
        c.text = std::move(chunk_text);
        c.entities = std::move(entities);
        c.token_len = compute_token_len(c.text);
        std::string id = c.chunk_id;
        chunks.push_back(std::move(c));
        return id;
    }
};

EntityType bridge_type(int topic) {
    static constexpr EntityType kCycle[] = {EntityType::Drug, EntityType::Disease,
                                            EntityType::Formula, EntityType::Therapy};
    return kCycle[topic % 4];
}

std::vector<int> type_counts(const BenchSpec& spec) {
    // largest-remainder apportionment over the four question types
    std::vector<int> counts(4, 0);
    std::vector<std::pair<double, int>> rem;
    int assigned = 0;
    for (int i = 0; i < 4; ++i) {
        const double exact = spec.type_mix[i] * spec.n_queries;
        counts[i] = static_cast<int>(std::floor(exact));
        assigned += counts[i];
        rem.push_back({exact - counts[i], i});
    }
    std::stable_sort(rem.begin(), rem.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int i = 0; i < spec.n_queries - assigned; ++i) ++counts[rem[i % 4].second];
    return counts;
}

}  // namespace

Benchmark gen_benchmark(const BenchSpec& spec) {
    if (spec.n_queries <= 0) throw InvalidSpec("n_queries must be positive");
    double mix_sum = 0;
    for (double f : spec.type_mix) {
        if (f < 0) throw InvalidSpec("type_mix fractions must be non-negative");
        mix_sum += f;
    }
    if (std::abs(mix_sum - 1.0) > 1e-9) throw InvalidSpec("type_mix fractions must sum to 1");
    if (spec.density_bias < 1.0) throw InvalidSpec("density_bias must be >= 1");
    for (const auto& kb : {"E", "T", "P"})
        if (!spec.kb_sizes.count(kb)) throw InvalidSpec(std::string("kb_sizes must include ") + kb);

    const Knobs knobs;
    Rng rng(spec.seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL);
    Builder b{spec, knobs, rng};

    const auto counts = type_counts(spec);
    const int n_topics = spec.n_queries;

    // word-index layout: per-topic main + alt words first, then background
    const int words_per = knobs.words_per_topic + knobs.alt_words_per_topic;
    b.background_word_base = n_topics * words_per;

    std::vector<TopicWords> topics(n_topics);
    for (int t = 0; t < n_topics; ++t) {
        for (int i = 0; i < knobs.words_per_topic; ++i) topics[t].main.push_back(t * words_per + i);
        for (int i = 0; i < knobs.alt_words_per_topic; ++i)
            topics[t].alt.push_back(t * words_per + knobs.words_per_topic + i);
    }

    // entity-index layout: topic bridge + aux first, then background pool
    auto bridge_entity = [&](int t) { return EntityRef::make(entity_name(2 * t), bridge_type(t)); };
    auto aux_entity = [&](int t) { return EntityRef::make(entity_name(2 * t + 1), EntityType::Concept); };
    const int background_entity_base = 2 * n_topics;

    QuerySet queries;
    const int len_tp = knobs.base_len_words;

    int topic = 0;
    for (int type_idx = 0; type_idx < 4; ++type_idx) {
        const auto qtype = static_cast<QuestionType>(type_idx);
        for (int qi = 0; qi < counts[type_idx]; ++qi, ++topic) {
            const TopicWords& tw = topics[topic];
            const auto bridge = bridge_entity(topic);
            const auto aux = aux_entity(topic);
            const std::string tdoc = "topic-" + std::to_string(topic);

            Query q;
            q.query_id = "q-" + std::to_string(topic);
            GoldLabel gold;
            gold.query_id = q.query_id;
            gold.question_type = qtype;

            // query text: full topic phrasing plus one background word
            {
                std::vector<int> qwords = tw.main;
                qwords.push_back(background_word(rng, knobs, b.background_word_base));
                q.text = join_words(qwords);
            }

            if (qtype == QuestionType::definition) {
                // encyclopedia-only topic: one structured E entry
                const std::string doc = "E-" + tdoc;
                b.add("E", doc, {"entry"},
                      make_text(rng, knobs, tw.main, 1, jittered(rng, knobs, b.e_len()),
                                b.background_word_base),
                      {bridge, aux});
                const auto g1 = b.add("E", doc, {"entry", "s1"},
                                      make_text(rng, knobs, tw.main, knobs.gold_occ,
                                                jittered(rng, knobs, b.e_len()),
                                                b.background_word_base),
                                      {bridge, aux});
                const auto g2 = b.add("E", doc, {"entry", "s2"},
                                      make_text(rng, knobs, tw.main, knobs.gold_occ,
                                                jittered(rng, knobs, b.e_len()),
                                                b.background_word_base),
                                      {bridge});
                gold.primary_kb = "E";
                gold.required_kbs = {"E"};
                gold.evidence_chunk_ids = {g1, g2};
                q.entities = {aux};
            } else {
                // every non-definition topic has an encyclopedia presence:
                // short, dense entries that compete with the real gold
                std::vector<std::string> e_related_ids;
                {
                    const bool mirrored = qtype == QuestionType::cross_kb_synthesis;
                    if (mirrored) {
                        // a head entry plus two mirror copies in other docs;
                        // mirrors survive only where nothing deduplicates
                        const std::string head_text =
                            make_text(rng, knobs, tw.main, knobs.mirror_occ,
                                      jittered(rng, knobs, b.e_len()), b.background_word_base);
                        e_related_ids.push_back(b.add("E", "E-" + tdoc + "-h", {"entry"},
                                                      head_text, {bridge, aux}));
                        for (int m = 0; m < 2; ++m)
                            b.add("E", "E-" + tdoc + "-m" + std::to_string(m), {"entry"},
                                  head_text, {});
                    }
                    for (int r = 0; r < knobs.e_related; ++r) {
                        const std::string doc = "E-" + tdoc + "-" + std::to_string(r / 2);
                        std::vector<EntityRef> ents;
                        if (r == 0) ents = mirrored ? std::vector<EntityRef>{}
                                                    : std::vector<EntityRef>{bridge, aux};
                        e_related_ids.push_back(
                            b.add("E", doc, {"entry", "s" + std::to_string(r % 2)},
                                  make_text(rng, knobs, tw.main, knobs.related_occ,
                                            jittered(rng, knobs, b.e_len()), b.background_word_base),
                                  std::move(ents)));
                    }
                }

                // related discussion spread over its own docs
                auto plant_related = [&](const KbId& kb, int count) {
                    for (int rc = 0; rc < count; ++rc) {
                        b.add(kb, kb + "-" + tdoc + "-rel" + std::to_string(rc), {"chap"},
                              make_text(rng, knobs, tw.main, knobs.related_occ,
                                        jittered(rng, knobs, len_tp), b.background_word_base),
                              rc == 0 ? std::vector<EntityRef>{bridge} : std::vector<EntityRef>{});
                    }
                };

                // gold chapter: parent summary, gold section, optional
                // follow-up in the same section
                auto plant_gold = [&](const KbId& kb, const std::vector<int>& words,
                                      bool with_adjacent) -> std::vector<std::string> {
                    const std::string doc = kb + "-" + tdoc;
                    const std::vector<std::string> path = {"chap", "sec"};
                    b.add(kb, doc, {"chap"},
                          make_text(rng, knobs, words, 1, len_tp, b.background_word_base), {});
                    std::vector<std::string> ids;
                    ids.push_back(b.add(kb, doc, path,
                                        make_text(rng, knobs, words, knobs.gold_occ,
                                                  jittered(rng, knobs, len_tp), b.background_word_base),
                                        {bridge}));
                    if (with_adjacent) {
                        ids.push_back(b.add(kb, doc, path,
                                            make_text(rng, knobs, words, knobs.adj_occ,
                                                      jittered(rng, knobs, len_tp),
                                                      b.background_word_base),
                                            {bridge}));
                    }
                    return ids;
                };

                if (qtype == QuestionType::classics_principle) {
                    const auto ids = plant_gold("T", tw.main, true);
                    plant_related("T", knobs.primary_related);
                    plant_related("P", knobs.sibling_related);
                    gold.primary_kb = "T";
                    gold.required_kbs = {"T"};
                    gold.evidence_chunk_ids = ids;
                    q.entities = {bridge};
                } else if (qtype == QuestionType::clinical_evidence) {
                    const auto ids = plant_gold("P", tw.main, true);
                    plant_related("P", knobs.primary_related);
                    plant_related("T", knobs.sibling_related);
                    gold.primary_kb = "P";
                    gold.required_kbs = {"P"};
                    gold.evidence_chunk_ids = ids;
                    q.entities = {bridge};
                } else {  // cross_kb_synthesis
                    // pattern cycle keeps most required sets at {T,P}
                    struct Pattern {
                        KbId primary, secondary;
                    };
                    static const Pattern kPatterns[] = {{"T", "P"}, {"P", "T"}, {"T", "P"},
                                                        {"T", "E"}, {"P", "T"}, {"P", "E"}};
                    const Pattern& pat = kPatterns[qi % 6];
                    const bool gapped = pat.secondary != "E" && rng.real() < knobs.gap_fraction;

                    const auto primary_ids = plant_gold(pat.primary, tw.main, false);
                    plant_related(pat.primary, knobs.primary_related);
                    std::vector<std::string> secondary_ids;
                    if (pat.secondary == "E") {
                        secondary_ids = {e_related_ids.front()};
                    } else {
                        // the gapped secondary gold shares no phrasing with the
                        // query; only the bridge entity links it
                        secondary_ids = plant_gold(pat.secondary, gapped ? tw.alt : tw.main, false);
                        plant_related(pat.secondary, knobs.sibling_related);
                    }
                    gold.primary_kb = pat.primary;
                    gold.required_kbs = {pat.primary, pat.secondary};
                    std::sort(gold.required_kbs.begin(), gold.required_kbs.end());
                    gold.evidence_chunk_ids = {primary_ids.front(), secondary_ids.front()};
                    std::sort(gold.evidence_chunk_ids.begin(), gold.evidence_chunk_ids.end());
                    q.entities = {bridge};
                }
            }

            queries.queries.push_back(q);
            queries.golds.emplace(q.query_id, std::move(gold));
        }
    }

    // background fill to the configured KB sizes
    auto fill_background = [&](const KbId& kb, int per_doc, int len_words) {
        const int target = spec.kb_sizes.at(kb);
        int doc_idx = 0;
        while (b.counters[kb] < target) {
            const std::string doc = kb + "-bg-" + std::to_string(doc_idx++);
            const int in_doc = std::min(per_doc, target - b.counters[kb]);
            for (int s = 0; s < in_doc; ++s) {
                std::vector<EntityRef> ents;
                const int n_ents = static_cast<int>(rng.uniform(3));  // 0..2
                for (int e = 0; e < n_ents; ++e) {
                    const int idx = background_entity_base +
                                    static_cast<int>(rng.uniform(knobs.n_background_entities));
                    ents.push_back(EntityRef::make(entity_name(idx),
                                                   e == 0 ? EntityType::Concept : EntityType::Symptom));
                }
                std::vector<std::string> path;
                if (per_doc > 1) path = {"chap", "sec" + std::to_string(s)};
                b.add(kb, doc, std::move(path),
                      make_text(rng, knobs, {}, 0, jittered(rng, knobs, len_words),
                                b.background_word_base),
                      std::move(ents));
            }
        }
    };
    fill_background("E", 1, b.e_len());
    fill_background("T", knobs.t_docs_per_background, len_tp);
    fill_background("P", knobs.p_docs_per_background, len_tp);

    Benchmark bench{Corpus::from_chunks(std::move(b.chunks), {"E", "T", "P"}), std::move(queries)};
    return bench;
}

}  // namespace kbfuse::evalkit
