#include "kbfuse/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

namespace kbfuse::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::single_kb: return "single_kb";
        case Strategy::merged: return "merged";
        case Strategy::uniform: return "uniform";
        case Strategy::naive_concat: return "naive_concat";
        case Strategy::score_only_rerank: return "score_only_rerank";
        case Strategy::daks: return "daks";
        case Strategy::daks_graph_full: return "daks_graph_full";
    }
    return "daks_graph_full";
}

std::optional<Strategy> strategy_from_string(std::string_view s) {
    for (auto v : {Strategy::single_kb, Strategy::merged, Strategy::uniform, Strategy::naive_concat,
                   Strategy::score_only_rerank, Strategy::daks, Strategy::daks_graph_full})
        if (to_string(v) == s) return v;
    if (s.rfind("single_kb:", 0) == 0) return Strategy::single_kb;
    return std::nullopt;
}

Engine::Engine(Corpus c, ScorerConfig cfg, std::optional<ScoreTable> ret, std::optional<ScoreTable> rank)
    : corpus(std::move(c)),
      scorers(corpus, cfg, std::move(ret), std::move(rank)),
      graph(aligngraph::AlignmentGraph::build(corpus)) {}

namespace {

// equal split with the remainder spread over the leading KBs
std::map<KbId, int> uniform_budgets(const std::vector<KbId>& kbs, int total) {
    std::map<KbId, int> out;
    if (kbs.empty()) return out;
    const int base = total / static_cast<int>(kbs.size());
    int rem = total % static_cast<int>(kbs.size());
    for (const auto& kb : kbs) out[kb] = base + (rem-- > 0 ? 1 : 0);
    return out;
}

std::vector<daks::PooledChunk> pool_from_budgets(const Engine& engine, const Query& q,
                                                 const std::map<KbId, int>& budgets) {
    std::vector<daks::PooledChunk> pool;
    for (const auto& [kb, budget] : budgets) {
        const auto ranked = engine.scorers.rank_kb(q, kb);
        const int take = std::min<int>(budget, static_cast<int>(ranked.size()));
        for (int i = 0; i < take; ++i) pool.push_back({ranked[i].chunk_id, kb, ranked[i].score});
    }
    return pool;
}

// KB order by best chunk score in the pooled ranking; the router-less
// belief, carrying whatever density bias the raw scores carry
std::vector<KbId> peak_ranking(const Engine& engine, const Query& q) {
    std::map<KbId, double> best;
    for (const auto& s : engine.scorers.rank_merged(q)) {
        const KbId& kb = engine.corpus.at(s.chunk_id).kb;
        auto [it, inserted] = best.emplace(kb, s.score);
        if (!inserted) it->second = std::max(it->second, s.score);
    }
    std::vector<std::pair<double, KbId>> peaks;
    for (const auto& kb : engine.scorers.indexed_kbs()) {
        auto it = best.find(kb);
        peaks.push_back({it != best.end() ? it->second : 0.0, kb});
    }
    std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<KbId> out;
    for (const auto& [s, kb] : peaks) out.push_back(kb);
    return out;
}

struct ScoreLookup {
    std::map<std::string, double> ret;

    void absorb(const std::vector<ScoredChunk>& ranked) {
        for (const auto& s : ranked) ret.emplace(s.chunk_id, s.score);
    }
};

std::vector<packer::PackItem> to_pack_items(const std::vector<aligngraph::RankedChunk>& ranked,
                                            const Corpus& corpus) {
    std::vector<packer::PackItem> items;
    items.reserve(ranked.size());
    for (const auto& r : ranked) {
        const Chunk& c = corpus.at(r.chunk_id);
        items.push_back({r.chunk_id, r.kb, c.doc_id, c.token_len, r.s_final});
    }
    return items;
}

// budget fill in ranked order with no coverage phase and no doc cap
packer::PackedEvidence naive_pack(const std::vector<packer::PackItem>& ranked, int token_budget) {
    packer::PackedEvidence out;
    int used = 0;
    for (const auto& item : ranked) {
        if (used + item.tokens > token_budget) continue;
        used += item.tokens;
        out.evidence.push_back({item.chunk_id, item.kb, item.doc_id, item.s_final, item.tokens, 2});
        out.objective += item.s_final;
    }
    out.total_tokens = used;
    std::set<KbId> covered;
    for (const auto& c : out.evidence) covered.insert(c.kb);
    out.covered_kbs.assign(covered.begin(), covered.end());
    return out;
}

}  // namespace

QueryTrace run_query(const Engine& engine, const Query& q, const PipelineConfig& cfg) {
    QueryTrace trace;
    trace.query_id = q.query_id;
    trace.strategy = cfg.strategy;
    trace.skipped_empty_kbs = engine.scorers.empty_kbs();

    const auto& kbs = engine.scorers.indexed_kbs();
    if (kbs.empty()) throw MissingIndex("(no non-empty KB)");

    // stage 1: candidate pool + KB ranking
    std::vector<daks::PooledChunk> pool;
    ScoreLookup lookup;
    switch (cfg.strategy) {
        case Strategy::single_kb: {
            if (cfg.single_kb.empty()) throw ConfigError("single_kb strategy needs a KB id");
            if (std::find(kbs.begin(), kbs.end(), cfg.single_kb) == kbs.end())
                throw MissingIndex(cfg.single_kb);
            const auto ranked = engine.scorers.rank_kb(q, cfg.single_kb);
            lookup.absorb(ranked);
            const int take = std::min<int>(cfg.daks.total_budget, static_cast<int>(ranked.size()));
            for (int i = 0; i < take; ++i)
                pool.push_back({ranked[i].chunk_id, cfg.single_kb, ranked[i].score});
            trace.kb_ranking = {cfg.single_kb};
            break;
        }
        case Strategy::merged: {
            const auto ranked = engine.scorers.rank_merged(q);
            lookup.absorb(ranked);
            const int take = std::min<int>(cfg.daks.total_budget, static_cast<int>(ranked.size()));
            std::map<KbId, double> best;
            for (const auto& s : ranked) {
                const KbId& kb = engine.corpus.at(s.chunk_id).kb;
                auto [it, inserted] = best.emplace(kb, s.score);
                if (!inserted) it->second = std::max(it->second, s.score);
            }
            for (int i = 0; i < take; ++i)
                pool.push_back({ranked[i].chunk_id, engine.corpus.at(ranked[i].chunk_id).kb,
                                ranked[i].score});
            std::vector<std::pair<double, KbId>> order;
            for (const auto& [kb, s] : best) order.push_back({s, kb});
            std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            for (const auto& [s, kb] : order) trace.kb_ranking.push_back(kb);
            for (const auto& kb : kbs)  // KBs absent from the merged ranking tail
                if (!best.count(kb)) trace.kb_ranking.push_back(kb);
            break;
        }
        case Strategy::uniform:
        case Strategy::naive_concat: {
            for (const auto& kb : kbs) lookup.absorb(engine.scorers.rank_kb(q, kb));
            pool = pool_from_budgets(engine, q, uniform_budgets(kbs, cfg.daks.total_budget));
            trace.kb_ranking = peak_ranking(engine, q);
            break;
        }
        case Strategy::score_only_rerank:
        case Strategy::daks:
        case Strategy::daks_graph_full: {
            trace.routing = daks::route(engine.corpus, engine.scorers, q, cfg.daks);
            for (const auto& kb : kbs) lookup.absorb(engine.scorers.rank_kb(q, kb));
            pool = trace.routing->dense_pool;
            trace.kb_ranking = trace.routing->ranking;
            break;
        }
    }

    // stage 2: consolidation (skipped for the naive baseline)
    const bool use_graph = cfg.strategy == Strategy::daks_graph_full;
    std::vector<consolidate::Candidate> cands;
    if (cfg.strategy == Strategy::naive_concat) {
        for (const auto& p : pool) {
            consolidate::Candidate c;
            c.chunk_id = p.chunk_id;
            c.kb = p.kb;
            c.origin = consolidate::Origin::dense;
            c.raw_ret = p.score;
            c.s_base = p.score;  // raw score order, no normalization or fusion
            cands.push_back(std::move(c));
        }
    } else {
        cands = consolidate::expand(engine.corpus, pool);
        consolidate::fill_retriever_scores(
            cands,
            [&](const std::string& id) {
                auto it = lookup.ret.find(id);
                return it != lookup.ret.end() ? it->second : 0.0;
            },
            cfg.enable_ranker
                ? std::function<std::optional<double>(const std::string&)>(
                      [&](const std::string& id) { return engine.scorers.ranker_score(q.query_id, id); })
                : std::function<std::optional<double>(const std::string&)>());
        consolidate::base_scores(cands, cfg.consolidate.mu);
        cands = consolidate::dedup_and_cap(std::move(cands), engine.corpus, cfg.consolidate);
    }

    // stage 3: graph-guided fusion (full strategy only)
    std::vector<aligngraph::RankedChunk> ranked;
    std::vector<KbId> predicted_required;
    if (cfg.strategy == Strategy::daks || cfg.strategy == Strategy::daks_graph_full) {
        for (std::size_t i = 0; i < trace.kb_ranking.size() && i < 2; ++i)
            predicted_required.push_back(trace.kb_ranking[i]);
    }
    trace.predicted_required = predicted_required;

    if (use_graph) {
        const KbId k_major = trace.kb_ranking.front();
        auto seeds = aligngraph::seed_entities_from(q, cands, cfg.fusion.seed_top_s, engine.corpus);

        const bool bridge_on = cfg.bridge == BridgeMode::on ||
                               (cfg.bridge == BridgeMode::auto_on_cross && predicted_required.size() >= 2);
        if (bridge_on) {
            std::set<std::string> have;
            for (const auto& c : cands) have.insert(c.chunk_id);
            for (const auto& id : aligngraph::bridge_retrieve(engine.graph, seeds, cfg.fusion.hop_limit)) {
                if (have.count(id)) continue;
                consolidate::Candidate c;
                c.chunk_id = id;
                c.kb = engine.corpus.at(id).kb;
                c.origin = consolidate::Origin::bridge;
                auto it = lookup.ret.find(id);
                c.raw_ret = it != lookup.ret.end() ? it->second : 0.0;
                if (cfg.enable_ranker) c.raw_rank = engine.scorers.ranker_score(q.query_id, id);
                cands.push_back(std::move(c));
                trace.bridge_added.push_back(id);
            }
            // base scores re-fused over the union pool
            consolidate::base_scores(cands, cfg.consolidate.mu);
        }

        const auto edist = aligngraph::entity_distances(engine.graph, seeds);
        std::vector<aligngraph::GraphSupport> supports;
        supports.reserve(cands.size());
        for (const auto& c : cands)
            supports.push_back(aligngraph::graph_support(q, engine.graph, edist, c.chunk_id, c.kb,
                                                         k_major, cfg.fusion));
        ranked = aligngraph::fuse_and_rank(cands, supports, cfg.fusion.alpha);
    } else {
        ranked = aligngraph::rank_by_base(cands);
    }
    trace.candidates = cands;
    trace.ranked = ranked;

    // stage 4: packing
    const auto items = to_pack_items(ranked, engine.corpus);
    if (cfg.strategy == Strategy::naive_concat) {
        trace.packed = naive_pack(items, cfg.pack.token_budget);
    } else if (!items.empty()) {
        trace.packed = packer::pack(items, predicted_required, cfg.pack);
    }
    return trace;
}

RunResult run_all(const Engine& engine, const std::vector<Query>& queries, const PipelineConfig& cfg) {
    RunResult result;
    result.traces.resize(queries.size());
    unsigned workers = cfg.workers > 0 ? cfg.workers : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min<unsigned>(workers, std::max<std::size_t>(queries.size(), 1));

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < queries.size(); i = next.fetch_add(1)) {
                    result.traces[i] = run_query(engine, queries[i], cfg);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return result;
}

evalkit::QueryOutcome QueryTrace::outcome() const {
    return {query_id, kb_ranking, packed.evidence};
}

std::vector<evalkit::QueryOutcome> outcomes(const RunResult& result) {
    std::vector<evalkit::QueryOutcome> out;
    out.reserve(result.traces.size());
    for (const auto& t : result.traces) out.push_back(t.outcome());
    return out;
}

json QueryTrace::to_json(const Corpus& corpus) const {
    json j;
    j["query_id"] = query_id;
    j["strategy"] = std::string(to_string(strategy));
    j["kb_ranking"] = kb_ranking;
    j["predicted_required"] = predicted_required;
    if (!skipped_empty_kbs.empty()) j["skipped_empty_kbs"] = skipped_empty_kbs;

    if (routing) {
        json r;
        r["scores"] = routing->scores;
        r["probs"] = routing->probs;
        r["budgets"] = routing->budgets;
        r["ranking"] = routing->ranking;
        r["k_major"] = routing->k_major;
        json feats = json::object();
        for (const auto& [kb, f] : routing->features) {
            json probe = json::array();
            for (const auto& s : f.probe) probe.push_back({{"chunk_id", s.chunk_id}, {"score", s.score}});
            feats[kb] = {{"peak", f.peak},     {"topm_mean", f.topm_mean}, {"margin", f.margin},
                         {"entropy", f.entropy}, {"coverage", f.coverage},   {"probe", std::move(probe)}};
        }
        r["features"] = std::move(feats);
        json pool = json::array();
        for (const auto& p : routing->dense_pool)
            pool.push_back({{"chunk_id", p.chunk_id}, {"kb", p.kb}, {"score", p.score}});
        r["dense_pool"] = std::move(pool);
        j["routing"] = std::move(r);
    }

    json cand = json::array();
    for (const auto& c : candidates) {
        json e = {{"chunk_id", c.chunk_id},
                  {"kb", c.kb},
                  {"origin", std::string(consolidate::to_string(c.origin))},
                  {"raw_ret", c.raw_ret},
                  {"s_ret_hat", c.s_ret_hat},
                  {"s_rank_hat", c.s_rank_hat},
                  {"s_base", c.s_base}};
        if (c.raw_rank) e["raw_rank"] = *c.raw_rank;
        cand.push_back(std::move(e));
    }
    j["candidates"] = std::move(cand);

    json rk = json::array();
    for (const auto& r : ranked) {
        json e = {{"chunk_id", r.chunk_id}, {"kb", r.kb},         {"s_base_hat", r.s_base_hat},
                  {"s_g_hat", r.s_g_hat},   {"s_final", r.s_final}, {"o", r.overlap}};
        e["d"] = r.min_dist ? json(*r.min_dist) : json(nullptr);
        rk.push_back(std::move(e));
    }
    j["ranked"] = std::move(rk);
    if (!bridge_added.empty()) j["bridge_added"] = bridge_added;

    json ev = json::array();
    for (const auto& c : packed.evidence) {
        ev.push_back({{"chunk_id", c.chunk_id},
                      {"kb", c.kb},
                      {"doc_id", corpus.at(c.chunk_id).doc_id},
                      {"s_final", c.s_final},
                      {"tokens", c.tokens},
                      {"phase", c.phase}});
    }
    j["packed"] = {{"evidence", std::move(ev)},
                   {"total_tokens", packed.total_tokens},
                   {"objective", packed.objective},
                   {"covered_kbs", packed.covered_kbs},
                   {"violations", packed.coverage_violations},
                   {"doc_cap_overridden", packed.doc_cap_overridden}};
    return j;
}

void write_run(const RunResult& result, const Corpus& corpus, const PipelineConfig& cfg,
               const std::string& strategy_dir) {
    fs::create_directories(fs::path(strategy_dir) / "traces");
    std::ofstream packed_out(fs::path(strategy_dir) / "packed_evidence.jsonl");
    if (!packed_out) throw ConfigError("cannot write to " + strategy_dir);
    for (const auto& t : result.traces) {
        std::ofstream tf(fs::path(strategy_dir) / "traces" / (t.query_id + ".json"));
        tf << t.to_json(corpus).dump(2) << '\n';

        json j;
        j["query_id"] = t.query_id;
        json ev = json::array();
        for (const auto& c : t.packed.evidence)
            ev.push_back({{"chunk_id", c.chunk_id},
                          {"kb", c.kb},
                          {"doc_id", corpus.at(c.chunk_id).doc_id},
                          {"s_final", c.s_final},
                          {"tokens", c.tokens}});
        j["evidence"] = std::move(ev);
        j["total_tokens"] = t.packed.total_tokens;
        j["violations"] = t.packed.coverage_violations;
        j["kb_ranking"] = t.kb_ranking;
        packed_out << j.dump() << '\n';
    }
    (void)cfg;
}

std::vector<evalkit::QueryOutcome> load_outcomes(const std::string& strategy_dir) {
    std::ifstream in(fs::path(strategy_dir) / "packed_evidence.jsonl");
    if (!in) throw ConfigError("no packed_evidence.jsonl under " + strategy_dir);
    std::vector<evalkit::QueryOutcome> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        evalkit::QueryOutcome o;
        o.query_id = j.at("query_id").get<std::string>();
        for (const auto& kb : j.at("kb_ranking")) o.kb_ranking.push_back(kb.get<std::string>());
        for (const auto& e : j.at("evidence")) {
            packer::PackedChunk c;
            c.chunk_id = e.at("chunk_id").get<std::string>();
            c.kb = e.at("kb").get<std::string>();
            c.doc_id = e.at("doc_id").get<std::string>();
            c.s_final = e.at("s_final").get<double>();
            c.tokens = e.at("tokens").get<int>();
            o.evidence.push_back(std::move(c));
        }
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace kbfuse::pipeline
