#include "kbfuse/aligngraph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <set>

#include <json.hpp>

namespace kbfuse::aligngraph {

using nlohmann::json;

AlignmentGraph AlignmentGraph::build(const Corpus& corpus) {
    AlignmentGraph g;

    std::vector<const Chunk*> chunks;
    chunks.reserve(corpus.size());
    for (const auto& c : corpus.chunks()) chunks.push_back(&c);
    std::sort(chunks.begin(), chunks.end(),
              [](const Chunk* a, const Chunk* b) { return a->chunk_id < b->chunk_id; });

    std::set<EntityRef> all_entities;
    for (const Chunk* c : chunks)
        for (const auto& e : c->entities) all_entities.insert(e);

    g.entities_.assign(all_entities.begin(), all_entities.end());
    for (int i = 0; i < static_cast<int>(g.entities_.size()); ++i)
        g.entity_index_.emplace(g.entities_[i], i);
    g.entity_adj_.resize(g.entities_.size());

    g.chunk_adj_.resize(chunks.size());
    for (int ci = 0; ci < static_cast<int>(chunks.size()); ++ci) {
        const Chunk* c = chunks[ci];
        g.chunk_ids_.push_back(c->chunk_id);
        g.chunk_kbs_.push_back(c->kb);
        g.chunk_index_.emplace(c->chunk_id, ci);
        for (const auto& e : c->entities) {
            const int ei = g.entity_index_.at(e);
            g.chunk_adj_[ci].push_back(ei);
            g.entity_adj_[ei].push_back(ci);
            ++g.edge_count_;
        }
    }
    return g;
}

std::optional<int> AlignmentGraph::chunk_node(const std::string& chunk_id) const {
    auto it = chunk_index_.find(chunk_id);
    if (it == chunk_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> AlignmentGraph::entity_node(const EntityRef& e) const {
    auto it = entity_index_.find(e);
    if (it == entity_index_.end()) return std::nullopt;
    return it->second;
}

void AlignmentGraph::dump(std::ostream& out) const {
    json j;
    j["format"] = "kbfuse-aligngraph-v1";
    json cnodes = json::array();
    for (std::size_t i = 0; i < chunk_ids_.size(); ++i)
        cnodes.push_back({{"chunk_id", chunk_ids_[i]}, {"kb", chunk_kbs_[i]}});
    j["chunk_nodes"] = std::move(cnodes);
    json enodes = json::array();
    for (const auto& e : entities_)
        enodes.push_back({{"name", e.name}, {"type", std::string(to_string(e.type))}});
    j["entity_nodes"] = std::move(enodes);
    json edges = json::array();
    for (std::size_t c = 0; c < chunk_adj_.size(); ++c)
        for (int e : chunk_adj_[c]) edges.push_back({static_cast<int>(c), e});
    j["edges"] = std::move(edges);
    out << j.dump() << '\n';
}

std::vector<EntityRef> seed_entities_from(const Query& q, const std::vector<consolidate::Candidate>& cands,
                                          int seed_top_s, const Corpus& corpus) {
    std::set<EntityRef> seeds(q.entities.begin(), q.entities.end());
    const int take = std::min<int>(std::max(seed_top_s, 0), static_cast<int>(cands.size()));
    for (int i = 0; i < take; ++i) {
        const Chunk& c = corpus.at(cands[i].chunk_id);
        seeds.insert(c.entities.begin(), c.entities.end());
    }
    return {seeds.begin(), seeds.end()};
}

std::vector<std::optional<int>> entity_distances(const AlignmentGraph& g,
                                                 const std::vector<EntityRef>& seeds) {
    std::vector<std::optional<int>> dist(g.entity_count());
    std::vector<std::optional<int>> chunk_dist(g.chunk_count());
    std::deque<std::pair<bool, int>> frontier;  // (is_entity, node)
    for (const auto& s : seeds) {
        if (auto e = g.entity_node(s)) {
            if (!dist[*e]) {
                dist[*e] = 0;
                frontier.emplace_back(true, *e);
            }
        }
    }
    while (!frontier.empty()) {
        auto [is_entity, node] = frontier.front();
        frontier.pop_front();
        if (is_entity) {
            const int d = *dist[node];
            for (int c : g.chunks_of_entity(node)) {
                if (!chunk_dist[c]) {
                    chunk_dist[c] = d + 1;
                    frontier.emplace_back(false, c);
                }
            }
        } else {
            const int d = *chunk_dist[node];
            for (int e : g.entities_of_chunk(node)) {
                if (!dist[e]) {
                    dist[e] = d + 1;
                    frontier.emplace_back(true, e);
                }
            }
        }
    }
    return dist;
}

std::vector<std::string> bridge_retrieve(const AlignmentGraph& g, const std::vector<EntityRef>& seeds,
                                         int hop_limit) {
    // chunk distance = entity distance + 1 through any adjacent entity
    const auto edist = entity_distances(g, seeds);
    std::vector<std::string> out;
    for (std::size_t c = 0; c < g.chunk_count(); ++c) {
        int best = -1;
        for (int e : g.entities_of_chunk(static_cast<int>(c))) {
            if (edist[e] && (best < 0 || *edist[e] + 1 < best)) best = *edist[e] + 1;
        }
        if (best >= 0 && best <= hop_limit) out.push_back(g.chunk_id(static_cast<int>(c)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

GraphSupport graph_support(const Query& q, const AlignmentGraph& g,
                           const std::vector<std::optional<int>>& entity_dist,
                           const std::string& chunk_id, const KbId& chunk_kb, const KbId& k_major,
                           const FusionConfig& cfg) {
    GraphSupport s;
    const auto node = g.chunk_node(chunk_id);
    if (node) {
        std::set<EntityRef> qset(q.entities.begin(), q.entities.end());
        for (int e : g.entities_of_chunk(*node)) {
            if (qset.count(g.entity(e))) ++s.overlap;
            if (entity_dist[e]) {
                if (!s.min_dist || *entity_dist[e] < *s.min_dist) s.min_dist = *entity_dist[e];
            }
        }
    }
    s.s_g = cfg.eta1 * std::log1p(static_cast<double>(s.overlap));
    if (s.min_dist) s.s_g += cfg.eta2 / (1.0 + *s.min_dist);
    if (chunk_kb != k_major) s.s_g += cfg.eta3;
    return s;
}

namespace {

void sort_ranked(std::vector<RankedChunk>& v) {
    std::sort(v.begin(), v.end(), [](const RankedChunk& a, const RankedChunk& b) {
        if (a.s_final != b.s_final) return a.s_final > b.s_final;
        return a.chunk_id < b.chunk_id;
    });
}

}  // namespace

std::vector<RankedChunk> fuse_and_rank(const std::vector<consolidate::Candidate>& pool,
                                       const std::vector<GraphSupport>& supports, double alpha) {
    std::vector<RankedChunk> out;
    if (pool.empty()) return out;

    std::vector<double> base, graph;
    base.reserve(pool.size());
    graph.reserve(pool.size());
    for (const auto& c : pool) base.push_back(c.s_base);
    for (const auto& s : supports) graph.push_back(s.s_g);
    base = normalize_values(std::move(base));
    graph = normalize_values(std::move(graph));

    out.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        RankedChunk r;
        r.chunk_id = pool[i].chunk_id;
        r.kb = pool[i].kb;
        r.s_base_hat = base[i];
        r.s_g_hat = graph[i];
        r.s_final = alpha * base[i] + (1.0 - alpha) * graph[i];
        r.overlap = supports[i].overlap;
        r.min_dist = supports[i].min_dist;
        out.push_back(std::move(r));
    }
    sort_ranked(out);
    return out;
}

std::vector<RankedChunk> rank_by_base(const std::vector<consolidate::Candidate>& pool) {
    std::vector<RankedChunk> out;
    out.reserve(pool.size());
    for (const auto& c : pool) {
        RankedChunk r;
        r.chunk_id = c.chunk_id;
        r.kb = c.kb;
        r.s_base_hat = c.s_base;
        r.s_final = c.s_base;
        out.push_back(std::move(r));
    }
    sort_ranked(out);
    return out;
}

}  // namespace kbfuse::aligngraph
