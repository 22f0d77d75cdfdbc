#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kbfuse/consolidate.hpp"
#include "kbfuse/corpus.hpp"

namespace kbfuse::aligngraph {

/// Bipartite chunk-entity graph: an edge (c, e) exists iff e is annotated on
/// chunk c. Entity nodes only exist with at least one chunk edge. Node
/// orders are deterministic: chunks ascending by chunk_id, entities
/// ascending by (name, type).
class AlignmentGraph {
public:
    static AlignmentGraph build(const Corpus& corpus);

    std::size_t chunk_count() const { return chunk_ids_.size(); }
    std::size_t entity_count() const { return entities_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    std::optional<int> chunk_node(const std::string& chunk_id) const;
    std::optional<int> entity_node(const EntityRef& e) const;

    const std::string& chunk_id(int c) const { return chunk_ids_[c]; }
    const KbId& chunk_kb(int c) const { return chunk_kbs_[c]; }
    const EntityRef& entity(int e) const { return entities_[e]; }

    const std::vector<int>& entities_of_chunk(int c) const { return chunk_adj_[c]; }
    const std::vector<int>& chunks_of_entity(int e) const { return entity_adj_[e]; }

    /// Node and edge lists in deterministic order.
    void dump(std::ostream& out) const;

private:
    std::vector<std::string> chunk_ids_;
    std::vector<KbId> chunk_kbs_;
    std::vector<EntityRef> entities_;
    std::vector<std::vector<int>> chunk_adj_;   // chunk -> entity nodes
    std::vector<std::vector<int>> entity_adj_;  // entity -> chunk nodes
    std::map<std::string, int> chunk_index_;
    std::map<EntityRef, int> entity_index_;
    std::size_t edge_count_ = 0;
};

struct FusionConfig {
    int seed_top_s = 5;   // candidates whose entities seed the traversal
    int hop_limit = 2;    // edges; even, so traversal ends on chunk selection
    double eta1 = 1.0;    // entity-overlap weight
    double eta2 = 1.0;    // graph-proximity weight
    double eta3 = 0.5;    // cross-KB bonus
    double alpha = 0.6;   // fusion weight on the semantic side
};

/// Query entities plus entities of the top-S candidates (set union).
/// Candidates must already be sorted by s_base.
std::vector<EntityRef> seed_entities_from(const Query& q, const std::vector<consolidate::Candidate>& cands,
                                          int seed_top_s, const Corpus& corpus);

/// Multi-source BFS distance (in edges) from the seed entity nodes to every
/// entity node; nullopt = unreachable. Seeds absent from the graph are
/// skipped.
std::vector<std::optional<int>> entity_distances(const AlignmentGraph& g,
                                                 const std::vector<EntityRef>& seeds);

/// Chunk ids within hop_limit edges of any seed entity, ascending.
std::vector<std::string> bridge_retrieve(const AlignmentGraph& g, const std::vector<EntityRef>& seeds,
                                         int hop_limit);

struct GraphSupport {
    int overlap = 0;              // |E(q) ∩ E(c)|
    std::optional<int> min_dist;  // min over chunk entities of seed distance
    double s_g = 0.0;
};

/// s_g = eta1 * ln(1 + overlap) + eta2 / (1 + d) + eta3 * [kb != k_major];
/// the proximity term is 0 for chunks with no entities or no seed
/// connection.
GraphSupport graph_support(const Query& q, const AlignmentGraph& g,
                           const std::vector<std::optional<int>>& entity_dist,
                           const std::string& chunk_id, const KbId& chunk_kb, const KbId& k_major,
                           const FusionConfig& cfg);

struct RankedChunk {
    std::string chunk_id;
    KbId kb;
    double s_base_hat = 0.0;
    double s_g_hat = 0.0;
    double s_final = 0.0;
    int overlap = 0;
    std::optional<int> min_dist;
};

/// Normalizes s_base and s_g within the pool, fuses with alpha, and sorts by
/// (s_final desc, chunk_id asc).
std::vector<RankedChunk> fuse_and_rank(const std::vector<consolidate::Candidate>& pool,
                                       const std::vector<GraphSupport>& supports, double alpha);

/// Degenerate ranking for graph-free strategies: s_final = s_base.
std::vector<RankedChunk> rank_by_base(const std::vector<consolidate::Candidate>& pool);

}  // namespace kbfuse::aligngraph
