#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "kbfuse/corpus.hpp"

namespace kbfuse::packer {

struct PackConfig {
    int token_budget = 2048;   // T_max
    int doc_cap = 2;           // max chunks per (kb, doc)
    int citation_cutoff = 5;   // K for @K metrics downstream
};

struct PackItem {
    std::string chunk_id;
    KbId kb;
    std::string doc_id;
    int tokens = 0;
    double s_final = 0.0;
};

struct PackedChunk {
    std::string chunk_id;
    KbId kb;
    std::string doc_id;
    double s_final = 0.0;
    int tokens = 0;
    int phase = 2;  // 1 = coverage pick, 2 = budget fill
};

struct PackedEvidence {
    std::vector<PackedChunk> evidence;  // insertion order: coverage picks first
    int total_tokens = 0;
    double objective = 0.0;
    std::vector<KbId> covered_kbs;          // sorted
    std::vector<KbId> coverage_violations;  // required KBs left uncovered, sorted
    bool doc_cap_overridden = false;        // a coverage pick had to exceed the cap
};

struct EmptyRankedList : std::runtime_error {
    EmptyRankedList() : std::runtime_error("ranked list is empty") {}
};
struct TooLarge : std::runtime_error {
    explicit TooLarge(std::size_t n)
        : std::runtime_error("brute-force packing limited to 20 candidates, got " + std::to_string(n)) {}
};

/// Two-phase greedy packing. Phase 1 walks required_kbs in the given order
/// (callers pass them in descending routing-score order) and picks each
/// KB's best-scoring chunk that fits the remaining budget, preferring chunks
/// under the doc cap; a KB with no fitting chunk becomes a recorded
/// violation. Phase 2 walks `ranked` in order and adds whatever fits budget
/// and cap. Deterministic.
PackedEvidence pack(const std::vector<PackItem>& ranked, const std::vector<KbId>& required_kbs,
                    const PackConfig& cfg);

/// Exhaustive oracle over all subsets (|ranked| <= 20): maximizes total
/// s_final under budget + doc cap + coverage; if coverage is infeasible,
/// maximizes under budget + doc cap and reports the violations. Ties break
/// to the lexicographically smallest sorted chunk-id list. Output sorted by
/// (s_final desc, chunk_id asc).
PackedEvidence brute_force_pack(const std::vector<PackItem>& ranked,
                                const std::vector<KbId>& required_kbs, const PackConfig& cfg);

}  // namespace kbfuse::packer
