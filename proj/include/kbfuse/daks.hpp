#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kbfuse/corpus.hpp"
#include "kbfuse/scorers.hpp"

namespace kbfuse::daks {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyProbe : std::runtime_error {
    EmptyProbe() : std::runtime_error("probe result is empty") {}
};

enum class CoverageUnit { document, section };

struct DaksConfig {
    int probe_size = 20;  // L
    int top_m = 5;        // M, clipped to the probe length
    int total_budget = 30;
    int min_budget = 2;
    // weights over (peak, top-M mean, margin, entropy, coverage); entropy
    // weight is negative: concentrated score mass is a routing signal
    std::array<double, 5> feature_weights{1.0, 1.0, 0.5, -0.5, 0.5};
    double authority_weight = 1.0;  // lambda
    std::map<KbId, double> authority{{"E", 0.0}, {"T", 0.3}, {"P", 0.3}};
    double tau = 1.0;  // softmax temperature for budget shares
    CoverageUnit coverage_unit = CoverageUnit::document;
    // min-max normalize probe scores across the KB union before computing
    // features, so feature scale is O(1) and the authority prior is
    // commensurate regardless of the scorer
    bool normalize_probe_features = true;
};

struct KbFeatures {
    KbId kb;
    double peak = 0.0;
    double topm_mean = 0.0;
    double margin = 0.0;
    double entropy = 0.0;
    double coverage = 0.0;
    std::vector<ScoredChunk> probe;

    std::array<double, 5> as_vector() const { return {peak, topm_mean, margin, entropy, coverage}; }
};

struct PooledChunk {
    std::string chunk_id;
    KbId kb;
    double score = 0.0;
};

struct RoutingDecision {
    std::map<KbId, double> scores;   // S_k
    std::vector<KbId> ranking;       // S descending, KB id ascending on ties
    std::map<KbId, double> probs;    // softmax(S / tau)
    std::map<KbId, int> budgets;     // sum == total_budget, each >= min_budget
    std::vector<PooledChunk> dense_pool;
    KbId k_major;
    std::map<KbId, KbFeatures> features;
};

/// H(softmax(scores)) in nats. 0 for a single element; ln(n) at uniform.
double softmax_entropy(const std::vector<double>& scores);

/// Numerically stable softmax of scores / tau.
std::vector<double> softmax(const std::vector<double>& scores, double tau = 1.0);

/// Top-L chunks of one KB; score descending, chunk_id ascending.
std::vector<ScoredChunk> probe(const Corpus& corpus, const Scorers& scorers, const Query& q,
                               const KbId& kb, int L);

KbFeatures kb_features(std::vector<ScoredChunk> probe_result, int M, const Corpus& corpus,
                       CoverageUnit unit = CoverageUnit::document);

/// Budget allocation of Algorithm-style soft shares: raw budgets
/// min_budget + round_half_up((B - n*min_budget) * p_k), then adjust to sum
/// exactly to B. Decrements hit the largest budget above the floor (ties:
/// the KB latest in `ranking` gives way); increments go to the argmax
/// probability (ties: earliest in `ranking`).
std::map<KbId, int> allocate_budgets(const std::map<KbId, double>& probs,
                                     const std::vector<KbId>& ranking, int total_budget,
                                     int min_budget);

RoutingDecision route(const Corpus& corpus, const Scorers& scorers, const Query& q,
                      const DaksConfig& cfg);

}  // namespace kbfuse::daks
