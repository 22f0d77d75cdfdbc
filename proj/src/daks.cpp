#include "kbfuse/daks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace kbfuse::daks {

std::vector<double> softmax(const std::vector<double>& scores, double tau) {
    if (scores.empty()) return {};
    if (tau <= 0.0) throw ConfigError("softmax temperature must be positive");
    const double mx = *std::max_element(scores.begin(), scores.end());
    std::vector<double> out(scores.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp((scores[i] - mx) / tau);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

double softmax_entropy(const std::vector<double>& scores) {
    const auto pi = softmax(scores);
    double h = 0.0;
    for (double p : pi) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

std::vector<ScoredChunk> probe(const Corpus& corpus, const Scorers& scorers, const Query& q,
                               const KbId& kb, int L) {
    (void)corpus;
    auto ranked = scorers.rank_kb(q, kb);
    if (static_cast<int>(ranked.size()) > L) ranked.resize(L);
    return ranked;
}

KbFeatures kb_features(std::vector<ScoredChunk> probe_result, int M, const Corpus& corpus,
                       CoverageUnit unit) {
    if (probe_result.empty()) throw EmptyProbe();
    KbFeatures f;
    std::vector<double> scores;
    scores.reserve(probe_result.size());
    for (const auto& s : probe_result) scores.push_back(s.score);
    // probe() already sorts; re-sorting keeps this total for direct callers
    std::sort(scores.begin(), scores.end(), std::greater<>());

    const int m = std::clamp(M, 1, static_cast<int>(scores.size()));
    f.peak = scores.front();
    double topm = 0.0;
    for (int i = 0; i < m; ++i) topm += scores[i];
    f.topm_mean = topm / m;
    f.margin = scores.front() - scores[m - 1];
    f.entropy = softmax_entropy(scores);

    std::set<std::string> units;
    for (const auto& s : probe_result) {
        const Chunk& c = corpus.at(s.chunk_id);
        if (unit == CoverageUnit::document) {
            units.insert(c.kb + "\x1f" + c.doc_id);
        } else {
            std::string key = c.kb + "\x1f" + c.doc_id;
            for (const auto& p : c.path) key += "\x1f" + p;
            units.insert(std::move(key));
        }
    }
    f.coverage = static_cast<double>(units.size()) / probe_result.size();
    if (!probe_result.empty()) f.kb = corpus.at(probe_result.front().chunk_id).kb;
    f.probe = std::move(probe_result);
    return f;
}

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

std::size_t rank_pos(const std::vector<KbId>& ranking, const KbId& kb) {
    for (std::size_t i = 0; i < ranking.size(); ++i)
        if (ranking[i] == kb) return i;
    return ranking.size();
}

}  // namespace

std::map<KbId, int> allocate_budgets(const std::map<KbId, double>& probs,
                                     const std::vector<KbId>& ranking, int total_budget,
                                     int min_budget) {
    const int n = static_cast<int>(probs.size());
    if (n == 0) throw ConfigError("no KBs to allocate budgets over");
    if (min_budget < 0) throw ConfigError("min_budget must be non-negative");
    if (static_cast<long long>(n) * min_budget > total_budget)
        throw ConfigError("min_budget * |KBs| exceeds total budget");

    std::map<KbId, int> budgets;
    const double spread = static_cast<double>(total_budget - n * min_budget);
    for (const auto& [kb, p] : probs) budgets[kb] = min_budget + round_half_up(spread * p);

    auto sum = [&budgets] {
        int s = 0;
        for (const auto& [kb, b] : budgets) s += b;
        return s;
    };

    while (sum() > total_budget) {
        // largest budget above the floor; tied KBs latest in ranking give way
        KbId victim;
        int best_b = -1;
        std::size_t best_pos = 0;
        for (const auto& [kb, b] : budgets) {
            if (b <= min_budget) continue;
            const std::size_t pos = rank_pos(ranking, kb);
            if (b > best_b || (b == best_b && pos > best_pos)) {
                victim = kb;
                best_b = b;
                best_pos = pos;
            }
        }
        --budgets[victim];
    }
    while (sum() < total_budget) {
        // argmax probability; tied KBs earliest in ranking win
        KbId winner;
        double best_p = -std::numeric_limits<double>::infinity();
        std::size_t best_pos = std::numeric_limits<std::size_t>::max();
        for (const auto& [kb, p] : probs) {
            const std::size_t pos = rank_pos(ranking, kb);
            if (p > best_p || (p == best_p && pos < best_pos)) {
                winner = kb;
                best_p = p;
                best_pos = pos;
            }
        }
        ++budgets[winner];
    }
    return budgets;
}

RoutingDecision route(const Corpus& corpus, const Scorers& scorers, const Query& q,
                      const DaksConfig& cfg) {
    const auto& kbs = scorers.indexed_kbs();
    if (kbs.empty()) throw MissingIndex("(none indexed)");
    if (cfg.probe_size <= 0) throw ConfigError("probe size must be positive");
    if (cfg.top_m < 1 || cfg.top_m > cfg.probe_size) throw ConfigError("top_m must be in [1, probe_size]");
    if (static_cast<long long>(kbs.size()) * cfg.min_budget > cfg.total_budget)
        throw ConfigError("min_budget * |KBs| exceeds total budget");

    RoutingDecision d;

    // full per-KB rankings: probes are prefixes, dense pools other prefixes
    std::map<KbId, std::vector<ScoredChunk>> full;
    for (const auto& kb : kbs) full[kb] = scorers.rank_kb(q, kb);

    std::map<KbId, std::vector<ScoredChunk>> probes;
    for (const auto& kb : kbs) {
        auto p = full[kb];
        if (static_cast<int>(p.size()) > cfg.probe_size) p.resize(cfg.probe_size);
        probes[kb] = std::move(p);
    }

    if (cfg.normalize_probe_features) {
        // per-query min-max over the union of probe scores
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& [kb, p] : probes)
            for (const auto& s : p) {
                lo = std::min(lo, s.score);
                hi = std::max(hi, s.score);
            }
        for (auto& [kb, p] : probes)
            for (auto& s : p) s.score = (hi > lo) ? (s.score - lo) / (hi - lo) : 0.5;
    }

    for (const auto& kb : kbs) {
        auto f = kb_features(probes[kb], cfg.top_m, corpus, cfg.coverage_unit);
        f.kb = kb;
        double s = 0.0;
        const auto phi = f.as_vector();
        for (std::size_t i = 0; i < phi.size(); ++i) s += cfg.feature_weights[i] * phi[i];
        auto it = cfg.authority.find(kb);
        s += cfg.authority_weight * (it != cfg.authority.end() ? it->second : 0.0);
        d.scores[kb] = s;
        d.features.emplace(kb, std::move(f));
    }

    d.ranking.assign(kbs.begin(), kbs.end());
    std::sort(d.ranking.begin(), d.ranking.end(), [&d](const KbId& a, const KbId& b) {
        if (d.scores.at(a) != d.scores.at(b)) return d.scores.at(a) > d.scores.at(b);
        return a < b;
    });
    d.k_major = d.ranking.front();

    std::vector<double> svec;
    svec.reserve(kbs.size());
    for (const auto& kb : kbs) svec.push_back(d.scores.at(kb));
    const auto pvec = softmax(svec, cfg.tau);
    for (std::size_t i = 0; i < kbs.size(); ++i) d.probs[kbs[i]] = pvec[i];

    d.budgets = allocate_budgets(d.probs, d.ranking, cfg.total_budget, cfg.min_budget);

    for (const auto& kb : kbs) {
        const auto& ranked = full[kb];
        const int take = std::min<int>(d.budgets.at(kb), static_cast<int>(ranked.size()));
        for (int i = 0; i < take; ++i) d.dense_pool.push_back({ranked[i].chunk_id, kb, ranked[i].score});
    }
    return d;
}

}  // namespace kbfuse::daks
