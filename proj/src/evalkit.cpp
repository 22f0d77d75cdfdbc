#include "kbfuse/evalkit.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <set>

namespace kbfuse::evalkit {

namespace {

const GoldLabel& gold_for(const std::map<std::string, GoldLabel>& golds, const std::string& qid) {
    auto it = golds.find(qid);
    if (it == golds.end()) throw GoldMissing(qid);
    return it->second;
}

}  // namespace

RoutingMetrics routing_metrics(const std::vector<QueryOutcome>& outcomes,
                               const std::map<std::string, GoldLabel>& golds, int k,
                               const KbId& dense_kb, const std::vector<KbId>& auth_kbs) {
    if (outcomes.empty()) throw KeyMismatch("no query outcomes to evaluate");
    RoutingMetrics m;
    const std::set<KbId> auth(auth_kbs.begin(), auth_kbs.end());
    double primary = 0, top2 = 0, edr = 0, authcov = 0;
    for (const auto& o : outcomes) {
        const GoldLabel& g = gold_for(golds, o.query_id);
        if (!o.kb_ranking.empty() && o.kb_ranking.front() == g.primary_kb) primary += 1;
        for (std::size_t i = 0; i < o.kb_ranking.size() && i < 2; ++i)
            if (o.kb_ranking[i] == g.primary_kb) {
                top2 += 1;
                break;
            }

        const int top = std::min<int>(k, static_cast<int>(o.evidence.size()));
        if (top > 0) {
            int dense = 0;
            for (int i = 0; i < top; ++i)
                if (o.evidence[i].kb == dense_kb) ++dense;
            edr += static_cast<double>(dense) / top;
        }
        if (auth.count(g.primary_kb)) {
            ++m.auth_population;
            for (int i = 0; i < top; ++i) {
                if (auth.count(o.evidence[i].kb)) {
                    authcov += 1;
                    break;
                }
            }
        }
    }
    m.n_queries = static_cast<int>(outcomes.size());
    m.primary_acc = primary / m.n_queries;
    m.top2_hit = top2 / m.n_queries;
    m.edr = edr / m.n_queries;
    m.auth_cov = m.auth_population > 0 ? authcov / m.auth_population : 0.0;
    return m;
}

double ndcg_at_k(const std::vector<std::string>& ranked_ids, const std::vector<std::string>& gold_ids,
                 int k) {
    const std::set<std::string> gold(gold_ids.begin(), gold_ids.end());
    if (gold.empty()) return 0.0;
    double dcg = 0.0;
    const int top = std::min<int>(k, static_cast<int>(ranked_ids.size()));
    for (int i = 0; i < top; ++i) {
        if (gold.count(ranked_ids[i])) dcg += 1.0 / std::log2(i + 2.0);
    }
    double idcg = 0.0;
    const int ideal = std::min<int>(k, static_cast<int>(gold.size()));
    for (int i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(i + 2.0);
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

std::string metrics_table(const std::vector<StrategyMetrics>& rows) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%-22s %10s %10s %10s %10s %12s %11s %11s\n", "method",
                  "PrimaryAcc", "Top2Hit", "EDR", "AuthCov", "EvRecall@K", "EvNDCG@K", "CrossEv@K");
    out += buf;
    out += std::string(101, '-') + "\n";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-22s %10.3f %10.3f %10.3f %10.3f %12.3f %11.3f %11.3f\n",
                      r.strategy.c_str(), r.routing.primary_acc, r.routing.top2_hit, r.routing.edr,
                      r.routing.auth_cov, r.evidence.ev_recall_at_k, r.evidence.ev_ndcg_at_k,
                      r.evidence.cross_ev_at_k);
        out += buf;
    }
    return out;
}

EvidenceMetrics evidence_metrics(const std::vector<QueryOutcome>& outcomes,
                                 const std::map<std::string, GoldLabel>& golds, int k) {
    if (outcomes.empty()) throw KeyMismatch("no query outcomes to evaluate");
    EvidenceMetrics m;
    m.k = k;
    double recall = 0, ndcg = 0, crossev = 0;
    for (const auto& o : outcomes) {
        const GoldLabel& g = gold_for(golds, o.query_id);
        std::vector<std::string> top_ids;
        std::set<KbId> top_kbs;
        for (std::size_t i = 0; i < o.evidence.size() && i < static_cast<std::size_t>(k); ++i) {
            top_ids.push_back(o.evidence[i].chunk_id);
            top_kbs.insert(o.evidence[i].kb);
        }
        const std::set<std::string> gold_set(g.evidence_chunk_ids.begin(), g.evidence_chunk_ids.end());
        int hits = 0;
        for (const auto& id : top_ids) hits += gold_set.count(id) ? 1 : 0;
        recall += gold_set.empty() ? 0.0 : static_cast<double>(hits) / gold_set.size();
        ndcg += ndcg_at_k(top_ids, g.evidence_chunk_ids, k);
        if (g.required_kbs.size() >= 2) {
            ++m.cross_population;
            const bool all = std::all_of(g.required_kbs.begin(), g.required_kbs.end(),
                                         [&top_kbs](const KbId& kb) { return top_kbs.count(kb) > 0; });
            if (all) crossev += 1;
        }
    }
    m.n_queries = static_cast<int>(outcomes.size());
    m.ev_recall_at_k = recall / m.n_queries;
    m.ev_ndcg_at_k = ndcg / m.n_queries;
    m.cross_ev_at_k = m.cross_population > 0 ? crossev / m.cross_population : 0.0;
    return m;
}

}  // namespace kbfuse::evalkit
