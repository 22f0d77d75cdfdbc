#include "kbfuse/packer.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace kbfuse::packer {

namespace {

using DocKey = std::pair<KbId, std::string>;

void finalize(PackedEvidence& out, const std::vector<KbId>& required_kbs) {
    std::set<KbId> covered;
    for (const auto& c : out.evidence) {
        out.total_tokens += c.tokens;
        out.objective += c.s_final;
        covered.insert(c.kb);
    }
    out.covered_kbs.assign(covered.begin(), covered.end());
    for (const auto& kb : required_kbs)
        if (!covered.count(kb)) out.coverage_violations.push_back(kb);
    std::sort(out.coverage_violations.begin(), out.coverage_violations.end());
    out.coverage_violations.erase(
        std::unique(out.coverage_violations.begin(), out.coverage_violations.end()),
        out.coverage_violations.end());
}

bool rank_less(const PackItem& a, const PackItem& b) {
    if (a.s_final != b.s_final) return a.s_final > b.s_final;
    return a.chunk_id < b.chunk_id;
}

}  // namespace

PackedEvidence pack(const std::vector<PackItem>& ranked, const std::vector<KbId>& required_kbs,
                    const PackConfig& cfg) {
    if (ranked.empty()) throw EmptyRankedList();

    PackedEvidence out;
    std::set<std::string> chosen;
    std::map<DocKey, int> doc_count;
    int used = 0;

    // Phase 1: one best-fitting chunk per required KB, in the given order
    for (const auto& kb : required_kbs) {
        const PackItem* best_under_cap = nullptr;
        const PackItem* best_any = nullptr;
        for (const auto& item : ranked) {
            if (item.kb != kb || chosen.count(item.chunk_id)) continue;
            if (used + item.tokens > cfg.token_budget) continue;
            if (!best_any || rank_less(item, *best_any)) best_any = &item;
            if (doc_count[{item.kb, item.doc_id}] < cfg.doc_cap) {
                if (!best_under_cap || rank_less(item, *best_under_cap)) best_under_cap = &item;
            }
        }
        const PackItem* pick = best_under_cap ? best_under_cap : best_any;
        if (!pick) continue;  // recorded as a violation in finalize()
        if (!best_under_cap) out.doc_cap_overridden = true;
        chosen.insert(pick->chunk_id);
        used += pick->tokens;
        ++doc_count[{pick->kb, pick->doc_id}];
        out.evidence.push_back({pick->chunk_id, pick->kb, pick->doc_id, pick->s_final, pick->tokens, 1});
    }

    // Phase 2: fill remaining budget in ranked order under the doc cap
    for (const auto& item : ranked) {
        if (chosen.count(item.chunk_id)) continue;
        if (used + item.tokens > cfg.token_budget) continue;
        if (doc_count[{item.kb, item.doc_id}] >= cfg.doc_cap) continue;
        chosen.insert(item.chunk_id);
        used += item.tokens;
        ++doc_count[{item.kb, item.doc_id}];
        out.evidence.push_back({item.chunk_id, item.kb, item.doc_id, item.s_final, item.tokens, 2});
    }

    finalize(out, required_kbs);
    return out;
}

PackedEvidence brute_force_pack(const std::vector<PackItem>& ranked,
                                const std::vector<KbId>& required_kbs, const PackConfig& cfg) {
    if (ranked.empty()) throw EmptyRankedList();
    const std::size_t n = ranked.size();
    if (n > 20) throw TooLarge(n);

    const std::set<KbId> required(required_kbs.begin(), required_kbs.end());

    double best_obj = -1.0;
    bool best_covers = false;
    std::vector<std::string> best_ids;
    std::uint32_t best_mask = 0;
    bool have_best = false;

    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        int tokens = 0;
        double obj = 0.0;
        std::map<DocKey, int> doc_count;
        std::set<KbId> covered;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            if (!(mask & (1u << i))) continue;
            const auto& item = ranked[i];
            tokens += item.tokens;
            if (tokens > cfg.token_budget) ok = false;
            if (++doc_count[{item.kb, item.doc_id}] > cfg.doc_cap) ok = false;
            obj += item.s_final;
            covered.insert(item.kb);
        }
        if (!ok) continue;
        const bool covers = std::all_of(required.begin(), required.end(),
                                        [&covered](const KbId& kb) { return covered.count(kb) > 0; });

        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) ids.push_back(ranked[i].chunk_id);
        std::sort(ids.begin(), ids.end());

        // coverage-feasible subsets strictly dominate; then objective; then
        // lexicographically smallest id multiset
        bool take = false;
        if (!have_best) {
            take = true;
        } else if (covers != best_covers) {
            take = covers;
        } else if (obj != best_obj) {
            take = obj > best_obj;
        } else {
            take = ids < best_ids;
        }
        if (take) {
            have_best = true;
            best_obj = obj;
            best_covers = covers;
            best_ids = std::move(ids);
            best_mask = mask;
        }
    }

    PackedEvidence out;
    std::vector<PackItem> members;
    for (std::size_t i = 0; i < n; ++i)
        if (best_mask & (1u << i)) members.push_back(ranked[i]);
    std::sort(members.begin(), members.end(), rank_less);
    for (const auto& m : members)
        out.evidence.push_back({m.chunk_id, m.kb, m.doc_id, m.s_final, m.tokens, 2});
    finalize(out, required_kbs);
    return out;
}

}  // namespace kbfuse::packer
