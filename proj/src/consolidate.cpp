#include "kbfuse/consolidate.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "kbfuse/text.hpp"

namespace kbfuse::consolidate {

std::string_view to_string(Origin o) {
    switch (o) {
        case Origin::dense: return "dense";
        case Origin::expansion: return "expansion";
        case Origin::bridge: return "bridge";
    }
    return "dense";
}

std::vector<Candidate> expand(const Corpus& corpus, const std::vector<daks::PooledChunk>& dense_pool) {
    std::vector<Candidate> out;
    std::set<std::string> seen;
    for (const auto& p : dense_pool) {
        if (seen.insert(p.chunk_id).second) {
            Candidate c;
            c.chunk_id = p.chunk_id;
            c.kb = p.kb;
            c.origin = Origin::dense;
            c.raw_ret = p.score;
            out.push_back(std::move(c));
        }
    }
    // neighbors after the pool itself: a chunk that is both pooled and a
    // neighbor keeps its dense identity and probe score
    for (const auto& p : dense_pool) {
        const Chunk& chunk = corpus.at(p.chunk_id);
        for (const Chunk* nbr : corpus.neighbors(chunk)) {
            if (seen.insert(nbr->chunk_id).second) {
                Candidate c;
                c.chunk_id = nbr->chunk_id;
                c.kb = nbr->kb;
                c.origin = Origin::expansion;
                out.push_back(std::move(c));
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Candidate& a, const Candidate& b) { return a.chunk_id < b.chunk_id; });
    return out;
}

void fill_retriever_scores(std::vector<Candidate>& cands,
                           const std::function<double(const std::string&)>& ret_score,
                           const std::function<std::optional<double>(const std::string&)>& rank_score) {
    for (auto& c : cands) {
        if (c.origin != Origin::dense) c.raw_ret = ret_score(c.chunk_id);
        if (rank_score) c.raw_rank = rank_score(c.chunk_id);
    }
}

void base_scores(std::vector<Candidate>& cands, double mu) {
    if (cands.empty()) return;
    std::vector<double> ret;
    ret.reserve(cands.size());
    for (const auto& c : cands) ret.push_back(c.raw_ret);
    ret = normalize_values(std::move(ret));

    const bool any_rank = std::any_of(cands.begin(), cands.end(),
                                      [](const Candidate& c) { return c.raw_rank.has_value(); });
    std::vector<double> rank;
    if (any_rank) {
        rank.reserve(cands.size());
        for (const auto& c : cands) rank.push_back(c.raw_rank.value_or(0.0));
        rank = normalize_values(std::move(rank));
    }

    for (std::size_t i = 0; i < cands.size(); ++i) {
        cands[i].s_ret_hat = ret[i];
        cands[i].s_rank_hat = any_rank ? rank[i] : 0.5;
        cands[i].s_base = mu * cands[i].s_ret_hat + (1.0 - mu) * cands[i].s_rank_hat;
    }
}

double shingle_jaccard(const std::string& a, const std::string& b, int shingle_size) {
    const auto sa = text::char_shingles(a, shingle_size);
    const auto sb = text::char_shingles(b, shingle_size);
    const std::set<std::string> seta(sa.begin(), sa.end());
    const std::set<std::string> setb(sb.begin(), sb.end());
    if (seta.empty() && setb.empty()) return 1.0;
    if (seta.empty() || setb.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& s : seta) inter += setb.count(s);
    const std::size_t uni = seta.size() + setb.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.s_base != b.s_base) return a.s_base > b.s_base;
    return a.chunk_id < b.chunk_id;
}

}  // namespace

std::vector<Candidate> dedup_and_cap(std::vector<Candidate> cands, const Corpus& corpus,
                                     const ConsolidateConfig& cfg) {
    const int n = static_cast<int>(cands.size());
    if (n == 0) return cands;

    // transitive near-duplicate groups; each keeps its best member
    std::vector<std::set<std::string>> shingles(n);
    for (int i = 0; i < n; ++i) {
        const auto sv = text::char_shingles(corpus.at(cands[i].chunk_id).text, cfg.shingle_size);
        shingles[i].insert(sv.begin(), sv.end());
    }
    UnionFind uf(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto& sa = shingles[i];
            const auto& sb = shingles[j];
            double jac;
            if (sa.empty() && sb.empty()) {
                jac = 1.0;
            } else if (sa.empty() || sb.empty()) {
                jac = 0.0;
            } else {
                std::size_t inter = 0;
                for (const auto& s : sa) inter += sb.count(s);
                jac = static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
            }
            if (jac >= cfg.jaccard_dup_threshold) uf.unite(i, j);
        }
    }
    std::map<int, int> group_best;
    for (int i = 0; i < n; ++i) {
        const int g = uf.find(i);
        auto it = group_best.find(g);
        if (it == group_best.end() || better(cands[i], cands[it->second])) group_best[g] = i;
    }
    std::vector<Candidate> surv;
    surv.reserve(group_best.size());
    for (const auto& [g, idx] : group_best) surv.push_back(cands[idx]);

    std::sort(surv.begin(), surv.end(), better);

    // per-document diversity cap
    std::map<std::pair<KbId, std::string>, int> doc_count;
    std::vector<Candidate> out;
    for (auto& c : surv) {
        const Chunk& ch = corpus.at(c.chunk_id);
        int& cnt = doc_count[{ch.kb, ch.doc_id}];
        if (cnt < cfg.doc_cap) {
            ++cnt;
            out.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace kbfuse::consolidate
