#include <fstream>

#include "kbfuse/pipeline.hpp"

namespace kbfuse::pipeline {

using nlohmann::json;

namespace {

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j) {
    PipelineConfig c;
    get_if(j, "corpus", c.corpus_path);
    get_if(j, "queries", c.queries_path);
    get_if(j, "out_dir", c.out_dir);
    if (j.contains("retriever_scores")) c.retriever_scores_path = j.at("retriever_scores").get<std::string>();
    if (j.contains("ranker_scores")) c.ranker_scores_path = j.at("ranker_scores").get<std::string>();
    get_if(j, "declared_kbs", c.declared_kbs);

    if (j.contains("scorer")) {
        const auto& s = j.at("scorer");
        get_if(s, "k1", c.scorer.k1);
        get_if(s, "b", c.scorer.b);
    }
    if (j.contains("daks")) {
        const auto& d = j.at("daks");
        get_if(d, "probe_size", c.daks.probe_size);
        get_if(d, "top_m", c.daks.top_m);
        get_if(d, "total_budget", c.daks.total_budget);
        get_if(d, "min_budget", c.daks.min_budget);
        if (d.contains("feature_weights")) {
            const auto w = d.at("feature_weights").get<std::vector<double>>();
            if (w.size() != 5)
                throw ConfigError("daks.feature_weights must have 5 entries (peak, topm, margin, entropy, coverage)");
            std::copy(w.begin(), w.end(), c.daks.feature_weights.begin());
        }
        get_if(d, "authority_weight", c.daks.authority_weight);
        if (d.contains("authority")) {
            c.daks.authority.clear();
            for (const auto& [kb, a] : d.at("authority").items()) c.daks.authority[kb] = a.get<double>();
        }
        get_if(d, "tau", c.daks.tau);
        if (d.contains("coverage_unit")) {
            const auto u = d.at("coverage_unit").get<std::string>();
            if (u == "document") c.daks.coverage_unit = ::kbfuse::daks::CoverageUnit::document;
            else if (u == "section") c.daks.coverage_unit = ::kbfuse::daks::CoverageUnit::section;
            else throw ConfigError("daks.coverage_unit must be \"document\" or \"section\"");
        }
        get_if(d, "normalize_probe_features", c.daks.normalize_probe_features);
    }
    if (j.contains("consolidate")) {
        const auto& k = j.at("consolidate");
        get_if(k, "mu", c.consolidate.mu);
        get_if(k, "jaccard_dup_threshold", c.consolidate.jaccard_dup_threshold);
        get_if(k, "shingle_size", c.consolidate.shingle_size);
        get_if(k, "doc_cap", c.consolidate.doc_cap);
    }
    if (j.contains("fusion")) {
        const auto& f = j.at("fusion");
        get_if(f, "seed_top_s", c.fusion.seed_top_s);
        get_if(f, "hop_limit", c.fusion.hop_limit);
        get_if(f, "eta1", c.fusion.eta1);
        get_if(f, "eta2", c.fusion.eta2);
        get_if(f, "eta3", c.fusion.eta3);
        get_if(f, "alpha", c.fusion.alpha);
    }
    if (j.contains("pack")) {
        const auto& p = j.at("pack");
        get_if(p, "token_budget", c.pack.token_budget);
        get_if(p, "doc_cap", c.pack.doc_cap);
        get_if(p, "citation_cutoff", c.pack.citation_cutoff);
    }
    get_if(j, "eval_k", c.eval_k);
    get_if(j, "enable_ranker", c.enable_ranker);
    if (j.contains("bridge")) {
        const auto bmode = j.at("bridge").get<std::string>();
        if (bmode == "off") c.bridge = BridgeMode::off;
        else if (bmode == "on") c.bridge = BridgeMode::on;
        else if (bmode == "auto") c.bridge = BridgeMode::auto_on_cross;
        else throw ConfigError("bridge must be \"off\", \"on\" or \"auto\"");
    }
    if (j.contains("strategy")) {
        const auto s = j.at("strategy").get<std::string>();
        const auto parsed = strategy_from_string(s);
        if (!parsed) throw ConfigError("unknown strategy \"" + s + "\"");
        c.strategy = *parsed;
        if (*parsed == Strategy::single_kb && s.rfind("single_kb:", 0) == 0)
            c.single_kb = s.substr(std::string("single_kb:").size());
    }
    get_if(j, "workers", c.workers);
    get_if(j, "dense_kb", c.dense_kb);
    get_if(j, "authoritative_kbs", c.authoritative_kbs);
    return c;
}

PipelineConfig PipelineConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
}

json PipelineConfig::to_json() const {
    json j;
    j["corpus"] = corpus_path;
    j["queries"] = queries_path;
    j["out_dir"] = out_dir;
    if (retriever_scores_path) j["retriever_scores"] = *retriever_scores_path;
    if (ranker_scores_path) j["ranker_scores"] = *ranker_scores_path;
    j["declared_kbs"] = declared_kbs;
    j["scorer"] = {{"k1", scorer.k1}, {"b", scorer.b}};
    j["daks"] = {{"probe_size", daks.probe_size},
                 {"top_m", daks.top_m},
                 {"total_budget", daks.total_budget},
                 {"min_budget", daks.min_budget},
                 {"feature_weights", daks.feature_weights},
                 {"authority_weight", daks.authority_weight},
                 {"authority", daks.authority},
                 {"tau", daks.tau},
                 {"coverage_unit",
                  daks.coverage_unit == ::kbfuse::daks::CoverageUnit::document ? "document" : "section"},
                 {"normalize_probe_features", daks.normalize_probe_features}};
    j["consolidate"] = {{"mu", consolidate.mu},
                        {"jaccard_dup_threshold", consolidate.jaccard_dup_threshold},
                        {"shingle_size", consolidate.shingle_size},
                        {"doc_cap", consolidate.doc_cap}};
    j["fusion"] = {{"seed_top_s", fusion.seed_top_s}, {"hop_limit", fusion.hop_limit},
                   {"eta1", fusion.eta1},             {"eta2", fusion.eta2},
                   {"eta3", fusion.eta3},             {"alpha", fusion.alpha}};
    j["pack"] = {{"token_budget", pack.token_budget},
                 {"doc_cap", pack.doc_cap},
                 {"citation_cutoff", pack.citation_cutoff}};
    j["eval_k"] = eval_k;
    j["enable_ranker"] = enable_ranker;
    j["bridge"] = bridge == BridgeMode::off ? "off" : bridge == BridgeMode::on ? "on" : "auto";
    j["strategy"] = strategy == Strategy::single_kb && !single_kb.empty()
                        ? "single_kb:" + single_kb
                        : std::string(to_string(strategy));
    j["workers"] = workers;
    j["dense_kb"] = dense_kb;
    j["authoritative_kbs"] = authoritative_kbs;
    return j;
}

}  // namespace kbfuse::pipeline
