#pragma once
// Pipeline configuration: a single JSON document holding every tunable the
// stages consume, validated against a fixed schema.
//
// Parsing is strict: unknown keys are rejected at every nesting level, types
// are checked, and module-level validate() rules run on the result. Missing
// keys fall back to the documented defaults, so {} is a complete config.
// serialize_config emits every field in schema order, which makes
// normalization (parse -> serialize) canonical and byte-stable.

#include <array>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "symatlas/atlas.hpp"
#include "symatlas/dynamics.hpp"
#include "symatlas/errors.hpp"
#include "symatlas/families.hpp"
#include "symatlas/poets.hpp"
#include "symatlas/rng.hpp"
#include "symatlas/temporal.hpp"

namespace symatlas {

inline constexpr const char* kPipelineVersion = "0.1.0";

inline constexpr std::array<const char*, 8> kStageNames = {
    "ingest", "families", "atlas", "communities", "trends", "dynamics", "poets", "report"};

inline bool is_stage_name(const std::string& s) {
    for (const char* n : kStageNames)
        if (s == n) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Config sections without a module struct of their own

struct PathsConfig {
    std::string corpus = "data/fixture/corpus.jsonl";
    std::string poets = "data/fixture/poets.tsv";
    std::string lexicon_dir = "data/fixture/lexicons";
    std::string seeds = "data/fixture/lexicons/seeds.txt";
};

struct EvidenceConfig {
    int context_window = 2;   // hemistich-local co-occurrence window
    int min_count = 1;        // frequency floor for profiled forms
    int embedding_dim = 8;
    int kmeans_k = 6;
    int kmeans_iters = 25;

    void validate() const {
        if (context_window < 1) throw ValidationError("evidence: context_window must be >= 1");
        if (min_count < 1) throw ValidationError("evidence: min_count must be >= 1");
        if (embedding_dim < 1) throw ValidationError("evidence: embedding_dim must be >= 1");
        if (kmeans_k < 1) throw ValidationError("evidence: kmeans_k must be >= 1");
        if (kmeans_iters < 1) throw ValidationError("evidence: kmeans_iters must be >= 1");
    }
};

struct DynamicsConfig {
    double flat_epsilon = 0.005;  // |delta| at or below this counts as flat
    int n_permutations = 99;
    double drift_cutoff = 1.0;    // rank-drift magnitude separating hub classes

    void validate() const {
        if (flat_epsilon < 0) throw ValidationError("dynamics: flat_epsilon must be >= 0");
        if (n_permutations < 1) throw ValidationError("dynamics: n_permutations must be >= 1");
        if (drift_cutoff <= 0) throw ValidationError("dynamics: drift_cutoff must be > 0");
    }
};

struct PoetsConfig {
    PoolSpec core_pool = core_pool_spec();
    PoolSpec sensitivity_pool = sensitivity_pool_spec();
    double near_factor = 0.5;  // near-miss floor share
    int clusters = 3;
    int split_century = -1;    // -1: midpoint of the pool's century span

    void validate() const {
        if (near_factor < 0 || near_factor > 1)
            throw ValidationError("poets: near_factor must lie in [0, 1]");
        if (clusters < 1) throw ValidationError("poets: clusters must be >= 1");
    }
};

struct PipelineConfig {
    PathsConfig paths;
    EvidenceConfig evidence;
    InductionParams induction;
    AtlasParams atlas;
    TemporalParams temporal;
    DynamicsConfig dynamics;
    PoetsConfig poets;
    std::uint64_t seed = 1;
    std::vector<std::string> stages = {"ingest",  "families", "atlas", "communities",
                                       "trends",  "dynamics", "poets", "report"};

    void validate() const {
        evidence.validate();
        induction.schedule.validate();
        atlas.validate();
        temporal.validate();
        dynamics.validate();
        poets.validate();
        if (stages.empty()) throw ValidationError("stages must not be empty");
        for (const std::string& s : stages)
            if (!is_stage_name(s)) throw ValidationError("unknown stage: " + s);
    }
};

// ---------------------------------------------------------------------------
// Strict JSON access

namespace detail {

inline void check_keys(const ordered_json& obj, const std::string& scope,
                       const std::set<std::string>& allowed) {
    if (!obj.is_object())
        throw ValidationError("config: " + scope + " must be a JSON object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ValidationError("config: unknown key \"" + key + "\" in " + scope);
}

inline double get_num(const ordered_json& obj, const char* key, const std::string& scope,
                      double fallback) {
    if (!obj.contains(key)) return fallback;
    const ordered_json& v = obj.at(key);
    if (!v.is_number())
        throw ValidationError("config: " + scope + "." + key + " must be a number");
    return v.get<double>();
}

inline int get_int(const ordered_json& obj, const char* key, const std::string& scope,
                   int fallback) {
    if (!obj.contains(key)) return fallback;
    const ordered_json& v = obj.at(key);
    if (!v.is_number_integer())
        throw ValidationError("config: " + scope + "." + key + " must be an integer");
    return v.get<int>();
}

inline std::string get_str(const ordered_json& obj, const char* key, const std::string& scope,
                           const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const ordered_json& v = obj.at(key);
    if (!v.is_string())
        throw ValidationError("config: " + scope + "." + key + " must be a string");
    return v.get<std::string>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Parse

inline PipelineConfig parse_config(const ordered_json& j) {
    using detail::check_keys;
    using detail::get_int;
    using detail::get_num;
    using detail::get_str;

    PipelineConfig cfg;
    check_keys(j, "config", {"paths", "evidence", "induction", "atlas", "temporal", "dynamics",
                             "poets", "seed", "stages"});

    if (j.contains("paths")) {
        const ordered_json& p = j.at("paths");
        check_keys(p, "paths", {"corpus", "poets", "lexicon_dir", "seeds"});
        cfg.paths.corpus = get_str(p, "corpus", "paths", cfg.paths.corpus);
        cfg.paths.poets = get_str(p, "poets", "paths", cfg.paths.poets);
        cfg.paths.lexicon_dir = get_str(p, "lexicon_dir", "paths", cfg.paths.lexicon_dir);
        cfg.paths.seeds = get_str(p, "seeds", "paths", cfg.paths.seeds);
    }

    if (j.contains("evidence")) {
        const ordered_json& e = j.at("evidence");
        check_keys(e, "evidence",
                   {"context_window", "min_count", "embedding_dim", "kmeans_k", "kmeans_iters"});
        cfg.evidence.context_window =
            get_int(e, "context_window", "evidence", cfg.evidence.context_window);
        cfg.evidence.min_count = get_int(e, "min_count", "evidence", cfg.evidence.min_count);
        cfg.evidence.embedding_dim =
            get_int(e, "embedding_dim", "evidence", cfg.evidence.embedding_dim);
        cfg.evidence.kmeans_k = get_int(e, "kmeans_k", "evidence", cfg.evidence.kmeans_k);
        cfg.evidence.kmeans_iters =
            get_int(e, "kmeans_iters", "evidence", cfg.evidence.kmeans_iters);
    }

    if (j.contains("induction")) {
        const ordered_json& ind = j.at("induction");
        check_keys(ind, "induction",
                   {"weights", "surface", "stages", "synthetic_threshold", "head_floor"});
        if (ind.contains("weights")) {
            const ordered_json& w = ind.at("weights");
            MergeWeights& mw = cfg.induction.weights;
            check_keys(w, "induction.weights",
                       {"surface_relation", "static_embedding", "occurrence_embedding",
                        "contextual_overlap", "cluster_overlap", "seed_overlap",
                        "exemplar_overlap", "head_cleanliness", "fragment_residue",
                        "function_word_contamination", "genericity_noise",
                        "proper_name_inflation"});
            const std::string s = "induction.weights";
            mw.surface_relation = get_num(w, "surface_relation", s, mw.surface_relation);
            mw.static_embedding = get_num(w, "static_embedding", s, mw.static_embedding);
            mw.occurrence_embedding =
                get_num(w, "occurrence_embedding", s, mw.occurrence_embedding);
            mw.contextual_overlap = get_num(w, "contextual_overlap", s, mw.contextual_overlap);
            mw.cluster_overlap = get_num(w, "cluster_overlap", s, mw.cluster_overlap);
            mw.seed_overlap = get_num(w, "seed_overlap", s, mw.seed_overlap);
            mw.exemplar_overlap = get_num(w, "exemplar_overlap", s, mw.exemplar_overlap);
            mw.head_cleanliness = get_num(w, "head_cleanliness", s, mw.head_cleanliness);
            mw.fragment_residue = get_num(w, "fragment_residue", s, mw.fragment_residue);
            mw.function_word_contamination =
                get_num(w, "function_word_contamination", s, mw.function_word_contamination);
            mw.genericity_noise = get_num(w, "genericity_noise", s, mw.genericity_noise);
            mw.proper_name_inflation =
                get_num(w, "proper_name_inflation", s, mw.proper_name_inflation);
        }
        if (ind.contains("surface")) {
            const ordered_json& sf = ind.at("surface");
            SurfaceScores& ss = cfg.induction.surface;
            check_keys(sf, "induction.surface",
                       {"clitic_removal", "suffix_strip", "prefix_strip", "near_head_extension",
                        "synthetic_head"});
            const std::string s = "induction.surface";
            ss.clitic_removal = get_num(sf, "clitic_removal", s, ss.clitic_removal);
            ss.suffix_strip = get_num(sf, "suffix_strip", s, ss.suffix_strip);
            ss.prefix_strip = get_num(sf, "prefix_strip", s, ss.prefix_strip);
            ss.near_head_extension = get_num(sf, "near_head_extension", s, ss.near_head_extension);
            ss.synthetic_head = get_num(sf, "synthetic_head", s, ss.synthetic_head);
        }
        if (ind.contains("stages")) {
            const ordered_json& st = ind.at("stages");
            if (!st.is_array() || st.empty())
                throw ValidationError("config: induction.stages must be a non-empty array");
            cfg.induction.schedule.stages.clear();
            for (const ordered_json& row : st) {
                check_keys(row, "induction.stages[]",
                           {"name", "threshold", "min_head_cleanliness", "min_coherence"});
                StageSchedule::Stage stage;
                const std::string s = "induction.stages[]";
                stage.name = get_str(row, "name", s, "");
                if (stage.name.empty())
                    throw ValidationError("config: induction stage rows need a name");
                stage.threshold = get_num(row, "threshold", s, 0.0);
                stage.min_head_cleanliness = get_num(row, "min_head_cleanliness", s, 0.0);
                stage.min_coherence = get_num(row, "min_coherence", s, 0.0);
                cfg.induction.schedule.stages.push_back(std::move(stage));
            }
        }
        cfg.induction.synthetic_threshold =
            get_num(ind, "synthetic_threshold", "induction", cfg.induction.synthetic_threshold);
        cfg.induction.head_floor = get_num(ind, "head_floor", "induction", cfg.induction.head_floor);
    }

    if (j.contains("atlas")) {
        const ordered_json& a = j.at("atlas");
        check_keys(a, "atlas",
                   {"channel_weights", "core", "referential", "bridge", "residency_cutoff",
                    "residency_genericity_discount", "genericity_alpha", "bridge_anchor_share",
                    "representative_top_m"});
        if (a.contains("channel_weights")) {
            const ordered_json& w = a.at("channel_weights");
            if (!w.is_array() || w.size() != kEdgeChannelCount)
                throw ValidationError("config: atlas.channel_weights must list " +
                                      std::to_string(kEdgeChannelCount) + " numbers");
            for (std::size_t i = 0; i < kEdgeChannelCount; ++i) {
                if (!w[i].is_number())
                    throw ValidationError("config: atlas.channel_weights entries must be numbers");
                cfg.atlas.weights[i] = w[i].get<double>();
            }
        }
        auto parse_layer = [&](const char* key, LayerParams& lp) {
            if (!a.contains(key)) return;
            const ordered_json& l = a.at(key);
            const std::string scope = std::string("atlas.") + key;
            check_keys(l, scope, {"threshold", "top_k", "gamma", "rho"});
            lp.threshold = get_num(l, "threshold", scope, lp.threshold);
            if (lp.threshold <= 0 || lp.threshold >= 1)
                throw ValidationError("config: " + scope + ".threshold must lie in (0, 1)");
            lp.top_k = get_int(l, "top_k", scope, lp.top_k);
            lp.gamma = get_num(l, "gamma", scope, lp.gamma);
            lp.rho = get_num(l, "rho", scope, lp.rho);
        };
        parse_layer("core", cfg.atlas.core);
        parse_layer("referential", cfg.atlas.referential);
        parse_layer("bridge", cfg.atlas.bridge);
        cfg.atlas.residency_cutoff =
            get_num(a, "residency_cutoff", "atlas", cfg.atlas.residency_cutoff);
        cfg.atlas.residency_genericity_discount = get_num(
            a, "residency_genericity_discount", "atlas", cfg.atlas.residency_genericity_discount);
        cfg.atlas.genericity_alpha =
            get_num(a, "genericity_alpha", "atlas", cfg.atlas.genericity_alpha);
        cfg.atlas.bridge_anchor_share =
            get_num(a, "bridge_anchor_share", "atlas", cfg.atlas.bridge_anchor_share);
        int top_m = get_int(a, "representative_top_m", "atlas",
                            static_cast<int>(cfg.atlas.representative_top_m));
        if (top_m < 1) throw ValidationError("config: atlas.representative_top_m must be >= 1");
        cfg.atlas.representative_top_m = static_cast<std::size_t>(top_m);
    }

    if (j.contains("temporal")) {
        const ordered_json& t = j.at("temporal");
        check_keys(t, "temporal",
                   {"sigma", "n_resamples", "rho_min", "sign_agreement_min", "peak_share_min",
                    "stable_rel_slope_max", "stable_entropy_factor", "stable_rel_drift_max"});
        double sigma = get_num(t, "sigma", "temporal", cfg.temporal.smoothing.sigma);
        cfg.temporal.smoothing = SmoothingConfig::from_sigma(sigma);
        cfg.temporal.n_resamples = get_int(t, "n_resamples", "temporal", cfg.temporal.n_resamples);
        cfg.temporal.rho_min = get_num(t, "rho_min", "temporal", cfg.temporal.rho_min);
        cfg.temporal.sign_agreement_min =
            get_num(t, "sign_agreement_min", "temporal", cfg.temporal.sign_agreement_min);
        cfg.temporal.peak_share_min =
            get_num(t, "peak_share_min", "temporal", cfg.temporal.peak_share_min);
        cfg.temporal.stable_rel_slope_max =
            get_num(t, "stable_rel_slope_max", "temporal", cfg.temporal.stable_rel_slope_max);
        cfg.temporal.stable_entropy_factor =
            get_num(t, "stable_entropy_factor", "temporal", cfg.temporal.stable_entropy_factor);
        cfg.temporal.stable_rel_drift_max =
            get_num(t, "stable_rel_drift_max", "temporal", cfg.temporal.stable_rel_drift_max);
    }

    if (j.contains("dynamics")) {
        const ordered_json& d = j.at("dynamics");
        check_keys(d, "dynamics", {"flat_epsilon", "n_permutations", "drift_cutoff"});
        cfg.dynamics.flat_epsilon =
            get_num(d, "flat_epsilon", "dynamics", cfg.dynamics.flat_epsilon);
        cfg.dynamics.n_permutations =
            get_int(d, "n_permutations", "dynamics", cfg.dynamics.n_permutations);
        cfg.dynamics.drift_cutoff =
            get_num(d, "drift_cutoff", "dynamics", cfg.dynamics.drift_cutoff);
    }

    if (j.contains("poets")) {
        const ordered_json& p = j.at("poets");
        check_keys(p, "poets",
                   {"core_pool", "sensitivity_pool", "near_factor", "clusters", "split_century"});
        auto parse_pool = [&](const char* key, PoolSpec& spec) {
            if (!p.contains(key)) return;
            const ordered_json& ps = p.at(key);
            const std::string scope = std::string("poets.") + key;
            check_keys(ps, scope, {"min_verses", "min_symbolic_occurrences"});
            spec.min_verses = get_num(ps, "min_verses", scope, spec.min_verses);
            spec.min_symbolic_occurrences =
                get_num(ps, "min_symbolic_occurrences", scope, spec.min_symbolic_occurrences);
        };
        parse_pool("core_pool", cfg.poets.core_pool);
        parse_pool("sensitivity_pool", cfg.poets.sensitivity_pool);
        cfg.poets.near_factor = get_num(p, "near_factor", "poets", cfg.poets.near_factor);
        cfg.poets.clusters = get_int(p, "clusters", "poets", cfg.poets.clusters);
        cfg.poets.split_century =
            get_int(p, "split_century", "poets", cfg.poets.split_century);
    }

    if (j.contains("seed")) {
        const ordered_json& s = j.at("seed");
        if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                       s.get<std::int64_t>() < 0))
            throw ValidationError("config: seed must be a non-negative integer");
        cfg.seed = s.get<std::uint64_t>();
    }

    if (j.contains("stages")) {
        const ordered_json& st = j.at("stages");
        if (!st.is_array()) throw ValidationError("config: stages must be an array");
        cfg.stages.clear();
        for (const ordered_json& s : st) {
            if (!s.is_string()) throw ValidationError("config: stages entries must be strings");
            cfg.stages.push_back(s.get<std::string>());
        }
    }

    cfg.validate();
    return cfg;
}

inline PipelineConfig parse_config_text(const std::string& text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("config is not valid JSON");
    return parse_config(j);
}

inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

// ---------------------------------------------------------------------------
// Serialize

inline ordered_json config_to_json(const PipelineConfig& cfg) {
    ordered_json j;
    j["paths"] = {{"corpus", cfg.paths.corpus},
                  {"poets", cfg.paths.poets},
                  {"lexicon_dir", cfg.paths.lexicon_dir},
                  {"seeds", cfg.paths.seeds}};
    j["evidence"] = {{"context_window", cfg.evidence.context_window},
                     {"min_count", cfg.evidence.min_count},
                     {"embedding_dim", cfg.evidence.embedding_dim},
                     {"kmeans_k", cfg.evidence.kmeans_k},
                     {"kmeans_iters", cfg.evidence.kmeans_iters}};

    const MergeWeights& mw = cfg.induction.weights;
    ordered_json weights = {{"surface_relation", mw.surface_relation},
                            {"static_embedding", mw.static_embedding},
                            {"occurrence_embedding", mw.occurrence_embedding},
                            {"contextual_overlap", mw.contextual_overlap},
                            {"cluster_overlap", mw.cluster_overlap},
                            {"seed_overlap", mw.seed_overlap},
                            {"exemplar_overlap", mw.exemplar_overlap},
                            {"head_cleanliness", mw.head_cleanliness},
                            {"fragment_residue", mw.fragment_residue},
                            {"function_word_contamination", mw.function_word_contamination},
                            {"genericity_noise", mw.genericity_noise},
                            {"proper_name_inflation", mw.proper_name_inflation}};
    const SurfaceScores& ss = cfg.induction.surface;
    ordered_json surface = {{"clitic_removal", ss.clitic_removal},
                            {"suffix_strip", ss.suffix_strip},
                            {"prefix_strip", ss.prefix_strip},
                            {"near_head_extension", ss.near_head_extension},
                            {"synthetic_head", ss.synthetic_head}};
    ordered_json stage_rows = ordered_json::array();
    for (const StageSchedule::Stage& s : cfg.induction.schedule.stages)
        stage_rows.push_back({{"name", s.name},
                              {"threshold", s.threshold},
                              {"min_head_cleanliness", s.min_head_cleanliness},
                              {"min_coherence", s.min_coherence}});
    j["induction"] = {{"weights", std::move(weights)},
                      {"surface", std::move(surface)},
                      {"stages", std::move(stage_rows)},
                      {"synthetic_threshold", cfg.induction.synthetic_threshold},
                      {"head_floor", cfg.induction.head_floor}};

    auto layer_json = [](const LayerParams& lp) {
        return ordered_json{{"threshold", lp.threshold},
                            {"top_k", lp.top_k},
                            {"gamma", lp.gamma},
                            {"rho", lp.rho}};
    };
    ordered_json channel_weights = ordered_json::array();
    for (double w : cfg.atlas.weights) channel_weights.push_back(w);
    j["atlas"] = {{"channel_weights", std::move(channel_weights)},
                  {"core", layer_json(cfg.atlas.core)},
                  {"referential", layer_json(cfg.atlas.referential)},
                  {"bridge", layer_json(cfg.atlas.bridge)},
                  {"residency_cutoff", cfg.atlas.residency_cutoff},
                  {"residency_genericity_discount", cfg.atlas.residency_genericity_discount},
                  {"genericity_alpha", cfg.atlas.genericity_alpha},
                  {"bridge_anchor_share", cfg.atlas.bridge_anchor_share},
                  {"representative_top_m", cfg.atlas.representative_top_m}};

    j["temporal"] = {{"sigma", cfg.temporal.smoothing.sigma},
                     {"n_resamples", cfg.temporal.n_resamples},
                     {"rho_min", cfg.temporal.rho_min},
                     {"sign_agreement_min", cfg.temporal.sign_agreement_min},
                     {"peak_share_min", cfg.temporal.peak_share_min},
                     {"stable_rel_slope_max", cfg.temporal.stable_rel_slope_max},
                     {"stable_entropy_factor", cfg.temporal.stable_entropy_factor},
                     {"stable_rel_drift_max", cfg.temporal.stable_rel_drift_max}};

    j["dynamics"] = {{"flat_epsilon", cfg.dynamics.flat_epsilon},
                     {"n_permutations", cfg.dynamics.n_permutations},
                     {"drift_cutoff", cfg.dynamics.drift_cutoff}};

    auto pool_json = [](const PoolSpec& p) {
        return ordered_json{{"min_verses", p.min_verses},
                            {"min_symbolic_occurrences", p.min_symbolic_occurrences}};
    };
    j["poets"] = {{"core_pool", pool_json(cfg.poets.core_pool)},
                  {"sensitivity_pool", pool_json(cfg.poets.sensitivity_pool)},
                  {"near_factor", cfg.poets.near_factor},
                  {"clusters", cfg.poets.clusters},
                  {"split_century", cfg.poets.split_century}};

    j["seed"] = cfg.seed;
    j["stages"] = cfg.stages;
    return j;
}

inline std::string serialize_config(const PipelineConfig& cfg) {
    return config_to_json(cfg).dump(2) + "\n";
}

// Canonical form of a config document: parse, fill defaults, re-emit in
// schema order. Idempotent, and the identity on already-normalized text.
inline std::string normalize_config_text(const std::string& text) {
    return serialize_config(parse_config_text(text));
}

inline bool config_equals(const PipelineConfig& a, const PipelineConfig& b) {
    return config_to_json(a) == config_to_json(b);
}

inline std::string config_hash(const PipelineConfig& cfg) {
    std::uint64_t h = fnv1a64(serialize_config(cfg));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace symatlas
