#pragma once
// Stage orchestration. Each stage reads its upstream artifacts from the run
// directory, recomputes what it needs, and writes its own outputs atomically
// (tmp file + rename), so a stage either completes or leaves nothing behind.
// Stages communicate only through files; any stage can run in a fresh
// process as long as its upstream outputs exist. All randomness flows from
// the single config seed through named substreams, so reruns are
// byte-identical.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "symatlas/communities.hpp"
#include "symatlas/config.hpp"
#include "symatlas/csv.hpp"
#include "symatlas/evidence.hpp"

namespace symatlas {

namespace fsys = std::filesystem;

// ---------------------------------------------------------------------------
// File helpers

inline bool file_exists(const fsys::path& p) {
    std::error_code ec;
    return fsys::is_regular_file(p, ec);
}

inline std::string read_file_text(const fsys::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + p.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline void write_file_atomic(const fsys::path& p, const std::string& content) {
    fsys::create_directories(p.parent_path());
    fsys::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write file: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw ValidationError("write failed: " + tmp.string());
    }
    fsys::rename(tmp, p);
}

inline std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string hash_file(const fsys::path& p) { return hex64(fnv1a64(read_file_text(p))); }

// Named seed derivation, mirroring substream() without constructing an engine.
inline std::uint64_t derive_seed(std::uint64_t master, const std::string& name) {
    return splitmix64(master ^ fnv1a64(name));
}

// ---------------------------------------------------------------------------
// Enum round-trips (artifact files store names, not numbers)

inline FieldLabel field_from_name(const std::string& name) {
    for (FieldLabel f : kAnchorFields)
        if (name == field_label_name(f)) return f;
    if (name == field_label_name(FieldLabel::MixedField)) return FieldLabel::MixedField;
    throw ValidationError("unknown field label: " + name);
}

inline Layer layer_from_name(const std::string& name) {
    for (Layer l : kLayers)
        if (name == layer_name(l)) return l;
    throw ValidationError("unknown layer: " + name);
}

inline Residency residency_from_name(const std::string& name) {
    if (name == residency_name(Residency::Core)) return Residency::Core;
    if (name == residency_name(Residency::Referential)) return Residency::Referential;
    throw ValidationError("unknown residency: " + name);
}

inline RelationKind relation_kind_from_name(const std::string& name) {
    for (RelationKind k :
         {RelationKind::None, RelationKind::CliticRemoval, RelationKind::SuffixStrip,
          RelationKind::PrefixStrip, RelationKind::NearHeadExtension, RelationKind::SyntheticHead})
        if (name == relation_kind_name(k)) return k;
    throw ValidationError("unknown relation kind: " + name);
}

// JSON has no NaN; missing values cross the artifact boundary as null.
inline ordered_json num_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

inline double num_from(const ordered_json& v) {
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

// ---------------------------------------------------------------------------
// Family artifact

inline ordered_json families_to_json(const FamilySet& fs) {
    ordered_json rows = ordered_json::array();
    for (const Family& f : fs.families) {
        ordered_json chain = ordered_json::array();
        for (const auto& [member, step] : f.chain)
            chain.push_back({{"member", member},
                             {"parent", step.parent},
                             {"kind", relation_kind_name(step.kind)},
                             {"residue", step.residue},
                             {"score", step.score},
                             {"stage", step.stage}});
        rows.push_back({{"family_id", f.family_id},
                        {"head", f.head},
                        {"synthetic", f.synthetic},
                        {"members", f.members},
                        {"chain", std::move(chain)}});
    }
    return ordered_json{{"families", std::move(rows)}};
}

inline FamilySet families_from_json(const ordered_json& j) {
    FamilySet fs;
    for (const ordered_json& row : j.at("families")) {
        Family f;
        f.family_id = row.at("family_id").get<std::string>();
        f.head = row.at("head").get<std::string>();
        f.synthetic = row.at("synthetic").get<bool>();
        for (const ordered_json& m : row.at("members")) f.members.push_back(m.get<std::string>());
        for (const ordered_json& c : row.at("chain")) {
            AcceptedMerge step;
            step.parent = c.at("parent").get<std::string>();
            step.kind = relation_kind_from_name(c.at("kind").get<std::string>());
            step.residue = c.at("residue").get<std::string>();
            step.score = c.at("score").get<double>();
            step.stage = c.at("stage").get<std::string>();
            f.chain[c.at("member").get<std::string>()] = std::move(step);
        }
        for (const std::string& m : f.members) fs.form_to_family[m] = f.family_id;
        fs.families.push_back(std::move(f));
    }
    return fs;
}

// ---------------------------------------------------------------------------
// Atlas artifact

inline ordered_json atlas_to_json(const AtlasGraph& graph) {
    ordered_json nodes = ordered_json::array();
    for (const AtlasNode& nd : graph.nodes)
        nodes.push_back({{"family_id", nd.family_id},
                         {"head", nd.head},
                         {"residency", residency_name(nd.residency)},
                         {"symbolic_strength", nd.symbolic_strength},
                         {"genericity", nd.genericity},
                         {"referential_pressure", nd.referential_pressure},
                         {"bridge_anchor", nd.bridge_anchor},
                         {"bridge_participant", nd.bridge_participant}});
    ordered_json edges = ordered_json::array();
    for (const EdgeScoreBreakdown& e : graph.edges) {
        ordered_json channels = ordered_json::array();
        for (double c : e.channels) channels.push_back(c);
        edges.push_back({{"family_a", e.family_a},
                         {"family_b", e.family_b},
                         {"layer", layer_name(e.layer)},
                         {"channels", std::move(channels)},
                         {"genericity_penalty", e.genericity_penalty},
                         {"referential_pressure", e.referential_pressure},
                         {"score", e.score}});
    }
    ordered_json summary = ordered_json::array();
    for (Layer l : kLayers) {
        const LayerSummary& s = graph.summary[layer_index(l)];
        summary.push_back({{"layer", layer_name(l)},
                           {"n_nodes", s.n_nodes},
                           {"n_edges", s.n_edges},
                           {"avg_degree", s.avg_degree},
                           {"density", s.density}});
    }
    return ordered_json{
        {"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"summary", std::move(summary)}};
}

inline AtlasGraph atlas_from_json(const ordered_json& j) {
    AtlasGraph graph;
    for (const ordered_json& row : j.at("nodes")) {
        AtlasNode nd;
        nd.family_id = row.at("family_id").get<std::string>();
        nd.head = row.at("head").get<std::string>();
        nd.residency = residency_from_name(row.at("residency").get<std::string>());
        nd.symbolic_strength = row.at("symbolic_strength").get<double>();
        nd.genericity = row.at("genericity").get<double>();
        nd.referential_pressure = row.at("referential_pressure").get<double>();
        nd.bridge_anchor = row.at("bridge_anchor").get<bool>();
        nd.bridge_participant = row.at("bridge_participant").get<bool>();
        graph.node_index[nd.family_id] = graph.nodes.size();
        graph.nodes.push_back(std::move(nd));
    }
    for (const ordered_json& row : j.at("edges")) {
        EdgeScoreBreakdown e;
        e.family_a = row.at("family_a").get<std::string>();
        e.family_b = row.at("family_b").get<std::string>();
        e.layer = layer_from_name(row.at("layer").get<std::string>());
        const ordered_json& channels = row.at("channels");
        if (channels.size() != kEdgeChannelCount)
            throw ValidationError("atlas artifact: bad channel count");
        for (std::size_t i = 0; i < kEdgeChannelCount; ++i) e.channels[i] = channels[i].get<double>();
        e.genericity_penalty = row.at("genericity_penalty").get<double>();
        e.referential_pressure = row.at("referential_pressure").get<double>();
        e.score = row.at("score").get<double>();
        graph.edges.push_back(std::move(e));
    }
    for (const ordered_json& row : j.at("summary")) {
        LayerSummary s;
        s.n_nodes = row.at("n_nodes").get<std::size_t>();
        s.n_edges = row.at("n_edges").get<std::size_t>();
        s.avg_degree = row.at("avg_degree").get<double>();
        s.density = row.at("density").get<double>();
        graph.summary[layer_index(layer_from_name(row.at("layer").get<std::string>()))] = s;
    }
    return graph;
}

// ---------------------------------------------------------------------------
// Community/field artifact

struct FieldsArtifact {
    CommunityPartition partition;                  // core-layer nodes
    std::map<int, FieldLabel> community_field;
    std::map<std::string, FieldLabel> node_field;  // core residents
    std::map<std::string, FieldLabel> family_field;  // plus bridge-domain referents
};

inline ordered_json fields_to_json(const FieldsArtifact& fa) {
    ordered_json j;
    j["q"] = fa.partition.q;
    ordered_json node_community = ordered_json::object();
    for (const auto& [node, c] : fa.partition.community) node_community[node] = c;
    j["node_community"] = std::move(node_community);
    ordered_json community_field = ordered_json::object();
    for (const auto& [c, f] : fa.community_field)
        community_field[std::to_string(c)] = field_label_name(f);
    j["community_field"] = std::move(community_field);
    ordered_json node_field = ordered_json::object();
    for (const auto& [node, f] : fa.node_field) node_field[node] = field_label_name(f);
    j["node_field"] = std::move(node_field);
    ordered_json family_field = ordered_json::object();
    for (const auto& [id, f] : fa.family_field) family_field[id] = field_label_name(f);
    j["family_field"] = std::move(family_field);
    return j;
}

inline FieldsArtifact fields_from_json(const ordered_json& j) {
    FieldsArtifact fa;
    fa.partition.q = j.at("q").get<double>();
    for (const auto& [node, c] : j.at("node_community").items())
        fa.partition.community[node] = c.get<int>();
    for (const auto& [c, f] : j.at("community_field").items())
        fa.community_field[std::stoi(c)] = field_from_name(f.get<std::string>());
    for (const auto& [node, f] : j.at("node_field").items())
        fa.node_field[node] = field_from_name(f.get<std::string>());
    for (const auto& [id, f] : j.at("family_field").items())
        fa.family_field[id] = field_from_name(f.get<std::string>());
    return fa;
}

// ---------------------------------------------------------------------------
// Input bundles rebuilt by stages

struct LexiconBundle {
    AffixTables affixes;
    std::set<std::string> seeds;
    std::set<std::string> exemplars;
    std::set<std::string> function_words;
    std::set<std::string> proper_names;
    std::set<std::string> referential;
    AnchorLexicons anchors;
};

inline LexiconBundle load_lexicons(const PathsConfig& paths) {
    LexiconBundle lex;
    const std::string dir = paths.lexicon_dir;
    lex.affixes = load_affix_tables(dir + "/clitics.txt", dir + "/suffixes.txt",
                                    dir + "/prefixes.txt");
    lex.seeds = load_lexicon_set(paths.seeds);
    lex.exemplars = load_lexicon_set(dir + "/exemplars.txt");
    lex.function_words = load_lexicon_set(dir + "/function_words.txt");
    lex.proper_names = load_lexicon_set(dir + "/proper_names.txt");
    lex.referential = load_lexicon_set(dir + "/referential.txt");
    lex.anchors = load_anchor_lexicons(dir);
    return lex;
}

// Owns every object the evidence context points into; heap-allocated so the
// internal pointers survive moves of the handle.
struct EvidenceBundle {
    TokenizedCorpus tc;
    ContextProfiles profiles;
    EmbeddingSpace space;
    Clustering clustering;
    EvidenceContext ctx;
};

inline std::unique_ptr<EvidenceBundle> build_evidence(const CorpusStore& store,
                                                      const LexiconBundle& lex,
                                                      const PipelineConfig& cfg) {
    auto b = std::make_unique<EvidenceBundle>();
    b->tc = tokenize_corpus(store);
    b->profiles = build_context_profiles(store, b->tc, cfg.evidence.context_window,
                                         cfg.evidence.min_count);
    b->space = build_embeddings(b->profiles, b->tc, cfg.evidence.context_window,
                                cfg.evidence.embedding_dim);
    b->clustering = kmeans_embed(b->space, cfg.evidence.kmeans_k, cfg.evidence.kmeans_iters,
                                 derive_seed(cfg.seed, "kmeans"));
    b->ctx = make_evidence_context(b->profiles, b->space, b->clustering, lex.affixes, lex.seeds,
                                   lex.exemplars, lex.function_words, lex.proper_names);
    return b;
}

// ---------------------------------------------------------------------------
// Stage registry

struct StageInfo {
    const char* name;
    std::vector<const char*> deps;     // direct upstream stages
    std::vector<const char*> outputs;  // paths relative to the run directory
};

inline const std::vector<StageInfo>& stage_registry() {
    static const std::vector<StageInfo> stages = {
        {"ingest", {}, {"ingest/store.json"}},
        {"families", {"ingest"}, {"families/families.json", "families/trace.csv"}},
        {"atlas", {"ingest", "families"}, {"atlas/atlas.json", "atlas/edges.csv"}},
        {"communities", {"atlas"}, {"communities/fields.json", "communities/communities.csv"}},
        {"trends", {"ingest", "families"}, {"trends/trends.json", "trends/trajectories.csv"}},
        {"dynamics",
         {"ingest", "families", "atlas", "communities"},
         {"dynamics/dynamics.json", "dynamics/metrics.csv", "dynamics/stability.json",
          "dynamics/snapshots_loose.csv", "dynamics/snapshots_base.csv",
          "dynamics/snapshots_strict.csv", "dynamics/snapshots_poet_balanced.csv",
          "dynamics/snapshots_high_confidence.csv"}},
        {"poets",
         {"ingest", "families", "communities"},
         {"poets/poets.json", "poets/poet_profiles.csv", "poets/poet_neighbors.csv",
          "poets/projection.csv"}},
        {"report",
         {"ingest", "families", "atlas", "communities", "trends", "dynamics", "poets"},
         {"report/tables/table1_corpus_summary.csv", "report/tables/table2_family_validation.csv",
          "report/tables/table3_layer_summary.csv", "report/tables/table4_trajectories.csv",
          "report/tables/table5_rewiring.csv", "report/tables/tableA1_scoring_summary.csv",
          "report/tables/tableA2_poet_profiles.csv", "report/tables/tableA3_poet_neighbors.csv",
          "report/tables/tableA4_field_stability.csv", "report/plots/trajectory_series.csv",
          "report/plots/structural_metrics.csv", "report/plots/hub_drift.csv",
          "report/plots/bridge_series.csv", "report/plots/poet_heatmap.csv",
          "report/plots/projection.csv", "report/plots/core_snapshots.csv"}},
    };
    return stages;
}

inline const StageInfo& stage_info(const std::string& name) {
    for (const StageInfo& s : stage_registry())
        if (name == s.name) return s;
    throw ValidationError("unknown stage: " + name);
}

// ---------------------------------------------------------------------------
// Run manifest. Derived entirely from the config and the files on disk, so
// it is identical however the completed stages were partitioned into runs,
// and byte-identical across reruns of the same config and inputs.

struct RunManifest {
    std::string version = kPipelineVersion;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> input_hashes;  // input path -> content hash
    std::vector<std::string> stages;                  // completed, registry order
    std::vector<std::string> outputs;                 // existing files, registry order
};

inline RunManifest collect_manifest(const PipelineConfig& cfg, const fsys::path& out_dir) {
    RunManifest m;
    m.config_hash = config_hash(cfg);
    m.seed = cfg.seed;
    for (const std::string& p : {cfg.paths.corpus, cfg.paths.poets, cfg.paths.seeds})
        if (file_exists(p)) m.input_hashes[p] = hash_file(p);
    std::error_code ec;
    std::vector<std::string> lex_files;
    for (const auto& entry : fsys::directory_iterator(cfg.paths.lexicon_dir, ec))
        if (entry.is_regular_file()) lex_files.push_back(entry.path().filename().string());
    std::sort(lex_files.begin(), lex_files.end());
    for (const std::string& f : lex_files) {
        fsys::path p = fsys::path(cfg.paths.lexicon_dir) / f;
        m.input_hashes[p.string()] = hash_file(p);
    }
    for (const StageInfo& s : stage_registry()) {
        bool complete = true;
        for (const char* rel : s.outputs) {
            if (file_exists(out_dir / rel))
                m.outputs.push_back(rel);
            else
                complete = false;
        }
        if (complete) m.stages.push_back(s.name);
    }
    return m;
}

inline ordered_json manifest_to_json(const RunManifest& m) {
    ordered_json j;
    j["version"] = m.version;
    j["config_hash"] = m.config_hash;
    j["seed"] = m.seed;
    ordered_json inputs = ordered_json::object();
    for (const auto& [path, hash] : m.input_hashes) inputs[path] = hash;
    j["inputs"] = std::move(inputs);
    j["stages"] = m.stages;
    j["outputs"] = m.outputs;
    j["manifest_hash"] = hex64(fnv1a64(j.dump()));
    return j;
}

// ---------------------------------------------------------------------------
// Pipeline

class Pipeline {
  public:
    Pipeline(PipelineConfig cfg, fsys::path out_dir)
        : cfg_(std::move(cfg)), out_(std::move(out_dir)) {
        cfg_.validate();
    }

    const PipelineConfig& config() const { return cfg_; }
    fsys::path path_of(const std::string& rel) const { return out_ / rel; }

    // Runs one stage after checking its upstream outputs, refreshes the
    // manifest, and returns the elapsed wall time in milliseconds (reported
    // by the caller, never stored in any artifact).
    double run_stage(const std::string& name) {
        const StageInfo& info = stage_info(name);
        for (const char* dep : info.deps) {
            const StageInfo& d = stage_info(dep);
            const fsys::path marker = out_ / d.outputs.front();
            if (!file_exists(marker))
                throw ValidationError(name + std::string(" requires ") + dep + ": missing " +
                                      marker.string());
        }
        auto t0 = std::chrono::steady_clock::now();
        if (name == "ingest") run_ingest();
        else if (name == "families") run_families();
        else if (name == "atlas") run_atlas();
        else if (name == "communities") run_communities();
        else if (name == "trends") run_trends();
        else if (name == "dynamics") run_dynamics();
        else if (name == "poets") run_poets();
        else run_report();
        write_manifest();
        auto t1 = std::chrono::steady_clock::now();
        return std::chrono::duration<double, std::milli>(t1 - t0).count();
    }

    void write_manifest() {
        write_file_atomic(out_ / "manifest.json",
                          manifest_to_json(collect_manifest(cfg_, out_)).dump(1) + "\n");
    }

  private:
    PipelineConfig cfg_;
    fsys::path out_;

    void write_json(const std::string& rel, const ordered_json& j) {
        write_file_atomic(out_ / rel, j.dump(1) + "\n");
    }

    ordered_json read_json(const std::string& rel) const {
        return ordered_json::parse(read_file_text(out_ / rel));
    }

    CorpusStore load_store_artifact() const { return load_store((out_ / "ingest/store.json").string()); }
    FamilySet load_families_artifact() const { return families_from_json(read_json("families/families.json")); }
    AtlasGraph load_atlas_artifact() const { return atlas_from_json(read_json("atlas/atlas.json")); }
    FieldsArtifact load_fields_artifact() const { return fields_from_json(read_json("communities/fields.json")); }

    // ---- ingest ----------------------------------------------------------
    void run_ingest() {
        CorpusStore store = parse_corpus(cfg_.paths.corpus);
        load_poet_centuries(cfg_.paths.poets, store);
        bin_centuries(store);
        write_file_atomic(out_ / "ingest/store.json", store_to_json(store).dump(1) + "\n");
    }

    // ---- families --------------------------------------------------------
    void run_families() {
        CorpusStore store = load_store_artifact();
        LexiconBundle lex = load_lexicons(cfg_.paths);
        auto ev = build_evidence(store, lex, cfg_);
        FamilySet fs = induce_families(ev->ctx, cfg_.induction);

        TraceReport diag = validate_traceability(fs, ev->ctx.attested, lex.seeds);
        ordered_json j = families_to_json(fs);
        j["diagnostics"] = {{"total", diag.total},
                            {"n_raw_forms", diag.n_raw_forms},
                            {"n_families", diag.n_families},
                            {"reduction", diag.reduction},
                            {"median_family_size", diag.median_family_size},
                            {"singleton_share", diag.singleton_share},
                            {"seeds_present", diag.seeds_present},
                            {"seeds_recovered", diag.seeds_recovered},
                            {"affix_absorption_share", diag.affix_absorption_share}};
        write_json("families/families.json", j);

        TraceTable trace = build_trace(fs);
        fsys::path csv = out_ / "families/trace.csv";
        fsys::create_directories(csv.parent_path());
        fsys::path tmp = csv;
        tmp += ".tmp";
        write_trace_csv(trace, tmp.string());
        fsys::rename(tmp, csv);
    }

    // ---- atlas -----------------------------------------------------------
    void run_atlas() {
        CorpusStore store = load_store_artifact();
        FamilySet fs = load_families_artifact();
        LexiconBundle lex = load_lexicons(cfg_.paths);
        auto ev = build_evidence(store, lex, cfg_);
        std::set<std::string> referential_marks = lex.referential;
        referential_marks.insert(lex.proper_names.begin(), lex.proper_names.end());
        AtlasContext actx = make_atlas_context(ev->tc, ev->ctx, fs, referential_marks,
                                               cfg_.evidence.context_window);
        AtlasGraph graph = build_atlas(actx, cfg_.atlas);

        // proper-name forms absorbed into core-resident families
        std::size_t leakage = 0;
        for (const AtlasNode& nd : graph.nodes) {
            if (nd.residency != Residency::Core) continue;
            for (const std::string& m : fs.by_id(nd.family_id).members)
                if (lex.proper_names.count(m)) ++leakage;
        }
        ordered_json j = atlas_to_json(graph);
        j["diagnostics"] = {{"core_proper_name_members", leakage}};
        write_json("atlas/atlas.json", j);

        std::ostringstream edges;
        write_edges_csv(graph, edges);
        write_file_atomic(out_ / "atlas/edges.csv", edges.str());
    }

    // ---- communities -----------------------------------------------------
    void run_communities() {
        AtlasGraph graph = load_atlas_artifact();
        LexiconBundle lex = load_lexicons(cfg_.paths);

        WeightedGraph core = core_graph(graph);
        CommunityPartition part = greedy_modularity(core);
        std::map<std::string, std::string> node_head;
        for (const AtlasNode& nd : graph.nodes) node_head[nd.family_id] = nd.head;
        std::map<int, FieldLabel> labels = label_fields(part, node_head, lex.anchors, lex.seeds);

        FieldsArtifact fa;
        fa.partition = part;
        fa.community_field = labels;
        for (const auto& [node, c] : part.community) {
            FieldLabel f = labels.count(c) ? labels.at(c) : FieldLabel::MixedField;
            fa.node_field[node] = f;
            fa.family_field[node] = f;
        }
        // referential residents serving one of the two bridge domains keep a
        // field of their own even though they sit outside the core partition
        const auto& courtly = lex.anchors.at(FieldLabel::CourtlyBridge);
        const auto& sacred = lex.anchors.at(FieldLabel::SacredPropheticBridge);
        for (const AtlasNode& nd : graph.nodes) {
            if (nd.residency != Residency::Referential) continue;
            if (courtly.count(nd.head)) fa.family_field[nd.family_id] = FieldLabel::CourtlyBridge;
            else if (sacred.count(nd.head))
                fa.family_field[nd.family_id] = FieldLabel::SacredPropheticBridge;
        }
        write_json("communities/fields.json", fields_to_json(fa));

        std::ostringstream csv;
        write_communities_csv(core, part, labels, node_head, csv);
        write_file_atomic(out_ / "communities/communities.csv", csv.str());
    }

    // ---- trends ----------------------------------------------------------
    void run_trends() {
        CorpusStore store = load_store_artifact();
        FamilySet fs = load_families_artifact();
        TokenizedCorpus tc = tokenize_corpus(store);
        TemporalTable table = build_temporal_table(store, tc, fs);

        ordered_json results = ordered_json::array();
        std::vector<TrajectorySeries> series;
        for (const Family& f : fs.families) {
            TrendResult r = analyze_trend(f.family_id, table, cfg_.temporal, cfg_.seed);
            results.push_back({{"family_id", r.family_id},
                               {"head", f.head},
                               {"classification", trajectory_name(r.classification)},
                               {"peak_bin", r.peak_bin},
                               {"peak_mode_share", r.peak_mode_share},
                               {"slope", r.tests.slope},
                               {"spearman_rho", r.tests.spearman_rho},
                               {"chi_square", r.tests.chi_square},
                               {"chi_square_p", r.tests.chi_square_p},
                               {"slope_ci_low", r.slope_ci_low},
                               {"slope_ci_high", r.slope_ci_high}});
            series.push_back(build_trajectory(f.family_id, table, cfg_.temporal.smoothing));
        }
        write_json("trends/trends.json", ordered_json{{"results", std::move(results)}});

        std::ostringstream csv;
        write_trajectories_csv(series, csv);
        write_file_atomic(out_ / "trends/trajectories.csv", csv.str());
    }

    // ---- dynamics --------------------------------------------------------
    void run_dynamics() {
        CorpusStore store = load_store_artifact();
        FamilySet fs = load_families_artifact();
        AtlasGraph backbone = load_atlas_artifact();
        FieldsArtifact fields = load_fields_artifact();
        LexiconBundle lex = load_lexicons(cfg_.paths);
        TokenizedCorpus tc = tokenize_corpus(store);

        DynamicsTable table = build_dynamics_table(store, tc, fs, backbone);
        const auto& courtly = lex.anchors.at(FieldLabel::CourtlyBridge);
        const auto& sacred = lex.anchors.at(FieldLabel::SacredPropheticBridge);

        SweepSummary sweep = robustness_sweep(table, backbone, cfg_.atlas, courtly, sacred,
                                              cfg_.dynamics.flat_epsilon);
        std::ostringstream metrics;
        write_variant_metrics_csv(sweep.variants, metrics);
        write_file_atomic(out_ / "dynamics/metrics.csv", metrics.str());

        SnapshotSet base_set;
        for (const VariantSpec& spec : standard_variants()) {
            SnapshotSet set = build_snapshots(table, backbone, cfg_.atlas, spec);
            std::ostringstream csv;
            write_snapshot_edges_csv(set, csv);
            write_file_atomic(out_ / ("dynamics/snapshots_" + std::string(variant_label(spec.name)) +
                                      ".csv"),
                              csv.str());
            if (spec.name == VariantName::Base) base_set = std::move(set);
        }

        ordered_json j;
        ordered_json variants = ordered_json::array();
        for (const VariantMetrics& m : sweep.variants)
            variants.push_back(
                {{"variant", variant_label(m.variant)},
                 {"delta",
                  {{"core_modularity", num_or_null(m.delta_modularity)},
                   {"cross_link_ratio", num_or_null(m.delta_cross_link)},
                   {"degree_centralization", num_or_null(m.delta_centralization)},
                   {"courtly_bridge_strength", num_or_null(m.delta_courtly)},
                   {"sacred_bridge_strength", num_or_null(m.delta_sacred)}}}});
        j["variants"] = std::move(variants);

        ordered_json support = ordered_json::object();
        for (const auto& [metric, s] : sweep.support)
            support[metric] = {{"positive", s.positive},
                               {"negative", s.negative},
                               {"flat", s.flat},
                               {"agree_with_base", s.agree_with_base}};
        j["support"] = std::move(support);

        const VariantMetrics& base = sweep.variants[1];
        auto perm = [&](const char* metric, const std::vector<double>& series) {
            PermutationTails t =
                permutation_null(series, cfg_.dynamics.n_permutations, cfg_.seed, metric);
            return ordered_json{{"n_perms", t.n_perms},
                                {"observed", num_or_null(t.observed)},
                                {"upper", t.upper},
                                {"lower", t.lower}};
        };
        j["permutation"] = {
            {"core_modularity", perm("core_modularity", base.core_modularity)},
            {"cross_link_ratio", perm("cross_link_ratio", base.cross_link)},
            {"degree_centralization", perm("degree_centralization", base.centralization)},
            {"courtly_bridge_strength", perm("courtly_bridge_strength", base.courtly_bridge)},
            {"sacred_bridge_strength", perm("sacred_bridge_strength", base.sacred_bridge)}};

        ordered_json drift_rows = ordered_json::array();
        for (const HubDrift& h : hub_drift(base_set, backbone, cfg_.dynamics.drift_cutoff)) {
            ordered_json ranks = ordered_json::array();
            for (double r : h.rank) ranks.push_back(num_or_null(r));
            drift_rows.push_back({{"family_id", h.family_id},
                                  {"rank", std::move(ranks)},
                                  {"drift", h.defined ? ordered_json(h.drift) : ordered_json(nullptr)},
                                  {"defined", h.defined},
                                  {"classification", hub_class_name(h.classification)}});
        }
        j["hub_drift"] = std::move(drift_rows);

        auto bridge_block = [&](const std::set<std::string>& heads,
                                const std::vector<double>& strength) {
            ordered_json dispersion = ordered_json::array();
            for (const SnapshotGraph& snap : base_set.snapshots)
                dispersion.push_back(target_dispersion(snap, backbone, heads, fields.node_field));
            ordered_json s = ordered_json::array();
            for (double v : strength) s.push_back(num_or_null(v));
            return ordered_json{{"strength", std::move(s)}, {"dispersion", std::move(dispersion)}};
        };
        j["bridge"] = {{"courtly", bridge_block(courtly, base.courtly_bridge)},
                       {"sacred", bridge_block(sacred, base.sacred_bridge)}};
        write_json("dynamics/dynamics.json", j);

        // per-bin field persistence across the base variant's snapshots
        std::vector<CommunityPartition> snapshots;
        for (const SnapshotGraph& snap : base_set.snapshots)
            snapshots.push_back(greedy_modularity(snapshot_core_graph(snap, backbone)));
        StabilityDiagnostics stability = stability_diagnostics(fields.node_field, snapshots);
        ordered_json rows = ordered_json::array();
        for (const auto& [field, st] : stability) {
            ordered_json merge = ordered_json::object();
            for (const auto& [other, v] : st.merge_pressure) merge[field_label_name(other)] = v;
            rows.push_back({{"field", field_label_name(field)},
                            {"mean_active_member_ratio", st.mean_active_member_ratio},
                            {"split_pressure", st.split_pressure},
                            {"merge_pressure", std::move(merge)}});
        }
        write_json("dynamics/stability.json", ordered_json{{"fields", std::move(rows)}});
    }

    // ---- poets -----------------------------------------------------------
    void run_poets() {
        CorpusStore store = load_store_artifact();
        FamilySet fs = load_families_artifact();
        FieldsArtifact fields = load_fields_artifact();
        TokenizedCorpus tc = tokenize_corpus(store);

        std::vector<PoetProfile> profiles = field_rates(store, tc, fs, fields.family_field);
        PoolResult core = select_pool(profiles, cfg_.poets.core_pool, cfg_.poets.near_factor);
        PoolResult sens = select_pool(profiles, cfg_.poets.sensitivity_pool, cfg_.poets.near_factor);
        if (core.included.empty())
            throw ValidationError("poets: no poet meets the core pool floors");

        StandardizedProfiles sp = standardize(core.included);
        std::size_t k = std::min<std::size_t>(cfg_.poets.clusters, sp.poet_ids.size());
        ClusterResult clusters = ward_cluster(sp, k);
        std::vector<NeighborRow> neighbors = nearest_neighbors(sp);
        Projection proj = pca_project(sp);
        int split = cfg_.poets.split_century >= 0 ? cfg_.poets.split_century
                                                  : default_split_century(core.included);

        ordered_json j;
        auto ids_of = [](const std::vector<PoetProfile>& v) {
            ordered_json a = ordered_json::array();
            for (const PoetProfile& p : v) a.push_back(p.poet_id);
            return a;
        };
        j["core_pool"] = {{"included", ids_of(core.included)},
                          {"near_misses", ids_of(core.near_misses)}};
        j["sensitivity_pool"] = {{"included_count", sens.included.size()},
                                 {"near_miss_count", sens.near_misses.size()}};
        j["split_century"] = split;
        ordered_json assignment = ordered_json::object();
        for (const auto& [poet, c] : clusters.assignment) assignment[poet] = c;
        j["clusters"] = {{"k", clusters.k}, {"labels", clusters.labels},
                         {"assignment", std::move(assignment)}};
        j["variance_fraction"] = {proj.variance_fraction[0], proj.variance_fraction[1]};

        ordered_json zrows = ordered_json::array();
        for (const auto& row : sp.z) {
            ordered_json zr = ordered_json::array();
            for (double v : row) zr.push_back(v);
            zrows.push_back(std::move(zr));
        }
        ordered_json field_codes = ordered_json::array();
        for (const char* code : kProfileFieldCodes) field_codes.push_back(code);
        j["standardized"] = {{"poets", sp.poet_ids}, {"fields", std::move(field_codes)},
                             {"z", std::move(zrows)}};

        ordered_json cmps = ordered_json::array();
        for (FieldLabel f : kProfileFields) {
            LateEarlyComparison cmp = late_vs_early(core.included, split, f);
            cmps.push_back({{"field", field_label_name(f)},
                            {"n_late", cmp.n_late},
                            {"n_early", cmp.n_early},
                            {"late_median", num_or_null(cmp.late_median)},
                            {"early_median", num_or_null(cmp.early_median)},
                            {"late_above_early_median", cmp.late_above_early_median},
                            {"removed_poet_id", cmp.removed_poet_id},
                            {"late_above_after_removal", cmp.late_above_after_removal},
                            {"late_median_after_removal", num_or_null(cmp.late_median_after_removal)}});
        }
        j["late_vs_early"] = std::move(cmps);
        write_json("poets/poets.json", j);

        std::ostringstream prof_csv, neigh_csv, proj_csv;
        write_poet_profiles_csv(core.included, prof_csv);
        write_poet_neighbors_csv(neighbors, clusters, neigh_csv);
        write_projection_csv(proj, clusters, proj_csv);
        write_file_atomic(out_ / "poets/poet_profiles.csv", prof_csv.str());
        write_file_atomic(out_ / "poets/poet_neighbors.csv", neigh_csv.str());
        write_file_atomic(out_ / "poets/projection.csv", proj_csv.str());
    }

    // ---- report ----------------------------------------------------------
    static std::string signed_fixed(double v, int places) {
        std::string s = format_fixed(v, places);
        if (v >= 0 && !s.empty() && s[0] != '+') s = "+" + s;
        return s;
    }

    void run_report() {
        CorpusStore store = load_store_artifact();
        ordered_json families = read_json("families/families.json");
        ordered_json atlas = read_json("atlas/atlas.json");
        FieldsArtifact fields = load_fields_artifact();
        ordered_json trends = read_json("trends/trends.json");
        ordered_json dynamics = read_json("dynamics/dynamics.json");
        ordered_json stability = read_json("dynamics/stability.json");
        ordered_json poets = read_json("poets/poets.json");

        emit_table1(store, families, atlas);
        emit_table2(families, atlas);
        emit_table3(atlas);
        emit_table4(store, trends);
        emit_table5(dynamics);
        emit_tableA1();
        copy_file("poets/poet_profiles.csv", "report/tables/tableA2_poet_profiles.csv");
        copy_file("poets/poet_neighbors.csv", "report/tables/tableA3_poet_neighbors.csv");
        emit_tableA4(stability, atlas);

        copy_file("trends/trajectories.csv", "report/plots/trajectory_series.csv");
        copy_file("dynamics/metrics.csv", "report/plots/structural_metrics.csv");
        emit_hub_drift_plot(dynamics);
        emit_bridge_plot(dynamics);
        emit_poet_heatmap(poets);
        copy_file("poets/projection.csv", "report/plots/projection.csv");
        copy_file("dynamics/snapshots_base.csv", "report/plots/core_snapshots.csv");
    }

    void copy_file(const std::string& from, const std::string& to) {
        write_file_atomic(out_ / to, read_file_text(out_ / from));
    }

    void write_csv(const std::string& rel, const std::vector<std::vector<std::string>>& rows) {
        std::ostringstream os;
        CsvWriter w(os);
        for (const auto& row : rows) w.row(row);
        write_file_atomic(out_ / rel, os.str());
    }

    // corpus volume and consolidation funnel, one measure per row
    void emit_table1(const CorpusStore& store, const ordered_json& families,
                     const ordered_json& atlas) {
        CorpusStats stats = corpus_stats(store);
        const ordered_json& diag = families.at("diagnostics");
        std::size_t admitted = atlas.at("nodes").size();
        std::set<std::string> retained;
        for (const ordered_json& e : atlas.at("edges")) {
            retained.insert(e.at("family_a").get<std::string>());
            retained.insert(e.at("family_b").get<std::string>());
        }
        std::vector<std::vector<std::string>> rows = {
            {"measure", "value"},
            {"poems", std::to_string(stats.n_poems)},
            {"verses", std::to_string(stats.n_verses)},
            {"hemistichs", std::to_string(stats.n_hemistichs)},
            {"poets", std::to_string(stats.n_poets)},
            {"century_bins", std::to_string(stats.n_bins)},
            {"raw_forms_consolidated", std::to_string(diag.at("n_raw_forms").get<std::size_t>())},
            {"canonical_families", std::to_string(diag.at("n_families").get<std::size_t>())},
            {"families_admitted", std::to_string(admitted)},
            {"families_retained", std::to_string(retained.size())},
        };
        write_csv("report/tables/table1_corpus_summary.csv", rows);
    }

    // family-induction health checks: one diagnostic per row
    void emit_table2(const ordered_json& families, const ordered_json& atlas) {
        const ordered_json& d = families.at("diagnostics");
        auto pct = [](double v) { return format_fixed(100.0 * v, 1) + "%"; };
        std::size_t forms = d.at("n_raw_forms").get<std::size_t>();
        std::size_t fams = d.at("n_families").get<std::size_t>();
        std::size_t leak = atlas.at("diagnostics").at("core_proper_name_members").get<std::size_t>();
        std::vector<std::vector<std::string>> rows = {
            {"diagnostic", "value", "summary"},
            {"consolidation", std::to_string(forms) + " -> " + std::to_string(fams),
             pct(d.at("reduction").get<double>()) + " reduction"},
            {"family_size", format_fixed(d.at("median_family_size").get<double>(), 1) + " median",
             pct(d.at("singleton_share").get<double>()) + " singletons"},
            {"affix_absorption", pct(d.at("affix_absorption_share").get<double>()),
             "share of merges via affix rules"},
            {"seed_recovery",
             std::to_string(d.at("seeds_recovered").get<std::size_t>()) + "/" +
                 std::to_string(d.at("seeds_present").get<std::size_t>()),
             "seed lemmas surviving as family heads"},
            {"referential_leakage", std::to_string(leak),
             "proper-name forms inside core families"},
        };
        write_csv("report/tables/table2_family_validation.csv", rows);
    }

    void emit_table3(const ordered_json& atlas) {
        static const std::map<std::string, std::string> roles = {
            {"core", "dense thematic clusters"},
            {"referential", "sparse referential periphery"},
            {"bridge", "cross-domain connectors"}};
        std::vector<std::vector<std::string>> rows = {
            {"layer", "nodes", "edges", "avg_degree", "density", "role"}};
        for (const ordered_json& s : atlas.at("summary")) {
            std::string layer = s.at("layer").get<std::string>();
            rows.push_back({layer, std::to_string(s.at("n_nodes").get<std::size_t>()),
                            std::to_string(s.at("n_edges").get<std::size_t>()),
                            format_fixed(s.at("avg_degree").get<double>(), 2),
                            format_fixed(s.at("density").get<double>(), 3), roles.at(layer)});
        }
        write_csv("report/tables/table3_layer_summary.csv", rows);
    }

    void emit_table4(const CorpusStore& store, const ordered_json& trends) {
        std::map<std::string, std::string> family_field;
        for (const auto& [id, f] : fields_cache_or_load().family_field)
            family_field[id] = field_label_name(f);
        std::vector<std::vector<std::string>> rows = {
            {"family", "trajectory", "peak", "peak_mode_share", "field", "pattern"}};
        for (const ordered_json& r : trends.at("results")) {
            std::string id = r.at("family_id").get<std::string>();
            std::string cls = r.at("classification").get<std::string>();
            int peak = r.at("peak_bin").get<int>();
            std::string peak_label =
                peak >= 0 && peak < static_cast<int>(store.bins.size()) ? store.bins[peak].label
                                                                        : "";
            std::string pattern;
            if (cls == "robust_rising") pattern = "rate rises across bins toward " + peak_label;
            else if (cls == "robust_declining")
                pattern = "rate falls across bins after " + peak_label;
            else if (cls == "stable") pattern = "level presence across the span";
            else pattern = "no robust direction";
            auto it = family_field.find(id);
            rows.push_back({r.at("head").get<std::string>(), cls, peak_label,
                            format_fixed(r.at("peak_mode_share").get<double>(), 2),
                            it == family_field.end() ? "unassigned" : it->second, pattern});
        }
        write_csv("report/tables/table4_trajectories.csv", rows);
    }

    void emit_table5(const ordered_json& dynamics) {
        static const std::vector<std::pair<std::string, std::string>> metric_text = {
            {"core_modularity", "core community separation"},
            {"cross_link_ratio", "cross-community linking"},
            {"degree_centralization", "hub concentration"},
            {"courtly_bridge_strength", "courtly bridge share"},
            {"sacred_bridge_strength", "sacred bridge share"}};
        std::vector<std::vector<std::string>> rows = {
            {"metric", "base_change", "uncertainty_summary", "variant_support", "interpretation"}};
        std::size_t n_variants = dynamics.at("variants").size();
        for (const auto& [metric, phrase] : metric_text) {
            double base = 0.0, lo = 0.0, hi = 0.0;
            bool first = true;
            for (const ordered_json& v : dynamics.at("variants")) {
                double d = num_from(v.at("delta").at(metric));
                if (std::isnan(d)) continue;
                if (v.at("variant").get<std::string>() == "base") base = d;
                if (first) { lo = hi = d; first = false; }
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
            const ordered_json& perm = dynamics.at("permutation").at(metric);
            const ordered_json& sup = dynamics.at("support").at(metric);
            std::string uncertainty = "span " + signed_fixed(lo, 3) + ".." + signed_fixed(hi, 3) +
                                      "; perm upper " + format_fixed(perm.at("upper").get<double>(), 2) +
                                      ", lower " + format_fixed(perm.at("lower").get<double>(), 2);
            std::string support = std::to_string(sup.at("agree_with_base").get<int>()) + "/" +
                                  std::to_string(n_variants);
            std::string interpretation;
            if (base > cfg_.dynamics.flat_epsilon) interpretation = phrase + " increases late";
            else if (base < -cfg_.dynamics.flat_epsilon) interpretation = phrase + " decreases late";
            else interpretation = phrase + " flat within tolerance";
            rows.push_back({metric, signed_fixed(base, 3), uncertainty, support, interpretation});
        }
        write_csv("report/tables/table5_rewiring.csv", rows);
    }

    // scoring schedule, straight from the active config
    void emit_tableA1() {
        std::vector<std::vector<std::string>> rows = {
            {"stage", "positive_evidence", "penalties_and_gates", "output_rule"}};
        for (const StageSchedule::Stage& s : cfg_.induction.schedule.stages)
            rows.push_back(
                {s.name, "8 weighted evidence channels",
                 "score >= " + format_fixed(s.threshold, 2) + "; head cleanliness >= " +
                     format_fixed(s.min_head_cleanliness, 2) + "; coherence >= " +
                     format_fixed(s.min_coherence, 2),
                 "merge accepted into head family"});
        rows.push_back({"synthetic", "joint member evidence",
                        "joint score >= " + format_fixed(cfg_.induction.synthetic_threshold, 2) +
                            "; observed heads below " + format_fixed(cfg_.induction.head_floor, 2),
                        "synthetic head adopted"});
        write_csv("report/tables/tableA1_scoring_summary.csv", rows);
    }

    void emit_tableA4(const ordered_json& stability, const ordered_json& atlas) {
        std::map<std::string, std::string> head_of;
        for (const ordered_json& nd : atlas.at("nodes"))
            head_of[nd.at("family_id").get<std::string>()] = nd.at("head").get<std::string>();
        std::map<std::string, std::vector<std::string>> field_heads;
        for (const auto& [id, f] : fields_cache_or_load().node_field)
            field_heads[field_label_name(f)].push_back(head_of.count(id) ? head_of.at(id) : id);
        std::vector<std::vector<std::string>> rows = {
            {"field", "illustrative_families", "mean_active_member_ratio", "summary"}};
        for (const ordered_json& r : stability.at("fields")) {
            std::string field = r.at("field").get<std::string>();
            std::string heads;
            if (field_heads.count(field)) {
                const auto& hs = field_heads.at(field);
                for (std::size_t i = 0; i < hs.size() && i < 3; ++i) {
                    if (!heads.empty()) heads += " ";
                    heads += hs[i];
                }
            }
            double ratio = r.at("mean_active_member_ratio").get<double>();
            double split = r.at("split_pressure").get<double>();
            std::string summary = ratio >= 0.95 ? "persistent through snapshots"
                                 : ratio >= 0.8 ? "mostly persistent"
                                                : "intermittent";
            summary += "; split pressure " + format_fixed(split, 2);
            rows.push_back({field, heads, format_fixed(ratio, 3), summary});
        }
        write_csv("report/tables/tableA4_field_stability.csv", rows);
    }

    void emit_hub_drift_plot(const ordered_json& dynamics) {
        std::vector<std::vector<std::string>> rows = {{"family", "bin", "rank", "classification"}};
        for (const ordered_json& h : dynamics.at("hub_drift")) {
            const ordered_json& ranks = h.at("rank");
            for (std::size_t b = 0; b < ranks.size(); ++b) {
                double r = num_from(ranks[b]);
                rows.push_back({h.at("family_id").get<std::string>(), std::to_string(b),
                                std::isnan(r) ? "" : format_fixed(r, 1),
                                h.at("classification").get<std::string>()});
            }
        }
        write_csv("report/plots/hub_drift.csv", rows);
    }

    void emit_bridge_plot(const ordered_json& dynamics) {
        std::vector<std::vector<std::string>> rows = {{"domain", "bin", "strength", "dispersion"}};
        for (const char* domain : {"courtly", "sacred"}) {
            const ordered_json& block = dynamics.at("bridge").at(domain);
            const ordered_json& strength = block.at("strength");
            const ordered_json& dispersion = block.at("dispersion");
            for (std::size_t b = 0; b < strength.size(); ++b) {
                double s = num_from(strength[b]);
                double d = num_from(dispersion[b]);
                rows.push_back({domain, std::to_string(b), std::isnan(s) ? "" : format_fixed(s),
                                std::isnan(d) ? "" : format_fixed(d)});
            }
        }
        write_csv("report/plots/bridge_series.csv", rows);
    }

    void emit_poet_heatmap(const ordered_json& poets) {
        const ordered_json& std_block = poets.at("standardized");
        const ordered_json& ids = std_block.at("poets");
        const ordered_json& field_codes = std_block.at("fields");
        const ordered_json& z = std_block.at("z");
        const ordered_json& labels = poets.at("clusters").at("labels");
        const ordered_json& assignment = poets.at("clusters").at("assignment");
        std::vector<std::vector<std::string>> rows = {{"poet", "cluster", "field", "z"}};
        for (std::size_t i = 0; i < ids.size(); ++i) {
            std::string poet = ids[i].get<std::string>();
            std::string cluster =
                labels[assignment.at(poet).get<std::size_t>()].get<std::string>();
            for (std::size_t f = 0; f < field_codes.size(); ++f)
                rows.push_back({poet, cluster, field_codes[f].get<std::string>(),
                                format_fixed(z[i][f].get<double>())});
        }
        write_csv("report/plots/poet_heatmap.csv", rows);
    }

    // report helpers hit the fields artifact twice; cache the parse
    const FieldsArtifact& fields_cache_or_load() {
        if (!fields_cache_) fields_cache_ = std::make_unique<FieldsArtifact>(load_fields_artifact());
        return *fields_cache_;
    }
    std::unique_ptr<FieldsArtifact> fields_cache_;
};

}  // namespace symatlas
