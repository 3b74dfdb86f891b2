#pragma once
// Three-layer symbolic graph: residency assignment, evidence-weighted edge
// scoring, threshold + genericity-adjusted top-k gating, layer summaries.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "symatlas/csv.hpp"
#include "symatlas/errors.hpp"
#include "symatlas/evidence.hpp"
#include "symatlas/families.hpp"

namespace symatlas {

// ---------------------------------------------------------------------------
// Layers and residency

enum class Residency { Core, Referential };

inline const char* residency_name(Residency r) {
    return r == Residency::Core ? "core" : "referential";
}

enum class Layer { Core, Referential, Bridge };

inline constexpr std::array<Layer, 3> kLayers = {Layer::Core, Layer::Referential, Layer::Bridge};

inline std::size_t layer_index(Layer l) { return static_cast<std::size_t>(l); }

inline const char* layer_name(Layer l) {
    switch (l) {
        case Layer::Core: return "core";
        case Layer::Referential: return "referential";
        case Layer::Bridge: return "bridge";
    }
    return "";
}

// A core edge joins two core residents, a referential edge two referential
// residents, and every mixed pair is a bridge candidate.
inline Layer layer_of(Residency a, Residency b) {
    if (a == Residency::Core && b == Residency::Core) return Layer::Core;
    if (a == Residency::Referential && b == Residency::Referential) return Layer::Referential;
    return Layer::Bridge;
}

// ---------------------------------------------------------------------------
// Parameters

inline constexpr std::size_t kEdgeChannelCount = 9;

inline constexpr std::array<const char*, kEdgeChannelCount> kEdgeChannelNames = {
    "multiview_embedding", "weighted_context",  "cluster",
    "representative_context", "verse_cooc",     "document_cooc",
    "poet_overlap",          "seed_support",    "local_coactivation"};

struct LayerParams {
    double threshold = 0;
    int top_k = 1;
    double gamma = 0;  // genericity penalty coefficient
    double rho = 0;    // referential pressure coefficient
};

struct AtlasParams {
    std::array<double, kEdgeChannelCount> weights = {
        1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9};
    LayerParams core{0.41, 6, 0.3, -0.2};
    LayerParams referential{0.36, 4, 0.3, 0.0};
    LayerParams bridge{0.38, 4, 0.3, 0.15};
    double residency_cutoff = 0.5;              // referential pressure above this -> Referential
    double residency_genericity_discount = 0.5; // pressure discounted by genericity
    double genericity_alpha = 0.5;              // top-k shrink rate with genericity
    double bridge_anchor_share = 0.5;           // cross-layer candidate share flag cutoff
    std::size_t representative_top_m = 20;

    const LayerParams& layer(Layer l) const {
        switch (l) {
            case Layer::Core: return core;
            case Layer::Referential: return referential;
            case Layer::Bridge: return bridge;
        }
        return core;
    }

    // Genericity is penalized in every layer; referential pressure must pull
    // edges down in the core, stay near neutral in the referential layer, and
    // reward cross-layer attachment in the bridge view.
    void validate() const {
        for (Layer l : kLayers) {
            const LayerParams& lp = layer(l);
            if (lp.gamma <= 0)
                throw ValidationError(std::string("layer ") + layer_name(l) +
                                      ": genericity coefficient must be positive");
            if (lp.top_k < 1)
                throw ValidationError(std::string("layer ") + layer_name(l) +
                                      ": top_k must be at least 1");
        }
        if (core.rho >= 0) throw ValidationError("core referential coefficient must be negative");
        if (bridge.rho <= 0)
            throw ValidationError("bridge referential coefficient must be positive");
        if (referential.rho <= core.rho || referential.rho >= bridge.rho)
            throw ValidationError(
                "referential-layer coefficient must sit between the core and bridge values");
        for (double w : weights)
            if (w < 0) throw ValidationError("channel weights must be non-negative");
        if (residency_cutoff <= 0 || residency_cutoff >= 1)
            throw ValidationError("residency cutoff must lie in (0, 1)");
        if (genericity_alpha < 0 || genericity_alpha > 1)
            throw ValidationError("genericity alpha must lie in [0, 1]");
    }
};

// ---------------------------------------------------------------------------
// Family-level aggregates

// Per-family evidence rolled up from member forms. Context keys are family
// ids wherever the neighboring form belongs to a family, raw forms otherwise.
struct FamilyStats {
    std::string family_id;
    std::string head;
    ContextProfile profile;
    std::vector<double> static_vec;
    std::vector<double> occ_vec;
    int cluster = -1;
    std::set<std::string> seed_assoc;
    double frequency = 0;
    double genericity = 0;
    double symbolic_strength = 0;
    double referential_pressure = 0;
};

struct AtlasContext {
    const FamilySet* families = nullptr;
    std::map<std::string, FamilyStats> stats;                       // by family id
    std::vector<std::vector<double>> centroids;                     // cluster id -> centroid
    std::map<std::pair<std::string, std::string>, double> coactivation;  // ordered pair -> count

    const FamilyStats& of(const std::string& family_id) const { return stats.at(family_id); }

    double coactivation_count(const std::string& a, const std::string& b) const {
        auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        auto it = coactivation.find(key);
        return it == coactivation.end() ? 0.0 : it->second;
    }

    std::map<std::string, double> genericity_map() const {
        std::map<std::string, double> g;
        for (const auto& [id, st] : stats) g[id] = st.genericity;
        return g;
    }
};

namespace detail {

// Weight share of a context bag sitting on marked keys.
inline double marked_share(const std::map<std::string, double>& bag,
                           const std::set<std::string>& marked) {
    double total = 0, hit = 0;
    for (const auto& [key, w] : bag) {
        total += w;
        if (marked.count(key)) hit += w;
    }
    return total > 0 ? hit / total : 0.0;
}

}  // namespace detail

// Rolls member-level profiles, vectors, and lexicon contact up to families and
// derives the residency inputs. `referential_lexicon` is the union of proper
// names and the referential anchor fields; the symbolic side comes from the
// seed and exemplar lexicons already carried by the evidence context. `window`
// bounds local co-activation, matching the context-profile window.
inline AtlasContext make_atlas_context(const TokenizedCorpus& tc, const EvidenceContext& ev,
                                       const FamilySet& fs,
                                       const std::set<std::string>& referential_lexicon,
                                       int window) {
    AtlasContext actx;
    actx.families = &fs;
    actx.centroids = ev.clustering->centroids;

    auto family_key = [&](const std::string& form) -> std::string {
        auto it = fs.form_to_family.find(form);
        return it == fs.form_to_family.end() ? form : it->second;
    };

    // Merge member profiles; context neighbors collapse onto their families.
    for (const Family& fam : fs.families) {
        FamilyStats st;
        st.family_id = fam.family_id;
        st.head = fam.head;
        std::vector<double> static_sum, occ_sum;
        double vec_weight = 0;
        std::string top_member;
        std::size_t top_freq = 0;
        for (const std::string& m : fam.members) {
            auto pit = ev.profiles->find(m);
            if (pit == ev.profiles->end()) continue;
            const ContextProfile& p = pit->second;
            for (const auto& [neighbor, w] : p.context) st.profile.context[family_key(neighbor)] += w;
            st.profile.verse_presence.insert(p.verse_presence.begin(), p.verse_presence.end());
            st.profile.document_presence.insert(p.document_presence.begin(),
                                                p.document_presence.end());
            st.profile.poet_presence.insert(p.poet_presence.begin(), p.poet_presence.end());
            st.profile.frequency += p.frequency;
            st.frequency += static_cast<double>(p.frequency);
            st.seed_assoc.merge(lexicon_associations(m, p, *ev.seeds));
            if (p.frequency > top_freq || (p.frequency == top_freq && m < top_member) ||
                top_member.empty()) {
                top_freq = p.frequency;
                top_member = m;
            }
            auto sit = ev.space->index.find(m);
            if (sit != ev.space->index.end()) {
                const double w = static_cast<double>(p.frequency);
                const auto& sv = ev.space->static_vec[sit->second];
                const auto& ov = ev.space->occ_mean[sit->second];
                if (static_sum.empty()) static_sum.assign(sv.size(), 0.0);
                if (occ_sum.empty()) occ_sum.assign(ov.size(), 0.0);
                for (std::size_t d = 0; d < sv.size(); ++d) static_sum[d] += w * sv[d];
                for (std::size_t d = 0; d < ov.size(); ++d) occ_sum[d] += w * ov[d];
                vec_weight += w;
            }
        }
        if (vec_weight > 0) {
            for (double& v : static_sum) v /= vec_weight;
            for (double& v : occ_sum) v /= vec_weight;
            st.static_vec = std::move(static_sum);
            st.occ_vec = std::move(occ_sum);
        }
        if (!top_member.empty() && !ev.clustering->assignment.empty()) {
            auto sit = ev.space->index.find(top_member);
            if (sit != ev.space->index.end())
                st.cluster = ev.clustering->assignment[sit->second];
        }
        actx.stats[fam.family_id] = std::move(st);
    }

    // Family genericity mirrors the form-level blend: normalized log frequency
    // with context entropy over the family inventory.
    double max_log_freq = 0;
    for (const auto& [id, st] : actx.stats)
        max_log_freq = std::max(max_log_freq, std::log1p(st.frequency));
    const double h_norm = std::log(std::max<std::size_t>(actx.stats.size(), 2));
    for (auto& [id, st] : actx.stats) {
        double f = max_log_freq > 0 ? std::log1p(st.frequency) / max_log_freq : 0.0;
        double h = std::min(1.0, context_entropy(st.profile.context) / h_norm);
        st.genericity = 0.5 * f + 0.5 * h;
    }

    // Residency inputs: direct lexicon membership of any member form, blended
    // with the context-mass share landing on lexicon-marked material.
    std::set<std::string> symbolic_marks, referential_marks;
    for (const Family& fam : fs.families) {
        bool sym = false, ref = false;
        for (const std::string& m : fam.members) {
            if (ev.seeds->count(m) || ev.exemplars->count(m)) sym = true;
            if (referential_lexicon.count(m)) ref = true;
        }
        if (sym) symbolic_marks.insert(fam.family_id);
        if (ref) referential_marks.insert(fam.family_id);
    }
    // Raw (family-less) context keys can still be lexicon material.
    for (const std::string& s : *ev.seeds)
        if (!fs.form_to_family.count(s)) symbolic_marks.insert(s);
    for (const std::string& s : *ev.exemplars)
        if (!fs.form_to_family.count(s)) symbolic_marks.insert(s);
    for (const std::string& s : referential_lexicon)
        if (!fs.form_to_family.count(s)) referential_marks.insert(s);

    for (auto& [id, st] : actx.stats) {
        double sym_direct = symbolic_marks.count(id) ? 1.0 : 0.0;
        double ref_direct = referential_marks.count(id) ? 1.0 : 0.0;
        st.symbolic_strength =
            0.5 * sym_direct + 0.5 * detail::marked_share(st.profile.context, symbolic_marks);
        st.referential_pressure =
            0.5 * ref_direct + 0.5 * detail::marked_share(st.profile.context, referential_marks);
    }

    // Local co-activation: family pairs landing within the window inside one
    // hemistich, counted per position pair.
    for (const TokenizedCorpus::Hemi& h : tc.hemistichs) {
        for (std::size_t i = 0; i < h.tokens.size(); ++i) {
            auto ia = fs.form_to_family.find(h.tokens[i]);
            if (ia == fs.form_to_family.end()) continue;
            for (std::size_t j = i + 1; j < h.tokens.size() && j - i <= static_cast<std::size_t>(window);
                 ++j) {
                auto ib = fs.form_to_family.find(h.tokens[j]);
                if (ib == fs.form_to_family.end()) continue;
                if (ia->second == ib->second) continue;
                auto key = ia->second < ib->second ? std::make_pair(ia->second, ib->second)
                                                   : std::make_pair(ib->second, ia->second);
                actx.coactivation[key] += 1.0;
            }
        }
    }
    return actx;
}

// Referential iff the genericity-discounted pressure clears the cutoff.
inline std::map<std::string, Residency> assign_residency(const AtlasContext& actx,
                                                         const AtlasParams& params) {
    std::map<std::string, Residency> out;
    for (const auto& [id, st] : actx.stats) {
        double adjusted =
            st.referential_pressure * (1.0 - params.residency_genericity_discount * st.genericity);
        out[id] = adjusted > params.residency_cutoff ? Residency::Referential : Residency::Core;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Edge scoring

struct EdgeScoreBreakdown {
    std::string family_a;  // lexicographically first
    std::string family_b;
    Layer layer = Layer::Core;
    std::array<double, kEdgeChannelCount> channels{};
    double genericity_penalty = 0;     // G
    double referential_pressure = 0;   // R
    double score = 0;                  // S

    std::string pair_id() const { return family_a + "|" + family_b; }
};

namespace detail {

inline double combine_score(const std::array<double, kEdgeChannelCount>& channels,
                            const std::array<double, kEdgeChannelCount>& weights, double g,
                            double r, const LayerParams& lp) {
    double s = 0;
    for (std::size_t m = 0; m < kEdgeChannelCount; ++m) s += weights[m] * channels[m];
    return s - lp.gamma * g + lp.rho * r;
}

}  // namespace detail

inline EdgeScoreBreakdown score_edge(const AtlasContext& actx, const AtlasParams& params,
                                     const std::string& a, const std::string& b, Layer layer) {
    EdgeScoreBreakdown e;
    e.family_a = std::min(a, b);
    e.family_b = std::max(a, b);
    e.layer = layer;
    const FamilyStats& sa = actx.of(e.family_a);
    const FamilyStats& sb = actx.of(e.family_b);

    // Static and occurrence views carry equal halves of the embedding channel.
    e.channels[0] = 0.5 * nonneg_cosine(sa.static_vec, sb.static_vec) +
                    0.5 * nonneg_cosine(sa.occ_vec, sb.occ_vec);
    e.channels[1] = detail::weighted_jaccard(sa.profile.context, sb.profile.context);
    if (sa.cluster >= 0 && sb.cluster >= 0) {
        if (sa.cluster == sb.cluster)
            e.channels[2] = 1.0;
        else if (static_cast<std::size_t>(sa.cluster) < actx.centroids.size() &&
                 static_cast<std::size_t>(sb.cluster) < actx.centroids.size())
            e.channels[2] = nonneg_cosine(actx.centroids[sa.cluster], actx.centroids[sb.cluster]);
    }
    e.channels[3] =
        representative_context_overlap(sa.profile, sb.profile, params.representative_top_m);
    e.channels[4] = detail::jaccard(sa.profile.verse_presence, sb.profile.verse_presence);
    e.channels[5] = detail::jaccard(sa.profile.document_presence, sb.profile.document_presence);
    e.channels[6] = detail::jaccard(sa.profile.poet_presence, sb.profile.poet_presence);
    e.channels[7] = (sa.seed_assoc.empty() && sb.seed_assoc.empty())
                        ? 0.0
                        : detail::jaccard(sa.seed_assoc, sb.seed_assoc);
    double denom = std::max(1.0, std::min(sa.frequency, sb.frequency));
    e.channels[8] = std::min(1.0, actx.coactivation_count(e.family_a, e.family_b) / denom);

    e.genericity_penalty = 0.5 * (sa.genericity + sb.genericity);
    e.referential_pressure = 0.5 * (sa.referential_pressure + sb.referential_pressure);
    e.score = detail::combine_score(e.channels, params.weights, e.genericity_penalty,
                                    e.referential_pressure, params.layer(layer));
    return e;
}

// ---------------------------------------------------------------------------
// Gating

// Genericity shrinks a node's keep budget; never below one.
inline int effective_top_k(int top_k, double genericity, double alpha) {
    long k = std::lround(static_cast<double>(top_k) * (1.0 - genericity * alpha));
    return static_cast<int>(std::max(1L, k));
}

// Threshold first, then per-node top-k on the survivors, retaining an edge if
// either endpoint ranks it (union rule). Ranking ties break toward the
// lexicographically smaller pair id.
inline std::vector<EdgeScoreBreakdown> gate_edges(const std::vector<EdgeScoreBreakdown>& scored,
                                                  const AtlasParams& params,
                                                  const std::map<std::string, double>& genericity) {
    auto gen_of = [&](const std::string& id) {
        auto it = genericity.find(id);
        return it == genericity.end() ? 0.0 : it->second;
    };

    std::vector<EdgeScoreBreakdown> retained;
    for (Layer layer : kLayers) {
        const LayerParams& lp = params.layer(layer);
        std::vector<const EdgeScoreBreakdown*> pool;
        for (const EdgeScoreBreakdown& e : scored)
            if (e.layer == layer && e.score >= lp.threshold) pool.push_back(&e);

        std::map<std::string, std::vector<const EdgeScoreBreakdown*>> incident;
        for (const EdgeScoreBreakdown* e : pool) {
            incident[e->family_a].push_back(e);
            incident[e->family_b].push_back(e);
        }
        std::set<std::string> kept_ids;
        for (auto& [node, edges] : incident) {
            std::sort(edges.begin(), edges.end(),
                      [](const EdgeScoreBreakdown* x, const EdgeScoreBreakdown* y) {
                          if (x->score != y->score) return x->score > y->score;
                          return x->pair_id() < y->pair_id();
                      });
            int budget = effective_top_k(lp.top_k, gen_of(node), params.genericity_alpha);
            for (std::size_t i = 0; i < edges.size() && i < static_cast<std::size_t>(budget); ++i)
                kept_ids.insert(edges[i]->pair_id());
        }
        for (const EdgeScoreBreakdown* e : pool)
            if (kept_ids.count(e->pair_id())) retained.push_back(*e);
    }
    std::sort(retained.begin(), retained.end(),
              [](const EdgeScoreBreakdown& x, const EdgeScoreBreakdown& y) {
                  if (x.layer != y.layer) return layer_index(x.layer) < layer_index(y.layer);
                  if (x.family_a != y.family_a) return x.family_a < y.family_a;
                  return x.family_b < y.family_b;
              });
    return retained;
}

// ---------------------------------------------------------------------------
// Graph assembly

struct AtlasNode {
    std::string family_id;
    std::string head;
    Residency residency = Residency::Core;
    double symbolic_strength = 0;
    double genericity = 0;
    double referential_pressure = 0;
    bool bridge_anchor = false;
    bool bridge_participant = false;
};

struct LayerSummary {
    std::size_t n_nodes = 0;
    std::size_t n_edges = 0;
    double avg_degree = 0;
    double density = 0;
};

inline LayerSummary summary_from_counts(std::size_t n_nodes, std::size_t n_edges) {
    LayerSummary s;
    s.n_nodes = n_nodes;
    s.n_edges = n_edges;
    if (n_nodes > 0) s.avg_degree = 2.0 * static_cast<double>(n_edges) / static_cast<double>(n_nodes);
    if (n_nodes > 1)
        s.density = 2.0 * static_cast<double>(n_edges) /
                    (static_cast<double>(n_nodes) * static_cast<double>(n_nodes - 1));
    return s;
}

struct AtlasGraph {
    std::vector<AtlasNode> nodes;  // sorted by family id
    std::map<std::string, std::size_t> node_index;
    std::vector<EdgeScoreBreakdown> edges;  // retained, sorted by (layer, pair)
    std::array<LayerSummary, 3> summary{};  // indexed by layer_index

    const AtlasNode& node(const std::string& family_id) const {
        return nodes[node_index.at(family_id)];
    }
};

// Core and referential rows count residents; the bridge row counts
// participants rather than a disjoint node inventory.
inline LayerSummary layer_summary(const AtlasGraph& graph, Layer layer) {
    std::size_t n_edges = 0;
    for (const EdgeScoreBreakdown& e : graph.edges)
        if (e.layer == layer) ++n_edges;
    std::size_t n_nodes = 0;
    if (layer == Layer::Bridge) {
        for (const AtlasNode& nd : graph.nodes)
            if (nd.bridge_participant) ++n_nodes;
    } else {
        Residency want = layer == Layer::Core ? Residency::Core : Residency::Referential;
        for (const AtlasNode& nd : graph.nodes)
            if (nd.residency == want) ++n_nodes;
    }
    return summary_from_counts(n_nodes, n_edges);
}

inline AtlasGraph build_atlas(const AtlasContext& actx, const AtlasParams& params) {
    params.validate();
    AtlasGraph graph;

    std::map<std::string, Residency> residency = assign_residency(actx, params);
    for (const auto& [id, st] : actx.stats) {
        AtlasNode nd;
        nd.family_id = id;
        nd.head = st.head;
        nd.residency = residency.at(id);
        nd.symbolic_strength = st.symbolic_strength;
        nd.genericity = st.genericity;
        nd.referential_pressure = st.referential_pressure;
        graph.node_index[id] = graph.nodes.size();
        graph.nodes.push_back(std::move(nd));
    }

    std::vector<std::string> ids;
    ids.reserve(graph.nodes.size());
    for (const AtlasNode& nd : graph.nodes) ids.push_back(nd.family_id);

    std::vector<EdgeScoreBreakdown> scored;
    scored.reserve(ids.size() * (ids.size() + 1) / 2);
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            Layer layer = layer_of(residency.at(ids[i]), residency.at(ids[j]));
            scored.push_back(score_edge(actx, params, ids[i], ids[j], layer));
        }

    // Bridge-anchor diagnostics: share of a node's above-threshold candidates
    // sitting in the bridge layer.
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // node -> {bridge, total}
    for (const EdgeScoreBreakdown& e : scored) {
        if (e.score < params.layer(e.layer).threshold) continue;
        for (const std::string& end : {e.family_a, e.family_b}) {
            auto& c = counts[end];
            if (e.layer == Layer::Bridge) ++c.first;
            ++c.second;
        }
    }
    for (AtlasNode& nd : graph.nodes) {
        auto it = counts.find(nd.family_id);
        if (it == counts.end() || it->second.second == 0) continue;
        double share = static_cast<double>(it->second.first) /
                       static_cast<double>(it->second.second);
        nd.bridge_anchor = share > params.bridge_anchor_share;
    }

    graph.edges = gate_edges(scored, params, actx.genericity_map());
    for (const EdgeScoreBreakdown& e : graph.edges)
        if (e.layer == Layer::Bridge) {
            graph.nodes[graph.node_index.at(e.family_a)].bridge_participant = true;
            graph.nodes[graph.node_index.at(e.family_b)].bridge_participant = true;
        }

    for (Layer l : kLayers) graph.summary[layer_index(l)] = layer_summary(graph, l);
    return graph;
}

// ---------------------------------------------------------------------------
// Export

inline void write_edges_csv(const AtlasGraph& graph, std::ostream& os) {
    CsvWriter w(os);
    std::vector<std::string> header = {"layer", "family_a", "family_b", "score"};
    for (const char* name : kEdgeChannelNames) header.push_back(name);
    header.push_back("genericity_penalty");
    header.push_back("referential_pressure");
    w.row(header);
    for (const EdgeScoreBreakdown& e : graph.edges) {
        std::vector<std::string> row = {layer_name(e.layer), e.family_a, e.family_b,
                                        format_fixed(e.score)};
        for (double c : e.channels) row.push_back(format_fixed(c));
        row.push_back(format_fixed(e.genericity_penalty));
        row.push_back(format_fixed(e.referential_pressure));
        w.row(row);
    }
}

inline nlohmann::ordered_json nodes_to_json(const AtlasGraph& graph) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const AtlasNode& nd : graph.nodes) {
        nlohmann::ordered_json o;
        o["family_id"] = nd.family_id;
        o["head"] = nd.head;
        o["residency"] = residency_name(nd.residency);
        o["symbolic_strength"] = nd.symbolic_strength;
        o["genericity"] = nd.genericity;
        o["referential_pressure"] = nd.referential_pressure;
        o["bridge_anchor"] = nd.bridge_anchor;
        o["bridge_participant"] = nd.bridge_participant;
        arr.push_back(std::move(o));
    }
    return arr;
}

}  // namespace symatlas
