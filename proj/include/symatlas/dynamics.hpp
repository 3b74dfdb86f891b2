#pragma once
// Century snapshots of the atlas backbone: activity thresholds, named
// robustness variants, per-bin structural metrics, and a chronology
// permutation null.
//
// Snapshots only ever reuse backbone nodes and edges. A node activates in a
// bin when its raw occurrences, distinct-verse presence, and summed edge
// co-activations all clear the variant's floors; an edge activates when both
// endpoints are active and its own co-activation clears the floor. Edge
// co-activation is counted at poem granularity: the number of poems in the
// bin in which both families occur.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "symatlas/atlas.hpp"
#include "symatlas/communities.hpp"
#include "symatlas/corpus.hpp"
#include "symatlas/csv.hpp"
#include "symatlas/errors.hpp"
#include "symatlas/evidence.hpp"
#include "symatlas/families.hpp"
#include "symatlas/rng.hpp"
#include "symatlas/temporal.hpp"

namespace symatlas {

// ---------------------------------------------------------------------------
// Thresholds and variants

struct ActivityThresholds {
    double min_raw_occurrences = 5;
    double min_verse_presence = 3;
    double min_edge_coactivations = 2;
};

inline ActivityThresholds base_thresholds() { return {5, 3, 2}; }
inline ActivityThresholds loose_thresholds() { return {3, 2, 1}; }
inline ActivityThresholds strict_thresholds() { return {10, 5, 3}; }

enum class VariantName { Loose, Base, Strict, PoetBalanced, HighConfidence };

inline const char* variant_label(VariantName v) {
    switch (v) {
        case VariantName::Loose: return "loose";
        case VariantName::Base: return "base";
        case VariantName::Strict: return "strict";
        case VariantName::PoetBalanced: return "poet_balanced";
        default: return "high_confidence";
    }
}

struct VariantSpec {
    VariantName name = VariantName::Base;
    ActivityThresholds thresholds = base_thresholds();
    bool poet_balanced = false;
    bool high_confidence = false;
    double confidence_margin = 0.1;  // added to the layer threshold as an edge floor
};

// The five named robustness variants, in fixed order.
inline std::array<VariantSpec, 5> standard_variants() {
    std::array<VariantSpec, 5> v{};
    v[0] = {VariantName::Loose, loose_thresholds(), false, false, 0.1};
    v[1] = {VariantName::Base, base_thresholds(), false, false, 0.1};
    v[2] = {VariantName::Strict, strict_thresholds(), false, false, 0.1};
    v[3] = {VariantName::PoetBalanced, base_thresholds(), true, false, 0.1};
    v[4] = {VariantName::HighConfidence, base_thresholds(), false, true, 0.1};
    return v;
}

// ---------------------------------------------------------------------------
// Per-bin activity table

// Raw material for activation decisions, split by poet so the poet-balanced
// variant can reweight contributions.
struct DynamicsTable {
    std::size_t n_bins = 0;
    std::vector<double> verses_per_bin;
    std::map<std::string, std::vector<double>> poet_verses;
    // backbone node -> per-bin counts
    std::map<std::string, std::vector<double>> raw;
    std::map<std::string, std::vector<double>> verse_presence;
    std::map<std::string, std::map<std::string, std::vector<double>>> raw_by_poet;
    std::map<std::string, std::map<std::string, std::vector<double>>> verse_by_poet;
    // backbone edge (lexicographic pair) -> per-bin co-activated poem counts
    std::map<std::pair<std::string, std::string>, std::vector<double>> edge_coact;
    std::map<std::pair<std::string, std::string>,
             std::map<std::string, std::vector<double>>>
        edge_coact_by_poet;
};

inline DynamicsTable build_dynamics_table(const CorpusStore& store, const TokenizedCorpus& tc,
                                          const FamilySet& families, const AtlasGraph& backbone) {
    DynamicsTable table;
    table.n_bins = store.bins.size();
    if (table.n_bins == 0) throw ValidationError("dynamics table requires resolved century bins");
    table.verses_per_bin.assign(table.n_bins, 0.0);
    for (const Poem& poem : store.poems) {
        if (poem.bin_id < 0 || poem.bin_id >= static_cast<int>(table.n_bins))
            throw ValidationError("dynamics table requires every poem binned");
        table.verses_per_bin[poem.bin_id] += double(poem.verses.size());
        auto [it, inserted] = table.poet_verses.try_emplace(poem.poet_id);
        if (inserted) it->second.assign(table.n_bins, 0.0);
        it->second[poem.bin_id] += double(poem.verses.size());
    }

    std::set<std::string> node_ids;
    for (const AtlasNode& n : backbone.nodes) node_ids.insert(n.family_id);

    // per-poem family presence and raw/verse tallies
    std::map<std::size_t, std::set<std::string>> poem_families;
    std::map<std::string, std::map<std::size_t, std::set<std::size_t>>> family_verses;
    for (const TokenizedCorpus::Hemi& h : tc.hemistichs) {
        for (const std::string& tok : h.tokens) {
            auto fit = families.form_to_family.find(tok);
            if (fit == families.form_to_family.end()) continue;
            if (!node_ids.count(fit->second)) continue;
            const Poem& poem = store.poems[h.poem_idx];
            const std::string& fid = fit->second;
            auto raw_it = table.raw_by_poet[fid].try_emplace(poem.poet_id);
            if (raw_it.second) raw_it.first->second.assign(table.n_bins, 0.0);
            raw_it.first->second[poem.bin_id] += 1.0;
            poem_families[h.poem_idx].insert(fid);
            family_verses[fid][h.poem_idx].insert(h.verse_idx);
        }
    }
    for (const auto& [fid, per_poet] : table.raw_by_poet) {
        std::vector<double> total(table.n_bins, 0.0);
        for (const auto& [poet, counts] : per_poet)
            for (std::size_t b = 0; b < table.n_bins; ++b) total[b] += counts[b];
        table.raw[fid] = std::move(total);
    }
    for (const auto& [fid, per_poem] : family_verses) {
        std::vector<double> total(table.n_bins, 0.0);
        auto& by_poet = table.verse_by_poet[fid];
        for (const auto& [poem_idx, verse_set] : per_poem) {
            const Poem& poem = store.poems[poem_idx];
            double n = double(verse_set.size());
            total[poem.bin_id] += n;
            auto [it, inserted] = by_poet.try_emplace(poem.poet_id);
            if (inserted) it->second.assign(table.n_bins, 0.0);
            it->second[poem.bin_id] += n;
        }
        table.verse_presence[fid] = std::move(total);
    }

    // co-activated poems per backbone edge
    for (const EdgeScoreBreakdown& e : backbone.edges) {
        auto key = std::make_pair(e.family_a, e.family_b);
        table.edge_coact[key].assign(table.n_bins, 0.0);
    }
    for (const auto& [poem_idx, fams] : poem_families) {
        const Poem& poem = store.poems[poem_idx];
        for (const EdgeScoreBreakdown& e : backbone.edges) {
            if (!fams.count(e.family_a) || !fams.count(e.family_b)) continue;
            auto key = std::make_pair(e.family_a, e.family_b);
            table.edge_coact[key][poem.bin_id] += 1.0;
            auto [it, inserted] = table.edge_coact_by_poet[key].try_emplace(poem.poet_id);
            if (inserted) it->second.assign(table.n_bins, 0.0);
            it->second[poem.bin_id] += 1.0;
        }
    }
    return table;
}

namespace detail {

// Equal-poet weights inside a bin: each poet's contribution is rescaled as if
// all poets writing in the bin had supplied equal verse volumes.
inline std::map<std::string, double> balance_weights(const DynamicsTable& table, std::size_t bin) {
    std::map<std::string, double> w;
    std::size_t k = 0;
    for (const auto& [poet, verses] : table.poet_verses)
        if (verses[bin] > 0) ++k;
    if (k == 0) return w;
    double share = table.verses_per_bin[bin] / double(k);
    for (const auto& [poet, verses] : table.poet_verses)
        if (verses[bin] > 0) w[poet] = share / verses[bin];
    return w;
}

inline double weighted_bin_value(const std::map<std::string, std::vector<double>>& by_poet,
                                 const std::map<std::string, double>& weights, std::size_t bin) {
    double v = 0.0;
    for (const auto& [poet, series] : by_poet) {
        auto wit = weights.find(poet);
        if (wit != weights.end()) v += wit->second * series[bin];
    }
    return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Snapshots

struct SnapshotEdge {
    std::string family_a;
    std::string family_b;
    Layer layer = Layer::Core;
    double weight = 0.0;  // bin-restricted co-activation
};

struct SnapshotGraph {
    int bin_id = 0;
    std::set<std::string> active_nodes;
    std::vector<SnapshotEdge> edges;  // sorted by (family_a, family_b)
};

struct SnapshotSet {
    VariantName variant = VariantName::Base;
    std::vector<SnapshotGraph> snapshots;  // one per bin
};

inline SnapshotSet build_snapshots(const DynamicsTable& table, const AtlasGraph& backbone,
                                   const AtlasParams& params, const VariantSpec& spec) {
    SnapshotSet out;
    out.variant = spec.name;

    // the high-confidence variant narrows the edge universe first
    std::vector<const EdgeScoreBreakdown*> edges;
    for (const EdgeScoreBreakdown& e : backbone.edges) {
        if (spec.high_confidence &&
            e.score < params.layer(e.layer).threshold + spec.confidence_margin)
            continue;
        edges.push_back(&e);
    }

    for (std::size_t b = 0; b < table.n_bins; ++b) {
        SnapshotGraph snap;
        snap.bin_id = static_cast<int>(b);

        std::map<std::string, double> weights;
        if (spec.poet_balanced) weights = detail::balance_weights(table, b);
        auto bin_value = [&](const std::map<std::string, std::vector<double>>& totals,
                             const std::map<std::string,
                                            std::map<std::string, std::vector<double>>>& by_poet,
                             const std::string& key) {
            if (spec.poet_balanced) {
                auto it = by_poet.find(key);
                return it == by_poet.end() ? 0.0
                                           : detail::weighted_bin_value(it->second, weights, b);
            }
            auto it = totals.find(key);
            return it == totals.end() ? 0.0 : it->second[b];
        };
        auto edge_value = [&](const std::pair<std::string, std::string>& key) {
            if (spec.poet_balanced) {
                auto it = table.edge_coact_by_poet.find(key);
                return it == table.edge_coact_by_poet.end()
                           ? 0.0
                           : detail::weighted_bin_value(it->second, weights, b);
            }
            auto it = table.edge_coact.find(key);
            return it == table.edge_coact.end() ? 0.0 : it->second[b];
        };

        for (const AtlasNode& node : backbone.nodes) {
            double raw = bin_value(table.raw, table.raw_by_poet, node.family_id);
            if (raw < spec.thresholds.min_raw_occurrences) continue;
            double verses = bin_value(table.verse_presence, table.verse_by_poet, node.family_id);
            if (verses < spec.thresholds.min_verse_presence) continue;
            double coact = 0.0;
            for (const EdgeScoreBreakdown* e : edges)
                if (e->family_a == node.family_id || e->family_b == node.family_id)
                    coact += edge_value({e->family_a, e->family_b});
            if (coact < spec.thresholds.min_edge_coactivations) continue;
            snap.active_nodes.insert(node.family_id);
        }

        for (const EdgeScoreBreakdown* e : edges) {
            if (!snap.active_nodes.count(e->family_a) || !snap.active_nodes.count(e->family_b))
                continue;
            double w = edge_value({e->family_a, e->family_b});
            if (w < spec.thresholds.min_edge_coactivations) continue;
            snap.edges.push_back({e->family_a, e->family_b, e->layer, w});
        }
        std::sort(snap.edges.begin(), snap.edges.end(),
                  [](const SnapshotEdge& x, const SnapshotEdge& y) {
                      return std::tie(x.family_a, x.family_b) < std::tie(y.family_a, y.family_b);
                  });
        out.snapshots.push_back(std::move(snap));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Per-bin metrics

// Share of active edges that sit in the bridge layer; 0 with no active edges.
inline double cross_link_ratio(const SnapshotGraph& snap) {
    if (snap.edges.empty()) return 0.0;
    std::size_t bridge = 0;
    for (const SnapshotEdge& e : snap.edges)
        if (e.layer == Layer::Bridge) ++bridge;
    return double(bridge) / double(snap.edges.size());
}

// Freeman degree centralization over an unweighted degree sequence.
inline double degree_centralization(const std::vector<int>& degrees) {
    std::size_t n = degrees.size();
    if (n < 3) return 0.0;
    int d_max = *std::max_element(degrees.begin(), degrees.end());
    double sum = 0.0;
    for (int d : degrees) sum += double(d_max - d);
    return sum / (double(n - 1) * double(n - 2));
}

// Weighted graph over the snapshot's active core residents and core edges.
inline WeightedGraph snapshot_core_graph(const SnapshotGraph& snap, const AtlasGraph& backbone) {
    WeightedGraph g;
    for (const std::string& id : snap.active_nodes)
        if (backbone.node(id).residency == Residency::Core) g.ensure_node(id);
    for (const SnapshotEdge& e : snap.edges)
        if (e.layer == Layer::Core) g.add_edge(e.family_a, e.family_b, e.weight);
    return g;
}

inline double snapshot_centralization(const SnapshotGraph& snap, const AtlasGraph& backbone) {
    WeightedGraph core = snapshot_core_graph(snap, backbone);
    std::vector<int> degrees(core.nodes.size(), 0);
    for (const auto& [key, w] : core.edges) {
        ++degrees[key.first];
        ++degrees[key.second];
    }
    return degree_centralization(degrees);
}

inline double snapshot_core_modularity(const SnapshotGraph& snap, const AtlasGraph& backbone) {
    return greedy_modularity(snapshot_core_graph(snap, backbone)).q;
}

// ---------------------------------------------------------------------------
// Hub drift

enum class HubClass { RisingHub, DecliningHub, StableHub };

inline const char* hub_class_name(HubClass c) {
    switch (c) {
        case HubClass::RisingHub: return "rising_hub";
        case HubClass::DecliningHub: return "declining_hub";
        default: return "stable_hub";
    }
}

struct HubDrift {
    std::string family_id;
    std::vector<double> rank;  // per bin; missing when inactive (1 = strongest)
    double drift = 0.0;        // late mean rank minus early mean rank
    bool defined = false;      // both windows held at least one ranked bin
    HubClass classification = HubClass::StableHub;
};

// Weighted-degree ranks inside each snapshot's active core; rank 1 is the
// highest weighted degree, ties share the average rank. Drift below the
// cutoff marks a rising hub (ranks shrink late), above it a declining one.
// Families never ranked in one of the windows carry no drift evidence and
// stay stable.
inline std::vector<HubDrift> hub_drift(const SnapshotSet& set, const AtlasGraph& backbone,
                                       double drift_cutoff = 1.0) {
    std::size_t bins = set.snapshots.size();
    std::map<std::string, std::vector<double>> ranks;
    for (const AtlasNode& n : backbone.nodes)
        if (n.residency == Residency::Core)
            ranks[n.family_id].assign(bins, missing_value());

    for (std::size_t b = 0; b < bins; ++b) {
        WeightedGraph core = snapshot_core_graph(set.snapshots[b], backbone);
        if (core.nodes.empty()) continue;
        std::vector<double> strength = core.strengths();
        // average ranks ascend with value, so flip to make rank 1 strongest
        std::vector<double> asc = detail::average_ranks(strength);
        for (std::size_t i = 0; i < core.nodes.size(); ++i)
            ranks[core.nodes[i]][b] = double(core.nodes.size() + 1) - asc[i];
    }

    std::size_t third = (bins + 2) / 3;
    std::vector<HubDrift> out;
    for (auto& [fid, series] : ranks) {
        HubDrift h;
        h.family_id = fid;
        h.rank = series;
        double early = 0.0, late = 0.0;
        std::size_t n_early = 0, n_late = 0;
        for (std::size_t b = 0; b < third && b < bins; ++b) {
            if (is_missing(series[b])) continue;
            early += series[b];
            ++n_early;
        }
        for (std::size_t b = bins >= third ? bins - third : 0; b < bins; ++b) {
            if (is_missing(series[b])) continue;
            late += series[b];
            ++n_late;
        }
        if (n_early > 0 && n_late > 0) {
            h.defined = true;
            h.drift = late / double(n_late) - early / double(n_early);
            if (h.drift <= -drift_cutoff) h.classification = HubClass::RisingHub;
            else if (h.drift >= drift_cutoff) h.classification = HubClass::DecliningHub;
        }
        out.push_back(std::move(h));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bridge metrics

namespace detail {

// Bridge edges pair one core resident with one referential resident; returns
// the referential end first, core end second.
inline std::pair<const AtlasNode*, const AtlasNode*> bridge_ends(const SnapshotEdge& e,
                                                                 const AtlasGraph& backbone) {
    const AtlasNode& a = backbone.node(e.family_a);
    const AtlasNode& b = backbone.node(e.family_b);
    if (a.residency == Residency::Referential) return {&a, &b};
    return {&b, &a};
}

}  // namespace detail

// Share of the active bridge co-activation weight carried by edges whose
// referential endpoint head sits in the domain lexicon; 0 with no active
// bridge weight.
inline double bridge_strength(const SnapshotGraph& snap, const AtlasGraph& backbone,
                              const std::set<std::string>& domain_heads) {
    double total = 0.0, domain = 0.0;
    for (const SnapshotEdge& e : snap.edges) {
        if (e.layer != Layer::Bridge) continue;
        total += e.weight;
        auto [ref, core] = detail::bridge_ends(e, backbone);
        if (domain_heads.count(ref->head)) domain += e.weight;
    }
    return total > 0 ? domain / total : 0.0;
}

// Normalized Shannon entropy of the field distribution of the core endpoints
// reached by the domain's active bridge edges. One field (or none) -> 0;
// uniform over the observed fields -> 1.
inline double target_dispersion(const SnapshotGraph& snap, const AtlasGraph& backbone,
                                const std::set<std::string>& domain_heads,
                                const std::map<std::string, FieldLabel>& core_field) {
    std::map<FieldLabel, double> counts;
    for (const SnapshotEdge& e : snap.edges) {
        if (e.layer != Layer::Bridge) continue;
        auto [ref, core] = detail::bridge_ends(e, backbone);
        if (!domain_heads.count(ref->head)) continue;
        auto fit = core_field.find(core->family_id);
        FieldLabel field = fit != core_field.end() ? fit->second : FieldLabel::MixedField;
        counts[field] += 1.0;
    }
    if (counts.size() < 2) return 0.0;
    double total = 0.0;
    for (const auto& [field, c] : counts) total += c;
    double h = 0.0;
    for (const auto& [field, c] : counts) {
        double p = c / total;
        h -= p * std::log(p);
    }
    return h / std::log(double(counts.size()));
}

// ---------------------------------------------------------------------------
// Deltas and the permutation null

// Mean over the last ceil(B/3) bins minus mean over the first ceil(B/3).
inline double late_minus_early(const std::vector<double>& series) {
    if (series.empty()) return 0.0;
    std::size_t third = (series.size() + 2) / 3;
    double early = 0.0, late = 0.0;
    for (std::size_t i = 0; i < third; ++i) early += series[i];
    for (std::size_t i = series.size() - third; i < series.size(); ++i) late += series[i];
    return (late - early) / double(third);
}

struct PermutationTails {
    int n_perms = 0;
    double observed = 0.0;
    double upper = 1.0;  // share of permutations (observed included) >= observed
    double lower = 1.0;
};

// Permute the bin order of the stored per-bin values and recompute the delta.
// Both tails include the identity arrangement, so they are never below
// 1/(n_perms+1).
inline PermutationTails permutation_null(const std::vector<double>& series, int n_perms,
                                         std::uint64_t seed, const std::string& name) {
    if (n_perms < 1) throw ValidationError("permutation null needs n_perms >= 1");
    PermutationTails tails;
    tails.n_perms = n_perms;
    tails.observed = late_minus_early(series);
    auto rng = substream(seed, "perm:" + name);
    std::vector<double> shuffled = series;
    int ge = 0, le = 0;
    for (int p = 0; p < n_perms; ++p) {
        shuffle(shuffled, rng);
        double delta = late_minus_early(shuffled);
        if (delta >= tails.observed) ++ge;
        if (delta <= tails.observed) ++le;
    }
    tails.upper = double(1 + ge) / double(n_perms + 1);
    tails.lower = double(1 + le) / double(n_perms + 1);
    return tails;
}

// ---------------------------------------------------------------------------
// Variant sweep

struct VariantMetrics {
    VariantName variant = VariantName::Base;
    std::vector<double> core_modularity;  // per bin
    std::vector<double> cross_link;
    std::vector<double> centralization;
    std::vector<double> courtly_bridge;
    std::vector<double> sacred_bridge;
    double delta_modularity = 0.0;
    double delta_cross_link = 0.0;
    double delta_centralization = 0.0;
    double delta_courtly = 0.0;
    double delta_sacred = 0.0;
};

inline VariantMetrics variant_metrics(const SnapshotSet& set, const AtlasGraph& backbone,
                                      const std::set<std::string>& courtly_heads,
                                      const std::set<std::string>& sacred_heads) {
    VariantMetrics m;
    m.variant = set.variant;
    for (const SnapshotGraph& snap : set.snapshots) {
        m.core_modularity.push_back(snapshot_core_modularity(snap, backbone));
        m.cross_link.push_back(cross_link_ratio(snap));
        m.centralization.push_back(snapshot_centralization(snap, backbone));
        m.courtly_bridge.push_back(bridge_strength(snap, backbone, courtly_heads));
        m.sacred_bridge.push_back(bridge_strength(snap, backbone, sacred_heads));
    }
    m.delta_modularity = late_minus_early(m.core_modularity);
    m.delta_cross_link = late_minus_early(m.cross_link);
    m.delta_centralization = late_minus_early(m.centralization);
    m.delta_courtly = late_minus_early(m.courtly_bridge);
    m.delta_sacred = late_minus_early(m.sacred_bridge);
    return m;
}

struct MetricSupport {
    int positive = 0;  // variants with delta above the flat band
    int negative = 0;
    int flat = 0;
    int agree_with_base = 0;  // variants sharing the base variant's direction
};

struct SweepSummary {
    std::vector<VariantMetrics> variants;  // standard order: see standard_variants()
    std::map<std::string, MetricSupport> support;  // metric name -> direction counts
};

namespace detail {

inline int delta_direction(double delta, double flat_epsilon) {
    if (delta > flat_epsilon) return 1;
    if (delta < -flat_epsilon) return -1;
    return 0;
}

}  // namespace detail

inline SweepSummary robustness_sweep(const DynamicsTable& table, const AtlasGraph& backbone,
                                     const AtlasParams& params,
                                     const std::set<std::string>& courtly_heads,
                                     const std::set<std::string>& sacred_heads,
                                     double flat_epsilon = 0.005) {
    SweepSummary sweep;
    for (const VariantSpec& spec : standard_variants()) {
        SnapshotSet set = build_snapshots(table, backbone, params, spec);
        sweep.variants.push_back(variant_metrics(set, backbone, courtly_heads, sacred_heads));
    }
    const VariantMetrics& base = sweep.variants[1];
    auto tally = [&](const std::string& metric, auto delta_of) {
        MetricSupport s;
        int base_dir = detail::delta_direction(delta_of(base), flat_epsilon);
        for (const VariantMetrics& v : sweep.variants) {
            int dir = detail::delta_direction(delta_of(v), flat_epsilon);
            if (dir > 0) ++s.positive;
            else if (dir < 0) ++s.negative;
            else ++s.flat;
            if (dir == base_dir) ++s.agree_with_base;
        }
        sweep.support[metric] = s;
    };
    tally("core_modularity", [](const VariantMetrics& v) { return v.delta_modularity; });
    tally("cross_link_ratio", [](const VariantMetrics& v) { return v.delta_cross_link; });
    tally("degree_centralization",
          [](const VariantMetrics& v) { return v.delta_centralization; });
    tally("courtly_bridge_strength", [](const VariantMetrics& v) { return v.delta_courtly; });
    tally("sacred_bridge_strength", [](const VariantMetrics& v) { return v.delta_sacred; });
    return sweep;
}

// ---------------------------------------------------------------------------
// Export

inline void write_variant_metrics_csv(const std::vector<VariantMetrics>& variants,
                                      std::ostream& os) {
    CsvWriter w(os);
    w.row({"variant", "bin", "core_modularity", "cross_link_ratio", "degree_centralization",
           "courtly_bridge_strength", "sacred_bridge_strength"});
    for (const VariantMetrics& m : variants)
        for (std::size_t b = 0; b < m.core_modularity.size(); ++b)
            w.row({variant_label(m.variant), std::to_string(b),
                   format_fixed(m.core_modularity[b]), format_fixed(m.cross_link[b]),
                   format_fixed(m.centralization[b]), format_fixed(m.courtly_bridge[b]),
                   format_fixed(m.sacred_bridge[b])});
}

inline void write_snapshot_edges_csv(const SnapshotSet& set, std::ostream& os) {
    CsvWriter w(os);
    w.row({"bin", "layer", "family_a", "family_b", "weight"});
    for (const SnapshotGraph& snap : set.snapshots)
        for (const SnapshotEdge& e : snap.edges)
            w.row({std::to_string(snap.bin_id), layer_name(e.layer), e.family_a, e.family_b,
                   format_fixed(e.weight)});
}

}  // namespace symatlas
