#pragma once
// Weighted greedy modularity on the core graph, anchor-lexicon field labels,
// and field-level stability diagnostics against snapshot partitions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "symatlas/atlas.hpp"
#include "symatlas/csv.hpp"
#include "symatlas/text.hpp"

namespace symatlas {

// ---------------------------------------------------------------------------
// Weighted undirected graph

struct WeightedGraph {
    std::vector<std::string> nodes;  // slot -> id, insertion order
    std::map<std::string, std::size_t> index;
    std::map<std::pair<std::size_t, std::size_t>, double> edges;  // (i < j) -> weight

    std::size_t ensure_node(const std::string& id) {
        auto it = index.find(id);
        if (it != index.end()) return it->second;
        index[id] = nodes.size();
        nodes.push_back(id);
        return nodes.size() - 1;
    }

    void add_edge(const std::string& a, const std::string& b, double w) {
        if (a == b) return;
        std::size_t i = ensure_node(a), j = ensure_node(b);
        if (i > j) std::swap(i, j);
        edges[{i, j}] += w;
    }

    double total_weight() const {
        double m = 0;
        for (const auto& [k, w] : edges) m += w;
        return m;
    }

    std::vector<double> strengths() const {
        std::vector<double> s(nodes.size(), 0.0);
        for (const auto& [k, w] : edges) {
            s[k.first] += w;
            s[k.second] += w;
        }
        return s;
    }
};

// The modularity substrate: core-layer edges weighted by their gate score,
// with every core resident present even when isolated.
inline WeightedGraph core_graph(const AtlasGraph& atlas) {
    WeightedGraph g;
    for (const AtlasNode& nd : atlas.nodes)
        if (nd.residency == Residency::Core) g.ensure_node(nd.family_id);
    for (const EdgeScoreBreakdown& e : atlas.edges)
        if (e.layer == Layer::Core) g.add_edge(e.family_a, e.family_b, e.score);
    return g;
}

// ---------------------------------------------------------------------------
// Modularity

struct CommunityPartition {
    std::map<std::string, int> community;  // node -> community index
    double q = 0;

    int n_communities() const {
        int n = 0;
        for (const auto& [node, c] : community) n = std::max(n, c + 1);
        return n;
    }

    std::map<int, std::set<std::string>> groups() const {
        std::map<int, std::set<std::string>> g;
        for (const auto& [node, c] : community) g[c].insert(node);
        return g;
    }
};

// Q = sum_c (within_c / 2m - (total_c / 2m)^2), weighted Newman form.
inline double modularity(const WeightedGraph& g, const std::map<std::string, int>& community) {
    const double m = g.total_weight();
    if (m <= 0) return 0.0;
    const double two_m = 2.0 * m;
    std::map<int, double> within, total;  // within holds both edge directions
    std::vector<double> s = g.strengths();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) total[community.at(g.nodes[i])] += s[i];
    for (const auto& [k, w] : g.edges) {
        int ca = community.at(g.nodes[k.first]);
        int cb = community.at(g.nodes[k.second]);
        if (ca == cb) within[ca] += 2.0 * w;
    }
    double q = 0;
    for (const auto& [c, tot] : total) {
        auto it = within.find(c);
        double in = it == within.end() ? 0.0 : it->second;
        q += in / two_m - (tot / two_m) * (tot / two_m);
    }
    return q;
}

// Per-community share of Q, for the export table.
inline std::map<int, double> modularity_contributions(const WeightedGraph& g,
                                                      const std::map<std::string, int>& community) {
    std::map<int, double> out;
    const double m = g.total_weight();
    if (m <= 0) {
        for (const auto& [node, c] : community) out[c] = 0.0;
        return out;
    }
    const double two_m = 2.0 * m;
    std::map<int, double> within, total;
    std::vector<double> s = g.strengths();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) total[community.at(g.nodes[i])] += s[i];
    for (const auto& [k, w] : g.edges) {
        int ca = community.at(g.nodes[k.first]);
        int cb = community.at(g.nodes[k.second]);
        if (ca == cb) within[ca] += 2.0 * w;
    }
    for (const auto& [c, tot] : total) {
        auto it = within.find(c);
        double in = it == within.end() ? 0.0 : it->second;
        out[c] = in / two_m - (tot / two_m) * (tot / two_m);
    }
    return out;
}

// Agglomerative merge scheduler: start from singletons and repeatedly apply
// the connected pair with the largest positive modularity gain. Communities
// carry the lexicographically smallest member id as their label, and gain
// ties resolve toward the smallest label pair. The reported Q is recomputed
// from the final assignment rather than accumulated.
inline CommunityPartition greedy_modularity(const WeightedGraph& g) {
    CommunityPartition part;
    if (g.nodes.empty()) return part;
    const double m = g.total_weight();

    // label -> community state
    std::map<std::string, double> tot;                          // strength sum
    std::map<std::string, std::string> member_community;        // node -> label
    std::map<std::pair<std::string, std::string>, double> between;  // label pair -> weight
    std::vector<double> s = g.strengths();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        member_community[g.nodes[i]] = g.nodes[i];
        tot[g.nodes[i]] = s[i];
    }
    for (const auto& [k, w] : g.edges) {
        std::string a = g.nodes[k.first], b = g.nodes[k.second];
        if (b < a) std::swap(a, b);
        between[{a, b}] += w;
    }

    if (m > 0) {
        const double two_m = 2.0 * m;
        while (true) {
            double best_gain = 0;
            std::pair<std::string, std::string> best_pair;
            bool found = false;
            for (const auto& [pair, w] : between) {
                double gain =
                    2.0 * (w / two_m - (tot.at(pair.first) / two_m) * (tot.at(pair.second) / two_m));
                if (gain <= 0) continue;
                if (!found || gain > best_gain ||
                    (gain == best_gain && pair < best_pair)) {
                    best_gain = gain;
                    best_pair = pair;
                    found = true;
                }
            }
            if (!found) break;

            const std::string keep = best_pair.first;   // lexicographically smaller
            const std::string gone = best_pair.second;
            for (auto& [node, label] : member_community)
                if (label == gone) label = keep;
            tot[keep] += tot[gone];
            tot.erase(gone);
            std::map<std::pair<std::string, std::string>, double> next;
            for (const auto& [pair, w] : between) {
                std::string a = pair.first == gone ? keep : pair.first;
                std::string b = pair.second == gone ? keep : pair.second;
                if (a == b) continue;  // absorbed internal weight
                if (b < a) std::swap(a, b);
                next[{a, b}] += w;
            }
            between = std::move(next);
        }
    }

    // number communities by sorted label
    std::map<std::string, int> label_index;
    for (const auto& [node, label] : member_community) label_index[label];  // collect
    int next_id = 0;
    for (auto& [label, id] : label_index) id = next_id++;
    for (const auto& [node, label] : member_community)
        part.community[node] = label_index.at(label);
    part.q = modularity(g, part.community);
    return part;
}

// ---------------------------------------------------------------------------
// Field labels

enum class FieldLabel {
    WineTavernRitual,
    FloralVegetal,
    BodyBeloved,
    LightFire,
    WaterSea,
    AsceticMystical,
    CourtlyBridge,
    SacredPropheticBridge,
    MixedField,
};

inline constexpr std::array<FieldLabel, 8> kAnchorFields = {
    FieldLabel::WineTavernRitual, FieldLabel::FloralVegetal,
    FieldLabel::BodyBeloved,      FieldLabel::LightFire,
    FieldLabel::WaterSea,         FieldLabel::AsceticMystical,
    FieldLabel::CourtlyBridge,    FieldLabel::SacredPropheticBridge,
};

inline const char* field_label_name(FieldLabel f) {
    switch (f) {
        case FieldLabel::WineTavernRitual: return "wine_tavern_ritual";
        case FieldLabel::FloralVegetal: return "floral_vegetal";
        case FieldLabel::BodyBeloved: return "body_beloved";
        case FieldLabel::LightFire: return "light_fire";
        case FieldLabel::WaterSea: return "water_sea";
        case FieldLabel::AsceticMystical: return "ascetic_mystical";
        case FieldLabel::CourtlyBridge: return "courtly_bridge";
        case FieldLabel::SacredPropheticBridge: return "sacred_prophetic_bridge";
        case FieldLabel::MixedField: return "mixed_field";
    }
    return "";
}

using AnchorLexicons = std::map<FieldLabel, std::set<std::string>>;

// The eight anchor files live under one directory with fixed names.
inline AnchorLexicons load_anchor_lexicons(const std::string& dir) {
    static const std::map<FieldLabel, const char*> files = {
        {FieldLabel::WineTavernRitual, "wine_tavern.txt"},
        {FieldLabel::FloralVegetal, "floral_vegetal.txt"},
        {FieldLabel::BodyBeloved, "body_beloved.txt"},
        {FieldLabel::LightFire, "light_fire.txt"},
        {FieldLabel::WaterSea, "water_sea.txt"},
        {FieldLabel::AsceticMystical, "ascetic_mystical.txt"},
        {FieldLabel::CourtlyBridge, "courtly_bridge.txt"},
        {FieldLabel::SacredPropheticBridge, "sacred_prophetic.txt"},
    };
    AnchorLexicons out;
    for (const auto& [field, name] : files)
        out[field] = load_lexicon_set(dir + "/" + name);
    return out;
}

// One community's label: the unique field with the largest head overlap, and
// only when the overlap reaches two or one of the overlapping heads is a seed
// anchor; everything weaker stays mixed.
inline FieldLabel label_for_members(const std::set<std::string>& heads,
                                    const AnchorLexicons& anchors,
                                    const std::set<std::string>& seeds) {
    FieldLabel best = FieldLabel::MixedField;
    std::size_t best_count = 0;
    bool tied = false;
    for (FieldLabel f : kAnchorFields) {
        auto it = anchors.find(f);
        if (it == anchors.end()) continue;
        std::size_t count = 0;
        for (const std::string& h : heads) count += it->second.count(h);
        if (count > best_count) {
            best = f;
            best_count = count;
            tied = false;
        } else if (count == best_count && count > 0) {
            tied = true;
        }
    }
    if (best_count == 0 || tied) return FieldLabel::MixedField;
    if (best_count < 2) {
        bool seed_anchor = false;
        const std::set<std::string>& lex = anchors.at(best);
        for (const std::string& h : heads)
            if (lex.count(h) && seeds.count(h)) seed_anchor = true;
        if (!seed_anchor) return FieldLabel::MixedField;
    }
    return best;
}

// Labels every community of the partition using each member's family head.
inline std::map<int, FieldLabel> label_fields(const CommunityPartition& part,
                                              const std::map<std::string, std::string>& node_head,
                                              const AnchorLexicons& anchors,
                                              const std::set<std::string>& seeds) {
    std::map<int, std::set<std::string>> heads;
    for (const auto& [node, c] : part.community) {
        auto it = node_head.find(node);
        heads[c].insert(it == node_head.end() ? node : it->second);
    }
    std::map<int, FieldLabel> out;
    for (const auto& [c, hs] : heads) out[c] = label_for_members(hs, anchors, seeds);
    return out;
}

// ---------------------------------------------------------------------------
// Stability diagnostics

struct FieldStability {
    double mean_active_member_ratio = 0;
    double split_pressure = 0;
    std::map<FieldLabel, double> merge_pressure;
};

using StabilityDiagnostics = std::map<FieldLabel, FieldStability>;

// Per-field persistence across snapshot partitions. A node is active in a
// snapshot when the snapshot partition covers it. Each snapshot community is
// owned by the field supplying most of its active members (ties to the
// earlier enum value); merge pressure toward g is the share of a field's
// active members sitting in g-owned communities, so each member counts once
// and rows sum to at most one.
inline StabilityDiagnostics stability_diagnostics(
    const std::map<std::string, FieldLabel>& node_field,
    const std::vector<CommunityPartition>& snapshots) {
    std::map<FieldLabel, std::set<std::string>> field_members;
    for (const auto& [node, f] : node_field) field_members[f].insert(node);

    StabilityDiagnostics out;
    for (const auto& [f, members] : field_members) out[f];

    std::map<FieldLabel, std::size_t> covered;  // snapshots with active members
    for (const CommunityPartition& snap : snapshots) {
        // field composition of each snapshot community
        std::map<int, std::map<FieldLabel, std::size_t>> composition;
        for (const auto& [node, c] : snap.community) {
            auto it = node_field.find(node);
            if (it != node_field.end()) ++composition[c][it->second];
        }
        std::map<int, FieldLabel> owner;
        for (const auto& [c, counts] : composition) {
            FieldLabel best = FieldLabel::MixedField;
            std::size_t best_n = 0;
            for (const auto& [f, n] : counts)
                if (n > best_n || (n == best_n && n > 0 && f < best)) {
                    best = f;
                    best_n = n;
                }
            owner[c] = best;
        }

        for (const auto& [f, members] : field_members) {
            std::map<int, std::size_t> per_community;
            std::size_t active = 0;
            for (const std::string& node : members) {
                auto it = snap.community.find(node);
                if (it == snap.community.end()) continue;
                ++active;
                ++per_community[it->second];
            }
            FieldStability& fsb = out[f];
            fsb.mean_active_member_ratio +=
                members.empty() ? 0.0 : static_cast<double>(active) / members.size();
            if (active == 0) continue;
            ++covered[f];
            std::size_t largest = 0;
            for (const auto& [c, n] : per_community) largest = std::max(largest, n);
            fsb.split_pressure += 1.0 - static_cast<double>(largest) / active;
            for (const auto& [c, n] : per_community) {
                FieldLabel o = owner.at(c);
                if (o != f) fsb.merge_pressure[o] += static_cast<double>(n) / active;
            }
        }
    }

    for (auto& [f, fsb] : out) {
        if (!snapshots.empty()) fsb.mean_active_member_ratio /= snapshots.size();
        std::size_t n = covered.count(f) ? covered.at(f) : 0;
        if (n > 0) {
            fsb.split_pressure /= n;
            for (auto& [g, v] : fsb.merge_pressure) v /= n;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Export

inline void write_communities_csv(const WeightedGraph& g, const CommunityPartition& part,
                                  const std::map<int, FieldLabel>& labels,
                                  const std::map<std::string, std::string>& node_head,
                                  std::ostream& os) {
    CsvWriter w(os);
    w.row({"community_id", "field", "member_heads", "q_contribution"});
    std::map<int, double> contrib = modularity_contributions(g, part.community);
    for (const auto& [c, members] : part.groups()) {
        std::string heads;
        for (const std::string& node : members) {
            if (!heads.empty()) heads += " ";
            auto it = node_head.find(node);
            heads += it == node_head.end() ? node : it->second;
        }
        auto lit = labels.find(c);
        FieldLabel f = lit == labels.end() ? FieldLabel::MixedField : lit->second;
        w.row({"c" + std::to_string(c), field_label_name(f), heads,
               format_fixed(contrib.count(c) ? contrib.at(c) : 0.0)});
    }
}

}  // namespace symatlas
