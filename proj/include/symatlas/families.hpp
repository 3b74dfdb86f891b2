#pragma once
// Family induction: fold surface forms into canonical families through a
// staged composite score, with full traceability and head selection.
//
// A candidate exists only for relation-eligible pairs. Its score is
//   S = sum_r w_r * E_r  -  sum_q lambda_q * P_q
// over the eight evidence channels and four penalties. Acceptance walks the
// stage schedule in order, candidates sorted by descending score with a
// lexicographic tie-break; a form already absorbed never re-merges.

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "symatlas/csv.hpp"
#include "symatlas/errors.hpp"
#include "symatlas/evidence.hpp"
#include "symatlas/text.hpp"

namespace symatlas {

// ---------------------------------------------------------------------------
// Parameters

struct MergeWeights {
    // positive channel weights w_r, uniform by default
    double surface_relation = 0.125;
    double static_embedding = 0.125;
    double occurrence_embedding = 0.125;
    double contextual_overlap = 0.125;
    double cluster_overlap = 0.125;
    double seed_overlap = 0.125;
    double exemplar_overlap = 0.125;
    double head_cleanliness = 0.125;
    // penalty weights lambda_q, uniform by default
    double fragment_residue = 0.25;
    double function_word_contamination = 0.25;
    double genericity_noise = 0.25;
    double proper_name_inflation = 0.25;
};

struct SurfaceScores {
    double clitic_removal = 1.0;
    double suffix_strip = 0.9;
    double prefix_strip = 0.85;
    double near_head_extension = 0.7;
    double synthetic_head = 0.8;

    double score_for(RelationKind k) const {
        switch (k) {
            case RelationKind::CliticRemoval: return clitic_removal;
            case RelationKind::SuffixStrip: return suffix_strip;
            case RelationKind::PrefixStrip: return prefix_strip;
            case RelationKind::NearHeadExtension: return near_head_extension;
            case RelationKind::SyntheticHead: return synthetic_head;
            case RelationKind::None: return 0.0;
        }
        return 0.0;
    }
};

struct StageSchedule {
    struct Stage {
        std::string name;
        double threshold = 0;
        double min_head_cleanliness = 0;  // floor on the merged head
        double min_coherence = 0;         // floor on contextual overlap
    };
    std::vector<Stage> stages;

    // Strict early gates, relaxed in the second pass: the threshold drops,
    // the cleanliness floor disappears, and a small coherence floor guards
    // the relaxed stage instead.
    static StageSchedule defaults() {
        StageSchedule s;
        s.stages.push_back({"stage1", 0.55, 0.70, 0.0});
        s.stages.push_back({"stage2", 0.45, 0.0, 0.05});
        return s;
    }

    void validate() const {
        if (stages.empty()) throw ValidationError("stage schedule must not be empty");
        for (std::size_t i = 1; i < stages.size(); ++i)
            if (stages[i].threshold >= stages[i - 1].threshold)
                throw ValidationError("stage thresholds must strictly decrease");
    }
};

struct InductionParams {
    MergeWeights weights;
    SurfaceScores surface;
    StageSchedule schedule = StageSchedule::defaults();
    double synthetic_threshold = 0.55;  // joint floor for synthetic admission
    double head_floor = 0.70;           // observed head adequacy floor
};

// ---------------------------------------------------------------------------
// Candidates

struct MergeCandidate {
    std::string variant;  // the form being absorbed
    std::string base;     // merge target: attested base, or a synthetic stem
    bool synthetic = false;
    std::string partner;  // synthetic only: attested variant used for pair evidence
    RelationKind kind = RelationKind::None;
    std::string residue;
    EvidenceVector evidence;
    PenaltyVector penalty;
    double score = 0;
};

inline double score_merge(const MergeCandidate& c, const MergeWeights& w) {
    const EvidenceVector& e = c.evidence;
    const PenaltyVector& p = c.penalty;
    double pos = w.surface_relation * e.surface_relation +
                 w.static_embedding * e.static_embedding +
                 w.occurrence_embedding * e.occurrence_embedding +
                 w.contextual_overlap * e.contextual_overlap +
                 w.cluster_overlap * e.cluster_overlap + w.seed_overlap * e.seed_overlap +
                 w.exemplar_overlap * e.exemplar_overlap +
                 w.head_cleanliness * e.head_cleanliness;
    double neg = w.fragment_residue * p.fragment_residue +
                 w.function_word_contamination * p.function_word_contamination +
                 w.genericity_noise * p.genericity_noise +
                 w.proper_name_inflation * p.proper_name_inflation;
    return pos - neg;
}

namespace detail {

// All strings reachable from `form` by removing one affix layer or one
// trailing extension. Keyed enumeration keeps candidate generation linear in
// the affix tables rather than quadratic in the inventory.
inline std::set<std::string> candidate_bases(const std::string& form, const AffixTables& tables) {
    std::set<std::string> bases;
    const std::string& z = zwnj_utf8();
    std::string residue;

    for (const auto* inv : {&tables.clitics, &tables.suffixes}) {
        for (const std::string& e : *inv) {
            if (e.size() < form.size()) {
                std::string base = form.substr(0, form.size() - e.size());
                if (matches_appended(form, base, e, &residue)) bases.insert(base);
            }
            if (e.size() + z.size() < form.size()) {
                std::string base = form.substr(0, form.size() - e.size() - z.size());
                if (matches_appended(form, base, e, &residue)) bases.insert(base);
            }
        }
    }
    for (const std::string& e : tables.prefixes) {
        if (e.size() < form.size()) {
            std::string base = form.substr(e.size());
            if (matches_prepended(form, base, e, &residue)) bases.insert(base);
        }
        if (e.size() + z.size() < form.size()) {
            std::string base = form.substr(e.size() + z.size());
            if (matches_prepended(form, base, e, &residue)) bases.insert(base);
        }
    }
    // near-head extensions: peel one or two trailing characters
    std::vector<char32_t> cps = utf8_decode(form);
    for (std::size_t ext = 1; ext <= 2; ++ext) {
        if (cps.size() < ext + 3) break;  // stem must keep >= 3 characters
        std::vector<char32_t> head(cps.begin(), cps.end() - static_cast<std::ptrdiff_t>(ext));
        std::string base = utf8_encode(head);
        std::string tail = form.substr(base.size());
        if (tail.find(z) == std::string::npos && !tables.is_affix_entry(tail))
            bases.insert(base);
    }
    bases.erase(form);
    bases.erase(std::string());
    return bases;
}

}  // namespace detail

// Relation-eligible candidates: attested bases become ordinary merge
// candidates; unattested stems shared by at least two variants become
// synthetic candidates whose pair evidence comes from the strongest
// co-variant (the stem itself has no profile).
inline std::vector<MergeCandidate> generate_candidates(const EvidenceContext& ctx,
                                                       const InductionParams& params) {
    std::vector<MergeCandidate> out;
    std::map<std::string, std::set<std::string>> synthetic_groups;

    for (const std::string& form : ctx.attested) {
        for (const std::string& base : detail::candidate_bases(form, *ctx.tables)) {
            if (ctx.attested.count(base)) {
                SurfaceRelation rel = surface_relation(form, base, *ctx.tables);
                if (rel.kind == RelationKind::None) continue;
                MergeCandidate c;
                c.variant = form;
                c.base = base;
                c.kind = rel.kind;
                c.residue = rel.residue;
                c.evidence = pair_evidence(ctx, form, base);
                c.evidence.surface_relation = params.surface.score_for(rel.kind);
                c.evidence.head_cleanliness =
                    head_cleanliness(base, *ctx.tables, ctx.attested, *ctx.seeds);
                c.penalty = pair_penalties(ctx, form, base, base);
                c.score = score_merge(c, params.weights);
                out.push_back(std::move(c));
            } else if (cp_length(base) >= 3) {
                synthetic_groups[base].insert(form);
            }
        }
    }

    for (const auto& [stem, variants] : synthetic_groups) {
        if (variants.size() < 2) continue;
        double stem_clean = head_cleanliness(stem, *ctx.tables, ctx.attested, *ctx.seeds);
        for (const std::string& v : variants) {
            // partner: highest-frequency other variant, lexicographic tie-break
            std::string partner;
            std::size_t best_freq = 0;
            for (const std::string& w : variants) {
                if (w == v) continue;
                std::size_t f = ctx.profile(w).frequency;
                if (partner.empty() || f > best_freq || (f == best_freq && w < partner)) {
                    partner = w;
                    best_freq = f;
                }
            }
            SurfaceRelation rel = surface_relation(v, stem, *ctx.tables);
            MergeCandidate c;
            c.variant = v;
            c.base = stem;
            c.synthetic = true;
            c.partner = partner;
            c.kind = RelationKind::SyntheticHead;
            c.residue = rel.residue;
            c.evidence = pair_evidence(ctx, v, partner);
            c.evidence.surface_relation = params.surface.synthetic_head;
            c.evidence.head_cleanliness = stem_clean;
            c.penalty = pair_penalties(ctx, v, partner, partner);
            c.score = score_merge(c, params.weights);
            out.push_back(std::move(c));
        }
    }

    std::sort(out.begin(), out.end(), [](const MergeCandidate& a, const MergeCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.variant != b.variant) return a.variant < b.variant;
        return a.base < b.base;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Families

struct AcceptedMerge {
    std::string parent;
    RelationKind kind = RelationKind::None;
    std::string residue;
    double score = 0;
    std::string stage;
};

struct Family {
    std::string family_id;
    std::string head;
    bool synthetic = false;
    std::vector<std::string> members;  // sorted; includes head unless synthetic
    std::map<std::string, AcceptedMerge> chain;  // member -> accepted step
};

struct FamilySet {
    std::vector<Family> families;  // sorted by head
    std::map<std::string, std::string> form_to_family;  // form -> family_id

    const Family& by_id(const std::string& id) const {
        for (const Family& f : families)
            if (f.family_id == id) return f;
        throw std::out_of_range("no family " + id);
    }
    const Family& of_form(const std::string& form) const { return by_id(form_to_family.at(form)); }
};

namespace detail {

struct MergeState {
    std::map<std::string, std::string> parent;          // absorbed form -> parent
    std::set<std::string> absorbed;                     // forms no longer mergeable
    std::map<std::string, std::vector<std::string>> subtree;  // root -> absorbed members
    std::map<std::string, AcceptedMerge> accepted;      // variant -> step
    std::set<std::string> stems;                        // synthetic roots in play

    std::string root(std::string f) const {
        auto it = parent.find(f);
        while (it != parent.end()) {
            f = it->second;
            it = parent.find(f);
        }
        return f;
    }
};

}  // namespace detail

// Walk the stage schedule over pre-scored candidates. Gates shared by every
// stage: the variant is unabsorbed, the merge cannot cycle, and the merged
// family's head stays strictly cleaner than its two highest-frequency
// variants. Stage-specific gates: the score threshold, a head-cleanliness
// floor (stage 1), and a contextual-coherence floor (stage 2).
inline detail::MergeState staged_accept(const std::vector<MergeCandidate>& candidates,
                                        const EvidenceContext& ctx,
                                        const InductionParams& params) {
    params.schedule.validate();
    detail::MergeState st;
    std::map<std::string, double> clean_cache;
    auto cleanliness = [&](const std::string& f) {
        auto it = clean_cache.find(f);
        if (it != clean_cache.end()) return it->second;
        double c = head_cleanliness(f, *ctx.tables, ctx.attested, *ctx.seeds);
        clean_cache[f] = c;
        return c;
    };
    // Under a synthetic hypothesis the stem counts as attested, so variants
    // peel against it; otherwise opaque variants would tie the stem at 1 and
    // the strict gate could never pass.
    auto variant_cleanliness = [&](const std::string& f, const MergeCandidate& c) {
        if (!c.synthetic) return cleanliness(f);
        std::set<std::string> attested_plus = ctx.attested;
        attested_plus.insert(c.base);
        return head_cleanliness(f, *ctx.tables, attested_plus, *ctx.seeds);
    };

    for (const StageSchedule::Stage& stage : params.schedule.stages) {
        for (const MergeCandidate& c : candidates) {
            if (c.score < stage.threshold) continue;
            if (st.absorbed.count(c.variant)) continue;
            std::string head = st.root(c.base);
            if (head == c.variant) continue;

            // prospective members other than the head
            std::vector<std::string> variants;
            auto push_sub = [&](const std::string& r) {
                auto it = st.subtree.find(r);
                if (it != st.subtree.end())
                    variants.insert(variants.end(), it->second.begin(), it->second.end());
            };
            push_sub(head);
            variants.push_back(c.variant);
            push_sub(c.variant);

            // two highest-frequency variants carry the cleanliness gate
            std::sort(variants.begin(), variants.end(),
                      [&](const std::string& a, const std::string& b) {
                          std::size_t fa = ctx.profile(a).frequency;
                          std::size_t fb = ctx.profile(b).frequency;
                          if (fa != fb) return fa > fb;
                          return a < b;
                      });
            double head_clean = cleanliness(head);
            double max_variant_clean = 0;
            for (std::size_t i = 0; i < variants.size() && i < 2; ++i)
                max_variant_clean =
                    std::max(max_variant_clean, variant_cleanliness(variants[i], c));
            if (!(head_clean > max_variant_clean)) continue;
            if (head_clean < stage.min_head_cleanliness) continue;
            if (c.evidence.contextual_overlap < stage.min_coherence) continue;

            st.parent[c.variant] = c.base;
            st.absorbed.insert(c.variant);
            if (c.synthetic) st.stems.insert(c.base);
            auto& bucket = st.subtree[head];
            bucket.push_back(c.variant);
            auto moved = st.subtree.find(c.variant);
            if (moved != st.subtree.end()) {
                bucket.insert(bucket.end(), moved->second.begin(), moved->second.end());
                st.subtree.erase(moved);
            }
            st.accepted[c.variant] =
                AcceptedMerge{c.base, c.kind, c.residue, c.score, stage.name};
        }
    }
    return st;
}

namespace detail {

inline std::string longest_common_stem(const std::vector<std::string>& forms) {
    if (forms.empty()) return {};
    std::vector<char32_t> lcp = utf8_decode(forms[0]);
    for (const std::string& f : forms) {
        std::vector<char32_t> cps = utf8_decode(f);
        std::size_t n = 0;
        while (n < lcp.size() && n < cps.size() && lcp[n] == cps[n]) ++n;
        lcp.resize(n);
    }
    while (!lcp.empty() && lcp.back() == kZwnj) lcp.pop_back();
    return utf8_encode(lcp);
}

}  // namespace detail

// Resolve heads, apply the synthetic admission rule, and freeze the family
// set. A chain's root is the head when it is clean enough; a dirty root with
// at least two variants jointly clearing the synthetic threshold yields a
// synthetic head labeled by the longest common stem; otherwise the family
// dissolves back to singletons.
inline FamilySet build_families(const detail::MergeState& state, const EvidenceContext& ctx,
                                const InductionParams& params) {
    std::map<std::string, std::vector<std::string>> groups;  // root -> absorbed members
    for (const std::string& form : ctx.attested) {
        std::string r = state.root(form);
        if (r != form) groups[r].push_back(form);
        else groups.emplace(r, std::vector<std::string>());
    }

    std::vector<Family> families;
    auto add_singleton = [&](const std::string& form) {
        Family f;
        f.head = form;
        f.members = {form};
        families.push_back(std::move(f));
    };

    for (auto& [root, absorbed] : groups) {
        std::sort(absorbed.begin(), absorbed.end());
        const bool stem_root = state.stems.count(root) != 0;

        if (!stem_root && absorbed.empty()) {
            add_singleton(root);
            continue;
        }

        auto qualifying = [&](bool include_all) {
            int n = 0;
            for (const std::string& m : absorbed) {
                auto it = state.accepted.find(m);
                if (it == state.accepted.end()) continue;
                if (include_all || it->second.score >= params.synthetic_threshold) ++n;
            }
            return n;
        };

        Family f;
        bool dissolve = false;
        if (stem_root) {
            // stems are admitted only when two or more variants jointly clear
            // the synthetic threshold
            if (qualifying(false) >= 2) {
                f.head = root;
                f.synthetic = true;
                f.members = absorbed;
            } else {
                dissolve = true;
            }
        } else {
            double root_clean = head_cleanliness(root, *ctx.tables, ctx.attested, *ctx.seeds);
            if (root_clean >= params.head_floor) {
                f.head = root;
                f.members = absorbed;
                f.members.push_back(root);
                std::sort(f.members.begin(), f.members.end());
            } else if (qualifying(false) >= 2) {
                std::vector<std::string> all = absorbed;
                all.push_back(root);
                std::string stem = detail::longest_common_stem(all);
                if (stem == root) {
                    // the common stem is the observed root itself; the joint
                    // variant evidence admits the family under that head
                    f.head = root;
                    f.members = all;
                    std::sort(f.members.begin(), f.members.end());
                } else if (cp_length(stem) >= 3) {
                    f.head = stem;
                    f.synthetic = true;
                    f.members = all;
                    std::sort(f.members.begin(), f.members.end());
                } else {
                    dissolve = true;
                }
            } else {
                dissolve = true;
            }
        }

        if (dissolve) {
            if (!stem_root) add_singleton(root);
            for (const std::string& m : absorbed) add_singleton(m);
            continue;
        }

        for (const std::string& m : f.members) {
            auto it = state.accepted.find(m);
            if (it != state.accepted.end()) {
                f.chain[m] = it->second;
            } else if (f.synthetic && m != f.head) {
                // a promoted root joins its own family under the new stem
                f.chain[m] = AcceptedMerge{f.head, RelationKind::SyntheticHead, "", 0.0,
                                           "promoted"};
            }
        }
        families.push_back(std::move(f));
    }

    std::sort(families.begin(), families.end(), [](const Family& a, const Family& b) {
        if (a.head != b.head) return a.head < b.head;
        return a.synthetic < b.synthetic;
    });

    FamilySet fs;
    for (std::size_t i = 0; i < families.size(); ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "f%04zu", i);
        families[i].family_id = buf;
        for (const std::string& m : families[i].members)
            fs.form_to_family[m] = families[i].family_id;
    }
    fs.families = std::move(families);
    return fs;
}

inline FamilySet induce_families(const EvidenceContext& ctx, const InductionParams& params,
                                 const std::vector<MergeCandidate>& candidates) {
    return build_families(staged_accept(candidates, ctx, params), ctx, params);
}

inline FamilySet induce_families(const EvidenceContext& ctx, const InductionParams& params) {
    return induce_families(ctx, params, generate_candidates(ctx, params));
}

// ---------------------------------------------------------------------------
// Traceability

struct TraceRow {
    std::string token;
    std::string family_id;
    std::string head;
    RelationKind kind = RelationKind::None;
    double score = 0;
    bool merged = false;  // false for family roots, which have no merge step
    std::string stage;    // "root" for heads and singletons
};

struct TraceTable {
    std::vector<TraceRow> rows;  // one per retained form, sorted by token
    std::map<std::string, std::string> token_to_family;
};

inline TraceTable build_trace(const FamilySet& fs) {
    TraceTable t;
    for (const Family& f : fs.families) {
        for (const std::string& m : f.members) {
            TraceRow row;
            row.token = m;
            row.family_id = f.family_id;
            row.head = f.head;
            auto it = f.chain.find(m);
            if (it != f.chain.end()) {
                row.kind = it->second.kind;
                row.score = it->second.score;
                row.merged = true;
                row.stage = it->second.stage;
            } else {
                row.kind = RelationKind::None;
                row.stage = "root";
            }
            t.rows.push_back(std::move(row));
        }
    }
    std::sort(t.rows.begin(), t.rows.end(),
              [](const TraceRow& a, const TraceRow& b) { return a.token < b.token; });
    for (const TraceRow& r : t.rows) t.token_to_family[r.token] = r.family_id;
    return t;
}

inline void write_trace_csv(const TraceTable& t, const std::string& path) {
    CsvWriter csv(path);
    csv.row({"token", "family_id", "head", "relation_kind", "score", "stage"});
    for (const TraceRow& r : t.rows) {
        csv.row({r.token, r.family_id, r.head, relation_kind_name(r.kind),
                 r.merged ? format_fixed(r.score) : "", r.stage});
    }
}

struct TraceReport {
    bool total = false;  // every retained form in exactly one family
    std::size_t n_raw_forms = 0;
    std::size_t n_families = 0;
    double reduction = 0;  // 1 - families/forms
    double median_family_size = 0;
    double singleton_share = 0;
    std::size_t seeds_present = 0;
    std::size_t seeds_recovered = 0;  // seeds surviving as family heads
    double affix_absorption_share = 0;  // absorbed via clitic/suffix/prefix rules
};

inline TraceReport validate_traceability(const FamilySet& fs,
                                         const std::set<std::string>& inventory,
                                         const std::set<std::string>& seeds) {
    TraceReport r;
    r.n_raw_forms = inventory.size();
    r.n_families = fs.families.size();

    std::map<std::string, int> seen;
    for (const Family& f : fs.families)
        for (const std::string& m : f.members) ++seen[m];
    r.total = true;
    for (const std::string& form : inventory)
        if (seen[form] != 1) r.total = false;
    for (const auto& [form, n] : seen)
        if (n != 1 || !inventory.count(form)) r.total = false;

    if (r.n_raw_forms)
        r.reduction = 1.0 - static_cast<double>(r.n_families) / static_cast<double>(r.n_raw_forms);

    std::vector<std::size_t> sizes;
    std::size_t singletons = 0, absorbed = 0, affix_absorbed = 0;
    for (const Family& f : fs.families) {
        sizes.push_back(f.members.size());
        if (f.members.size() == 1) ++singletons;
        for (const auto& [m, step] : f.chain) {
            ++absorbed;
            if (step.kind == RelationKind::CliticRemoval || step.kind == RelationKind::SuffixStrip ||
                step.kind == RelationKind::PrefixStrip)
                ++affix_absorbed;
        }
    }
    std::sort(sizes.begin(), sizes.end());
    if (!sizes.empty()) {
        std::size_t n = sizes.size();
        r.median_family_size = n % 2 ? static_cast<double>(sizes[n / 2])
                                     : (static_cast<double>(sizes[n / 2 - 1]) +
                                        static_cast<double>(sizes[n / 2])) /
                                           2.0;
        r.singleton_share = static_cast<double>(singletons) / static_cast<double>(n);
    }
    if (absorbed)
        r.affix_absorption_share =
            static_cast<double>(affix_absorbed) / static_cast<double>(absorbed);

    std::set<std::string> heads;
    for (const Family& f : fs.families) heads.insert(f.head);
    for (const std::string& s : seeds) {
        if (!inventory.count(s)) continue;
        ++r.seeds_present;
        if (heads.count(s)) ++r.seeds_recovered;
    }
    return r;
}

}  // namespace symatlas
