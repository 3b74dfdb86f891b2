#pragma once
// Evidence channels and penalties behind merge scoring and edge scoring:
// context profiles, count-based embeddings (PPMI plus truncated
// decomposition), overlap measures, a coarse k-means clustering, head
// cleanliness, and the four penalty components.
//
// Every similarity maps through max(0, cosine): identical directions score
// 1, orthogonal or opposed directions score 0, and zero vectors score 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symatlas/corpus.hpp"
#include "symatlas/errors.hpp"
#include "symatlas/rng.hpp"
#include "symatlas/text.hpp"

namespace symatlas {

// ---------------------------------------------------------------------------
// Tokenized corpus

// Flat, read-only view of every non-degenerate hemistich, tokenized once and
// shared by all downstream stages.
struct TokenizedCorpus {
    struct Hemi {
        std::size_t poem_idx = 0;
        std::size_t verse_idx = 0;
        int hemistich_idx = 0;
        std::vector<std::string> tokens;
    };
    std::vector<Hemi> hemistichs;
    std::map<std::string, std::size_t> frequency;
    std::size_t total_tokens = 0;
};

inline TokenizedCorpus tokenize_corpus(const CorpusStore& store) {
    TokenizedCorpus tc;
    for (std::size_t pi = 0; pi < store.poems.size(); ++pi) {
        const Poem& poem = store.poems[pi];
        for (std::size_t vi = 0; vi < poem.verses.size(); ++vi) {
            const Verse& verse = poem.verses[vi];
            if (verse.degenerate) continue;
            for (int hi = 0; hi < 2; ++hi) {
                TokenizedCorpus::Hemi h;
                h.poem_idx = pi;
                h.verse_idx = vi;
                h.hemistich_idx = hi;
                h.tokens = tokenize_hemistich(normalize_text(verse.hemistichs[hi]));
                for (const std::string& t : h.tokens) {
                    ++tc.frequency[t];
                    ++tc.total_tokens;
                }
                tc.hemistichs.push_back(std::move(h));
            }
        }
    }
    return tc;
}

// ---------------------------------------------------------------------------
// Context profiles

struct ContextProfile {
    std::map<std::string, double> context;  // neighbor -> distance-discounted weight
    std::set<std::string> verse_presence;   // "poem_id#verse" keys
    std::set<std::string> document_presence;
    std::set<std::string> poet_presence;
    std::size_t frequency = 0;
};

using ContextProfiles = std::map<std::string, ContextProfile>;

// Profiles for every form with frequency >= min_count. Context weight for a
// neighbor at distance d within the window is 1/d, accumulated over all
// occurrences; the window never crosses a hemistich boundary.
inline ContextProfiles build_context_profiles(const CorpusStore& store,
                                              const TokenizedCorpus& tc, int window,
                                              std::size_t min_count) {
    ContextProfiles profiles;
    for (const auto& [form, freq] : tc.frequency)
        if (freq >= min_count) profiles[form].frequency = freq;

    for (const TokenizedCorpus::Hemi& h : tc.hemistichs) {
        const Poem& poem = store.poems[h.poem_idx];
        std::string verse_key = poem.poem_id + "#" + std::to_string(h.verse_idx);
        for (std::size_t i = 0; i < h.tokens.size(); ++i) {
            auto it = profiles.find(h.tokens[i]);
            if (it == profiles.end()) continue;
            ContextProfile& p = it->second;
            p.verse_presence.insert(verse_key);
            p.document_presence.insert(poem.poem_id);
            p.poet_presence.insert(poem.poet_id);
            for (int d = 1; d <= window; ++d) {
                if (i >= static_cast<std::size_t>(d))
                    p.context[h.tokens[i - d]] += 1.0 / d;
                if (i + d < h.tokens.size())
                    p.context[h.tokens[i + d]] += 1.0 / d;
            }
        }
    }
    return profiles;
}

// ---------------------------------------------------------------------------
// Embeddings

inline double nonneg_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) dot += a[i] * b[i];
    for (double v : a) na += v * v;
    for (double v : b) nb += v * v;
    if (na <= 0 || nb <= 0) return 0.0;
    return std::max(0.0, dot / std::sqrt(na * nb));
}

struct EmbeddingSpace {
    std::vector<std::string> forms;  // sorted
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<double>> static_vec;
    std::vector<std::vector<double>> occ_mean;
    std::vector<double> occ_dispersion;

    bool has(const std::string& f) const { return index.count(f) != 0; }

    double similarity(const std::string& a, const std::string& b) const {
        auto ia = index.find(a), ib = index.find(b);
        if (ia == index.end() || ib == index.end()) return 0.0;
        return nonneg_cosine(static_vec[ia->second], static_vec[ib->second]);
    }
    double occurrence_similarity(const std::string& a, const std::string& b) const {
        auto ia = index.find(a), ib = index.find(b);
        if (ia == index.end() || ib == index.end()) return 0.0;
        return nonneg_cosine(occ_mean[ia->second], occ_mean[ib->second]);
    }
};

namespace detail {

// Positive PMI over the profiled inventory: cell (i, j) compares the joint
// context weight of form i with neighbor j against their marginals. Only
// profiled forms act as context dimensions.
inline Eigen::MatrixXd ppmi_matrix(const ContextProfiles& profiles,
                                   const std::vector<std::string>& forms,
                                   const std::map<std::string, std::size_t>& index) {
    const std::size_t n = forms.size();
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const ContextProfile& p = profiles.at(forms[i]);
        for (const auto& [neighbor, w] : p.context) {
            auto it = index.find(neighbor);
            if (it != index.end()) counts(i, it->second) += w;
        }
    }
    const double total = counts.sum();
    if (total <= 0) throw ValidationError("co-occurrence matrix is all zeros");

    Eigen::VectorXd row = counts.rowwise().sum();
    Eigen::VectorXd col = counts.colwise().sum();
    Eigen::MatrixXd ppmi = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (counts(i, j) <= 0 || row(i) <= 0 || col(j) <= 0) continue;
            double pmi = std::log(counts(i, j) * total / (row(i) * col(j)));
            if (pmi > 0) ppmi(i, j) = pmi;
        }
    }
    return ppmi;
}

}  // namespace detail

// Static vectors: rank-d truncated decomposition of the PPMI matrix M via the
// eigensystem of M*M^T; form i gets row i of U_d scaled by the square root of
// the singular values. Occurrence vectors: per occurrence, the average static
// vector of in-window neighbors; per form, their mean plus a dispersion
// (mean cosine distance of occurrence vectors from that mean).
inline EmbeddingSpace build_embeddings(const ContextProfiles& profiles,
                                       const TokenizedCorpus& tc, int window, int dim) {
    EmbeddingSpace space;
    for (const auto& [form, p] : profiles) {
        space.index[form] = space.forms.size();
        space.forms.push_back(form);
    }
    const std::size_t n = space.forms.size();
    if (n == 0) throw ValidationError("no profiled forms to embed");

    Eigen::MatrixXd m = detail::ppmi_matrix(profiles, space.forms, space.index);
    Eigen::MatrixXd gram = m * m.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("embedding eigendecomposition failed");

    // eigenvalues ascending from the solver; take the top min(dim, n)
    const int keep = std::min<int>(dim, static_cast<int>(n));
    space.static_vec.assign(n, std::vector<double>(dim, 0.0));
    for (int k = 0; k < keep; ++k) {
        int src = static_cast<int>(n) - 1 - k;
        double lambda = std::max(0.0, solver.eigenvalues()(src));
        double scale = std::pow(lambda, 0.25);  // sqrt of the singular value
        for (std::size_t i = 0; i < n; ++i)
            space.static_vec[i][k] = solver.eigenvectors()(i, src) * scale;
    }

    // occurrence pass
    std::vector<std::vector<double>> occ_sum(n, std::vector<double>(dim, 0.0));
    std::vector<std::vector<std::vector<double>>> occ_vecs(n);
    for (const TokenizedCorpus::Hemi& h : tc.hemistichs) {
        for (std::size_t i = 0; i < h.tokens.size(); ++i) {
            auto it = space.index.find(h.tokens[i]);
            if (it == space.index.end()) continue;
            std::vector<double> ctx(dim, 0.0);
            int found = 0;
            for (int d = 1; d <= window; ++d) {
                for (int sign : {-1, 1}) {
                    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + sign * d;
                    if (j < 0 || j >= static_cast<std::ptrdiff_t>(h.tokens.size())) continue;
                    auto jt = space.index.find(h.tokens[j]);
                    if (jt == space.index.end()) continue;
                    for (int k = 0; k < dim; ++k) ctx[k] += space.static_vec[jt->second][k];
                    ++found;
                }
            }
            if (!found) continue;
            for (int k = 0; k < dim; ++k) ctx[k] /= found;
            for (int k = 0; k < dim; ++k) occ_sum[it->second][k] += ctx[k];
            occ_vecs[it->second].push_back(std::move(ctx));
        }
    }
    space.occ_mean.assign(n, std::vector<double>(dim, 0.0));
    space.occ_dispersion.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (occ_vecs[i].empty()) continue;
        for (int k = 0; k < dim; ++k)
            space.occ_mean[i][k] = occ_sum[i][k] / static_cast<double>(occ_vecs[i].size());
        double dist = 0;
        for (const auto& v : occ_vecs[i]) dist += 1.0 - nonneg_cosine(v, space.occ_mean[i]);
        space.occ_dispersion[i] = dist / static_cast<double>(occ_vecs[i].size());
    }
    return space;
}

// ---------------------------------------------------------------------------
// Overlap measures

enum class OverlapChannel { Context, Verse, Document, Poet };

namespace detail {

inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const std::string& x : a) inter += b.count(x);
    std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline double weighted_jaccard(const std::map<std::string, double>& a,
                               const std::map<std::string, double>& b) {
    double num = 0, den = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            den += ia->second;
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            den += ib->second;
            ++ib;
        } else {
            num += std::min(ia->second, ib->second);
            den += std::max(ia->second, ib->second);
            ++ia;
            ++ib;
        }
    }
    return den <= 0 ? 1.0 : num / den;
}

}  // namespace detail

// Weighted Jaccard for the context channel, plain Jaccard on presence sets
// for the rest. Symmetric; overlap(a, a, any) = 1.
inline double overlap(const ContextProfile& a, const ContextProfile& b, OverlapChannel ch) {
    switch (ch) {
        case OverlapChannel::Context: return detail::weighted_jaccard(a.context, b.context);
        case OverlapChannel::Verse: return detail::jaccard(a.verse_presence, b.verse_presence);
        case OverlapChannel::Document:
            return detail::jaccard(a.document_presence, b.document_presence);
        case OverlapChannel::Poet: return detail::jaccard(a.poet_presence, b.poet_presence);
    }
    return 0.0;
}

// Jaccard over the top-m highest-weight contexts of each profile (weight
// descending, lexicographic tie-break).
inline double representative_context_overlap(const ContextProfile& a, const ContextProfile& b,
                                             std::size_t top_m) {
    auto top_set = [top_m](const ContextProfile& p) {
        std::vector<std::pair<std::string, double>> entries(p.context.begin(), p.context.end());
        std::stable_sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
            if (x.second != y.second) return x.second > y.second;
            return x.first < y.first;
        });
        std::set<std::string> s;
        for (std::size_t i = 0; i < entries.size() && i < top_m; ++i)
            s.insert(entries[i].first);
        return s;
    };
    return detail::jaccard(top_set(a), top_set(b));
}

// ---------------------------------------------------------------------------
// Clustering over the static embedding space

struct Clustering {
    std::vector<int> assignment;  // parallel to EmbeddingSpace::forms
    std::vector<std::vector<double>> centroids;
};

// Deterministic Lloyd iterations: centroids seeded from a named substream,
// ties broken toward the lowest centroid id, empty clusters reseeded to the
// point farthest from its centroid.
inline Clustering kmeans_embed(const EmbeddingSpace& space, int k, int iters,
                               std::uint64_t master_seed) {
    const std::size_t n = space.forms.size();
    const std::size_t dim = n ? space.static_vec[0].size() : 0;
    Clustering cl;
    cl.assignment.assign(n, 0);
    if (n == 0 || k <= 0) return cl;
    k = std::min<int>(k, static_cast<int>(n));

    auto rng = substream(master_seed, "kmeans-init");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    shuffle(order, rng);
    cl.centroids.assign(k, std::vector<double>(dim, 0.0));
    for (int c = 0; c < k; ++c) cl.centroids[c] = space.static_vec[order[c]];

    auto sqdist = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        return s;
    };

    for (int it = 0; it < iters; ++it) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sqdist(space.static_vec[i], cl.centroids[0]);
            for (int c = 1; c < k; ++c) {
                double d = sqdist(space.static_vec[i], cl.centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (cl.assignment[i] != best) {
                cl.assignment[i] = best;
                moved = true;
            }
        }
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < dim; ++d) sums[cl.assignment[i]][d] += space.static_vec[i][d];
            ++counts[cl.assignment[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // farthest point from its current centroid restarts the cluster
                std::size_t far = 0;
                double far_d = -1;
                for (std::size_t i = 0; i < n; ++i) {
                    double d = sqdist(space.static_vec[i], cl.centroids[cl.assignment[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                cl.centroids[c] = space.static_vec[far];
                cl.assignment[far] = c;
                moved = true;
                continue;
            }
            for (std::size_t d = 0; d < dim; ++d)
                cl.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
        if (!moved) break;
    }
    return cl;
}

// 1 when both forms share a cluster, otherwise the non-negative cosine of
// their cluster centroids.
inline double cluster_overlap(const EmbeddingSpace& space, const Clustering& cl,
                              const std::string& a, const std::string& b) {
    auto ia = space.index.find(a), ib = space.index.find(b);
    if (ia == space.index.end() || ib == space.index.end()) return 0.0;
    if (cl.centroids.empty()) return 0.0;
    int ca = cl.assignment[ia->second], cb = cl.assignment[ib->second];
    if (ca == cb) return 1.0;
    return nonneg_cosine(cl.centroids[ca], cl.centroids[cb]);
}

// ---------------------------------------------------------------------------
// Seed and exemplar association

inline std::set<std::string> load_lexicon_set(const std::string& path) {
    std::vector<std::string> v = load_inventory(path);
    return std::set<std::string>(v.begin(), v.end());
}

// The association set of a form under a lexicon: every lexicon entry that is
// the form itself or appears in its context profile.
inline std::set<std::string> lexicon_associations(const std::string& form,
                                                  const ContextProfile& profile,
                                                  const std::set<std::string>& lexicon) {
    std::set<std::string> assoc;
    if (lexicon.count(form)) assoc.insert(form);
    for (const auto& [neighbor, w] : profile.context)
        if (w > 0 && lexicon.count(neighbor)) assoc.insert(neighbor);
    return assoc;
}

// Fraction of shared associations (Jaccard); no associations on either side
// means no evidence, which scores 0.
inline double association_overlap(const std::string& form_a, const ContextProfile& pa,
                                  const std::string& form_b, const ContextProfile& pb,
                                  const std::set<std::string>& lexicon) {
    std::set<std::string> sa = lexicon_associations(form_a, pa, lexicon);
    std::set<std::string> sb = lexicon_associations(form_b, pb, lexicon);
    if (sa.empty() && sb.empty()) return 0.0;
    return detail::jaccard(sa, sb);
}

// ---------------------------------------------------------------------------
// Head cleanliness

// 1 minus the fraction of the form (in codepoints) explainable as affix
// residue. Residue layers peel only when the remainder stays attested, so an
// opaque stem scores 1 even if unattested. Seed forms are canonical heads by
// construction and always score 1; a form that is itself inventory material
// scores 0.
inline double head_cleanliness(const std::string& form, const AffixTables& tables,
                               const std::set<std::string>& attested,
                               const std::set<std::string>& seeds) {
    if (form.empty()) return 0.0;
    if (seeds.count(form)) return 1.0;
    if (tables.is_affix_entry(form)) return 0.0;

    const double total_len = static_cast<double>(cp_length(form));
    std::string rest = form;
    double residue_len = 0;

    auto attested_base = [&](const std::string& s, std::size_t min_cp) {
        return cp_length(s) >= min_cp && (attested.count(s) || seeds.count(s));
    };

    bool progressed = true;
    while (progressed) {
        progressed = false;
        std::string residue;
        // clitic and suffix tails, then prefix heads, longest entry first
        for (const auto* inv : {&tables.clitics, &tables.suffixes}) {
            for (const std::string& e : *inv) {
                if (e.size() >= rest.size()) continue;
                std::string base = rest.substr(0, rest.size() - e.size());
                if (detail::matches_appended(rest, base, e, &residue) && attested_base(base, 2)) {
                    residue_len += static_cast<double>(cp_length(residue));
                    rest = base;
                    progressed = true;
                    break;
                }
                const std::string& z = detail::zwnj_utf8();
                if (rest.size() > e.size() + z.size()) {
                    std::string base_z = rest.substr(0, rest.size() - e.size() - z.size());
                    if (detail::matches_appended(rest, base_z, e, &residue) &&
                        attested_base(base_z, 2)) {
                        residue_len += static_cast<double>(cp_length(residue));
                        rest = base_z;
                        progressed = true;
                        break;
                    }
                }
            }
            if (progressed) break;
        }
        if (progressed) continue;
        for (const std::string& e : tables.prefixes) {
            if (e.size() >= rest.size()) continue;
            std::string base = rest.substr(e.size());
            if (detail::matches_prepended(rest, base, e, &residue) && attested_base(base, 2)) {
                residue_len += static_cast<double>(cp_length(residue));
                rest = base;
                progressed = true;
                break;
            }
            const std::string& z = detail::zwnj_utf8();
            if (rest.size() > e.size() + z.size()) {
                std::string base_z = rest.substr(e.size() + z.size());
                if (detail::matches_prepended(rest, base_z, e, &residue) &&
                    attested_base(base_z, 2)) {
                    residue_len += static_cast<double>(cp_length(residue));
                    rest = base_z;
                    progressed = true;
                    break;
                }
            }
        }
        if (progressed) continue;
        // trailing extension of one or two characters over an attested stem
        std::vector<char32_t> cps = utf8_decode(rest);
        for (std::size_t ext = 1; ext <= 2 && cps.size() > ext; ++ext) {
            if (cps.size() - ext < 3) break;
            std::vector<char32_t> head(cps.begin(), cps.end() - static_cast<std::ptrdiff_t>(ext));
            std::string base = utf8_encode(head);
            std::string tail = rest.substr(base.size());
            if (tail.find(detail::zwnj_utf8()) == std::string::npos &&
                !tables.is_affix_entry(tail) && attested_base(base, 3)) {
                residue_len += static_cast<double>(ext);
                rest = base;
                progressed = true;
                break;
            }
        }
    }
    return std::max(0.0, 1.0 - residue_len / total_len);
}

// ---------------------------------------------------------------------------
// Genericity and penalties

struct EvidenceVector {
    double surface_relation = 0;
    double static_embedding = 0;
    double occurrence_embedding = 0;
    double contextual_overlap = 0;
    double cluster_overlap = 0;
    double seed_overlap = 0;
    double exemplar_overlap = 0;
    double head_cleanliness = 0;
};

struct PenaltyVector {
    double fragment_residue = 0;
    double function_word_contamination = 0;
    double genericity_noise = 0;
    double proper_name_inflation = 0;
};

// Shannon entropy of a weight bag, in nats.
inline double context_entropy(const std::map<std::string, double>& bag) {
    double total = 0;
    for (const auto& [k, w] : bag) total += w;
    if (total <= 0) return 0.0;
    double h = 0;
    for (const auto& [k, w] : bag) {
        if (w <= 0) continue;
        double p = w / total;
        h -= p * std::log(p);
    }
    return h;
}

// Genericity: normalized log frequency blended 50/50 with context entropy
// normalized by the log inventory size. High for frequent forms that spread
// over many contexts.
inline std::map<std::string, double> genericity_scores(const ContextProfiles& profiles) {
    std::map<std::string, double> out;
    if (profiles.empty()) return out;
    double max_log_freq = 0;
    for (const auto& [form, p] : profiles)
        max_log_freq = std::max(max_log_freq, std::log1p(static_cast<double>(p.frequency)));
    const double h_norm = std::log(std::max<std::size_t>(profiles.size(), 2));
    for (const auto& [form, p] : profiles) {
        double f = max_log_freq > 0
                       ? std::log1p(static_cast<double>(p.frequency)) / max_log_freq
                       : 0.0;
        double h = std::min(1.0, context_entropy(p.context) / h_norm);
        out[form] = 0.5 * f + 0.5 * h;
    }
    return out;
}

// Function-word contamination of one form: 1 for a listed function word,
// otherwise the share of its context weight sitting on listed words.
inline double function_word_contamination(const std::string& form, const ContextProfile& p,
                                          const std::set<std::string>& function_words) {
    if (function_words.count(form)) return 1.0;
    double total = 0, hit = 0;
    for (const auto& [neighbor, w] : p.context) {
        total += w;
        if (function_words.count(neighbor)) hit += w;
    }
    return total > 0 ? hit / total : 0.0;
}

// Fragment risk of using `base` as a merge target: full penalty when the
// base is unattested, graded penalty when it is very short.
inline double fragment_residue_penalty(const std::string& base,
                                       const std::set<std::string>& attested,
                                       const std::set<std::string>& seeds) {
    if (!attested.count(base) && !seeds.count(base)) return 1.0;
    std::size_t len = cp_length(base);
    if (len >= 3) return 0.0;
    if (len == 2) return 0.25;
    return 0.75;
}

// ---------------------------------------------------------------------------
// Bundled evidence inputs

// Everything the pairwise scorers need, frozen after construction. All
// pointers reference caller-owned state.
struct EvidenceContext {
    const ContextProfiles* profiles = nullptr;
    const EmbeddingSpace* space = nullptr;
    const Clustering* clustering = nullptr;
    const AffixTables* tables = nullptr;
    const std::set<std::string>* seeds = nullptr;
    const std::set<std::string>* exemplars = nullptr;
    const std::set<std::string>* function_words = nullptr;
    const std::set<std::string>* proper_names = nullptr;
    std::set<std::string> attested;             // profiled inventory
    std::map<std::string, double> genericity;   // per profiled form

    const ContextProfile& profile(const std::string& form) const {
        return profiles->at(form);
    }
    double genericity_of(const std::string& form) const {
        auto it = genericity.find(form);
        return it == genericity.end() ? 0.0 : it->second;
    }
};

inline EvidenceContext make_evidence_context(
    const ContextProfiles& profiles, const EmbeddingSpace& space, const Clustering& clustering,
    const AffixTables& tables, const std::set<std::string>& seeds,
    const std::set<std::string>& exemplars, const std::set<std::string>& function_words,
    const std::set<std::string>& proper_names) {
    EvidenceContext ctx;
    ctx.profiles = &profiles;
    ctx.space = &space;
    ctx.clustering = &clustering;
    ctx.tables = &tables;
    ctx.seeds = &seeds;
    ctx.exemplars = &exemplars;
    ctx.function_words = &function_words;
    ctx.proper_names = &proper_names;
    for (const auto& [form, p] : profiles) ctx.attested.insert(form);
    ctx.genericity = genericity_scores(profiles);
    return ctx;
}

// Positive channels between two attested forms. The surface and cleanliness
// components are filled by the caller, which knows the relation kind and the
// merge target.
inline EvidenceVector pair_evidence(const EvidenceContext& ctx, const std::string& a,
                                    const std::string& b) {
    EvidenceVector e;
    const ContextProfile& pa = ctx.profile(a);
    const ContextProfile& pb = ctx.profile(b);
    e.static_embedding = ctx.space->similarity(a, b);
    e.occurrence_embedding = ctx.space->occurrence_similarity(a, b);
    e.contextual_overlap = overlap(pa, pb, OverlapChannel::Context);
    e.cluster_overlap = cluster_overlap(*ctx.space, *ctx.clustering, a, b);
    e.seed_overlap = association_overlap(a, pa, b, pb, *ctx.seeds);
    e.exemplar_overlap = association_overlap(a, pa, b, pb, *ctx.exemplars);
    return e;
}

// Penalty components for a candidate pair. `merge_target` is the form whose
// fragment risk matters: the base for ordinary merges, the attested partner
// variant for synthetic ones (the stem is unattested by construction and is
// governed by the joint synthetic threshold instead). Genericity noise takes
// the smaller of the two scores: a merge is generic noise only when neither
// side anchors it.
inline PenaltyVector pair_penalties(const EvidenceContext& ctx, const std::string& a,
                                    const std::string& b, const std::string& merge_target) {
    PenaltyVector p;
    const ContextProfile& pa = ctx.profile(a);
    const ContextProfile& pb = ctx.profile(b);
    p.fragment_residue = fragment_residue_penalty(merge_target, ctx.attested, *ctx.seeds);
    p.function_word_contamination =
        std::max(function_word_contamination(a, pa, *ctx.function_words),
                 function_word_contamination(b, pb, *ctx.function_words));
    p.genericity_noise = std::min(ctx.genericity_of(a), ctx.genericity_of(b));
    p.proper_name_inflation =
        (ctx.proper_names->count(a) || ctx.proper_names->count(b)) ? 1.0 : 0.0;
    return p;
}

}  // namespace symatlas
