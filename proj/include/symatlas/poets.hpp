#pragma once
// Poet-level field profiles and the comparisons built on them: threshold
// pools, per-field z-standardization, Ward minimum-variance clustering with a
// rule-based naming scheme, nearest-neighbor tables, a two-component
// projection of the standardized field space, and late-vs-early contrasts.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symatlas/communities.hpp"
#include "symatlas/corpus.hpp"
#include "symatlas/csv.hpp"
#include "symatlas/errors.hpp"
#include "symatlas/evidence.hpp"
#include "symatlas/families.hpp"
#include "symatlas/temporal.hpp"

namespace symatlas {

// ---------------------------------------------------------------------------
// Profile fields

inline constexpr std::size_t kProfileFieldCount = 7;

// Profile rate columns, in fixed order: wine-tavern, ascetic-mystical,
// body-beloved, floral-vegetal, light-fire, water-sea, mixed.
inline constexpr std::array<FieldLabel, kProfileFieldCount> kProfileFields = {
    FieldLabel::WineTavernRitual, FieldLabel::AsceticMystical, FieldLabel::BodyBeloved,
    FieldLabel::FloralVegetal,    FieldLabel::LightFire,       FieldLabel::WaterSea,
    FieldLabel::MixedField,
};

inline constexpr std::array<const char*, kProfileFieldCount> kProfileFieldCodes = {
    "wt", "am", "bb", "fv", "lf", "ws", "mf"};

// Fields treated as lyric by the cluster naming rule: wine, body, floral,
// and the mixed field.
inline constexpr std::array<std::size_t, 4> kLyricFieldIndices = {0, 2, 3, 6};

inline int profile_field_index(FieldLabel f) {
    for (std::size_t i = 0; i < kProfileFields.size(); ++i)
        if (kProfileFields[i] == f) return static_cast<int>(i);
    return -1;
}

// ---------------------------------------------------------------------------
// Profiles

struct PoetProfile {
    std::string poet_id;
    int century = -1;
    double verses = 0;                 // all verses, degenerate included
    double symbolic_occurrences = 0;   // occurrences across every labeled family
    std::array<double, kProfileFieldCount> occurrences{};
    std::array<double, kProfileFieldCount> rate{};  // per 10,000 verses
};

// Per-poet field occurrence rates. Families labeled outside the seven profile
// fields (the two bridge domains) still count toward the symbolic total but
// hold no rate column.
inline std::vector<PoetProfile> field_rates(const CorpusStore& store, const TokenizedCorpus& tc,
                                            const FamilySet& families,
                                            const std::map<std::string, FieldLabel>& family_field) {
    std::map<std::string, PoetProfile> by_poet;
    for (const Poem& poem : store.poems) {
        PoetProfile& p = by_poet[poem.poet_id];
        if (p.poet_id.empty()) {
            p.poet_id = poem.poet_id;
            auto rec = store.poets.find(poem.poet_id);
            p.century = rec != store.poets.end() ? rec->second.hijri_century : poem.hijri_century;
        }
        p.verses += double(poem.verses.size());
    }
    for (const TokenizedCorpus::Hemi& h : tc.hemistichs) {
        for (const std::string& tok : h.tokens) {
            auto fit = families.form_to_family.find(tok);
            if (fit == families.form_to_family.end()) continue;
            auto lit = family_field.find(fit->second);
            if (lit == family_field.end()) continue;
            PoetProfile& p = by_poet[store.poems[h.poem_idx].poet_id];
            p.symbolic_occurrences += 1.0;
            int idx = profile_field_index(lit->second);
            if (idx >= 0) p.occurrences[idx] += 1.0;
        }
    }
    std::vector<PoetProfile> out;
    out.reserve(by_poet.size());
    for (auto& [id, p] : by_poet) {
        if (p.verses <= 0) throw ValidationError("poet " + id + " has no verses");
        for (std::size_t i = 0; i < kProfileFieldCount; ++i)
            p.rate[i] = 10000.0 * p.occurrences[i] / p.verses;
        out.push_back(std::move(p));
    }
    return out;  // sorted by poet id via the map
}

// ---------------------------------------------------------------------------
// Threshold pools

struct PoolSpec {
    double min_verses = 10000;
    double min_symbolic_occurrences = 1000;
};

inline PoolSpec core_pool_spec() { return {10000, 1000}; }
inline PoolSpec sensitivity_pool_spec() { return {8000, 500}; }

struct PoolResult {
    std::vector<PoetProfile> included;
    // excluded poets whose counts both reach near_factor of the floors
    std::vector<PoetProfile> near_misses;
};

// Retains poets meeting both floors (>= semantics). Loosening either floor
// never removes a poet.
inline PoolResult select_pool(const std::vector<PoetProfile>& profiles, const PoolSpec& spec,
                              double near_factor = 0.5) {
    PoolResult out;
    for (const PoetProfile& p : profiles) {
        if (p.verses >= spec.min_verses &&
            p.symbolic_occurrences >= spec.min_symbolic_occurrences) {
            out.included.push_back(p);
        } else if (p.verses >= near_factor * spec.min_verses &&
                   p.symbolic_occurrences >= near_factor * spec.min_symbolic_occurrences) {
            out.near_misses.push_back(p);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Standardization

struct StandardizedProfiles {
    std::vector<std::string> poet_ids;  // sorted
    std::vector<std::array<double, kProfileFieldCount>> z;
    std::array<double, kProfileFieldCount> mean{};
    std::array<double, kProfileFieldCount> stddev{};  // population; 0 for constant fields
};

// Per-field z-scores over the pool (population variance). Constant fields map
// to all-zero columns.
inline StandardizedProfiles standardize(const std::vector<PoetProfile>& pool) {
    if (pool.empty()) throw ValidationError("standardization needs a non-empty pool");
    std::vector<const PoetProfile*> rows;
    rows.reserve(pool.size());
    for (const PoetProfile& p : pool) rows.push_back(&p);
    std::sort(rows.begin(), rows.end(),
              [](const PoetProfile* a, const PoetProfile* b) { return a->poet_id < b->poet_id; });

    StandardizedProfiles sp;
    const double n = double(rows.size());
    for (std::size_t f = 0; f < kProfileFieldCount; ++f) {
        double m = 0.0;
        for (const PoetProfile* p : rows) m += p->rate[f];
        m /= n;
        double var = 0.0;
        for (const PoetProfile* p : rows) var += (p->rate[f] - m) * (p->rate[f] - m);
        var /= n;
        sp.mean[f] = m;
        sp.stddev[f] = var > 0 ? std::sqrt(var) : 0.0;
    }
    for (const PoetProfile* p : rows) {
        sp.poet_ids.push_back(p->poet_id);
        std::array<double, kProfileFieldCount> row{};
        for (std::size_t f = 0; f < kProfileFieldCount; ++f)
            row[f] = sp.stddev[f] > 0 ? (p->rate[f] - sp.mean[f]) / sp.stddev[f] : 0.0;
        sp.z.push_back(row);
    }
    return sp;
}

// ---------------------------------------------------------------------------
// Ward clustering

struct MergeStep {
    std::string a;  // representative (smallest poet id) of each merged side
    std::string b;
    double dissimilarity = 0;  // Ward distance at merge time (squared-Euclidean base)
    std::size_t size = 0;      // members of the merged cluster
};

struct ClusterResult {
    std::size_t k = 0;
    std::map<std::string, std::size_t> assignment;  // poet -> cluster index
    std::vector<MergeStep> linkage;                 // in merge order
    std::vector<std::string> labels;                // per cluster, naming rule below
};

inline const char* kLyricAmplifying = "lyric-amplifying";
inline const char* kMediatingBalanced = "mediating-balanced";
inline const char* kSparseAnchor = "sparse-anchor";

// Ward minimum-variance agglomeration via the Lance-Williams update on
// squared Euclidean distances: d(i∪j, h) scales the parts by cluster sizes so
// each merge cost equals the increase in within-cluster variance (times two).
// Equal-cost candidates break ties toward the pair with the lexicographically
// smallest (representative_a, representative_b); a merged cluster keeps the
// smaller representative. Final clusters are numbered by representative
// order.
//
// Naming rule: the cluster with the highest mean standardized lyric-field
// value is lyric-amplifying, the lowest of the rest is sparse-anchor (when
// k >= 2), and the remainder are mediating-balanced. Mean ties keep the
// smaller cluster index.
inline ClusterResult ward_cluster(const StandardizedProfiles& sp, std::size_t k = 3) {
    const std::size_t n = sp.poet_ids.size();
    if (k < 1 || k > n) throw ValidationError("cluster count must lie in [1, n_poets]");

    struct Cluster {
        std::string rep;
        std::vector<std::size_t> members;  // row indices into sp.z
    };
    std::vector<Cluster> act;
    act.reserve(n);
    for (std::size_t i = 0; i < n; ++i) act.push_back({sp.poet_ids[i], {i}});

    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t f = 0; f < kProfileFieldCount; ++f) {
                double diff = sp.z[i][f] - sp.z[j][f];
                s += diff * diff;
            }
            d[i][j] = d[j][i] = s;
        }

    ClusterResult result;
    result.k = k;
    while (act.size() > k) {
        std::size_t bi = 0, bj = 1;
        for (std::size_t i = 0; i < act.size(); ++i)
            for (std::size_t j = i + 1; j < act.size(); ++j) {
                if (d[i][j] < d[bi][bj]) {
                    bi = i;
                    bj = j;
                } else if (d[i][j] == d[bi][bj]) {
                    auto key = [&](std::size_t x, std::size_t y) {
                        return std::make_pair(std::min(act[x].rep, act[y].rep),
                                              std::max(act[x].rep, act[y].rep));
                    };
                    if (key(i, j) < key(bi, bj)) {
                        bi = i;
                        bj = j;
                    }
                }
            }

        const double dij = d[bi][bj];
        const double ni = double(act[bi].members.size());
        const double nj = double(act[bj].members.size());
        const std::string rep_a = std::min(act[bi].rep, act[bj].rep);
        const std::string rep_b = std::max(act[bi].rep, act[bj].rep);
        result.linkage.push_back(
            {rep_a, rep_b, dij, act[bi].members.size() + act[bj].members.size()});

        for (std::size_t h = 0; h < act.size(); ++h) {
            if (h == bi || h == bj) continue;
            double nh = double(act[h].members.size());
            double total = ni + nj + nh;
            d[bi][h] = d[h][bi] =
                ((ni + nh) * d[bi][h] + (nj + nh) * d[bj][h] - nh * dij) / total;
        }
        act[bi].rep = rep_a;
        act[bi].members.insert(act[bi].members.end(), act[bj].members.begin(),
                               act[bj].members.end());
        act.erase(act.begin() + bj);
        d.erase(d.begin() + bj);
        for (auto& row : d) row.erase(row.begin() + bj);
    }

    std::sort(act.begin(), act.end(),
              [](const Cluster& a, const Cluster& b) { return a.rep < b.rep; });
    for (std::size_t c = 0; c < act.size(); ++c)
        for (std::size_t i : act[c].members) result.assignment[sp.poet_ids[i]] = c;

    std::vector<double> lyric_mean(act.size(), 0.0);
    for (std::size_t c = 0; c < act.size(); ++c) {
        double sum = 0.0;
        for (std::size_t i : act[c].members)
            for (std::size_t f : kLyricFieldIndices) sum += sp.z[i][f];
        lyric_mean[c] = sum / (double(act[c].members.size()) * double(kLyricFieldIndices.size()));
    }
    result.labels.assign(act.size(), kMediatingBalanced);
    std::size_t hi = 0;
    for (std::size_t c = 1; c < act.size(); ++c)
        if (lyric_mean[c] > lyric_mean[hi]) hi = c;
    result.labels[hi] = kLyricAmplifying;
    if (act.size() >= 2) {
        std::size_t lo = hi == 0 ? 1 : 0;
        for (std::size_t c = 0; c < act.size(); ++c)
            if (c != hi && lyric_mean[c] < lyric_mean[lo]) lo = c;
        result.labels[lo] = kSparseAnchor;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Nearest neighbors

struct NeighborRow {
    std::string poet_id;
    std::string nearest;  // empty when no other poet exists
    std::string second;   // empty when fewer than two others exist
    double nearest_distance = 0;
    double second_distance = 0;
    double mean_distance = 0;            // over all other poets
    std::size_t mean_distance_rank = 0;  // 1 = most central (smallest mean)
};

// Euclidean distances in standardized space. Neighbor ties and rank ties
// break toward the smaller poet id.
inline std::vector<NeighborRow> nearest_neighbors(const StandardizedProfiles& sp) {
    const std::size_t n = sp.poet_ids.size();
    std::vector<NeighborRow> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i].poet_id = sp.poet_ids[i];
        std::vector<std::pair<double, std::size_t>> others;
        others.reserve(n > 0 ? n - 1 : 0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double s = 0.0;
            for (std::size_t f = 0; f < kProfileFieldCount; ++f) {
                double diff = sp.z[i][f] - sp.z[j][f];
                s += diff * diff;
            }
            others.push_back({std::sqrt(s), j});
        }
        std::sort(others.begin(), others.end(),
                  [&](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first < b.first;
                      return sp.poet_ids[a.second] < sp.poet_ids[b.second];
                  });
        double total = 0.0;
        for (const auto& [dist, j] : others) total += dist;
        rows[i].mean_distance = others.empty() ? 0.0 : total / double(others.size());
        if (!others.empty()) {
            rows[i].nearest = sp.poet_ids[others[0].second];
            rows[i].nearest_distance = others[0].first;
        }
        if (others.size() >= 2) {
            rows[i].second = sp.poet_ids[others[1].second];
            rows[i].second_distance = others[1].first;
        }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rows[a].mean_distance != rows[b].mean_distance)
            return rows[a].mean_distance < rows[b].mean_distance;
        return rows[a].poet_id < rows[b].poet_id;
    });
    for (std::size_t r = 0; r < n; ++r) rows[order[r]].mean_distance_rank = r + 1;
    return rows;
}

// ---------------------------------------------------------------------------
// Principal-component projection

struct Projection {
    std::vector<std::string> poet_ids;
    std::vector<std::array<double, 2>> coords;
    std::array<double, 2> variance_fraction{};  // of the total variance, descending
    std::array<std::array<double, kProfileFieldCount>, 2> loadings{};
};

// First two principal components of the covariance matrix of the standardized
// rows (defensively re-centered). Sign convention: each component's
// largest-magnitude loading is positive, first field winning magnitude ties.
inline Projection pca_project(const StandardizedProfiles& sp) {
    const std::size_t n = sp.z.size();
    if (n == 0) throw ValidationError("projection needs a non-empty pool");
    constexpr std::size_t F = kProfileFieldCount;

    std::array<double, F> mean{};
    for (const auto& row : sp.z)
        for (std::size_t f = 0; f < F; ++f) mean[f] += row[f];
    for (std::size_t f = 0; f < F; ++f) mean[f] /= double(n);

    Eigen::MatrixXd x(n, F);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t f = 0; f < F; ++f) x(i, f) = sp.z[i][f] - mean[f];
    Eigen::MatrixXd cov = (x.transpose() * x) / double(n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("projection eigendecomposition failed");

    double total = 0.0;
    for (std::size_t f = 0; f < F; ++f) total += std::max(0.0, solver.eigenvalues()(f));

    Projection proj;
    proj.poet_ids = sp.poet_ids;
    for (int c = 0; c < 2; ++c) {
        const int src = static_cast<int>(F) - 1 - c;  // eigenvalues ascend
        double lambda = std::max(0.0, solver.eigenvalues()(src));
        proj.variance_fraction[c] = total > 0 ? lambda / total : 0.0;
        std::array<double, F> v{};
        for (std::size_t f = 0; f < F; ++f) v[f] = solver.eigenvectors()(f, src);
        std::size_t strongest = 0;
        for (std::size_t f = 1; f < F; ++f)
            if (std::fabs(v[f]) > std::fabs(v[strongest])) strongest = f;
        if (v[strongest] < 0)
            for (std::size_t f = 0; f < F; ++f) v[f] = -v[f];
        proj.loadings[c] = v;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, 2> c{};
        for (int p = 0; p < 2; ++p)
            for (std::size_t f = 0; f < F; ++f) c[p] += x(i, f) * proj.loadings[p][f];
        proj.coords.push_back(c);
    }
    return proj;
}

// ---------------------------------------------------------------------------
// Late-vs-early contrasts

inline double median_of(std::vector<double> v) {
    if (v.empty()) return missing_value();
    std::sort(v.begin(), v.end());
    std::size_t mid = v.size() / 2;
    if (v.size() % 2 == 1) return v[mid];
    return 0.5 * (v[mid - 1] + v[mid]);
}

// Midpoint of the observed century span (floor), the default split point.
inline int default_split_century(const std::vector<PoetProfile>& pool) {
    if (pool.empty()) throw ValidationError("split century needs a non-empty pool");
    int lo = pool.front().century, hi = pool.front().century;
    for (const PoetProfile& p : pool) {
        lo = std::min(lo, p.century);
        hi = std::max(hi, p.century);
    }
    return (lo + hi) / 2;
}

struct LateEarlyComparison {
    FieldLabel field = FieldLabel::MixedField;
    int split_century = 0;
    std::size_t n_late = 0;
    std::size_t n_early = 0;
    std::size_t late_above_early_median = 0;  // strictly above
    double late_median = 0;                   // missing when the side is empty
    double early_median = 0;
    std::string removed_poet_id;  // strongest late contributor by occurrences
    std::size_t late_above_after_removal = 0;
    double late_median_after_removal = 0;
};

// Late = poets with century strictly after the split. The removal pass drops
// the late poet with the most field occurrences (ties toward the smaller
// poet id) and recomputes the late-side figures; the early side is untouched.
inline LateEarlyComparison late_vs_early(const std::vector<PoetProfile>& pool, int split_century,
                                         FieldLabel field) {
    int idx = profile_field_index(field);
    if (idx < 0) throw ValidationError("field has no profile rate column");

    LateEarlyComparison cmp;
    cmp.field = field;
    cmp.split_century = split_century;

    std::vector<const PoetProfile*> late, early;
    for (const PoetProfile& p : pool)
        (p.century > split_century ? late : early).push_back(&p);
    cmp.n_late = late.size();
    cmp.n_early = early.size();

    std::vector<double> late_rates, early_rates;
    for (const PoetProfile* p : late) late_rates.push_back(p->rate[idx]);
    for (const PoetProfile* p : early) early_rates.push_back(p->rate[idx]);
    cmp.late_median = median_of(late_rates);
    cmp.early_median = median_of(early_rates);

    auto count_above = [&](const std::vector<const PoetProfile*>& side, double median) {
        if (is_missing(median)) return std::size_t{0};
        std::size_t c = 0;
        for (const PoetProfile* p : side)
            if (p->rate[idx] > median) ++c;
        return c;
    };
    cmp.late_above_early_median = count_above(late, cmp.early_median);

    if (!late.empty()) {
        const PoetProfile* strongest = late.front();
        for (const PoetProfile* p : late) {
            if (p->occurrences[idx] > strongest->occurrences[idx] ||
                (p->occurrences[idx] == strongest->occurrences[idx] &&
                 p->poet_id < strongest->poet_id))
                strongest = p;
        }
        cmp.removed_poet_id = strongest->poet_id;
        std::vector<const PoetProfile*> reduced;
        std::vector<double> reduced_rates;
        for (const PoetProfile* p : late)
            if (p != strongest) {
                reduced.push_back(p);
                reduced_rates.push_back(p->rate[idx]);
            }
        cmp.late_median_after_removal = median_of(reduced_rates);
        cmp.late_above_after_removal = count_above(reduced, cmp.early_median);
    } else {
        cmp.late_median_after_removal = missing_value();
    }
    return cmp;
}

// Largest single-poet share of the field's occurrences among poets with
// centuries in [century_lo, century_hi]; 0 when the range holds none.
inline double dominance_share(const std::vector<PoetProfile>& pool, FieldLabel field,
                              int century_lo, int century_hi) {
    int idx = profile_field_index(field);
    if (idx < 0) throw ValidationError("field has no profile rate column");
    double total = 0.0, best = 0.0;
    for (const PoetProfile& p : pool) {
        if (p.century < century_lo || p.century > century_hi) continue;
        total += p.occurrences[idx];
        best = std::max(best, p.occurrences[idx]);
    }
    return total > 0 ? best / total : 0.0;
}

// ---------------------------------------------------------------------------
// Export

inline void write_poet_profiles_csv(const std::vector<PoetProfile>& pool, std::ostream& os) {
    CsvWriter w(os);
    std::vector<std::string> header = {"poet", "century", "verses", "symbolic"};
    for (const char* code : kProfileFieldCodes) header.push_back(code);
    w.row(header);
    for (const PoetProfile& p : pool) {
        std::vector<std::string> row = {p.poet_id, std::to_string(p.century),
                                        format_fixed(p.verses, 0),
                                        format_fixed(p.symbolic_occurrences, 0)};
        for (std::size_t f = 0; f < kProfileFieldCount; ++f)
            row.push_back(format_fixed(p.rate[f], 1));
        w.row(row);
    }
}

inline void write_poet_neighbors_csv(const std::vector<NeighborRow>& rows,
                                     const ClusterResult& clusters, std::ostream& os) {
    CsvWriter w(os);
    w.row({"poet", "cluster", "nearest_neighbor", "second_neighbor", "mean_distance_rank"});
    for (const NeighborRow& r : rows)
        w.row({r.poet_id, clusters.labels[clusters.assignment.at(r.poet_id)], r.nearest,
               r.second, std::to_string(r.mean_distance_rank)});
}

inline void write_projection_csv(const Projection& proj, const ClusterResult& clusters,
                                 std::ostream& os) {
    CsvWriter w(os);
    w.row({"x", "y", "cluster"});
    for (std::size_t i = 0; i < proj.poet_ids.size(); ++i)
        w.row({format_fixed(proj.coords[i][0]), format_fixed(proj.coords[i][1]),
               clusters.labels[clusters.assignment.at(proj.poet_ids[i])]});
}

}  // namespace symatlas
