#pragma once
// Century-level family trajectories: per-10k normalization, rolling and
// Gaussian smoothing, trend tests, poet bootstrap, and classification.
//
// Bins with zero verses have no observation; their rate is "missing" (NaN)
// and stays missing through smoothing. Present positions smooth over the
// present values in their window, with weights renormalized per position.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "symatlas/corpus.hpp"
#include "symatlas/csv.hpp"
#include "symatlas/errors.hpp"
#include "symatlas/evidence.hpp"
#include "symatlas/families.hpp"
#include "symatlas/rng.hpp"

namespace symatlas {

inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double v) { return std::isnan(v); }

// ---------------------------------------------------------------------------
// Smoothing configuration

struct SmoothingConfig {
    double sigma = 1.0;
    int radius = 3;  // kernel truncation radius, ceil(3*sigma) by default

    static SmoothingConfig from_sigma(double s) {
        SmoothingConfig cfg;
        cfg.sigma = s;
        cfg.radius = s > 0 ? static_cast<int>(std::ceil(3.0 * s)) : 0;
        return cfg;
    }

    void validate() const {
        if (!(sigma > 0)) throw ValidationError("smoothing sigma must be > 0");
        if (radius < 0) throw ValidationError("smoothing radius must be >= 0");
    }
};

// ---------------------------------------------------------------------------
// Series transforms

// rate_b = 10000 * count_b / verses_b; zero-verse bins are missing.
inline std::vector<double> normalize_per_10k(const std::vector<double>& counts,
                                             const std::vector<double>& verses) {
    if (counts.size() != verses.size())
        throw ValidationError("normalize_per_10k: counts and verses differ in length");
    std::vector<double> rate(counts.size(), 0.0);
    for (std::size_t b = 0; b < counts.size(); ++b) {
        if (verses[b] > 0) {
            rate[b] = 10000.0 * counts[b] / verses[b];
        } else if (counts[b] > 0) {
            throw ValidationError("normalize_per_10k: counts in a zero-verse bin");
        } else {
            rate[b] = missing_value();
        }
    }
    return rate;
}

// Centered window of three, shrunk to the available bins at the edges and to
// the present values elsewhere. Missing positions stay missing.
inline std::vector<double> rolling_mean_3(const std::vector<double>& series) {
    std::vector<double> out(series.size(), missing_value());
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (is_missing(series[i])) continue;
        double sum = 0.0;
        int n = 0;
        for (int d = -1; d <= 1; ++d) {
            long j = static_cast<long>(i) + d;
            if (j < 0 || j >= static_cast<long>(series.size())) continue;
            if (is_missing(series[j])) continue;
            sum += series[j];
            ++n;
        }
        out[i] = sum / n;
    }
    return out;
}

// Discrete Gaussian kernel truncated at the configured radius, renormalized
// at every output position so the weights over present neighbors sum to 1.
inline std::vector<double> gaussian_smooth(const std::vector<double>& series,
                                           const SmoothingConfig& cfg) {
    cfg.validate();
    if (cfg.sigma < 1e-6) return series;  // degenerate width: identity
    std::vector<double> kernel(static_cast<std::size_t>(cfg.radius) + 1, 1.0);
    for (int d = 1; d <= cfg.radius; ++d)
        kernel[d] = std::exp(-0.5 * (double(d) * double(d)) / (cfg.sigma * cfg.sigma));

    std::vector<double> out(series.size(), missing_value());
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (is_missing(series[i])) continue;
        double sum = 0.0, weight = 0.0;
        for (int d = -cfg.radius; d <= cfg.radius; ++d) {
            long j = static_cast<long>(i) + d;
            if (j < 0 || j >= static_cast<long>(series.size())) continue;
            if (is_missing(series[j])) continue;
            double w = kernel[std::abs(d)];
            sum += w * series[j];
            weight += w;
        }
        out[i] = sum / weight;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Occurrence table: per family, per poet, per bin

struct TrajectorySeries {
    std::string family_id;
    std::vector<double> raw_counts;
    std::vector<double> rate;      // per 10,000 verses; NaN where no verses
    std::vector<double> rolled;    // 3-bin rolling mean of rate
    std::vector<double> smoothed;  // Gaussian pass over rolled
};

struct TemporalTable {
    std::size_t n_bins = 0;
    std::vector<double> verses_per_bin;               // all verses, incl. degenerate
    std::vector<std::string> poets;                   // sorted distinct poet ids
    std::map<std::string, std::vector<double>> poet_verses;  // poet -> per-bin verses
    // family -> poet -> per-bin occurrence counts
    std::map<std::string, std::map<std::string, std::vector<double>>> family_poet_counts;
    std::map<std::string, std::vector<double>> family_counts;  // per-bin totals

    std::vector<double> counts_of(const std::string& family_id) const {
        auto it = family_counts.find(family_id);
        if (it != family_counts.end()) return it->second;
        return std::vector<double>(n_bins, 0.0);
    }
};

inline TemporalTable build_temporal_table(const CorpusStore& store, const TokenizedCorpus& tc,
                                          const FamilySet& families) {
    TemporalTable table;
    table.n_bins = store.bins.size();
    if (table.n_bins == 0) throw ValidationError("temporal table requires resolved century bins");
    table.verses_per_bin.assign(table.n_bins, 0.0);

    std::set<std::string> poet_ids;
    for (const Poem& poem : store.poems) {
        if (poem.bin_id < 0 || poem.bin_id >= static_cast<int>(table.n_bins))
            throw ValidationError("temporal table requires every poem binned");
        poet_ids.insert(poem.poet_id);
    }
    table.poets.assign(poet_ids.begin(), poet_ids.end());
    for (const std::string& p : table.poets)
        table.poet_verses[p].assign(table.n_bins, 0.0);
    for (const Poem& poem : store.poems) {
        table.verses_per_bin[poem.bin_id] += double(poem.verses.size());
        table.poet_verses[poem.poet_id][poem.bin_id] += double(poem.verses.size());
    }

    for (const TokenizedCorpus::Hemi& h : tc.hemistichs) {
        const Poem& poem = store.poems[h.poem_idx];
        for (const std::string& tok : h.tokens) {
            auto fit = families.form_to_family.find(tok);
            if (fit == families.form_to_family.end()) continue;
            auto& per_poet = table.family_poet_counts[fit->second];
            auto [it, inserted] = per_poet.try_emplace(poem.poet_id);
            if (inserted) it->second.assign(table.n_bins, 0.0);
            it->second[poem.bin_id] += 1.0;
        }
    }
    for (const auto& [fid, per_poet] : table.family_poet_counts) {
        std::vector<double> total(table.n_bins, 0.0);
        for (const auto& [poet, counts] : per_poet)
            for (std::size_t b = 0; b < table.n_bins; ++b) total[b] += counts[b];
        table.family_counts[fid] = std::move(total);
    }
    return table;
}

inline TrajectorySeries trajectory_from_counts(const std::string& family_id,
                                               const std::vector<double>& counts,
                                               const std::vector<double>& verses,
                                               const SmoothingConfig& cfg) {
    TrajectorySeries s;
    s.family_id = family_id;
    s.raw_counts = counts;
    s.rate = normalize_per_10k(counts, verses);
    s.rolled = rolling_mean_3(s.rate);
    s.smoothed = gaussian_smooth(s.rolled, cfg);
    return s;
}

inline TrajectorySeries build_trajectory(const std::string& family_id, const TemporalTable& table,
                                         const SmoothingConfig& cfg) {
    return trajectory_from_counts(family_id, table.counts_of(family_id), table.verses_per_bin,
                                  cfg);
}

// Per-bin totals over a set of families (field aggregates).
inline std::vector<double> summed_counts(const TemporalTable& table,
                                         const std::vector<std::string>& family_ids) {
    std::vector<double> total(table.n_bins, 0.0);
    for (const std::string& fid : family_ids) {
        std::vector<double> c = table.counts_of(fid);
        for (std::size_t b = 0; b < table.n_bins; ++b) total[b] += c[b];
    }
    return total;
}

// ---------------------------------------------------------------------------
// Trend tests

struct TrendTests {
    double slope = 0.0;         // least-squares fit of smoothed value on bin index
    double spearman_rho = 0.0;  // rank correlation of (bin index, smoothed value)
    double chi_square = 0.0;    // earlier-vs-later halves of the raw counts
    double chi_square_p = 1.0;
};

namespace detail {

// Present (non-missing) positions of a series with their original indices.
inline void present_points(const std::vector<double>& series, std::vector<double>& xs,
                           std::vector<double>& ys) {
    xs.clear();
    ys.clear();
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (is_missing(series[i])) continue;
        xs.push_back(double(i));
        ys.push_back(series[i]);
    }
}

inline double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::size_t n = xs.size();
    if (n < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(n);
    my /= double(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return den > 0 ? num / den : 0.0;
}

// Average ranks (1-based); exact-equality ties share the mean rank.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
    std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double mean_rank = (double(i + 1) + double(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

inline double pearson_raw(const std::vector<double>& a, const std::vector<double>& b) {
    std::size_t n = a.size();
    if (n < 2) return 0.0;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= double(n);
    mb /= double(n);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    if (va <= 0 || vb <= 0) return 0.0;
    return cov / std::sqrt(va * vb);
}

inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::size_t n = xs.size();
    if (n < 2) return 0.0;
    std::vector<double> rx = average_ranks(xs);
    std::vector<double> ry = average_ranks(ys);
    bool ties = false;
    for (double r : ry)
        if (r != std::floor(r)) ties = true;
    for (double r : rx)
        if (r != std::floor(r)) ties = true;
    if (!ties) {
        // tie-free ranks are integers: the exact rational form keeps strictly
        // monotone series at +/-1 with no rounding
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
        double nn = double(n);
        return 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
    }
    return pearson_raw(rx, ry);
}

}  // namespace detail

// Survival function of the 1-df chi-square distribution.
inline double chi_square_p(double x) {
    if (x <= 0) return 1.0;
    return std::erfc(std::sqrt(x / 2.0));
}

// Compare the raw-count mass of the earlier half of bins (split at ceil(B/2))
// against the later half, with expectations proportional to verse volume.
inline void chi_square_halves(const std::vector<double>& counts,
                              const std::vector<double>& verses, double& statistic, double& p) {
    statistic = 0.0;
    p = 1.0;
    std::size_t bins = counts.size();
    if (bins < 2 || verses.size() != bins) return;
    std::size_t split = (bins + 1) / 2;
    double o_early = 0.0, o_late = 0.0, v_early = 0.0, v_late = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        (b < split ? o_early : o_late) += counts[b];
        (b < split ? v_early : v_late) += verses[b];
    }
    double total = o_early + o_late;
    double volume = v_early + v_late;
    if (total <= 0 || volume <= 0) return;
    double e_early = total * v_early / volume;
    double e_late = total * v_late / volume;
    if (e_early > 0) statistic += (o_early - e_early) * (o_early - e_early) / e_early;
    if (e_late > 0) statistic += (o_late - e_late) * (o_late - e_late) / e_late;
    p = chi_square_p(statistic);
}

inline TrendTests trend_tests(const TrajectorySeries& series,
                              const std::vector<double>& verses_per_bin) {
    TrendTests t;
    std::vector<double> xs, ys;
    detail::present_points(series.smoothed, xs, ys);
    t.slope = detail::ols_slope(xs, ys);
    t.spearman_rho = detail::spearman(xs, ys);
    chi_square_halves(series.raw_counts, verses_per_bin, t.chi_square, t.chi_square_p);
    return t;
}

// ---------------------------------------------------------------------------
// Poet bootstrap

struct BootstrapSummary {
    int n_resamples = 0;
    bool empty = false;           // family absent from the corpus
    int observed_slope_sign = 0;  // sign of the full-corpus smoothed slope
    int observed_peak_bin = -1;
    std::vector<double> slopes;  // per resample
    std::vector<int> slope_signs;
    std::vector<int> peak_bins;
    int modal_peak_bin = -1;
    double modal_peak_share = 0.0;
    double slope_sign_agreement = 0.0;  // share matching the observed sign
};

namespace detail {

inline int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

// Argmax over present values; ties keep the earliest bin; all-missing -> -1.
inline int peak_bin(const std::vector<double>& series) {
    int best = -1;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (is_missing(series[i])) continue;
        if (best < 0 || series[i] > series[best]) best = static_cast<int>(i);
    }
    return best;
}

inline double percentile(std::vector<double> sorted_values, double q) {
    if (sorted_values.empty()) return 0.0;
    std::sort(sorted_values.begin(), sorted_values.end());
    double h = q * double(sorted_values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, sorted_values.size() - 1);
    return sorted_values[lo] + (h - double(lo)) * (sorted_values[hi] - sorted_values[lo]);
}

}  // namespace detail

// Each resample draws the same number of poets with replacement, rebuilds the
// trajectory from their counts and verse volumes, and records the slope sign
// and peak bin. Draws come from a per-family substream of the master seed.
inline BootstrapSummary poet_bootstrap(const std::string& family_id, const TemporalTable& table,
                                       const SmoothingConfig& cfg, int n_resamples,
                                       std::uint64_t seed) {
    if (n_resamples < 1) throw ValidationError("poet bootstrap needs n_resamples >= 1");
    BootstrapSummary summary;
    summary.n_resamples = n_resamples;

    auto fam_it = table.family_poet_counts.find(family_id);
    double total = 0.0;
    if (fam_it != table.family_poet_counts.end())
        for (const auto& [poet, counts] : fam_it->second)
            for (double c : counts) total += c;
    if (total <= 0) {
        summary.empty = true;
        return summary;
    }

    TrajectorySeries observed = build_trajectory(family_id, table, cfg);
    {
        std::vector<double> xs, ys;
        detail::present_points(observed.smoothed, xs, ys);
        summary.observed_slope_sign = detail::sign_of(detail::ols_slope(xs, ys));
        summary.observed_peak_bin = detail::peak_bin(observed.smoothed);
    }

    auto rng = substream(seed, "bootstrap:" + family_id);
    std::size_t n_poets = table.poets.size();
    std::vector<double> counts(table.n_bins), verses(table.n_bins);
    for (int r = 0; r < n_resamples; ++r) {
        std::fill(counts.begin(), counts.end(), 0.0);
        std::fill(verses.begin(), verses.end(), 0.0);
        for (std::size_t k = 0; k < n_poets; ++k) {
            const std::string& poet = table.poets[uniform_index(rng, n_poets)];
            const std::vector<double>& pv = table.poet_verses.at(poet);
            for (std::size_t b = 0; b < table.n_bins; ++b) verses[b] += pv[b];
            auto pc = fam_it->second.find(poet);
            if (pc != fam_it->second.end())
                for (std::size_t b = 0; b < table.n_bins; ++b) counts[b] += pc->second[b];
        }
        TrajectorySeries resampled =
            trajectory_from_counts(family_id, counts, verses, cfg);
        std::vector<double> xs, ys;
        detail::present_points(resampled.smoothed, xs, ys);
        double slope = detail::ols_slope(xs, ys);
        summary.slopes.push_back(slope);
        summary.slope_signs.push_back(detail::sign_of(slope));
        summary.peak_bins.push_back(detail::peak_bin(resampled.smoothed));
    }

    std::map<int, int> peak_freq;
    for (int p : summary.peak_bins) ++peak_freq[p];
    int best_count = 0;
    for (const auto& [bin, count] : peak_freq) {
        if (count > best_count) {  // map order makes ties keep the smaller bin
            best_count = count;
            summary.modal_peak_bin = bin;
        }
    }
    summary.modal_peak_share = double(best_count) / double(n_resamples);
    int agree = 0;
    for (int s : summary.slope_signs)
        if (s == summary.observed_slope_sign) ++agree;
    summary.slope_sign_agreement = double(agree) / double(n_resamples);
    return summary;
}

// ---------------------------------------------------------------------------
// Classification

enum class Trajectory { RobustRising, RobustDeclining, Stable, Uncertain };

inline const char* trajectory_name(Trajectory t) {
    switch (t) {
        case Trajectory::RobustRising: return "robust_rising";
        case Trajectory::RobustDeclining: return "robust_declining";
        case Trajectory::Stable: return "stable";
        default: return "uncertain";
    }
}

struct TemporalParams {
    SmoothingConfig smoothing = SmoothingConfig::from_sigma(1.0);
    int n_resamples = 100;
    double rho_min = 0.6;
    double sign_agreement_min = 0.9;
    double peak_share_min = 0.5;
    // Stable gates are relative to the series' own mean level, so the
    // classification is invariant under positive rescaling of the rates.
    double stable_rel_slope_max = 0.25;   // |slope|*(B-1)/mean(rate)
    double stable_entropy_factor = 0.85;  // threshold factor on log(B)
    double stable_rel_drift_max = 0.25;   // |late third - early third|/mean(rate)

    void validate() const {
        smoothing.validate();
        if (n_resamples < 1) throw ValidationError("n_resamples must be >= 1");
        if (rho_min < 0 || rho_min > 1) throw ValidationError("rho_min must lie in [0,1]");
        if (sign_agreement_min < 0 || sign_agreement_min > 1)
            throw ValidationError("sign_agreement_min must lie in [0,1]");
        if (peak_share_min < 0 || peak_share_min > 1)
            throw ValidationError("peak_share_min must lie in [0,1]");
        if (stable_rel_slope_max < 0 || stable_entropy_factor < 0 || stable_rel_drift_max < 0)
            throw ValidationError("stability cutoffs must be non-negative");
    }
};

namespace detail {

// Shannon entropy of the rate-mass distribution over bins; an all-zero or
// all-missing series counts as uniform (maximally spread).
inline double rate_entropy(const std::vector<double>& rates, std::size_t& present_bins) {
    double total = 0.0;
    present_bins = 0;
    for (double r : rates) {
        if (is_missing(r)) continue;
        ++present_bins;
        total += r;
    }
    if (present_bins == 0) present_bins = 1;
    if (total <= 0) return std::log(double(present_bins));
    double h = 0.0;
    for (double r : rates) {
        if (is_missing(r) || r <= 0) continue;
        double p = r / total;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace detail

// Robust gates come first; Stable catches flat, well-spread series; anything
// else is Uncertain. All gates are sign-, rank-, or ratio-based.
inline Trajectory classify_trend(const TrendTests& tests, const BootstrapSummary& bootstrap,
                                 const std::vector<double>& rates,
                                 const TemporalParams& params) {
    params.validate();
    if (bootstrap.empty) return Trajectory::Uncertain;

    bool robust_shares = bootstrap.slope_sign_agreement >= params.sign_agreement_min &&
                         bootstrap.modal_peak_share >= params.peak_share_min;
    if (tests.slope > 0 && tests.spearman_rho >= params.rho_min && robust_shares)
        return Trajectory::RobustRising;
    if (tests.slope < 0 && tests.spearman_rho <= -params.rho_min && robust_shares)
        return Trajectory::RobustDeclining;

    std::size_t present = 0;
    double entropy = detail::rate_entropy(rates, present);
    double mean_rate = 0.0;
    std::vector<double> present_rates;
    for (double r : rates)
        if (!is_missing(r)) present_rates.push_back(r);
    for (double r : present_rates) mean_rate += r;
    if (!present_rates.empty()) mean_rate /= double(present_rates.size());

    double rel_slope, rel_drift;
    if (mean_rate > 0) {
        rel_slope = std::abs(tests.slope) * double(present > 1 ? present - 1 : 1) / mean_rate;
        std::size_t third = (present_rates.size() + 2) / 3;
        double early = 0.0, late = 0.0;
        for (std::size_t i = 0; i < third && i < present_rates.size(); ++i)
            early += present_rates[i];
        for (std::size_t i = present_rates.size() >= third ? present_rates.size() - third : 0;
             i < present_rates.size(); ++i)
            late += present_rates[i];
        rel_drift = third > 0 ? std::abs(late - early) / double(third) / mean_rate : 0.0;
    } else {
        // all-zero series is flat by definition
        rel_slope = tests.slope == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        rel_drift = 0.0;
    }

    double entropy_floor = params.stable_entropy_factor * std::log(double(std::max<std::size_t>(present, 1)));
    if (rel_slope <= params.stable_rel_slope_max && entropy >= entropy_floor &&
        rel_drift <= params.stable_rel_drift_max)
        return Trajectory::Stable;
    return Trajectory::Uncertain;
}

struct TrendResult {
    std::string family_id;
    TrendTests tests;
    Trajectory classification = Trajectory::Uncertain;
    int peak_bin = -1;
    double peak_mode_share = 0.0;
    // bootstrap percentile interval (2.5/97.5) over resampled slopes
    double slope_ci_low = 0.0;
    double slope_ci_high = 0.0;
};

inline TrendResult analyze_trend(const std::string& family_id, const TemporalTable& table,
                                 const TemporalParams& params, std::uint64_t seed) {
    params.validate();
    TrendResult result;
    result.family_id = family_id;
    TrajectorySeries series = build_trajectory(family_id, table, params.smoothing);
    result.tests = trend_tests(series, table.verses_per_bin);
    BootstrapSummary bootstrap =
        poet_bootstrap(family_id, table, params.smoothing, params.n_resamples, seed);
    result.classification = classify_trend(result.tests, bootstrap, series.rate, params);
    result.peak_bin = bootstrap.empty ? detail::peak_bin(series.smoothed)
                                      : bootstrap.observed_peak_bin;
    result.peak_mode_share = bootstrap.modal_peak_share;
    if (!bootstrap.slopes.empty()) {
        result.slope_ci_low = detail::percentile(bootstrap.slopes, 0.025);
        result.slope_ci_high = detail::percentile(bootstrap.slopes, 0.975);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Field coupling

// Pearson correlation over positions present in both series.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ValidationError("pearson: length mismatch");
    std::vector<double> xa, xb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (is_missing(a[i]) || is_missing(b[i])) continue;
        xa.push_back(a[i]);
        xb.push_back(b[i]);
    }
    return detail::pearson_raw(xa, xb);
}

// Symmetric correlation matrix between smoothed series; unit diagonal.
inline std::vector<std::vector<double>> field_coupling(
    const std::vector<std::vector<double>>& series) {
    std::size_t n = series.size();
    std::vector<std::vector<double>> corr(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double r = pearson(series[i], series[j]);
            corr[i][j] = r;
            corr[j][i] = r;
        }
    return corr;
}

// ---------------------------------------------------------------------------
// Robustness weightings

struct VariantSeries {
    std::vector<double> main;            // pooled per-10k rates
    std::vector<double> poet_balanced;   // equal poet weight within each bin
    std::vector<double> top_poet_removed;  // without the top-contributing poet
    std::string top_poet;                // empty when the family has no counts
};

inline VariantSeries robustness_weightings(const std::string& family_id,
                                           const TemporalTable& table) {
    VariantSeries v;
    std::vector<double> counts = table.counts_of(family_id);
    v.main = normalize_per_10k(counts, table.verses_per_bin);

    const std::map<std::string, std::vector<double>>* per_poet = nullptr;
    auto it = table.family_poet_counts.find(family_id);
    if (it != table.family_poet_counts.end()) per_poet = &it->second;

    // poet-balanced: average the per-poet rates of the poets writing in a bin
    v.poet_balanced.assign(table.n_bins, missing_value());
    for (std::size_t b = 0; b < table.n_bins; ++b) {
        double sum = 0.0;
        int n = 0;
        for (const std::string& poet : table.poets) {
            double pv = table.poet_verses.at(poet)[b];
            if (pv <= 0) continue;
            double pc = 0.0;
            if (per_poet) {
                auto pit = per_poet->find(poet);
                if (pit != per_poet->end()) pc = pit->second[b];
            }
            sum += 10000.0 * pc / pv;
            ++n;
        }
        if (n > 0) v.poet_balanced[b] = sum / n;
    }

    // top-poet-removal: drop the poet with the largest total count (ties keep
    // the lexicographically first), verses included
    double best = 0.0;
    if (per_poet) {
        for (const auto& [poet, pc] : *per_poet) {
            double t = 0.0;
            for (double c : pc) t += c;
            if (t > best) {
                best = t;
                v.top_poet = poet;
            }
        }
    }
    if (v.top_poet.empty()) {
        v.top_poet_removed = v.main;
    } else {
        std::vector<double> rem_counts = counts;
        std::vector<double> rem_verses = table.verses_per_bin;
        const std::vector<double>& pc = per_poet->at(v.top_poet);
        const std::vector<double>& pv = table.poet_verses.at(v.top_poet);
        for (std::size_t b = 0; b < table.n_bins; ++b) {
            rem_counts[b] -= pc[b];
            rem_verses[b] -= pv[b];
        }
        v.top_poet_removed = normalize_per_10k(rem_counts, rem_verses);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Export

inline void write_trajectories_csv(const std::vector<TrajectorySeries>& series,
                                   std::ostream& os) {
    CsvWriter w(os);
    w.row({"family_id", "bin", "raw", "rate", "rolled", "smoothed"});
    auto cell = [](double v) { return is_missing(v) ? std::string() : format_fixed(v); };
    for (const TrajectorySeries& s : series)
        for (std::size_t b = 0; b < s.raw_counts.size(); ++b)
            w.row({s.family_id, std::to_string(b), format_fixed(s.raw_counts[b], 0),
                   cell(s.rate[b]), cell(s.rolled[b]), cell(s.smoothed[b])});
}

}  // namespace symatlas
