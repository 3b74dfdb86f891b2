#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "symatlas/temporal.hpp"
#include "support/oracles.hpp"

using namespace symatlas;
using Catch::Matchers::WithinAbs;

namespace {

// One poet per century; each entry adds one poem whose verses repeat the
// given hemistich pair. Bin ids follow from bin_centuries.
struct PoemSpec {
    std::string poet_id;
    int century;
    int n_verses;
    std::string first;
    std::string second;
};

CorpusStore store_from(const std::vector<PoemSpec>& specs) {
    CorpusStore store;
    int n = 0;
    for (const PoemSpec& s : specs) {
        Poem p;
        p.poem_id = "p" + std::to_string(n++);
        p.poet_id = s.poet_id;
        p.hijri_century = s.century;
        for (int v = 0; v < s.n_verses; ++v) p.verses.push_back(Verse{{s.first, s.second}, false});
        store.poem_index[p.poem_id] = store.poems.size();
        store.poems.push_back(std::move(p));
        PoetRecord rec;
        rec.poet_id = s.poet_id;
        rec.name = s.poet_id;
        rec.hijri_century = s.century;
        store.poets[s.poet_id] = rec;
    }
    bin_centuries(store);
    return store;
}

FamilySet wine_family() {
    FamilySet fs;
    Family f;
    f.family_id = "f0000";
    f.head = "باده";
    f.members = {"باده", "ساغر"};
    fs.families.push_back(f);
    fs.form_to_family["باده"] = "f0000";
    fs.form_to_family["ساغر"] = "f0000";
    return fs;
}

TemporalTable table_of(const CorpusStore& store, const FamilySet& fs) {
    TokenizedCorpus tc = tokenize_corpus(store);
    return build_temporal_table(store, tc, fs);
}

// Poets per bin all share one century per bin; occurrence counts rise or fall
// with the bin as directed. Every poet writes `verses` verses; `hits[b]` of
// them mention the family, the rest use filler vocabulary.
CorpusStore graded_corpus(const std::vector<int>& hits, int poets_per_bin, int verses) {
    std::vector<PoemSpec> specs;
    std::vector<int> centuries = {4, 6, 9, 12};
    for (std::size_t b = 0; b < hits.size(); ++b) {
        for (int p = 0; p < poets_per_bin; ++p) {
            std::string poet = "poet" + std::to_string(b) + "_" + std::to_string(p);
            specs.push_back({poet, centuries[b], hits[b], "باده ناب", "شب دراز"});
            specs.push_back({poet, centuries[b], verses - hits[b], "گل سرخ", "شب دراز"});
        }
    }
    return store_from(specs);
}

}  // namespace

TEST_CASE("per-10k normalization follows the unit definition") {
    SECTION("unit cases") {
        std::vector<double> rate = normalize_per_10k({5.0, 0.0, 12.0}, {10000.0, 500.0, 4800.0});
        CHECK_THAT(rate[0], WithinAbs(5.0, 1e-12));
        CHECK(rate[1] == 0.0);
        CHECK_THAT(rate[2], WithinAbs(25.0, 1e-12));
    }
    SECTION("linear in the counts") {
        std::vector<double> verses = {1234.0, 777.0, 4096.0};
        std::vector<double> once = normalize_per_10k({3.0, 5.0, 7.0}, verses);
        std::vector<double> twice = normalize_per_10k({6.0, 10.0, 14.0}, verses);
        for (std::size_t b = 0; b < verses.size(); ++b)
            CHECK_THAT(twice[b], WithinAbs(2.0 * once[b], 1e-12));
    }
    SECTION("zero-verse bins are missing, not zero") {
        std::vector<double> rate = normalize_per_10k({0.0, 4.0}, {0.0, 100.0});
        CHECK(is_missing(rate[0]));
        CHECK_THAT(rate[1], WithinAbs(400.0, 1e-12));
    }
    SECTION("counts without verses are rejected") {
        CHECK_THROWS_AS(normalize_per_10k({1.0}, {0.0}), ValidationError);
        CHECK_THROWS_AS(normalize_per_10k({1.0, 2.0}, {10.0}), ValidationError);
    }
}

TEST_CASE("rolling mean shrinks its window at edges and gaps") {
    SECTION("constant series is unchanged") {
        std::vector<double> out = rolling_mean_3({2.5, 2.5, 2.5, 2.5});
        for (double v : out) CHECK(v == 2.5);
    }
    SECTION("documented window arithmetic") {
        std::vector<double> out = rolling_mean_3({0.0, 3.0, 0.0});
        CHECK_THAT(out[0], WithinAbs(1.5, 1e-12));
        CHECK_THAT(out[1], WithinAbs(1.0, 1e-12));
        CHECK_THAT(out[2], WithinAbs(1.5, 1e-12));
    }
    SECTION("short series") {
        std::vector<double> one = rolling_mean_3({7.0});
        CHECK(one[0] == 7.0);
        std::vector<double> two = rolling_mean_3({1.0, 3.0});
        CHECK_THAT(two[0], WithinAbs(2.0, 1e-12));
        CHECK_THAT(two[1], WithinAbs(2.0, 1e-12));
    }
    SECTION("missing bins stay missing and drop out of neighbor windows") {
        std::vector<double> out = rolling_mean_3({1.0, missing_value(), 3.0});
        CHECK_THAT(out[0], WithinAbs(1.0, 1e-12));
        CHECK(is_missing(out[1]));
        CHECK_THAT(out[2], WithinAbs(3.0, 1e-12));
    }
}

TEST_CASE("gaussian smoothing renormalizes per position") {
    SmoothingConfig cfg = SmoothingConfig::from_sigma(1.0);

    SECTION("derived radius") {
        CHECK(cfg.radius == 3);
        CHECK(SmoothingConfig::from_sigma(1.5).radius == 5);
    }
    SECTION("a constant series is fixed everywhere, edges included") {
        // weights summing to 1 at a position is equivalent to fixing a
        // constant there
        std::vector<double> out = gaussian_smooth(std::vector<double>(9, 4.25), cfg);
        for (double v : out) CHECK_THAT(v, WithinAbs(4.25, 1e-9));
    }
    SECTION("interior impulse reproduces the kernel shape and conserves mass") {
        std::vector<double> series(13, 0.0);
        series[6] = 1.0;
        std::vector<double> out = gaussian_smooth(series, cfg);
        for (int d = 1; d <= 3; ++d) {
            CHECK_THAT(out[6 + d] / out[6], WithinAbs(std::exp(-0.5 * d * d), 1e-12));
            CHECK_THAT(out[6 - d], WithinAbs(out[6 + d], 1e-15));
        }
        CHECK(out[1] == 0.0);
        CHECK(out[11] == 0.0);
        double mass = 0.0;
        for (double v : out) mass += v;
        CHECK_THAT(mass, WithinAbs(1.0, 1e-9));
    }
    SECTION("degenerate sigma is the identity") {
        std::vector<double> series = {1.0, 9.0, 2.0};
        SmoothingConfig tiny;
        tiny.sigma = 1e-7;
        CHECK(gaussian_smooth(series, tiny) == series);
    }
    SECTION("invalid sigma is rejected") {
        SmoothingConfig bad;
        bad.sigma = 0.0;
        CHECK_THROWS_AS(gaussian_smooth({1.0}, bad), ValidationError);
    }
    SECTION("missing positions stay missing") {
        std::vector<double> series = {1.0, missing_value(), 1.0, 1.0};
        std::vector<double> out = gaussian_smooth(series, cfg);
        CHECK(is_missing(out[1]));
        CHECK_THAT(out[0], WithinAbs(1.0, 1e-9));  // renormalized over present
    }
}

TEST_CASE("trend tests match closed-form evaluation") {
    auto series_of = [](std::vector<double> smoothed) {
        TrajectorySeries s;
        s.raw_counts.assign(smoothed.size(), 0.0);
        s.rate = smoothed;
        s.rolled = smoothed;
        s.smoothed = std::move(smoothed);
        return s;
    };
    std::vector<double> unit_verses(5, 1000.0);

    SECTION("strictly monotone series hit rho = +/-1 exactly") {
        TrendTests up = trend_tests(series_of({1.0, 2.0, 4.0, 4.5, 9.0}), unit_verses);
        CHECK(up.spearman_rho == 1.0);
        TrendTests down = trend_tests(series_of({9.0, 4.5, 4.0, 2.0, 1.0}), unit_verses);
        CHECK(down.spearman_rho == -1.0);
    }
    SECTION("linear series recover their slope") {
        TrendTests t = trend_tests(series_of({3.0, 5.5, 8.0, 10.5, 13.0}), unit_verses);
        CHECK_THAT(t.slope, WithinAbs(2.5, 1e-12));
    }
    SECTION("tied values take average ranks") {
        TrendTests t = trend_tests(series_of({1.0, 1.0, 2.0}), {1.0, 1.0, 1.0});
        CHECK_THAT(t.spearman_rho, WithinAbs(oracles::spearman_direct({0, 1, 2}, {1, 1, 2}), 1e-12));
        CHECK_THAT(t.spearman_rho, WithinAbs(1.5 / std::sqrt(3.0), 1e-12));
    }
    SECTION("constant series has zero slope and zero rho") {
        TrendTests t = trend_tests(series_of({4.0, 4.0, 4.0, 4.0}), {1.0, 1.0, 1.0, 1.0});
        CHECK(t.slope == 0.0);
        CHECK(t.spearman_rho == 0.0);
    }
    SECTION("chi-square hand cases") {
        TrajectorySeries s;
        s.raw_counts = {10.0, 10.0, 0.0, 0.0};
        s.rate = s.rolled = s.smoothed = {1.0, 1.0, 0.0, 0.0};
        TrendTests t = trend_tests(s, {100.0, 100.0, 100.0, 100.0});
        CHECK_THAT(t.chi_square, WithinAbs(20.0, 1e-12));
        CHECK_THAT(t.chi_square_p, WithinAbs(std::erfc(std::sqrt(10.0)), 1e-15));

        // counts proportional to verse volume carry no shift signal
        s.raw_counts = {30.0, 10.0};
        s.rate = s.rolled = s.smoothed = {1.0, 1.0};
        TrendTests flat = trend_tests(s, {3000.0, 1000.0});
        CHECK(flat.chi_square == 0.0);
        CHECK(flat.chi_square_p == 1.0);
    }
    SECTION("survival function anchors") {
        CHECK(chi_square_p(0.0) == 1.0);
        CHECK_THAT(chi_square_p(3.841458820694124), WithinAbs(0.05, 1e-6));
        CHECK(chi_square_p(1.0) > chi_square_p(2.0));
        CHECK(chi_square_p(2.0) > chi_square_p(4.0));
    }
    SECTION("twenty random series agree with the oracles to 1e-9") {
        auto rng = substream(20260818, "temporal-oracle");
        for (int round = 0; round < 20; ++round) {
            std::size_t bins = 4 + uniform_index(rng, 9);
            std::vector<double> counts(bins), verses(bins), xs(bins);
            for (std::size_t b = 0; b < bins; ++b) {
                counts[b] = double(uniform_index(rng, 51));
                verses[b] = 1000.0 + double(uniform_index(rng, 4001));
                xs[b] = double(b);
            }
            TrajectorySeries s = trajectory_from_counts("f", counts, verses,
                                                        SmoothingConfig::from_sigma(1.0));
            TrendTests t = trend_tests(s, verses);
            CHECK_THAT(t.slope, WithinAbs(oracles::ols_slope_direct(xs, s.smoothed), 1e-9));
            CHECK_THAT(t.spearman_rho, WithinAbs(oracles::spearman_direct(xs, s.smoothed), 1e-9));
            CHECK_THAT(t.chi_square,
                       WithinAbs(oracles::chi_square_halves_direct(counts, verses), 1e-9));
        }
    }
}

TEST_CASE("the temporal table counts occurrences per poet and bin") {
    CorpusStore store = store_from({
        {"poetA", 4, 2, "باده ناب", "شب دراز"},   // 1 family hit per verse
        {"poetA", 4, 2, "ساغر می", "شب دراز"},    // member form counts too
        {"poetB", 6, 4, "باده تلخ", "گل سرخ"},
    });
    FamilySet fs = wine_family();
    TemporalTable table = table_of(store, fs);

    SECTION("bins and volumes") {
        REQUIRE(table.n_bins == 2);
        CHECK(table.verses_per_bin == std::vector<double>{4.0, 4.0});
        CHECK(table.poets == std::vector<std::string>{"poetA", "poetB"});
        CHECK(table.poet_verses.at("poetA") == std::vector<double>{4.0, 0.0});
        CHECK(table.poet_verses.at("poetB") == std::vector<double>{0.0, 4.0});
    }
    SECTION("per-poet occurrence counts roll up") {
        CHECK(table.family_poet_counts.at("f0000").at("poetA") == std::vector<double>{4.0, 0.0});
        CHECK(table.family_poet_counts.at("f0000").at("poetB") == std::vector<double>{0.0, 4.0});
        CHECK(table.counts_of("f0000") == std::vector<double>{4.0, 4.0});
        CHECK(table.counts_of("missing") == std::vector<double>{0.0, 0.0});
        CHECK(summed_counts(table, {"f0000", "missing"}) == std::vector<double>{4.0, 4.0});
    }
    SECTION("trajectory chains rate, rolling mean, and smoothing") {
        TrajectorySeries s = build_trajectory("f0000", table, SmoothingConfig::from_sigma(1.0));
        CHECK(s.raw_counts == std::vector<double>{4.0, 4.0});
        CHECK_THAT(s.rate[0], WithinAbs(10000.0, 1e-9));
        CHECK_THAT(s.rate[1], WithinAbs(10000.0, 1e-9));
        CHECK_THAT(s.smoothed[0], WithinAbs(10000.0, 1e-9));
        CHECK_THAT(s.smoothed[1], WithinAbs(10000.0, 1e-9));
    }
    SECTION("unbinned poems are rejected") {
        CorpusStore raw = store;
        raw.poems[0].bin_id = -1;
        TokenizedCorpus tc = tokenize_corpus(raw);
        CHECK_THROWS_AS(build_temporal_table(raw, tc, fs), ValidationError);
    }
}

TEST_CASE("poet bootstrap is seeded, reproducible, and flags absent families") {
    SECTION("single-poet corpus collapses to one resample") {
        CorpusStore store = store_from({{"only", 5, 10, "باده ناب", "شب دراز"}});
        TemporalTable table = table_of(store, wine_family());
        BootstrapSummary s =
            poet_bootstrap("f0000", table, SmoothingConfig::from_sigma(1.0), 20, 99);
        CHECK_FALSE(s.empty);
        CHECK(s.modal_peak_share == 1.0);
        CHECK(s.slope_sign_agreement == 1.0);
        for (double v : s.slopes) CHECK(v == s.slopes.front());
    }

    CorpusStore store = graded_corpus({1, 2, 3, 4}, 3, 10);
    TemporalTable table = table_of(store, wine_family());
    SmoothingConfig cfg = SmoothingConfig::from_sigma(1.0);

    SECTION("fixed seed reproduces bit-identical summaries") {
        BootstrapSummary a = poet_bootstrap("f0000", table, cfg, 25, 1234);
        BootstrapSummary b = poet_bootstrap("f0000", table, cfg, 25, 1234);
        CHECK(a.slopes == b.slopes);
        CHECK(a.peak_bins == b.peak_bins);
        CHECK(a.modal_peak_bin == b.modal_peak_bin);
        CHECK(a.modal_peak_share == b.modal_peak_share);
        CHECK(a.slope_sign_agreement == b.slope_sign_agreement);
    }
    SECTION("one resample equals the head of a longer run") {
        BootstrapSummary one = poet_bootstrap("f0000", table, cfg, 1, 77);
        BootstrapSummary five = poet_bootstrap("f0000", table, cfg, 5, 77);
        REQUIRE(one.slopes.size() == 1);
        CHECK(one.slopes[0] == five.slopes[0]);
        CHECK(one.peak_bins[0] == five.peak_bins[0]);
    }
    SECTION("absent family yields a flagged empty summary") {
        BootstrapSummary s = poet_bootstrap("ghost", table, cfg, 10, 7);
        CHECK(s.empty);
        CHECK(s.slopes.empty());
    }
    SECTION("resample counts are validated") {
        CHECK_THROWS_AS(poet_bootstrap("f0000", table, cfg, 0, 7), ValidationError);
    }
}

TEST_CASE("trend classification follows the documented gates") {
    TemporalParams params;

    SECTION("a steadily rising family is robust rising") {
        CorpusStore store = graded_corpus({1, 2, 4, 6}, 5, 10);
        TemporalTable table = table_of(store, wine_family());
        TrendResult r = analyze_trend("f0000", table, params, 42);
        CHECK(r.classification == Trajectory::RobustRising);
        CHECK(r.tests.slope > 0);
        CHECK(r.peak_bin == 3);
        CHECK(r.peak_mode_share >= params.peak_share_min);
        CHECK(r.slope_ci_low <= r.slope_ci_high);
    }
    SECTION("the mirrored family is robust declining") {
        CorpusStore store = graded_corpus({6, 4, 2, 1}, 5, 10);
        TemporalTable table = table_of(store, wine_family());
        TrendResult r = analyze_trend("f0000", table, params, 42);
        CHECK(r.classification == Trajectory::RobustDeclining);
        CHECK(r.tests.slope < 0);
        CHECK(r.peak_bin == 0);
    }
    SECTION("a flat family is stable") {
        CorpusStore store = graded_corpus({3, 3, 3, 3}, 5, 10);
        TemporalTable table = table_of(store, wine_family());
        TrendResult r = analyze_trend("f0000", table, params, 42);
        CHECK(r.classification == Trajectory::Stable);
    }
    SECTION("an unstable bootstrap downgrades a riser to uncertain") {
        TrendTests tests;
        tests.slope = 1.0;
        tests.spearman_rho = 1.0;
        BootstrapSummary shaky;
        shaky.n_resamples = 10;
        shaky.observed_slope_sign = 1;
        shaky.slope_sign_agreement = 0.5;  // below the 0.9 gate
        shaky.modal_peak_share = 0.9;
        CHECK(classify_trend(tests, shaky, {1.0, 2.0, 3.0}, params) == Trajectory::Uncertain);
        shaky.slope_sign_agreement = 1.0;
        shaky.modal_peak_share = 0.3;  // below the 0.5 gate
        CHECK(classify_trend(tests, shaky, {1.0, 2.0, 3.0}, params) == Trajectory::Uncertain);
        shaky.modal_peak_share = 0.9;
        CHECK(classify_trend(tests, shaky, {1.0, 2.0, 3.0}, params) == Trajectory::RobustRising);
    }
    SECTION("an absent family is uncertain") {
        BootstrapSummary empty;
        empty.empty = true;
        CHECK(classify_trend(TrendTests{}, empty, {0.0, 0.0}, params) == Trajectory::Uncertain);
    }
    SECTION("classification is invariant under positive count rescaling") {
        for (std::vector<int> hits : {std::vector<int>{1, 2, 4, 6}, std::vector<int>{3, 3, 3, 3},
                                      std::vector<int>{6, 4, 2, 1}}) {
            CorpusStore store = graded_corpus(hits, 5, 10);
            TemporalTable table = table_of(store, wine_family());
            TemporalTable scaled = table;
            for (auto& [fid, per_poet] : scaled.family_poet_counts)
                for (auto& [poet, counts] : per_poet)
                    for (double& c : counts) c *= 7.0;
            scaled.family_counts.clear();
            for (const auto& [fid, per_poet] : scaled.family_poet_counts) {
                std::vector<double> total(scaled.n_bins, 0.0);
                for (const auto& [poet, counts] : per_poet)
                    for (std::size_t b = 0; b < counts.size(); ++b) total[b] += counts[b];
                scaled.family_counts[fid] = total;
            }
            TrendResult base = analyze_trend("f0000", table, params, 42);
            TrendResult big = analyze_trend("f0000", scaled, params, 42);
            CHECK(base.classification == big.classification);
            CHECK(base.peak_bin == big.peak_bin);
        }
    }
}

TEST_CASE("field coupling is a unit-diagonal correlation matrix") {
    std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> anti = {10.0, 8.0, 6.0, 4.0, 2.0};
    std::vector<double> noisy = {2.0, 1.0, 4.0, 3.0, 6.0};

    SECTION("self-correlation and anti-correlation") {
        auto m = field_coupling({x, anti, noisy});
        CHECK(m[0][0] == 1.0);
        CHECK(m[1][1] == 1.0);
        CHECK_THAT(m[0][1], WithinAbs(-1.0, 1e-12));
        CHECK(m[0][2] == m[2][0]);
        CHECK_THAT(m[0][2], WithinAbs(oracles::pearson_direct(x, noisy), 1e-12));
    }
    SECTION("positions missing in either series drop out") {
        std::vector<double> gappy = {2.0, missing_value(), 4.0, 3.0, 6.0};
        double r = pearson(x, gappy);
        CHECK_THAT(r, WithinAbs(oracles::pearson_direct({1, 3, 4, 5}, {2, 4, 3, 6}), 1e-12));
    }
    SECTION("length mismatch is rejected") {
        CHECK_THROWS_AS(pearson({1.0}, {1.0, 2.0}), ValidationError);
    }
}

TEST_CASE("robustness weightings expose poet concentration") {
    SECTION("equal contributions make balanced equal pooled") {
        CorpusStore store = store_from({
            {"pa", 4, 10, "باده ناب", "شب دراز"},
            {"pb", 4, 10, "باده ناب", "شب دراز"},
            {"pc", 6, 10, "باده تلخ", "گل سرخ"},
            {"pd", 6, 10, "باده تلخ", "گل سرخ"},
        });
        TemporalTable table = table_of(store, wine_family());
        VariantSeries v = robustness_weightings("f0000", table);
        REQUIRE(v.main.size() == 2);
        for (std::size_t b = 0; b < v.main.size(); ++b)
            CHECK_THAT(v.poet_balanced[b], WithinAbs(v.main[b], 1e-12));
    }
    SECTION("balancing reweights a skewed bin") {
        // poet A: 2 hits in 100 verses; poet B: 0 hits in 300 verses
        CorpusStore store = store_from({
            {"pa", 4, 2, "باده ناب", "شب دراز"},
            {"pa", 4, 98, "گل سرخ", "شب دراز"},
            {"pb", 4, 300, "گل سرخ", "شب دراز"},
        });
        TemporalTable table = table_of(store, wine_family());
        VariantSeries v = robustness_weightings("f0000", table);
        CHECK_THAT(v.main[0], WithinAbs(50.0, 1e-9));           // 10000 * 2/400
        CHECK_THAT(v.poet_balanced[0], WithinAbs(100.0, 1e-9));  // mean(200, 0)
    }
    SECTION("removing the sole contributor zeroes the series") {
        CorpusStore store = store_from({
            {"star", 4, 5, "باده ناب", "شب دراز"},
            {"other4", 4, 5, "گل سرخ", "شب دراز"},
            {"other6", 6, 5, "گل سرخ", "شب دراز"},
        });
        TemporalTable table = table_of(store, wine_family());
        VariantSeries v = robustness_weightings("f0000", table);
        CHECK(v.top_poet == "star");
        CHECK(v.top_poet_removed == std::vector<double>{0.0, 0.0});
    }
    SECTION("removal can empty a bin entirely") {
        CorpusStore store = store_from({
            {"star", 4, 5, "باده ناب", "شب دراز"},
            {"other6", 6, 2, "باده تلخ", "گل سرخ"},
            {"other6", 6, 3, "گل سرخ", "شب دراز"},
        });
        TemporalTable table = table_of(store, wine_family());
        VariantSeries v = robustness_weightings("f0000", table);
        CHECK(v.top_poet == "star");
        CHECK(is_missing(v.top_poet_removed[0]));
        CHECK_THAT(v.top_poet_removed[1], WithinAbs(v.main[1], 1e-12));
    }
    SECTION("a family with no counts has no top poet") {
        CorpusStore store = store_from({{"pa", 4, 3, "گل سرخ", "شب دراز"}});
        TemporalTable table = table_of(store, wine_family());
        VariantSeries v = robustness_weightings("f0000", table);
        CHECK(v.top_poet.empty());
        CHECK(v.top_poet_removed == v.main);
    }
}

TEST_CASE("trajectory export carries the documented columns") {
    CorpusStore store = store_from({
        {"pa", 4, 2, "باده ناب", "شب دراز"},
        {"pb", 6, 2, "باده تلخ", "گل سرخ"},
    });
    TemporalTable table = table_of(store, wine_family());
    std::vector<TrajectorySeries> all = {
        build_trajectory("f0000", table, SmoothingConfig::from_sigma(1.0)),
        build_trajectory("ghost", table, SmoothingConfig::from_sigma(1.0)),
    };
    std::ostringstream os;
    write_trajectories_csv(all, os);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "family_id,bin,raw,rate,rolled,smoothed");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) lines.push_back(line);
    REQUIRE(lines.size() == 4);  // two families x two bins
    CHECK(lines[0].rfind("f0000,0,2,", 0) == 0);
    CHECK(lines[2].rfind("ghost,0,0,", 0) == 0);
}
