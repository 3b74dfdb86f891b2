#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "symatlas/dynamics.hpp"

using namespace symatlas;
using Catch::Matchers::WithinAbs;

namespace {

AtlasGraph graph_of(const std::vector<std::pair<std::string, Residency>>& nodes,
                    const std::vector<std::tuple<std::string, std::string, Layer, double>>& edges) {
    AtlasGraph g;
    for (const auto& [id, res] : nodes) {
        AtlasNode n;
        n.family_id = id;
        n.head = id;  // heads double as ids so domain lexicons are easy to state
        n.residency = res;
        g.node_index[id] = g.nodes.size();
        g.nodes.push_back(n);
    }
    for (const auto& [a, b, layer, score] : edges) {
        EdgeScoreBreakdown e;
        e.family_a = a < b ? a : b;
        e.family_b = a < b ? b : a;
        e.layer = layer;
        e.score = score;
        g.edges.push_back(e);
    }
    return g;
}

// Corpus fixture: one poem per entry, explicit verses.
struct PoemFixture {
    std::string poet_id;
    int century;
    std::vector<std::pair<std::string, std::string>> verses;
};

CorpusStore store_of(const std::vector<PoemFixture>& poems) {
    CorpusStore store;
    int n = 0;
    for (const PoemFixture& spec : poems) {
        Poem p;
        p.poem_id = "p" + std::to_string(n++);
        p.poet_id = spec.poet_id;
        p.hijri_century = spec.century;
        for (const auto& [a, b] : spec.verses) p.verses.push_back(Verse{{a, b}, false});
        store.poem_index[p.poem_id] = store.poems.size();
        store.poems.push_back(std::move(p));
        PoetRecord rec;
        rec.poet_id = spec.poet_id;
        rec.name = spec.poet_id;
        rec.hijri_century = spec.century;
        store.poets[spec.poet_id] = rec;
    }
    bin_centuries(store);
    return store;
}

FamilySet three_families() {
    FamilySet fs;
    auto add = [&](const std::string& id, const std::string& head,
                   std::vector<std::string> members) {
        Family f;
        f.family_id = id;
        f.head = head;
        f.members = members;
        fs.families.push_back(f);
        for (const std::string& m : members) fs.form_to_family[m] = id;
    };
    add("fk", "سلطان", {"سلطان"});
    add("fn", "شب", {"شب"});
    add("fw", "باده", {"باده", "ساغر"});
    return fs;
}

AtlasGraph three_node_backbone() {
    return graph_of({{"fk", Residency::Referential}, {"fn", Residency::Core},
                     {"fw", Residency::Core}},
                    {{"fn", "fw", Layer::Core, 0.52},
                     {"fk", "fw", Layer::Bridge, 0.45},
                     {"fk", "fn", Layer::Bridge, 0.60}});
}

SnapshotGraph snapshot_with_edges(std::set<std::string> nodes,
                                  std::vector<SnapshotEdge> edges) {
    SnapshotGraph s;
    s.active_nodes = std::move(nodes);
    s.edges = std::move(edges);
    return s;
}

}  // namespace

TEST_CASE("the dynamics table counts per bin at poem granularity") {
    CorpusStore store = store_of({
        {"pa", 4, {{"باده شب", "گل سرخ"}, {"شب شب", "خانه دور"}}},
        {"pa", 4, {{"باده ساغر", "سلطان شب"}}},
        {"pb", 6, {{"سلطان باده", "ساغر ناب"}}},
    });
    TokenizedCorpus tc = tokenize_corpus(store);
    AtlasGraph backbone = three_node_backbone();
    DynamicsTable table = build_dynamics_table(store, tc, three_families(), backbone);

    SECTION("verse volumes") {
        REQUIRE(table.n_bins == 2);
        CHECK(table.verses_per_bin == std::vector<double>{3.0, 1.0});
        CHECK(table.poet_verses.at("pa") == std::vector<double>{3.0, 0.0});
        CHECK(table.poet_verses.at("pb") == std::vector<double>{0.0, 1.0});
    }
    SECTION("raw counts roll member forms up") {
        CHECK(table.raw.at("fw") == std::vector<double>{3.0, 2.0});
        CHECK(table.raw.at("fn") == std::vector<double>{4.0, 0.0});
        CHECK(table.raw.at("fk") == std::vector<double>{1.0, 1.0});
    }
    SECTION("verse presence counts distinct verses, not tokens") {
        CHECK(table.verse_presence.at("fn") == std::vector<double>{3.0, 0.0});
        CHECK(table.verse_presence.at("fw") == std::vector<double>{2.0, 1.0});
    }
    SECTION("edge co-activation counts poems containing both families") {
        CHECK(table.edge_coact.at({"fn", "fw"}) == std::vector<double>{2.0, 0.0});
        CHECK(table.edge_coact.at({"fk", "fw"}) == std::vector<double>{1.0, 1.0});
        CHECK(table.edge_coact.at({"fk", "fn"}) == std::vector<double>{1.0, 0.0});
    }
    SECTION("loose thresholds activate the bin-0 core pair only") {
        SnapshotSet set =
            build_snapshots(table, backbone, AtlasParams{}, standard_variants()[0]);
        REQUIRE(set.snapshots.size() == 2);
        CHECK(set.snapshots[0].active_nodes == std::set<std::string>{"fn", "fw"});
        REQUIRE(set.snapshots[0].edges.size() == 1);
        CHECK(set.snapshots[0].edges[0].family_a == "fn");
        CHECK(set.snapshots[0].edges[0].family_b == "fw");
        CHECK(set.snapshots[0].edges[0].weight == 2.0);
        CHECK(set.snapshots[1].active_nodes.empty());
        CHECK(set.snapshots[1].edges.empty());
    }
}

TEST_CASE("activation thresholds behave as floors") {
    AtlasGraph backbone = three_node_backbone();
    DynamicsTable table;
    table.n_bins = 1;
    table.verses_per_bin = {100.0};
    table.raw["fw"] = {5.0};
    table.raw["fn"] = {5.0};
    table.raw["fk"] = {4.0};  // below the base raw floor
    table.verse_presence["fw"] = {3.0};
    table.verse_presence["fn"] = {3.0};
    table.verse_presence["fk"] = {4.0};
    table.edge_coact[{"fn", "fw"}] = {2.0};
    table.edge_coact[{"fk", "fw"}] = {2.0};
    table.edge_coact[{"fk", "fn"}] = {0.0};

    SECTION("values exactly at the floor activate") {
        SnapshotSet set =
            build_snapshots(table, backbone, AtlasParams{}, standard_variants()[1]);
        CHECK(set.snapshots[0].active_nodes == std::set<std::string>{"fn", "fw"});
        // fk misses the raw floor by one even though its other counts clear it
        CHECK_FALSE(set.snapshots[0].active_nodes.count("fk"));
    }
    SECTION("the loose variant admits the borderline node") {
        SnapshotSet set =
            build_snapshots(table, backbone, AtlasParams{}, standard_variants()[0]);
        CHECK(set.snapshots[0].active_nodes == std::set<std::string>{"fk", "fn", "fw"});
        CHECK(set.snapshots[0].edges.size() == 2);  // fk|fn has zero co-activation
    }
    SECTION("edges need both endpoints and their own floor") {
        DynamicsTable weak = table;
        weak.edge_coact[{"fn", "fw"}] = {1.0};  // endpoints active, edge floor missed
        weak.edge_coact[{"fk", "fw"}] = {3.0};
        weak.edge_coact[{"fk", "fn"}] = {2.0};  // keeps fn's summed co-activation afloat
        SnapshotSet set =
            build_snapshots(weak, backbone, AtlasParams{}, standard_variants()[1]);
        CHECK(set.snapshots[0].active_nodes == std::set<std::string>{"fn", "fw"});
        CHECK(set.snapshots[0].edges.empty());  // fk inactive kills the strong edge
    }
}

TEST_CASE("strictness is monotone across the three threshold variants") {
    AtlasGraph backbone = three_node_backbone();
    auto rng = substream(20260818, "dynamics-monotone");
    for (int round = 0; round < 5; ++round) {
        DynamicsTable table;
        table.n_bins = 3;
        table.verses_per_bin = {50.0, 50.0, 50.0};
        for (const std::string f : {"fk", "fn", "fw"}) {
            table.raw[f].assign(3, 0.0);
            table.verse_presence[f].assign(3, 0.0);
            for (std::size_t b = 0; b < 3; ++b) {
                table.raw[f][b] = double(uniform_index(rng, 13));
                table.verse_presence[f][b] = double(uniform_index(rng, 7));
            }
        }
        for (const auto& pair : {std::pair<std::string, std::string>{"fn", "fw"},
                                 {"fk", "fw"},
                                 {"fk", "fn"}}) {
            table.edge_coact[pair].assign(3, 0.0);
            for (std::size_t b = 0; b < 3; ++b)
                table.edge_coact[pair][b] = double(uniform_index(rng, 5));
        }
        SnapshotSet loose =
            build_snapshots(table, backbone, AtlasParams{}, standard_variants()[0]);
        SnapshotSet base =
            build_snapshots(table, backbone, AtlasParams{}, standard_variants()[1]);
        SnapshotSet strict =
            build_snapshots(table, backbone, AtlasParams{}, standard_variants()[2]);
        for (std::size_t b = 0; b < 3; ++b) {
            for (const std::string& id : strict.snapshots[b].active_nodes)
                CHECK(base.snapshots[b].active_nodes.count(id));
            for (const std::string& id : base.snapshots[b].active_nodes)
                CHECK(loose.snapshots[b].active_nodes.count(id));
            auto pair_set = [](const SnapshotGraph& s) {
                std::set<std::pair<std::string, std::string>> out;
                for (const SnapshotEdge& e : s.edges) out.insert({e.family_a, e.family_b});
                return out;
            };
            for (const auto& e : pair_set(strict.snapshots[b]))
                CHECK(pair_set(base.snapshots[b]).count(e));
            for (const auto& e : pair_set(base.snapshots[b]))
                CHECK(pair_set(loose.snapshots[b]).count(e));
        }
    }
}

TEST_CASE("the high-confidence variant narrows the edge universe") {
    // bridge edge at 0.45 sits under the 0.38 + 0.1 floor; 0.60 survives;
    // the core edge at 0.52 survives its 0.41 + 0.1 floor
    AtlasGraph backbone = three_node_backbone();
    DynamicsTable table;
    table.n_bins = 1;
    table.verses_per_bin = {100.0};
    table.raw["fw"] = {10.0};
    table.raw["fn"] = {10.0};
    table.raw["fk"] = {10.0};
    table.verse_presence["fw"] = {5.0};
    table.verse_presence["fn"] = {5.0};
    table.verse_presence["fk"] = {5.0};
    table.edge_coact[{"fn", "fw"}] = {3.0};
    table.edge_coact[{"fk", "fw"}] = {3.0};  // the dropped edge carried fk's co-activation
    table.edge_coact[{"fk", "fn"}] = {0.0};

    SnapshotSet base = build_snapshots(table, backbone, AtlasParams{}, standard_variants()[1]);
    CHECK(base.snapshots[0].active_nodes == std::set<std::string>{"fk", "fn", "fw"});
    CHECK(base.snapshots[0].edges.size() == 2);

    SnapshotSet high = build_snapshots(table, backbone, AtlasParams{}, standard_variants()[4]);
    // without the 0.45 bridge edge, fk's only co-activation source is gone
    CHECK(high.snapshots[0].active_nodes == std::set<std::string>{"fn", "fw"});
    REQUIRE(high.snapshots[0].edges.size() == 1);
    CHECK(high.snapshots[0].edges[0].family_a == "fn");
}

TEST_CASE("poet balancing reweights contributions inside a bin") {
    AtlasGraph backbone = three_node_backbone();
    DynamicsTable table;
    table.n_bins = 1;
    table.verses_per_bin = {125.0};
    table.poet_verses["px"] = {100.0};
    table.poet_verses["py"] = {25.0};
    // poet px supplies everything: balanced weight 62.5/100 shrinks it
    table.raw["fw"] = {6.0};
    table.raw_by_poet["fw"]["px"] = {6.0};
    table.verse_presence["fw"] = {6.0};
    table.verse_by_poet["fw"]["px"] = {6.0};
    table.raw["fn"] = {8.0};
    table.raw_by_poet["fn"]["px"] = {4.0};
    table.raw_by_poet["fn"]["py"] = {4.0};
    table.verse_presence["fn"] = {8.0};
    table.verse_by_poet["fn"]["px"] = {4.0};
    table.verse_by_poet["fn"]["py"] = {4.0};
    table.edge_coact[{"fn", "fw"}] = {4.0};
    table.edge_coact_by_poet[{"fn", "fw"}]["px"] = {4.0};

    SnapshotSet base = build_snapshots(table, backbone, AtlasParams{}, standard_variants()[1]);
    CHECK(base.snapshots[0].active_nodes.count("fw"));

    SnapshotSet balanced =
        build_snapshots(table, backbone, AtlasParams{}, standard_variants()[3]);
    // balanced raw for fw: 6 * (62.5/100) = 3.75, below the floor of 5
    CHECK_FALSE(balanced.snapshots[0].active_nodes.count("fw"));
    // fn's py share is upweighted: 4*0.625 + 4*2.5 = 12.5, still active
    CHECK(balanced.snapshots[0].active_nodes.count("fn"));

    SECTION("equal poet volumes make balancing a no-op") {
        DynamicsTable sym = table;
        sym.verses_per_bin = {200.0};
        sym.poet_verses["px"] = {100.0};
        sym.poet_verses["py"] = {100.0};
        SnapshotSet a = build_snapshots(sym, backbone, AtlasParams{}, standard_variants()[1]);
        SnapshotSet b = build_snapshots(sym, backbone, AtlasParams{}, standard_variants()[3]);
        CHECK(a.snapshots[0].active_nodes == b.snapshots[0].active_nodes);
        REQUIRE(a.snapshots[0].edges.size() == b.snapshots[0].edges.size());
        for (std::size_t i = 0; i < a.snapshots[0].edges.size(); ++i)
            CHECK_THAT(a.snapshots[0].edges[i].weight,
                       WithinAbs(b.snapshots[0].edges[i].weight, 1e-12));
    }
}

TEST_CASE("cross-link ratio is the bridge share of active edges") {
    auto edge = [](const std::string& a, const std::string& b, Layer l) {
        return SnapshotEdge{a, b, l, 1.0};
    };
    SECTION("no active edges") {
        CHECK(cross_link_ratio(snapshot_with_edges({"a"}, {})) == 0.0);
    }
    SECTION("all bridge") {
        SnapshotGraph s = snapshot_with_edges(
            {"a", "b"}, {edge("a", "b", Layer::Bridge), edge("a", "c", Layer::Bridge)});
        CHECK(cross_link_ratio(s) == 1.0);
    }
    SECTION("three of twelve") {
        std::vector<SnapshotEdge> edges;
        for (int i = 0; i < 9; ++i)
            edges.push_back(edge("a" + std::to_string(i), "b", Layer::Core));
        for (int i = 0; i < 3; ++i)
            edges.push_back(edge("c" + std::to_string(i), "r", Layer::Bridge));
        CHECK_THAT(cross_link_ratio(snapshot_with_edges({}, edges)), WithinAbs(0.25, 1e-12));
    }
}

TEST_CASE("degree centralization matches the closed forms") {
    SECTION("star is maximally centralized") {
        CHECK(degree_centralization({4, 1, 1, 1, 1}) == 1.0);
        CHECK(degree_centralization({9, 1, 1, 1, 1, 1, 1, 1, 1, 1}) == 1.0);
    }
    SECTION("regular graphs score zero") {
        CHECK(degree_centralization({2, 2, 2, 2, 2}) == 0.0);
        CHECK(degree_centralization({3, 3, 3, 3}) == 0.0);
    }
    SECTION("fewer than three nodes score zero") {
        CHECK(degree_centralization({}) == 0.0);
        CHECK(degree_centralization({1, 1}) == 0.0);
    }
    SECTION("path of five by hand") {
        CHECK_THAT(degree_centralization({1, 2, 2, 2, 1}), WithinAbs(1.0 / 6.0, 1e-12));
    }
    SECTION("snapshot wrapper restricts to the active core") {
        AtlasGraph backbone = graph_of({{"c0", Residency::Core},
                                        {"c1", Residency::Core},
                                        {"c2", Residency::Core},
                                        {"c3", Residency::Core},
                                        {"c4", Residency::Core},
                                        {"r0", Residency::Referential}},
                                       {});
        std::vector<SnapshotEdge> edges;
        for (int i = 1; i <= 4; ++i)
            edges.push_back({"c0", "c" + std::to_string(i), Layer::Core, 1.0});
        edges.push_back({"c0", "r0", Layer::Bridge, 5.0});  // bridge edges don't count
        SnapshotGraph star = snapshot_with_edges({"c0", "c1", "c2", "c3", "c4", "r0"}, edges);
        CHECK(snapshot_centralization(star, backbone) == 1.0);
    }
}

TEST_CASE("snapshot core modularity reuses the community detector") {
    AtlasGraph backbone = graph_of({{"a", Residency::Core},
                                    {"b", Residency::Core},
                                    {"c", Residency::Core},
                                    {"x", Residency::Core},
                                    {"y", Residency::Core},
                                    {"z", Residency::Core}},
                                   {});
    std::vector<SnapshotEdge> edges = {
        {"a", "b", Layer::Core, 1.0}, {"a", "c", Layer::Core, 1.0},
        {"b", "c", Layer::Core, 1.0}, {"x", "y", Layer::Core, 1.0},
        {"x", "z", Layer::Core, 1.0}, {"y", "z", Layer::Core, 1.0},
    };
    SnapshotGraph snap = snapshot_with_edges({"a", "b", "c", "x", "y", "z"}, edges);
    CHECK_THAT(snapshot_core_modularity(snap, backbone), WithinAbs(0.5, 1e-9));
}

TEST_CASE("hub drift tracks weighted-degree ranks across thirds") {
    AtlasGraph backbone = graph_of(
        {{"a", Residency::Core}, {"b", Residency::Core}, {"c", Residency::Core},
         {"d", Residency::Core}},
        {});
    auto early_snap = [] {
        return snapshot_with_edges({"a", "b", "c"}, {{"a", "b", Layer::Core, 3.0},
                                                     {"b", "c", Layer::Core, 1.0}});
    };
    auto late_snap = [] {
        return snapshot_with_edges({"a", "b", "c"}, {{"a", "b", Layer::Core, 1.0},
                                                     {"b", "c", Layer::Core, 3.0}});
    };
    SnapshotSet set;
    set.snapshots = {early_snap(), early_snap(), late_snap(), late_snap()};
    for (std::size_t b = 0; b < 4; ++b) set.snapshots[b].bin_id = static_cast<int>(b);

    std::map<std::string, HubDrift> by_id;
    for (HubDrift& h : hub_drift(set, backbone, 1.0)) by_id[h.family_id] = h;

    SECTION("ranks per bin") {
        CHECK(by_id.at("b").rank == std::vector<double>{1.0, 1.0, 1.0, 1.0});
        CHECK(by_id.at("a").rank == std::vector<double>{2.0, 2.0, 3.0, 3.0});
        CHECK(by_id.at("c").rank == std::vector<double>{3.0, 3.0, 2.0, 2.0});
    }
    SECTION("classification by drift") {
        CHECK(by_id.at("b").defined);
        CHECK(by_id.at("b").drift == 0.0);
        CHECK(by_id.at("b").classification == HubClass::StableHub);
        CHECK_THAT(by_id.at("a").drift, WithinAbs(1.0, 1e-12));
        CHECK(by_id.at("a").classification == HubClass::DecliningHub);
        CHECK_THAT(by_id.at("c").drift, WithinAbs(-1.0, 1e-12));
        CHECK(by_id.at("c").classification == HubClass::RisingHub);
    }
    SECTION("families without coverage carry no drift evidence") {
        CHECK_FALSE(by_id.at("d").defined);
        CHECK(by_id.at("d").classification == HubClass::StableHub);
    }
}

TEST_CASE("bridge strength splits the active bridge weight by domain") {
    AtlasGraph backbone = graph_of({{"core1", Residency::Core},
                                    {"core2", Residency::Core},
                                    {"شاه", Residency::Referential},
                                    {"یوسف", Residency::Referential}},
                                   {});
    std::set<std::string> courtly = {"شاه"};
    std::set<std::string> sacred = {"یوسف"};
    SnapshotGraph snap = snapshot_with_edges(
        {"core1", "core2", "شاه", "یوسف"},
        {{"core1", "شاه", Layer::Bridge, 3.0}, {"core2", "یوسف", Layer::Bridge, 1.0}});

    CHECK_THAT(bridge_strength(snap, backbone, courtly), WithinAbs(0.75, 1e-12));
    CHECK_THAT(bridge_strength(snap, backbone, sacred), WithinAbs(0.25, 1e-12));
    CHECK(bridge_strength(snap, backbone, {"غایب"}) == 0.0);

    SECTION("one domain holding all weight scores one") {
        SnapshotGraph only = snapshot_with_edges(
            {"core1", "شاه"}, {{"core1", "شاه", Layer::Bridge, 2.5}});
        CHECK(bridge_strength(only, backbone, courtly) == 1.0);
    }
    SECTION("no active bridge edges scores zero") {
        SnapshotGraph none = snapshot_with_edges(
            {"core1", "core2"}, {{"core1", "core2", Layer::Core, 4.0}});
        CHECK(bridge_strength(none, backbone, courtly) == 0.0);
    }
}

TEST_CASE("target dispersion is the normalized entropy of reached fields") {
    AtlasGraph backbone = graph_of({{"c1", Residency::Core},
                                    {"c2", Residency::Core},
                                    {"c3", Residency::Core},
                                    {"c4", Residency::Core},
                                    {"r1", Residency::Referential},
                                    {"r2", Residency::Referential}},
                                   {});
    std::set<std::string> domain = {"r1", "r2"};
    std::map<std::string, FieldLabel> field = {
        {"c1", FieldLabel::WineTavernRitual},
        {"c2", FieldLabel::FloralVegetal},
        {"c3", FieldLabel::BodyBeloved},
        {"c4", FieldLabel::WineTavernRitual},
    };
    auto bridge = [](const std::string& c, const std::string& r) {
        return SnapshotEdge{c, r, Layer::Core, 1.0};  // layer fixed below
    };
    auto snap_of = [&](std::vector<std::pair<std::string, std::string>> pairs) {
        std::vector<SnapshotEdge> edges;
        for (auto& [c, r] : pairs) {
            SnapshotEdge e = bridge(c, r);
            e.layer = Layer::Bridge;
            edges.push_back(e);
        }
        return snapshot_with_edges({}, edges);
    };

    SECTION("single field collapses to zero") {
        CHECK(target_dispersion(snap_of({{"c1", "r1"}}), backbone, domain, field) == 0.0);
        CHECK(target_dispersion(snap_of({{"c1", "r1"}, {"c4", "r2"}}), backbone, domain,
                                field) == 0.0);
    }
    SECTION("uniform spread over two fields is one") {
        CHECK_THAT(target_dispersion(snap_of({{"c1", "r1"}, {"c2", "r2"}}), backbone, domain,
                                     field),
                   WithinAbs(1.0, 1e-12));
    }
    SECTION("skewed spread matches the entropy formula") {
        double d = target_dispersion(
            snap_of({{"c1", "r1"}, {"c4", "r2"}, {"c2", "r1"}, {"c3", "r2"}}), backbone,
            domain, field);
        double h = -(0.5 * std::log(0.5) + 0.25 * std::log(0.25) + 0.25 * std::log(0.25));
        CHECK_THAT(d, WithinAbs(h / std::log(3.0), 1e-12));
    }
    SECTION("edges outside the domain are ignored") {
        // restrict the domain to r1: the r2 edge stops contributing a field
        CHECK(target_dispersion(snap_of({{"c1", "r1"}, {"c2", "r2"}}), backbone, {"r1"},
                                field) == 0.0);
    }
}

TEST_CASE("late-minus-early uses ceil-thirds windows") {
    CHECK(late_minus_early({2.0, 2.0, 2.0, 2.0}) == 0.0);
    CHECK_THAT(late_minus_early({0.0, 0.0, 1.0, 1.0}), WithinAbs(1.0, 1e-12));
    CHECK_THAT(late_minus_early({0.0, 0.0, 0.0, 1.0, 1.0, 1.0}), WithinAbs(1.0, 1e-12));
    CHECK_THAT(late_minus_early({1.0, 2.0, 3.0, 4.0, 5.0}), WithinAbs(3.0, 1e-12));
    CHECK(late_minus_early({}) == 0.0);
}

TEST_CASE("the permutation null includes the identity arrangement") {
    SECTION("identical snapshots give delta zero and both tails one") {
        PermutationTails t = permutation_null({3.0, 3.0, 3.0, 3.0}, 99, 7, "flat");
        CHECK(t.observed == 0.0);
        CHECK(t.upper == 1.0);
        CHECK(t.lower == 1.0);
    }
    SECTION("an extreme observed delta reaches the floor tail") {
        std::vector<double> rising;
        for (int i = 1; i <= 12; ++i) rising.push_back(double(i));
        PermutationTails t = permutation_null(rising, 99, 7, "rising");
        CHECK_THAT(t.upper, WithinAbs(0.01, 1e-12));
        CHECK(t.lower == 1.0);
    }
    SECTION("tails never drop below the floor") {
        auto rng = substream(20260818, "dynamics-null");
        for (int round = 0; round < 5; ++round) {
            std::vector<double> series;
            for (int i = 0; i < 7; ++i) series.push_back(uniform_real(rng));
            PermutationTails t = permutation_null(series, 49, 11 + round, "prop");
            CHECK(t.upper >= 1.0 / 50.0);
            CHECK(t.lower >= 1.0 / 50.0);
            CHECK(t.upper <= 1.0);
            CHECK(t.lower <= 1.0);
        }
    }
    SECTION("seeding is deterministic") {
        std::vector<double> series = {0.2, 0.9, 0.1, 0.7, 0.4, 0.8};
        PermutationTails a = permutation_null(series, 30, 5, "m");
        PermutationTails b = permutation_null(series, 30, 5, "m");
        CHECK(a.upper == b.upper);
        CHECK(a.lower == b.lower);
    }
    SECTION("perm count is validated") {
        CHECK_THROWS_AS(permutation_null({1.0}, 0, 1, "x"), ValidationError);
    }
}

TEST_CASE("the robustness sweep runs all five variants deterministically") {
    CorpusStore store = store_of({
        {"pa", 4, {{"باده شب", "گل سرخ"}, {"باده شب", "خانه دور"}, {"باده شب", "ساغر ناب"},
                   {"شب باده", "ساغر می"}, {"باده ساغر", "شب تار"}}},
        {"pb", 6, {{"باده شب", "گل سرخ"}, {"شب باده", "ساغر ناب"}, {"باده شب", "می ناب"},
                   {"سلطان باده", "شب دراز"}, {"باده شب", "ساغر پر"}}},
        {"pc", 9, {{"باده شب", "سلطان ما"}, {"شب باده", "سلطان شد"}, {"باده شب", "ساغر زد"},
                   {"سلطان باده", "شب کوتاه"}, {"باده شب", "سلطان رفت"}}},
    });
    TokenizedCorpus tc = tokenize_corpus(store);
    AtlasGraph backbone = three_node_backbone();
    DynamicsTable table = build_dynamics_table(store, tc, three_families(), backbone);

    SweepSummary sweep =
        robustness_sweep(table, backbone, AtlasParams{}, {"سلطان"}, {"یوسف"});

    SECTION("shape and support tallies") {
        REQUIRE(sweep.variants.size() == 5);
        CHECK(sweep.variants[0].variant == VariantName::Loose);
        CHECK(sweep.variants[4].variant == VariantName::HighConfidence);
        for (const auto& [metric, support] : sweep.support)
            CHECK(support.positive + support.negative + support.flat == 5);
        CHECK(sweep.support.count("core_modularity"));
        CHECK(sweep.support.count("cross_link_ratio"));
        CHECK(sweep.support.count("degree_centralization"));
        CHECK(sweep.support.count("courtly_bridge_strength"));
        CHECK(sweep.support.count("sacred_bridge_strength"));
    }
    SECTION("deltas recompute from the per-bin series") {
        for (const VariantMetrics& v : sweep.variants) {
            CHECK_THAT(v.delta_cross_link, WithinAbs(late_minus_early(v.cross_link), 1e-12));
            CHECK_THAT(v.delta_modularity,
                       WithinAbs(late_minus_early(v.core_modularity), 1e-12));
        }
    }
    SECTION("reruns are identical") {
        SweepSummary again =
            robustness_sweep(table, backbone, AtlasParams{}, {"سلطان"}, {"یوسف"});
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(sweep.variants[i].cross_link == again.variants[i].cross_link);
            CHECK(sweep.variants[i].core_modularity == again.variants[i].core_modularity);
        }
    }
    SECTION("metric and snapshot exports carry the documented columns") {
        std::ostringstream os;
        write_variant_metrics_csv(sweep.variants, os);
        std::istringstream is(os.str());
        std::string header;
        std::getline(is, header);
        CHECK(header ==
              "variant,bin,core_modularity,cross_link_ratio,degree_centralization,"
              "courtly_bridge_strength,sacred_bridge_strength");
        std::size_t rows = 0;
        std::string line;
        while (std::getline(is, line))
            if (!line.empty()) ++rows;
        CHECK(rows == 5 * table.n_bins);

        SnapshotSet base = build_snapshots(table, backbone, AtlasParams{},
                                           standard_variants()[1]);
        std::ostringstream os2;
        write_snapshot_edges_csv(base, os2);
        std::istringstream is2(os2.str());
        std::getline(is2, header);
        CHECK(header == "bin,layer,family_a,family_b,weight");
    }
}
