#include "camsearch/error.hpp"
#include "camsearch/graph.hpp"
#include "camsearch/rng.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace camsearch;

namespace {

CameraGraph grid3x3() { return build_graph({GraphKind::grid, 9, 3.0, 0}); }

} // namespace

TEST(Graph, RejectsSelfLoopDuplicateOutOfRangeAndDisconnected)
{
    EXPECT_THROW(CameraGraph(3, {{0, 0}, {0, 1}, {1, 2}}), DataError);
    EXPECT_THROW(CameraGraph(3, {{0, 1}, {1, 0}, {1, 2}}), DataError);
    EXPECT_THROW(CameraGraph(3, {{0, 1}, {1, 3}}), DataError);
    EXPECT_THROW(CameraGraph(4, {{0, 1}, {2, 3}}), DataError);
    EXPECT_NO_THROW(CameraGraph(3, {{0, 1}, {1, 2}}));
}

TEST(Graph, AdjacencyIsSymmetricAndSorted)
{
    CameraGraph g(5, {{3, 1}, {0, 4}, {1, 0}, {2, 4}, {4, 1}});
    for (CameraId u = 0; u < 5; ++u) {
        auto n = g.neighbors(u);
        EXPECT_TRUE(std::is_sorted(n.begin(), n.end()));
        for (CameraId v : n)
            EXPECT_TRUE(g.adjacent(v, u));
    }
    EXPECT_EQ(g.num_edges(), 5u);
    EXPECT_DOUBLE_EQ(g.average_degree(), 2.0);
}

TEST(Graph, GridPresetIsLattice)
{
    auto g = grid3x3();
    EXPECT_EQ(g.num_cameras(), 9u);
    EXPECT_EQ(g.num_edges(), 12u);
    EXPECT_NEAR(g.average_degree(), 24.0 / 9.0, 1e-12);
}

TEST(Graph, Town05PresetShape)
{
    for (std::uint64_t seed : {7u, 1u, 2u, 3u}) {
        auto g = build_graph(GraphPreset::town05(seed));
        EXPECT_EQ(g.num_cameras(), 21u);
        EXPECT_GE(g.average_degree(), 2.8);
        EXPECT_LE(g.average_degree(), 4.2);
        EXPECT_LE(g.max_degree(), 4u);
        EXPECT_TRUE(oracle::connected_by_dfs(g.num_cameras(), g.edges()));
    }
}

TEST(Graph, Town07PresetShape)
{
    auto g = build_graph(GraphPreset::town07(3));
    EXPECT_EQ(g.num_cameras(), 20u);
    EXPECT_NEAR(g.average_degree(), 3.2, 0.2 * 3.2);
    EXPECT_LE(g.max_degree(), 4u);
}

TEST(Graph, GeometricPresetHitsDegreeAndIsConnected)
{
    auto g = build_graph({GraphKind::geometric, 200, 7.1, 1});
    EXPECT_EQ(g.num_cameras(), 200u);
    EXPECT_GE(g.average_degree(), 5.7);
    EXPECT_LE(g.average_degree(), 8.5);
    EXPECT_TRUE(oracle::connected_by_dfs(g.num_cameras(), g.edges()));
}

TEST(Graph, PresetsAreDeterministic)
{
    for (auto kind : {GraphKind::grid, GraphKind::geometric, GraphKind::town05, GraphKind::town07}) {
        GraphPreset p{kind, 30, 3.5, 11};
        if (kind == GraphKind::town05)
            p = GraphPreset::town05(11);
        if (kind == GraphKind::town07)
            p = GraphPreset::town07(11);
        EXPECT_EQ(build_graph(p), build_graph(p)) << to_string(kind);
    }
    EXPECT_NE(build_graph({GraphKind::geometric, 50, 4, 1}).edges(), build_graph({GraphKind::geometric, 50, 4, 2}).edges());
}

TEST(Graph, RejectsUnachievableDegree)
{
    EXPECT_THROW(build_graph({GraphKind::geometric, 5, 5.0, 0}), ConfigError);
    EXPECT_THROW(build_graph({GraphKind::geometric, 1, 0.5, 0}), ConfigError);
    EXPECT_THROW(build_graph({GraphKind::grid, 16, 6.0, 0}), ConfigError);
    EXPECT_THROW(build_graph({GraphKind::geometric, 10, 0.5, 0}), ConfigError);
}

TEST(ShortestPath, TrivialAndLattice)
{
    auto g = grid3x3();
    EXPECT_EQ(shortest_path(g, 4, 4), std::vector<CameraId>{4});
    auto p = shortest_path(g, 0, 8);
    EXPECT_EQ(p.size(), 5u);
    EXPECT_EQ(p.front(), 0u);
    EXPECT_EQ(p.back(), 8u);
    for (std::size_t i = 1; i < p.size(); ++i)
        EXPECT_TRUE(g.adjacent(p[i - 1], p[i]));
}

TEST(ShortestPath, MatchesAllPairsDistanceOnGeometricGraphs)
{
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto g = build_graph({GraphKind::geometric, 60, 4.0, seed});
        auto d = oracle::all_pairs_distance(g);
        for (CameraId s = 0; s < g.num_cameras(); s += 7)
            for (CameraId t = 0; t < g.num_cameras(); ++t)
                ASSERT_EQ(static_cast<int>(shortest_path(g, s, t).size()) - 1, d[s][t]);
        int diam = 0;
        for (const auto& row : d)
            diam = std::max(diam, *std::max_element(row.begin(), row.end()));
        EXPECT_EQ(static_cast<int>(diameter(g)), diam);
    }
}

TEST(ShortestPath, IsLexicographicallySmallestAmongShortestOnSmallGraphs)
{
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 4 + static_cast<std::size_t>(trial % 7);
        auto g = build_graph({GraphKind::geometric, n, std::min(3.0, static_cast<double>(n - 1) - 0.5),
                              static_cast<std::uint64_t>(trial)});
        auto adj = oracle::adjacency_from_edges(n, g.edges());
        for (CameraId s = 0; s < n; ++s) {
            for (CameraId t = 0; t < n; ++t) {
                auto all = oracle::all_simple_paths(adj, s, t);
                std::size_t best = SIZE_MAX;
                for (const auto& p : all)
                    best = std::min(best, p.size());
                std::vector<CameraId> lexmin;
                for (const auto& p : all)
                    if (p.size() == best && (lexmin.empty() || p < lexmin))
                        lexmin = p;
                ASSERT_EQ(shortest_path(g, s, t), lexmin) << "n=" << n << " " << s << "->" << t;
            }
        }
    }
}

TEST(GraphIo, RoundTripAndErrors)
{
    auto dir = testutil::scratch_dir("graph_io");
    auto g = build_graph(GraphPreset::town05(7));
    save_graph(g, dir / "g.json");
    EXPECT_EQ(load_graph(dir / "g.json"), g);
    EXPECT_EQ(graph_from_json(R"({"num_cameras":3,"edges":[[0,1],[1,2]]})").num_edges(), 2u);

    EXPECT_THROW(graph_from_json(R"({"num_cameras":3,"edges":[[0,0],[1,2]]})"), DataError);
    EXPECT_THROW(graph_from_json(R"({"num_cameras":4,"edges":[[0,1],[2,3]]})"), DataError);
    EXPECT_THROW(graph_from_json(R"({"num_cameras":3,"edges":[[0,1],[0,1],[1,2]]})"), DataError);
    EXPECT_THROW(graph_from_json(R"({"num_cameras":3,"edges":[[0,1,2]]})"), DataError);
    EXPECT_THROW(graph_from_json("not json"), DataError);
    EXPECT_THROW(load_graph(dir / "missing.json"), DataError);
}

TEST(GraphIo, ChecksumHexRoundTrip)
{
    auto g = grid3x3();
    EXPECT_EQ(parse_checksum_hex(checksum_hex(g.checksum())), g.checksum());
    EXPECT_EQ(checksum_hex(g.checksum()).size(), 16u);
    EXPECT_THROW(parse_checksum_hex("xyz"), DataError);
}
