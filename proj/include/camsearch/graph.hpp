#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace camsearch {

using CameraId = std::uint32_t;
using Edge = std::pair<CameraId, CameraId>;

// Unweighted, undirected, simple, connected camera network.
// Immutable after construction.
class CameraGraph {
public:
    CameraGraph() = default;

    // Throws DataError on self-loops, duplicate edges, out-of-range ids or a
    // disconnected vertex set.
    CameraGraph(std::size_t num_cameras, std::vector<Edge> edges);

    std::size_t num_cameras() const { return adjacency_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    // Normalized (u < v) and sorted.
    const std::vector<Edge>& edges() const { return edges_; }

    // Ascending neighbor ids.
    std::span<const CameraId> neighbors(CameraId v) const { return adjacency_.at(v); }
    std::size_t degree(CameraId v) const { return adjacency_.at(v).size(); }
    bool adjacent(CameraId u, CameraId v) const;

    double average_degree() const;
    std::size_t max_degree() const;

    // FNV-1a over the canonical edge list; ties models and datasets to a graph.
    std::uint64_t checksum() const;

    bool operator==(const CameraGraph& other) const { return edges_ == other.edges_ && num_cameras() == other.num_cameras(); }

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<CameraId>> adjacency_;
};

std::string checksum_hex(std::uint64_t checksum);
std::uint64_t parse_checksum_hex(const std::string& text);

enum class GraphKind { grid, geometric, town05, town07 };

GraphKind parse_graph_kind(const std::string& name);
std::string to_string(GraphKind kind);

struct GraphPreset {
    GraphKind kind = GraphKind::geometric;
    std::size_t cameras = 21;
    double degree = 3.5;
    std::uint64_t seed = 0;

    // Shapes of the two synthetic town maps: 21 cameras (3.5, 4) and 20 cameras (3.2, 4).
    static GraphPreset town05(std::uint64_t seed) { return {GraphKind::town05, 21, 3.5, seed}; }
    static GraphPreset town07(std::uint64_t seed) { return {GraphKind::town07, 20, 3.2, seed}; }
};

// Connected graph whose average degree lies within 20% of preset.degree.
// Throws ConfigError when the target cannot be met for the vertex count.
CameraGraph build_graph(const GraphPreset& preset);

// Breadth-first tree rooted at a source; neighbors are expanded in ascending
// id order so parents (and therefore paths) are deterministic.
struct BfsTree {
    CameraId root = 0;
    std::vector<std::uint32_t> distance;
    std::vector<CameraId> parent;

    std::vector<CameraId> path_to(CameraId dst) const;
};

BfsTree bfs_tree(const CameraGraph& g, CameraId src);

// Minimum-hop path src..dst inclusive.
std::vector<CameraId> shortest_path(const CameraGraph& g, CameraId src, CameraId dst);

// Longest shortest path, in hops.
std::uint32_t diameter(const CameraGraph& g);

std::string graph_to_json(const CameraGraph& g);
CameraGraph graph_from_json(const std::string& text);
CameraGraph load_graph(const std::filesystem::path& path);
void save_graph(const CameraGraph& g, const std::filesystem::path& path);

} // namespace camsearch
