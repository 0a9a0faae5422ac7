#include "camsearch/graph.hpp"

#include "camsearch/error.hpp"
#include "camsearch/rng.hpp"
#include "io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>

namespace camsearch {

namespace {

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

struct Point {
    double x;
    double y;
};

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Vertices reachable from vertex 0 given an edge list.
std::vector<bool> reachable_from_zero(std::size_t n, const std::vector<std::vector<CameraId>>& adj)
{
    std::vector<bool> seen(n, false);
    if (n == 0)
        return seen;
    std::deque<CameraId> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
        CameraId u = queue.front();
        queue.pop_front();
        for (CameraId v : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    return seen;
}

// Greedy shortest-first edge selection with an optional degree cap, then
// nearest-pair patching until connected.
std::vector<Edge> proximity_edges(const std::vector<Point>& pts, std::size_t target_edges, std::size_t max_degree)
{
    const std::size_t n = pts.size();
    std::vector<std::tuple<double, CameraId, CameraId>> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (CameraId u = 0; u < n; ++u)
        for (CameraId v = u + 1; v < n; ++v)
            pairs.emplace_back(distance(pts[u], pts[v]), u, v);
    std::sort(pairs.begin(), pairs.end());

    std::vector<std::size_t> degree(n, 0);
    std::vector<std::vector<CameraId>> adj(n);
    std::vector<Edge> edges;
    for (const auto& [d, u, v] : pairs) {
        if (edges.size() >= target_edges)
            break;
        if (max_degree > 0 && (degree[u] >= max_degree || degree[v] >= max_degree))
            continue;
        edges.emplace_back(u, v);
        adj[u].push_back(v);
        adj[v].push_back(u);
        ++degree[u];
        ++degree[v];
    }

    for (;;) {
        auto seen = reachable_from_zero(n, adj);
        if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
            break;
        double best = std::numeric_limits<double>::infinity();
        Edge best_edge{0, 0};
        for (CameraId u = 0; u < n; ++u) {
            if (!seen[u])
                continue;
            for (CameraId v = 0; v < n; ++v) {
                if (seen[v])
                    continue;
                double d = distance(pts[u], pts[v]);
                if (d < best) {
                    best = d;
                    best_edge = {std::min(u, v), std::max(u, v)};
                }
            }
        }
        edges.push_back(best_edge);
        adj[best_edge.first].push_back(best_edge.second);
        adj[best_edge.second].push_back(best_edge.first);
    }
    return edges;
}

std::pair<std::size_t, std::size_t> grid_shape(std::size_t n)
{
    auto rows = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (rows > 1 && n % rows != 0)
        --rows;
    return {rows, n / rows};
}

std::vector<Edge> lattice_edges(std::size_t rows, std::size_t cols)
{
    std::vector<Edge> edges;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            auto id = static_cast<CameraId>(r * cols + c);
            if (c + 1 < cols)
                edges.emplace_back(id, id + 1);
            if (r + 1 < rows)
                edges.emplace_back(id, static_cast<CameraId>(id + cols));
        }
    }
    return edges;
}

} // namespace

CameraGraph::CameraGraph(std::size_t num_cameras, std::vector<Edge> edges)
{
    if (num_cameras == 0)
        throw DataError("graph must have at least one camera");
    adjacency_.assign(num_cameras, {});
    std::set<Edge> unique;
    for (auto [u, v] : edges) {
        if (u >= num_cameras || v >= num_cameras)
            throw DataError("edge [" + std::to_string(u) + "," + std::to_string(v) + "] references a camera >= " +
                            std::to_string(num_cameras));
        if (u == v)
            throw DataError("self-loop at camera " + std::to_string(u));
        Edge e{std::min(u, v), std::max(u, v)};
        if (!unique.insert(e).second)
            throw DataError("duplicate edge [" + std::to_string(e.first) + "," + std::to_string(e.second) + "]");
    }
    edges_.assign(unique.begin(), unique.end());
    for (auto [u, v] : edges_) {
        adjacency_[u].push_back(v);
        adjacency_[v].push_back(u);
    }
    for (auto& nbrs : adjacency_)
        std::sort(nbrs.begin(), nbrs.end());

    auto seen = reachable_from_zero(num_cameras, adjacency_);
    auto missing = std::find(seen.begin(), seen.end(), false);
    if (missing != seen.end())
        throw DataError("graph is disconnected: camera " + std::to_string(missing - seen.begin()) +
                        " is unreachable from camera 0");
}

bool CameraGraph::adjacent(CameraId u, CameraId v) const
{
    if (u >= num_cameras() || v >= num_cameras())
        return false;
    const auto& nbrs = adjacency_[u];
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

double CameraGraph::average_degree() const
{
    return num_cameras() == 0 ? 0.0 : 2.0 * static_cast<double>(edges_.size()) / static_cast<double>(num_cameras());
}

std::size_t CameraGraph::max_degree() const
{
    std::size_t best = 0;
    for (const auto& nbrs : adjacency_)
        best = std::max(best, nbrs.size());
    return best;
}

std::uint64_t CameraGraph::checksum() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](std::uint64_t value) {
        for (int i = 0; i < 8; ++i) {
            h ^= (value >> (8 * i)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    feed(num_cameras());
    for (auto [u, v] : edges_) {
        feed(u);
        feed(v);
    }
    return h;
}

std::string checksum_hex(std::uint64_t checksum)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(checksum));
    return buf;
}

std::uint64_t parse_checksum_hex(const std::string& text)
{
    if (text.size() != 16 || text.find_first_not_of("0123456789abcdef") != std::string::npos)
        throw DataError("malformed graph checksum '" + text + "'");
    return std::stoull(text, nullptr, 16);
}

GraphKind parse_graph_kind(const std::string& name)
{
    if (name == "grid")
        return GraphKind::grid;
    if (name == "geometric")
        return GraphKind::geometric;
    if (name == "town05" || name == "town05-like")
        return GraphKind::town05;
    if (name == "town07" || name == "town07-like")
        return GraphKind::town07;
    throw ConfigError("unknown graph preset '" + name + "'");
}

std::string to_string(GraphKind kind)
{
    switch (kind) {
    case GraphKind::grid: return "grid";
    case GraphKind::geometric: return "geometric";
    case GraphKind::town05: return "town05";
    case GraphKind::town07: return "town07";
    }
    return "unknown";
}

CameraGraph build_graph(const GraphPreset& preset)
{
    const std::size_t n = preset.cameras;
    if (n < 2)
        throw ConfigError("graph preset needs at least 2 cameras");
    if (!(preset.degree >= 1.0) || preset.degree >= static_cast<double>(n))
        throw ConfigError("average degree " + std::to_string(preset.degree) + " is unachievable with " +
                          std::to_string(n) + " cameras");

    Rng rng(preset.seed);
    const auto target_edges = static_cast<std::size_t>(std::llround(preset.degree * static_cast<double>(n) / 2.0));
    std::vector<Edge> edges;

    switch (preset.kind) {
    case GraphKind::grid: {
        auto [rows, cols] = grid_shape(n);
        edges = lattice_edges(rows, cols);
        break;
    }
    case GraphKind::town05:
    case GraphKind::town07: {
        // Intersections on a jittered street grid; streets join the nearest
        // intersections first, at most four roads per intersection.
        constexpr std::size_t kMaxRoads = 4;
        if (preset.degree > static_cast<double>(kMaxRoads))
            throw ConfigError("town presets cap degree at 4");
        auto [rows, cols] = grid_shape(n);
        std::vector<Point> pts(n);
        for (std::size_t i = 0; i < n; ++i) {
            pts[i] = {static_cast<double>(i % cols) + 0.2 * (rng.uniform01() - 0.5),
                      static_cast<double>(i / cols) + 0.2 * (rng.uniform01() - 0.5)};
        }
        edges = proximity_edges(pts, target_edges, kMaxRoads);
        // Hide the layout order so low ids are not spatially clustered.
        std::vector<CameraId> relabel(n);
        std::iota(relabel.begin(), relabel.end(), 0);
        rng.shuffle(std::span<CameraId>(relabel));
        for (auto& [u, v] : edges) {
            u = relabel[u];
            v = relabel[v];
        }
        break;
    }
    case GraphKind::geometric: {
        std::vector<Point> pts(n);
        for (auto& p : pts)
            p = {rng.uniform01(), rng.uniform01()};
        edges = proximity_edges(pts, target_edges, 0);
        break;
    }
    }

    CameraGraph g(n, std::move(edges));
    double avg = g.average_degree();
    if (std::abs(avg - preset.degree) > 0.2 * preset.degree)
        throw ConfigError("preset " + to_string(preset.kind) + " cannot reach average degree " +
                          std::to_string(preset.degree) + " with " + std::to_string(n) + " cameras (got " +
                          std::to_string(avg) + ")");
    return g;
}

std::vector<CameraId> BfsTree::path_to(CameraId dst) const
{
    if (dst >= distance.size() || distance[dst] == kUnreached)
        throw DataError("camera " + std::to_string(dst) + " unreachable");
    std::vector<CameraId> path(distance[dst] + 1);
    CameraId cur = dst;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        *it = cur;
        cur = parent[cur];
    }
    return path;
}

BfsTree bfs_tree(const CameraGraph& g, CameraId src)
{
    if (src >= g.num_cameras())
        throw ConfigError("camera " + std::to_string(src) + " out of range");
    BfsTree tree;
    tree.root = src;
    tree.distance.assign(g.num_cameras(), kUnreached);
    tree.parent.assign(g.num_cameras(), src);
    tree.distance[src] = 0;
    std::deque<CameraId> queue{src};
    while (!queue.empty()) {
        CameraId u = queue.front();
        queue.pop_front();
        for (CameraId v : g.neighbors(u)) {
            if (tree.distance[v] == kUnreached) {
                tree.distance[v] = tree.distance[u] + 1;
                tree.parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    return tree;
}

std::vector<CameraId> shortest_path(const CameraGraph& g, CameraId src, CameraId dst)
{
    if (dst >= g.num_cameras())
        throw ConfigError("camera " + std::to_string(dst) + " out of range");
    return bfs_tree(g, src).path_to(dst);
}

std::uint32_t diameter(const CameraGraph& g)
{
    std::uint32_t best = 0;
    for (CameraId s = 0; s < g.num_cameras(); ++s) {
        auto tree = bfs_tree(g, s);
        best = std::max(best, *std::max_element(tree.distance.begin(), tree.distance.end()));
    }
    return best;
}

std::string graph_to_json(const CameraGraph& g)
{
    nlohmann::json doc;
    doc["num_cameras"] = g.num_cameras();
    auto edges = nlohmann::json::array();
    for (auto [u, v] : g.edges())
        edges.push_back({u, v});
    doc["edges"] = std::move(edges);
    return doc.dump() + "\n";
}

CameraGraph graph_from_json(const std::string& text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("malformed graph file: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("num_cameras") || !doc.contains("edges"))
        throw DataError("graph file needs fields 'num_cameras' and 'edges'");
    const auto& n = doc["num_cameras"];
    if (!n.is_number_unsigned() || n.get<std::uint64_t>() == 0)
        throw DataError("graph field 'num_cameras' must be a positive integer");
    if (!doc["edges"].is_array())
        throw DataError("graph field 'edges' must be a list");
    std::vector<Edge> edges;
    std::size_t index = 0;
    for (const auto& e : doc["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned())
            throw DataError("graph edge #" + std::to_string(index) + " must be a pair of non-negative integers");
        edges.emplace_back(e[0].get<CameraId>(), e[1].get<CameraId>());
        ++index;
    }
    return CameraGraph(n.get<std::size_t>(), std::move(edges));
}

CameraGraph load_graph(const std::filesystem::path& path)
{
    try {
        return graph_from_json(detail::read_text_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void save_graph(const CameraGraph& g, const std::filesystem::path& path)
{
    detail::write_text_file(path, graph_to_json(g));
}

} // namespace camsearch
