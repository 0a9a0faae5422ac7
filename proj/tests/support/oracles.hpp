#pragma once

// Independent reference computations used by the tests. Nothing here calls
// the library routine it is used to check.

#include "camsearch/graph.hpp"
#include "camsearch/rnn.hpp"
#include "camsearch/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace oracle {

using camsearch::CameraGraph;
using camsearch::CameraId;

// All-pairs hop distances by Floyd-Warshall over the edge list.
inline std::vector<std::vector<int>> all_pairs_distance(const CameraGraph& g)
{
    const int inf = std::numeric_limits<int>::max() / 4;
    const std::size_t n = g.num_cameras();
    std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
    for (std::size_t i = 0; i < n; ++i)
        d[i][i] = 0;
    for (const auto& [u, v] : g.edges())
        d[u][v] = d[v][u] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

// Every simple path src..dst by depth-first enumeration (small graphs only).
inline std::vector<std::vector<CameraId>> all_simple_paths(const std::vector<std::vector<CameraId>>& adj, CameraId src,
                                                           CameraId dst)
{
    std::vector<std::vector<CameraId>> out;
    std::vector<CameraId> path{src};
    std::vector<bool> used(adj.size(), false);
    used[src] = true;
    std::function<void(CameraId)> dfs = [&](CameraId u) {
        if (u == dst) {
            out.push_back(path);
            return;
        }
        for (CameraId v : adj[u]) {
            if (used[v])
                continue;
            used[v] = true;
            path.push_back(v);
            dfs(v);
            path.pop_back();
            used[v] = false;
        }
    };
    dfs(src);
    return out;
}

inline std::vector<std::vector<CameraId>> adjacency_from_edges(std::size_t n, const std::vector<camsearch::Edge>& edges)
{
    std::vector<std::vector<CameraId>> adj(n);
    for (const auto& [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& a : adj)
        std::sort(a.begin(), a.end());
    return adj;
}

inline bool connected_by_dfs(std::size_t n, const std::vector<camsearch::Edge>& edges)
{
    auto adj = adjacency_from_edges(n, edges);
    std::vector<bool> seen(n, false);
    std::vector<CameraId> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        CameraId u = stack.back();
        stack.pop_back();
        for (CameraId v : adj[u])
            if (!seen[v]) {
                seen[v] = true;
                ++count;
                stack.push_back(v);
            }
    }
    return count == n;
}

// Exact normalized mass 1/(k+1)^s.
inline std::vector<double> zipf_mass(std::size_t n, double s)
{
    std::vector<double> p(n);
    double z = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        z += p[k] = 1.0 / std::pow(static_cast<double>(k + 1), s);
    for (auto& x : p)
        x /= z;
    return p;
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b)
{
    double tv = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        tv += std::abs(a[i] - b[i]);
    return tv / 2.0;
}

// Frame-by-frame membership straight from the visit list.
inline bool object_visible(const camsearch::Trajectory& t, CameraId camera, camsearch::Frame f)
{
    for (const auto& v : t.visits)
        if (v.camera == camera && v.entry <= f && f <= v.exit)
            return true;
    return false;
}

// Central finite differences of the batch loss for every entry of every
// tensor; returns the worst relative error against `analytic` per tensor.
inline std::vector<std::pair<std::string, double>> gradient_check(camsearch::RnnModel model,
                                                                   const std::vector<std::vector<CameraId>>& batch,
                                                                   const camsearch::RnnParams& analytic,
                                                                   double h = 1e-5)
{
    std::vector<std::pair<std::string, double>> worst;
    std::vector<const double*> grads;
    analytic.visit([&grads](const std::string&, const auto& t) { grads.push_back(t.data()); });
    std::size_t k = 0;
    model.params.visit([&](const std::string& name, auto& t) {
        double w = 0.0;
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            const double saved = t.data()[i];
            t.data()[i] = saved + h;
            const double up = camsearch::loss_and_gradients(model, batch).loss;
            t.data()[i] = saved - h;
            const double down = camsearch::loss_and_gradients(model, batch).loss;
            t.data()[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double a = grads[k][i];
            const double denom = std::max({std::abs(numeric), std::abs(a), 1e-6});
            w = std::max(w, std::abs(numeric - a) / denom);
        }
        worst.emplace_back(name, w);
        ++k;
    });
    return worst;
}

} // namespace oracle

namespace testutil {

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("camsearch_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testutil
