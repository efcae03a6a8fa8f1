#pragma once

#include "spinlab/errors.hpp"
#include "spinlab/graph.hpp"
#include "spinlab/log_value.hpp"
#include "spinlab/params.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace spinlab {

using Weight2 = std::array<double, 2>;
using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Edge of a weighted network. Entry w[s][t] is the factor for spin s at
/// endpoint a and spin t at endpoint b.
struct NetworkEdge {
    std::size_t a = 0;
    std::size_t b = 0;
    Matrix2 w {};
};

/// Generalized 2-spin network. Represents
///   exp(log_scale) * sum_sigma prod_v vertex_weights[v][sigma_v] * prod_e w_e(sigma_a, sigma_b).
struct WeightedNetwork {
    std::vector<std::string> kept_vertices;
    std::vector<Weight2> vertex_weights;
    std::vector<NetworkEdge> edges;
    double log_scale = 0.0;

    std::size_t size() const { return kept_vertices.size(); }

    std::size_t index_of(const std::string& id) const
    {
        for (std::size_t i = 0; i < kept_vertices.size(); ++i)
            if (kept_vertices[i] == id)
                return i;
        fail(ErrorCode::UnknownVertex, "vertex '" + id + "' is not kept in the network");
    }
};

inline Matrix2 interaction_matrix(const SpinParams& p) { return { { { p.beta, 1.0 }, { 1.0, p.gamma } } }; }

/// Elementwise t-th power; 0^0 is 1.
inline Matrix2 elementwise_power(const Matrix2& m, int t)
{
    Matrix2 out {};
    for (int s = 0; s < 2; ++s)
        for (int r = 0; r < 2; ++r)
            out[s][r] = std::pow(m[s][r], t);
    return out;
}

inline WeightedNetwork to_weighted_network(const BipartiteMultigraph& g, const SpinParams& p)
{
    p.validate();
    WeightedNetwork net;
    net.kept_vertices.reserve(g.vertex_count());
    net.vertex_weights.reserve(g.vertex_count());
    for (std::size_t i = 0; i < g.vertex_count(); ++i) {
        net.kept_vertices.push_back(g.vertices()[i].id);
        net.vertex_weights.push_back({ 1.0, g.in_field(i) ? p.lambda : 1.0 });
    }
    const Matrix2 m = interaction_matrix(p);
    net.edges.reserve(g.edges().size());
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        auto [u, v] = g.endpoints(i);
        net.edges.push_back({ u, v, elementwise_power(m, g.edges()[i].mult) });
    }
    return net;
}

namespace detail {

    inline Matrix2 transpose(const Matrix2& m) { return { { { m[0][0], m[1][0] }, { m[0][1], m[1][1] } } }; }

    /// Scales w so its largest entry is 1 and returns log of the factor removed.
    template <std::size_t N>
    double normalize(std::array<double, N>& w)
    {
        double mx = 0.0;
        for (double x : w)
            mx = std::max(mx, x);
        if (mx == 0.0 || mx == 1.0)
            return 0.0;
        for (double& x : w)
            x /= mx;
        return std::log(mx);
    }

    inline double normalize(Matrix2& m)
    {
        double mx = std::max({ m[0][0], m[0][1], m[1][0], m[1][1] });
        if (mx == 0.0 || mx == 1.0)
            return 0.0;
        for (auto& row : m)
            for (double& x : row)
                x /= mx;
        return std::log(mx);
    }

} // namespace detail

/// Merges parallel edges (elementwise product) so every vertex pair carries
/// at most one interaction matrix. Z is unchanged.
inline WeightedNetwork merge_parallel_edges(const WeightedNetwork& in)
{
    WeightedNetwork out = in;
    out.edges.clear();
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> slot;
    for (const auto& e : in.edges) {
        bool swap = e.a > e.b;
        auto key = swap ? std::make_pair(e.b, e.a) : std::make_pair(e.a, e.b);
        Matrix2 w = swap ? detail::transpose(e.w) : e.w;
        auto [it, fresh] = slot.emplace(key, out.edges.size());
        if (fresh) {
            out.edges.push_back({ key.first, key.second, w });
        } else {
            auto& acc = out.edges[it->second].w;
            for (int s = 0; s < 2; ++s)
                for (int r = 0; r < 2; ++r)
                    acc[s][r] *= w[s][r];
        }
    }
    return out;
}

/// Repeatedly folds unprotected degree-1 vertices into their neighbour and
/// unprotected isolated vertices into log_scale. The represented partition
/// function is unchanged. Parallel edges are merged first, so "degree" here
/// counts distinct neighbours.
inline WeightedNetwork eliminate_pendants(const WeightedNetwork& in, const std::set<std::string>& protected_ids)
{
    for (const auto& id : protected_ids)
        in.index_of(id);

    WeightedNetwork net = merge_parallel_edges(in);
    const std::size_t n = net.size();
    std::vector<bool> guarded(n, false), removed(n, false);
    for (std::size_t i = 0; i < n; ++i)
        guarded[i] = protected_ids.count(net.kept_vertices[i]) != 0;

    std::vector<bool> edge_alive(net.edges.size(), true);
    std::vector<std::vector<std::size_t>> incident(n);
    for (std::size_t e = 0; e < net.edges.size(); ++e) {
        incident[net.edges[e].a].push_back(e);
        incident[net.edges[e].b].push_back(e);
    }
    std::vector<int> degree(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        degree[i] = static_cast<int>(incident[i].size());

    std::vector<std::size_t> work;
    for (std::size_t i = 0; i < n; ++i)
        if (!guarded[i] && degree[i] <= 1)
            work.push_back(i);

    while (!work.empty()) {
        std::size_t u = work.back();
        work.pop_back();
        if (removed[u] || guarded[u] || degree[u] > 1)
            continue;
        const Weight2 wu = net.vertex_weights[u];
        if (degree[u] == 0) {
            double total = wu[0] + wu[1];
            if (total == 0.0)
                continue; // Z is zero; keep the witness vertex
            net.log_scale += std::log(total);
            removed[u] = true;
            continue;
        }
        std::size_t e = 0;
        for (std::size_t cand : incident[u])
            if (edge_alive[cand]) {
                e = cand;
                break;
            }
        const auto& edge = net.edges[e];
        bool u_is_a = edge.a == u;
        std::size_t v = u_is_a ? edge.b : edge.a;
        Weight2 phi {};
        for (int s = 0; s < 2; ++s)
            for (int sp = 0; sp < 2; ++sp)
                phi[s] += wu[sp] * (u_is_a ? edge.w[sp][s] : edge.w[s][sp]);
        auto& wv = net.vertex_weights[v];
        wv[0] *= phi[0];
        wv[1] *= phi[1];
        net.log_scale += detail::normalize(wv);
        edge_alive[e] = false;
        removed[u] = true;
        --degree[u];
        --degree[v];
        if (!guarded[v] && degree[v] <= 1)
            work.push_back(v);
    }

    if (std::none_of(removed.begin(), removed.end(), [](bool r) { return r; }) && net.edges.size() == in.edges.size())
        return in;

    WeightedNetwork out;
    out.log_scale = net.log_scale;
    std::vector<std::size_t> remap(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (removed[i])
            continue;
        remap[i] = out.kept_vertices.size();
        out.kept_vertices.push_back(net.kept_vertices[i]);
        out.vertex_weights.push_back(net.vertex_weights[i]);
    }
    for (std::size_t e = 0; e < net.edges.size(); ++e) {
        if (!edge_alive[e])
            continue;
        const auto& edge = net.edges[e];
        out.edges.push_back({ remap[edge.a], remap[edge.b], edge.w });
    }
    return out;
}

} // namespace spinlab
