#pragma once

#include "spinlab/spinlab.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace spinlab::testing {

struct RandomGraphSpec {
    int min_vertices = 1;
    int max_vertices = 10;
    int max_mult = 1;
    double edge_prob = 0.4;
    bool random_field = false;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Random bipartite multigraph; vertex ids v00, v01, ... with random sides.
inline BipartiteMultigraph random_graph(std::mt19937_64& rng, const RandomGraphSpec& spec)
{
    const int n = uniform_int(rng, spec.min_vertices, spec.max_vertices);
    std::vector<VertexSpec> vs;
    for (int i = 0; i < n; ++i)
        vs.push_back({ "v" + padded(i, 2), uniform(rng, 0, 1) < 0.5 ? Side::L : Side::R });
    std::vector<EdgeSpec> es;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (vs[i].side != vs[j].side && uniform(rng, 0, 1) < spec.edge_prob)
                es.push_back({ vs[i].id, vs[j].id, uniform_int(rng, 1, spec.max_mult) });
    std::optional<std::vector<std::string>> field;
    if (spec.random_field) {
        field.emplace();
        for (const auto& v : vs)
            if (uniform(rng, 0, 1) < 0.5)
                field->push_back(v.id);
    }
    return build_graph(std::move(vs), std::move(es), std::move(field));
}

/// Z straight from the definition: sum over all 2^n assignments of
/// lambda^(field ones) * beta^(#00 edges) * gamma^(#11 edges), multiplicities
/// counted. Works on the graph, not on a WeightedNetwork.
inline long double brute_force_z(const BipartiteMultigraph& g, const SpinParams& p)
{
    const std::size_t n = g.vertex_count();
    long double z = 0.0L;
    for (std::uint64_t s = 0; s < (std::uint64_t { 1 } << n); ++s) {
        long double w = 1.0L;
        for (std::size_t v = 0; v < n; ++v)
            if ((s >> v & 1u) && g.in_field(v))
                w *= p.lambda;
        for (std::size_t e = 0; e < g.edges().size(); ++e) {
            auto [a, b] = g.endpoints(e);
            int sa = s >> a & 1u, sb = s >> b & 1u;
            long double f = (sa == 0 && sb == 0) ? p.beta : (sa == 1 && sb == 1 ? p.gamma : 1.0L);
            w *= std::pow(f, g.edges()[e].mult);
        }
        z += w;
    }
    return z;
}

/// Pr(sigma_v = 1) by the same full enumeration.
inline long double brute_force_marginal(const BipartiteMultigraph& g, const SpinParams& p, const std::string& id)
{
    const std::size_t n = g.vertex_count(), target = g.index_of(id);
    long double z = 0.0L, z1 = 0.0L;
    for (std::uint64_t s = 0; s < (std::uint64_t { 1 } << n); ++s) {
        long double w = 1.0L;
        for (std::size_t v = 0; v < n; ++v)
            if ((s >> v & 1u) && g.in_field(v))
                w *= p.lambda;
        for (std::size_t e = 0; e < g.edges().size(); ++e) {
            auto [a, b] = g.endpoints(e);
            int sa = s >> a & 1u, sb = s >> b & 1u;
            long double f = (sa == 0 && sb == 0) ? p.beta : (sa == 1 && sb == 1 ? p.gamma : 1.0L);
            w *= std::pow(f, g.edges()[e].mult);
        }
        z += w;
        if (s >> target & 1u)
            z1 += w;
    }
    return z1 / z;
}

inline double rel_diff(long double a, long double b)
{
    if (a == b)
        return 0.0;
    return static_cast<double>(std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b)));
}

inline BipartiteMultigraph edge_graph()
{
    return build_graph({ { "a", Side::L }, { "b", Side::R } }, { { "a", "b", 1 } });
}

inline BipartiteMultigraph path_graph(int n)
{
    std::vector<VertexSpec> vs;
    std::vector<EdgeSpec> es;
    for (int i = 0; i < n; ++i) {
        vs.push_back({ "p" + std::to_string(i), i % 2 ? Side::R : Side::L });
        if (i > 0)
            es.push_back({ "p" + std::to_string(i - 1), "p" + std::to_string(i), 1 });
    }
    return build_graph(vs, es);
}

inline BipartiteMultigraph cycle4()
{
    return build_graph({ { "a", Side::L }, { "b", Side::R }, { "c", Side::L }, { "d", Side::R } },
        { { "a", "b", 1 }, { "b", "c", 1 }, { "c", "d", 1 }, { "d", "a", 1 } });
}

inline BipartiteMultigraph star3()
{
    return build_graph({ { "c", Side::L }, { "x", Side::R }, { "y", Side::R }, { "z", Side::R } },
        { { "c", "x", 1 }, { "c", "y", 1 }, { "c", "z", 1 } });
}

/// A small gadget whose '+' phase has probability about 0.8 under
/// (beta, gamma, lambda, Delta) = (0.16, 0.03, 2, 6).
inline Gadget lopsided_toy_gadget()
{
    std::vector<VertexSpec> vs;
    for (int i = 0; i < 5; ++i)
        vs.push_back({ "p" + std::to_string(i), Side::L });
    for (int i = 0; i < 3; ++i)
        vs.push_back({ "m" + std::to_string(i), Side::R });
    std::vector<EdgeSpec> es;
    const char* pairs[][2] = { { "p0", "m0" }, { "p0", "m1" }, { "p0", "m2" }, { "p1", "m0" }, { "p1", "m1" },
        { "p2", "m0" }, { "p2", "m1" }, { "p3", "m0" }, { "p3", "m1" }, { "p3", "m2" }, { "p4", "m0" },
        { "p4", "m1" } };
    for (auto& pr : pairs)
        es.push_back({ pr[0], pr[1], 1 });
    TerminalSets ts { { "p0", "p1", "p2" }, { "m0", "m1", "m2" } };
    Gadget g;
    g.graph = build_graph(vs, es, std::nullopt, ts, 6);
    g.layout = side_layout(g.graph);
    g.metadata.family = "toy";
    g.metadata.t = 3;
    return g;
}

inline SpinParams lopsided_toy_params() { return make_params(0.16, 0.03, 2.0, 6); }

} // namespace spinlab::testing
