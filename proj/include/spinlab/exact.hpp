#pragma once

#include "spinlab/errors.hpp"
#include "spinlab/graph.hpp"
#include "spinlab/log_value.hpp"
#include "spinlab/network.hpp"
#include "spinlab/params.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace spinlab {

struct EngineOptions {
    /// Maximum number of vertices enumerated after elimination.
    std::size_t cap = 28;
    /// Worker threads; 0 reads SPINLAB_THREADS, falling back to the hardware count.
    unsigned threads = 0;
};

inline unsigned resolve_threads(unsigned requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("SPINLAB_THREADS")) {
        int v = std::atoi(env);
        if (v > 0)
            return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

    constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    /// A factor in log form; zero factors are counted instead of summed so
    /// that incremental updates never meet inf - inf.
    struct LogFactor {
        double log = 0.0;
        bool zero = false;
    };

    inline LogFactor make_factor(double x) { return x > 0.0 ? LogFactor { std::log(x), false } : LogFactor { 0.0, true }; }

    struct CompiledNetwork {
        int k = 0;
        std::vector<std::array<LogFactor, 2>> vertex;
        struct Edge {
            int a = 0;
            int b = 0;
            LogFactor w[2][2];
        };
        std::vector<Edge> edges;
        std::vector<std::vector<int>> incident;
        double log_scale = 0.0;
    };

    inline CompiledNetwork compile(const WeightedNetwork& net)
    {
        CompiledNetwork c;
        c.k = static_cast<int>(net.size());
        c.log_scale = net.log_scale;
        c.incident.resize(net.size());
        for (const auto& w : net.vertex_weights)
            c.vertex.push_back({ make_factor(w[0]), make_factor(w[1]) });
        for (const auto& e : net.edges) {
            CompiledNetwork::Edge ce;
            ce.a = static_cast<int>(e.a);
            ce.b = static_cast<int>(e.b);
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < 2; ++t)
                    ce.w[s][t] = make_factor(e.w[s][t]);
            c.incident[e.a].push_back(static_cast<int>(c.edges.size()));
            c.incident[e.b].push_back(static_cast<int>(c.edges.size()));
            c.edges.push_back(ce);
        }
        return c;
    }

    struct RunningWeight {
        double sum = 0.0;
        long zeros = 0;

        void add(const LogFactor& f)
        {
            if (f.zero)
                ++zeros;
            else
                sum += f.log;
        }
        void remove(const LogFactor& f)
        {
            if (f.zero)
                --zeros;
            else
                sum -= f.log;
        }
    };

    inline int spin(std::uint64_t mask, int v) { return static_cast<int>((mask >> v) & 1u); }

    inline RunningWeight weight_from_scratch(const CompiledNetwork& c, std::uint64_t mask)
    {
        RunningWeight w;
        for (int v = 0; v < c.k; ++v)
            w.add(c.vertex[v][spin(mask, v)]);
        for (const auto& e : c.edges)
            w.add(e.w[spin(mask, e.a)][spin(mask, e.b)]);
        return w;
    }

    inline void flip(const CompiledNetwork& c, RunningWeight& w, std::uint64_t& mask, int v)
    {
        int old = spin(mask, v);
        w.remove(c.vertex[v][old]);
        w.add(c.vertex[v][1 - old]);
        for (int ei : c.incident[v]) {
            const auto& e = c.edges[ei];
            w.remove(e.w[spin(mask, e.a)][spin(mask, e.b)]);
        }
        mask ^= (std::uint64_t { 1 } << v);
        for (int ei : c.incident[v]) {
            const auto& e = c.edges[ei];
            w.add(e.w[spin(mask, e.a)][spin(mask, e.b)]);
        }
    }

    /// Sums configuration weights into buckets. Configurations are visited
    /// in fixed blocks of Gray-code order; blocks are grouped into a fixed
    /// number of chunks whose partial sums are combined pairwise in index
    /// order, so the result does not depend on the thread count.
    template <class KeyFn>
    std::vector<LogValue> enumerate_buckets(const WeightedNetwork& net, std::size_t bucket_count, KeyFn key,
        const EngineOptions& opt)
    {
        if (net.size() > opt.cap || net.size() > 62)
            fail(ErrorCode::TooLarge,
                "enumeration over " + std::to_string(net.size()) + " vertices exceeds cap "
                    + std::to_string(opt.cap));
        const CompiledNetwork c = compile(net);
        const int block_bits = std::min(c.k, 12);
        const std::uint64_t blocks = std::uint64_t { 1 } << (c.k - block_bits);
        const std::uint64_t chunk_count = std::min<std::uint64_t>(blocks, 64);
        const std::uint64_t blocks_per_chunk = blocks / chunk_count;

        std::vector<std::vector<LseAccumulator>> partial(chunk_count, std::vector<LseAccumulator>(bucket_count));
        auto run_chunk = [&](std::uint64_t chunk) {
            auto& acc = partial[chunk];
            for (std::uint64_t blk = chunk * blocks_per_chunk; blk < (chunk + 1) * blocks_per_chunk; ++blk) {
                std::uint64_t mask = blk << block_bits;
                RunningWeight w = weight_from_scratch(c, mask);
                const std::uint64_t steps = std::uint64_t { 1 } << block_bits;
                for (std::uint64_t i = 0;;) {
                    if (w.zeros == 0)
                        acc[key(mask)].add(w.sum);
                    if (++i == steps)
                        break;
                    flip(c, w, mask, std::countr_zero(i));
                }
            }
        };

        unsigned nthreads = std::min<unsigned>(resolve_threads(opt.threads), static_cast<unsigned>(chunk_count));
        if (nthreads <= 1) {
            for (std::uint64_t ch = 0; ch < chunk_count; ++ch)
                run_chunk(ch);
        } else {
            std::atomic<std::uint64_t> next { 0 };
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < nthreads; ++t)
                pool.emplace_back([&] {
                    for (std::uint64_t ch; (ch = next.fetch_add(1)) < chunk_count;)
                        run_chunk(ch);
                });
            for (auto& th : pool)
                th.join();
        }

        std::vector<LogValue> out(bucket_count);
        std::vector<LogValue> per_chunk(chunk_count);
        for (std::size_t b = 0; b < bucket_count; ++b) {
            for (std::uint64_t ch = 0; ch < chunk_count; ++ch)
                per_chunk[ch] = partial[ch][b].value();
            out[b] = log_sum(per_chunk) * LogValue::from_log(c.log_scale);
        }
        return out;
    }

} // namespace detail

/// Folds fixed spins into neighbouring vertex weights and removes the fixed
/// vertices. The result represents the sum over configurations extending the
/// assignment.
inline WeightedNetwork condition_network(const WeightedNetwork& net, const std::map<std::string, int>& assignment)
{
    const std::size_t n = net.size();
    std::vector<int> fixed(n, -1);
    for (const auto& [id, s] : assignment) {
        if (s != 0 && s != 1)
            fail(ErrorCode::InvalidArgument, "spins must be 0 or 1");
        fixed[net.index_of(id)] = s;
    }
    WeightedNetwork out;
    out.log_scale = net.log_scale;
    bool zero = false;
    std::vector<Weight2> weights = net.vertex_weights;
    for (std::size_t v = 0; v < n; ++v) {
        if (fixed[v] < 0)
            continue;
        double w = weights[v][fixed[v]];
        if (w == 0.0)
            zero = true;
        else
            out.log_scale += std::log(w);
    }
    std::vector<NetworkEdge> free_edges;
    for (const auto& e : net.edges) {
        int sa = fixed[e.a], sb = fixed[e.b];
        if (sa >= 0 && sb >= 0) {
            double w = e.w[sa][sb];
            if (w == 0.0)
                zero = true;
            else
                out.log_scale += std::log(w);
        } else if (sa >= 0) {
            weights[e.b][0] *= e.w[sa][0];
            weights[e.b][1] *= e.w[sa][1];
        } else if (sb >= 0) {
            weights[e.a][0] *= e.w[0][sb];
            weights[e.a][1] *= e.w[1][sb];
        } else {
            free_edges.push_back(e);
        }
    }
    std::vector<std::size_t> remap(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        if (fixed[v] >= 0)
            continue;
        remap[v] = out.kept_vertices.size();
        out.kept_vertices.push_back(net.kept_vertices[v]);
        out.log_scale += detail::normalize(weights[v]);
        out.vertex_weights.push_back(weights[v]);
    }
    for (auto e : free_edges) {
        e.a = remap[e.a];
        e.b = remap[e.b];
        out.edges.push_back(e);
    }
    if (zero) {
        // An impossible assignment: keep a single zero-weight vertex so Z = 0.
        out.kept_vertices = { "<zero>" };
        out.vertex_weights = { Weight2 { 0.0, 0.0 } };
        out.edges.clear();
        out.log_scale = 0.0;
    }
    return out;
}

/// Exact partition function: pendant elimination, then full enumeration.
inline LogValue partition_function(const WeightedNetwork& net, const EngineOptions& opt = {})
{
    WeightedNetwork reduced = eliminate_pendants(net, {});
    return detail::enumerate_buckets(reduced, 1, [](std::uint64_t) { return std::size_t { 0 }; }, opt)[0];
}

/// Sum of weights over configurations extending the partial assignment.
inline LogValue conditional_block(const WeightedNetwork& net, const std::map<std::string, int>& partial,
    const EngineOptions& opt = {})
{
    return partition_function(condition_network(net, partial), opt);
}

/// Pr(sigma_v = 1) under the Gibbs distribution.
inline double marginal(const WeightedNetwork& net, const std::string& vertex, const EngineOptions& opt = {})
{
    LogValue z = partition_function(net, opt);
    if (z.is_zero())
        fail(ErrorCode::ZeroPartitionFunction, "partition function is zero");
    LogValue z1 = conditional_block(net, { { vertex, 1 } }, opt);
    return (z1 / z).linear();
}

/// V+ / V- partition used for the phase rule, plus the terminals whose
/// joint distribution is tabulated.
struct GadgetLayout {
    std::vector<std::string> v_plus;
    std::vector<std::string> v_minus;
    std::vector<std::string> t_plus;
    std::vector<std::string> t_minus;

    /// Terminal order used for table indices: bit i of tau is terminal i.
    std::vector<std::string> terminal_order() const
    {
        std::vector<std::string> out = t_plus;
        out.insert(out.end(), t_minus.begin(), t_minus.end());
        return out;
    }
};

enum class Phase : int { Plus = 0, Minus = 1 };

struct PhaseDecomposition {
    LogValue z_plus;
    LogValue z_minus;
    LogValue total;
    std::vector<std::string> terminals;
    /// tables[phase][tau] = Pr(sigma|_T = tau | Y = phase); all zero when Z^phase = 0.
    std::array<std::vector<double>, 2> tables;

    double prob_plus() const { return (z_plus / total).linear(); }
    double prob_minus() const { return (z_minus / total).linear(); }
};

/// Splits Z by phase. Ties (equal spin-1 counts) are assigned phase '+'.
inline PhaseDecomposition phase_decomposition(const WeightedNetwork& net, const GadgetLayout& layout,
    const EngineOptions& opt = {})
{
    std::set<std::string> keep(layout.v_plus.begin(), layout.v_plus.end());
    keep.insert(layout.v_minus.begin(), layout.v_minus.end());
    const auto terminals = layout.terminal_order();
    keep.insert(terminals.begin(), terminals.end());
    if (terminals.size() > 20)
        fail(ErrorCode::TooLarge, "too many terminals to tabulate");

    WeightedNetwork reduced = eliminate_pendants(net, keep);
    auto bits_of = [&](const std::vector<std::string>& ids) {
        std::uint64_t m = 0;
        for (const auto& id : ids)
            m |= std::uint64_t { 1 } << reduced.index_of(id);
        return m;
    };
    const std::uint64_t plus_mask = bits_of(layout.v_plus);
    const std::uint64_t minus_mask = bits_of(layout.v_minus);
    std::vector<int> term_pos;
    for (const auto& id : terminals)
        term_pos.push_back(static_cast<int>(reduced.index_of(id)));
    const std::size_t table_size = std::size_t { 1 } << terminals.size();

    auto key = [&](std::uint64_t mask) {
        int plus = std::popcount(mask & plus_mask);
        int minus = std::popcount(mask & minus_mask);
        std::size_t phase = plus >= minus ? 0 : 1;
        std::size_t tau = 0;
        for (std::size_t i = 0; i < term_pos.size(); ++i)
            tau |= static_cast<std::size_t>((mask >> term_pos[i]) & 1u) << i;
        return phase * table_size + tau;
    };
    auto buckets = detail::enumerate_buckets(reduced, 2 * table_size, key, opt);

    PhaseDecomposition out;
    out.terminals = terminals;
    std::array<LogValue, 2> z {};
    for (std::size_t ph = 0; ph < 2; ++ph) {
        z[ph] = log_sum(std::span<const LogValue>(buckets).subspan(ph * table_size, table_size));
        out.tables[ph].assign(table_size, 0.0);
        if (z[ph].is_zero())
            continue;
        for (std::size_t tau = 0; tau < table_size; ++tau)
            out.tables[ph][tau] = (buckets[ph * table_size + tau] / z[ph]).linear();
    }
    out.z_plus = z[0];
    out.z_minus = z[1];
    out.total = z[0] + z[1];
    return out;
}

/// Number of independent sets, in exact integer arithmetic.
inline std::uint64_t count_independent_sets(const BipartiteMultigraph& g, const EngineOptions& opt = {})
{
    const std::size_t n = g.vertex_count();
    if (n > opt.cap || n > 63)
        fail(ErrorCode::TooLarge, "independent-set count over " + std::to_string(n) + " vertices exceeds cap");
    std::vector<std::uint64_t> adj(n, 0);
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        auto [u, v] = g.endpoints(i);
        adj[u] |= std::uint64_t { 1 } << v;
        adj[v] |= std::uint64_t { 1 } << u;
    }
    // count(A) = count(A \ {v}) + count(A \ N[v]) for the lowest v in A.
    std::function<std::uint64_t(std::uint64_t)> count = [&](std::uint64_t avail) -> std::uint64_t {
        if (avail == 0)
            return 1;
        int v = std::countr_zero(avail);
        std::uint64_t without = avail & ~(std::uint64_t { 1 } << v);
        if ((adj[v] & without) == 0)
            return 2 * count(without);
        return count(without) + count(without & ~adj[v]);
    };
    std::uint64_t all = n == 64 ? ~std::uint64_t { 0 } : (std::uint64_t { 1 } << n) - 1;
    return count(all);
}

struct FlipCheck {
    LogValue lhs;
    LogValue rhs;
    double relative_gap = 0.0;
};

/// Compares Z_B(a, a, 1) with a^m Z_B(1/a, 1/a, 1) on a bipartite graph.
inline FlipCheck flip_transform_check(const BipartiteMultigraph& g, double alpha, const EngineOptions& opt = {})
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        fail(ErrorCode::InvalidArgument, "alpha must be positive");
    auto lhs = partition_function(to_weighted_network(g, make_params(alpha, alpha, 1.0)), opt);
    auto inv = partition_function(to_weighted_network(g, make_params(1.0 / alpha, 1.0 / alpha, 1.0)), opt);
    auto rhs = inv * LogValue::from_log(static_cast<double>(g.edge_count()) * std::log(alpha));
    return { lhs, rhs, relative_gap(lhs, rhs) };
}

} // namespace spinlab
