#pragma once

#include "spinlab/errors.hpp"
#include "spinlab/exact.hpp"
#include "spinlab/graph.hpp"
#include "spinlab/network.hpp"
#include "spinlab/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace spinlab {

struct GadgetMetadata {
    std::string family;
    std::optional<std::uint64_t> seed;
    int t = 0;
    int t_prime = 0;
    int tree_depth = 0;
    std::optional<double> theta;
    std::optional<double> psi;
};

/// A gadget: a bipartite graph with terminals plus the V+/V- layout that
/// decides the phase of a configuration.
struct Gadget {
    BipartiteMultigraph graph;
    GadgetLayout layout;
    GadgetMetadata metadata;
};

/// Zero-padded decimal so that lexicographic order agrees with numeric order.
inline std::string padded(std::size_t i, int width = 4)
{
    std::ostringstream os;
    os << std::setw(width) << std::setfill('0') << i;
    return os.str();
}

/// Sorted copy, for the lexicographic terminal-selection rule.
inline std::vector<std::string> sorted_ids(std::vector<std::string> ids)
{
    std::sort(ids.begin(), ids.end());
    return ids;
}

/// Builds the gadget layout from a graph whose terminals are set: V+ is the
/// side of the positive terminals (side L when there are none).
inline GadgetLayout side_layout(const BipartiteMultigraph& g)
{
    Side plus_side = Side::L;
    if (g.terminals() && !g.terminals()->plus.empty())
        plus_side = g.side_of(g.terminals()->plus.front());
    else if (g.terminals() && !g.terminals()->minus.empty())
        plus_side = opposite(g.side_of(g.terminals()->minus.front()));
    GadgetLayout lay;
    for (const auto& v : g.vertices())
        (v.side == plus_side ? lay.v_plus : lay.v_minus).push_back(v.id);
    if (g.terminals()) {
        lay.t_plus = g.terminals()->plus;
        lay.t_minus = g.terminals()->minus;
    }
    return lay;
}

// ---------------------------------------------------------------------------
// Unary symmetry breaking

struct SymmetryBreaker {
    bool found = false;
    int k = -1;
    double rho1 = 0.0;
    std::optional<BipartiteMultigraph> graph;
    /// The degree-1 vertex whose marginal is rho1.
    std::string distinguished = "u";
    std::string reason;
};

/// H_k: vertices u, u', u'', v_1..v_k with edges u'-v_i, v_i-u'' and u''-u.
inline BipartiteMultigraph symmetry_gadget(int k)
{
    if (k < 0)
        fail(ErrorCode::InvalidArgument, "k must be nonnegative");
    std::vector<VertexSpec> vs { { "u", Side::L }, { "u'", Side::R }, { "u''", Side::R } };
    std::vector<EdgeSpec> es { { "u''", "u", 1 } };
    for (int i = 1; i <= k; ++i) {
        std::string v = "v" + std::to_string(i);
        vs.push_back({ v, Side::L });
        es.push_back({ "u'", v, 1 });
        es.push_back({ v, "u''", 1 });
    }
    return build_graph(std::move(vs), std::move(es));
}

inline SymmetryBreaker symmetry_breaking_search(const SpinParams& p, const EngineOptions& opt = {})
{
    p.validate();
    SymmetryBreaker out;
    if (std::abs(p.beta * p.gamma - 1.0) <= p.tol) {
        out.reason = "beta*gamma = 1: the interaction has rank one";
        return out;
    }
    if (std::abs(p.beta - p.gamma) <= p.tol && std::abs(p.lambda - 1.0) <= p.tol) {
        out.reason = "beta = gamma and lambda = 1: every marginal is 1/2 by spin-flip symmetry";
        return out;
    }
    const double neutral = p.lambda / (1.0 + p.lambda);
    for (int k = 0; k <= 2; ++k) {
        BipartiteMultigraph h = symmetry_gadget(k);
        double rho = marginal(to_weighted_network(h, p), "u", opt);
        if (std::abs(rho) > p.tol && std::abs(rho - 1.0) > p.tol && std::abs(rho - neutral) > p.tol) {
            out.found = true;
            out.k = k;
            out.rho1 = rho;
            out.graph = std::move(h);
            return out;
        }
    }
    out.reason = "no H_k with k <= 2 moved the marginal away from {0, lambda/(1+lambda), 1}";
    return out;
}

// ---------------------------------------------------------------------------
// Random phase gadget

namespace detail {

    /// Uniform integer in [0, n) by rejection, identical on every platform.
    inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n)
    {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()
            - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do
            x = rng();
        while (x >= limit);
        return x % n;
    }

    inline void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng)
    {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[bounded(rng, i)]);
    }

    inline std::uint64_t ipow(std::uint64_t b, int e)
    {
        std::uint64_t r = 1;
        for (int i = 0; i < e; ++i)
            r *= b;
        return r;
    }

} // namespace detail

struct SlySizes {
    int t = 0;
    int tree_depth = 0;
    std::uint64_t r = 0;
};

/// Terminal count, tree depth and |W| for side size n:
/// t = (Delta-1)^floor(theta log n), depth = 2 floor(psi/2 log n), r = t (Delta-1)^depth,
/// with logarithms to base Delta-1.
inline SlySizes sly_sizes(int delta, std::uint64_t n, double theta, double psi)
{
    if (delta < 3 || n < 1 || !(theta > 0.0 && theta < 0.125) || !(psi > 0.0 && psi < 0.125))
        fail(ErrorCode::InvalidArgument, "need delta >= 3, n >= 1 and theta, psi in (0, 1/8)");
    const double logn = std::log(double(n)) / std::log(double(delta - 1));
    SlySizes s;
    int a = static_cast<int>(std::floor(theta * logn));
    s.tree_depth = 2 * static_cast<int>(std::floor(psi / 2.0 * logn));
    s.t = static_cast<int>(detail::ipow(delta - 1, a));
    s.r = static_cast<std::uint64_t>(s.t) * detail::ipow(delta - 1, s.tree_depth);
    return s;
}

struct SampleOptions {
    int rejection_cap = 10000;
};

/// Samples the random bipartite phase gadget: Delta-1 perfect matchings
/// between U+ u W+ and U- u W- and one between U+ and U-, conditioned on
/// simplicity by rejection, then t disjoint (Delta-1)-ary trees of depth
/// tree_depth per side whose leaves are W. Side + is L.
inline Gadget sample_phase_gadget(const SpinParams& p, int n_side, int r, int t, int tree_depth, std::uint64_t seed,
    const SampleOptions& opt = {})
{
    const int delta = p.require_delta();
    const int arity = delta - 1;
    if (n_side < 1 || t < 1 || r < 1 || tree_depth < 0 || tree_depth % 2 != 0)
        fail(ErrorCode::InfeasibleSizes, "need n_side, t, r >= 1 and an even tree depth >= 0");
    if (static_cast<std::uint64_t>(r) != static_cast<std::uint64_t>(t) * detail::ipow(arity, tree_depth))
        fail(ErrorCode::InfeasibleSizes, "r must equal t * (Delta-1)^tree_depth");
    if (n_side < r)
        fail(ErrorCode::InfeasibleSizes, "n_side must be at least r");

    const std::size_t n = static_cast<std::size_t>(n_side);
    const std::size_t big = n + static_cast<std::size_t>(r);
    auto id = [&](char kind, char sign, std::size_t i) { return std::string { kind, sign } + padded(i); };
    // Index i < n is U, otherwise W.
    auto node = [&](char sign, std::size_t i) { return i < n ? id('u', sign, i) : id('w', sign, i - n); };

    std::mt19937_64 rng(seed);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    bool simple = false;
    for (int attempt = 0; attempt < opt.rejection_cap && !simple; ++attempt) {
        pairs.clear();
        std::vector<std::size_t> perm(big);
        for (int m = 0; m < arity; ++m) {
            for (std::size_t i = 0; i < big; ++i)
                perm[i] = i;
            detail::shuffle(perm, rng);
            for (std::size_t i = 0; i < big; ++i)
                pairs.emplace_back(i, perm[i]);
        }
        std::vector<std::size_t> uperm(n);
        for (std::size_t i = 0; i < n; ++i)
            uperm[i] = i;
        detail::shuffle(uperm, rng);
        for (std::size_t i = 0; i < n; ++i)
            pairs.emplace_back(i, uperm[i]);
        std::vector<std::pair<std::size_t, std::size_t>> sorted = pairs;
        std::sort(sorted.begin(), sorted.end());
        simple = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    }
    if (!simple)
        fail(ErrorCode::RejectionLimitExceeded,
            "no simple graph after " + std::to_string(opt.rejection_cap) + " resamples");

    std::vector<VertexSpec> vs;
    std::vector<EdgeSpec> es;
    for (std::size_t i = 0; i < big; ++i)
        vs.push_back({ node('+', i), Side::L });
    for (std::size_t i = 0; i < big; ++i)
        vs.push_back({ node('-', i), Side::R });
    for (auto [a, b] : pairs)
        es.push_back({ node('+', a), node('-', b), 1 });

    TerminalSets terms;
    for (char sign : { '+', '-' }) {
        const Side home = sign == '+' ? Side::L : Side::R;
        auto& out_terms = sign == '+' ? terms.plus : terms.minus;
        const std::size_t leaves_per_tree = detail::ipow(arity, tree_depth);
        for (int tr = 0; tr < t; ++tr) {
            // Level d of the tree sits at distance tree_depth - d from W,
            // hence on the home side when d is even.
            std::vector<std::string> level;
            if (tree_depth == 0) {
                level.push_back(node(sign, n + static_cast<std::size_t>(tr)));
                out_terms.push_back(level.front());
                continue;
            }
            std::string root = std::string { 't', sign } + padded(static_cast<std::size_t>(tr)) + ".0000";
            vs.push_back({ root, home });
            out_terms.push_back(root);
            level.push_back(root);
            std::size_t counter = 1;
            for (int d = 1; d <= tree_depth; ++d) {
                std::vector<std::string> next;
                Side s = d % 2 == 0 ? home : opposite(home);
                for (const auto& parent : level)
                    for (int c = 0; c < arity; ++c) {
                        std::string child;
                        if (d == tree_depth) {
                            std::size_t leaf = static_cast<std::size_t>(tr) * leaves_per_tree + next.size();
                            child = node(sign, n + leaf);
                        } else {
                            child = std::string { 't', sign } + padded(static_cast<std::size_t>(tr)) + "."
                                + padded(counter++);
                            vs.push_back({ child, s });
                        }
                        es.push_back({ parent, child, 1 });
                        next.push_back(child);
                    }
                level = std::move(next);
            }
        }
    }

    Gadget g;
    g.graph = build_graph(std::move(vs), std::move(es), std::nullopt, terms, delta);
    g.layout = side_layout(g.graph);
    g.metadata = { "phase", seed, t, 0, tree_depth, std::nullopt, std::nullopt };
    return g;
}

// ---------------------------------------------------------------------------
// Balancing

/// Two copies G1, G2 of a gadget joined by t' terminal pairs per sign: equal
/// signs when beta*gamma < 1, crossed signs when beta*gamma > 1. The result
/// keeps the unmatched terminals of G1 and the phase (layout) of G1.
inline Gadget balance_gadget(const Gadget& g, int t_prime, const SpinParams& p)
{
    p.validate();
    if (p.degenerate())
        fail(ErrorCode::DegenerateParameters, "balancing needs beta*gamma != 1");
    if (t_prime < 0)
        fail(ErrorCode::InvalidArgument, "t_prime must be nonnegative");
    const auto& terms = g.graph.terminals();
    if (!terms || static_cast<int>(terms->plus.size()) < t_prime || static_cast<int>(terms->minus.size()) < t_prime)
        fail(ErrorCode::NotEnoughTerminals, "gadget has fewer than t_prime terminals of some sign");
    const bool crossed = p.ferromagnetic();

    auto a = [](const std::string& id) { return "a/" + id; };
    auto b = [](const std::string& id) { return "b/" + id; };
    std::vector<VertexSpec> vs;
    std::vector<EdgeSpec> es;
    for (const auto& v : g.graph.vertices())
        vs.push_back({ a(v.id), v.side });
    // Matching equal signs needs the copies on opposite sides.
    for (const auto& v : g.graph.vertices())
        vs.push_back({ b(v.id), crossed ? v.side : opposite(v.side) });
    for (const auto& e : g.graph.edges()) {
        es.push_back({ a(e.u), a(e.v), e.mult });
        es.push_back({ b(e.u), b(e.v), e.mult });
    }
    const auto plus = sorted_ids(terms->plus);
    const auto minus = sorted_ids(terms->minus);
    for (int i = 0; i < t_prime; ++i) {
        es.push_back({ a(plus[i]), b(crossed ? minus[i] : plus[i]), 1 });
        es.push_back({ a(minus[i]), b(crossed ? plus[i] : minus[i]), 1 });
    }
    TerminalSets kt;
    for (std::size_t i = t_prime; i < plus.size(); ++i)
        kt.plus.push_back(a(plus[i]));
    for (std::size_t i = t_prime; i < minus.size(); ++i)
        kt.minus.push_back(a(minus[i]));

    std::optional<std::vector<std::string>> field;
    if (g.graph.field_subset()) {
        field.emplace();
        for (const auto& id : *g.graph.field_subset()) {
            field->push_back(a(id));
            field->push_back(b(id));
        }
    }

    Gadget k;
    k.graph = build_graph(std::move(vs), std::move(es), std::move(field), kt, p.delta);
    for (const auto& id : g.layout.v_plus)
        k.layout.v_plus.push_back(a(id));
    for (const auto& id : g.layout.v_minus)
        k.layout.v_minus.push_back(a(id));
    k.layout.t_plus = kt.plus;
    k.layout.t_minus = kt.minus;
    k.metadata = g.metadata;
    k.metadata.family = "balanced";
    k.metadata.t = static_cast<int>(kt.plus.size());
    k.metadata.t_prime = t_prime;
    return k;
}

// ---------------------------------------------------------------------------
// Product measures on terminals and verification

enum class PhaseSign { Plus, Minus };

/// Q+ (or Q-) over terminal configurations tau, indexed with bit i = spin of
/// terminal i in the order T+ followed by T-.
inline std::vector<double> q_product_measure(double q_minus, double q_plus, std::size_t n_plus, std::size_t n_minus,
    PhaseSign phase)
{
    if (!(q_minus >= 0.0 && q_minus <= 1.0 && q_plus >= 0.0 && q_plus <= 1.0))
        fail(ErrorCode::InvalidArgument, "q values must be probabilities");
    const std::size_t nt = n_plus + n_minus;
    if (nt > 24)
        fail(ErrorCode::TooLarge, "too many terminals to tabulate");
    const double on_plus = phase == PhaseSign::Plus ? q_plus : q_minus;
    const double on_minus = phase == PhaseSign::Plus ? q_minus : q_plus;
    std::vector<double> out(std::size_t { 1 } << nt);
    for (std::size_t tau = 0; tau < out.size(); ++tau) {
        double pr = 1.0;
        for (std::size_t i = 0; i < nt; ++i) {
            double q = i < n_plus ? on_plus : on_minus;
            pr *= (tau >> i & 1u) ? q : 1.0 - q;
        }
        out[tau] = pr;
    }
    return out;
}

struct GadgetVerdict {
    double prob_plus = 0.0;
    double prob_minus = 0.0;
    /// max over tau of |Pr(tau | Y = phase) / Q^phase(tau) - 1|, per phase.
    double deviation_plus = 0.0;
    double deviation_minus = 0.0;
    bool passed = false;
    double epsilon = 0.0;
    PhaseDecomposition decomposition;
};

inline GadgetVerdict verify_gadget(const Gadget& g, const SpinParams& p, double epsilon, double q_minus,
    double q_plus, const EngineOptions& opt = {})
{
    if (!(epsilon > 0.0))
        fail(ErrorCode::InvalidArgument, "epsilon must be positive");
    GadgetVerdict v;
    v.epsilon = epsilon;
    v.decomposition = phase_decomposition(to_weighted_network(g.graph, p), g.layout, opt);
    const auto& d = v.decomposition;
    if (d.total.is_zero())
        fail(ErrorCode::ZeroPartitionFunction, "gadget partition function is zero");
    v.prob_plus = d.prob_plus();
    v.prob_minus = d.prob_minus();

    const std::size_t np = g.layout.t_plus.size(), nm = g.layout.t_minus.size();
    auto deviation = [&](PhaseSign ph, const LogValue& z, const std::vector<double>& table) {
        if (z.is_zero())
            return std::numeric_limits<double>::infinity();
        auto q = q_product_measure(q_minus, q_plus, np, nm, ph);
        double worst = 0.0;
        for (std::size_t tau = 0; tau < q.size(); ++tau) {
            double dev = q[tau] > 0.0 ? std::abs(table[tau] / q[tau] - 1.0)
                                      : (table[tau] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
            worst = std::max(worst, dev);
        }
        return worst;
    };
    v.deviation_plus = deviation(PhaseSign::Plus, d.z_plus, d.tables[0]);
    v.deviation_minus = deviation(PhaseSign::Minus, d.z_minus, d.tables[1]);
    const double floor = (1.0 - epsilon) / 2.0;
    v.passed = v.prob_plus >= floor && v.prob_minus >= floor && v.deviation_plus <= epsilon
        && v.deviation_minus <= epsilon;
    return v;
}

} // namespace spinlab
