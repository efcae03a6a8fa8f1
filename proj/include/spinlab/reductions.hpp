#pragma once

#include "spinlab/errors.hpp"
#include "spinlab/exact.hpp"
#include "spinlab/gadgets.hpp"
#include "spinlab/graph.hpp"
#include "spinlab/log_value.hpp"
#include "spinlab/network.hpp"
#include "spinlab/params.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace spinlab {

// ---------------------------------------------------------------------------
// Independent sets in a bipartite graph -> Ising with a field on a subset

struct LayerSizes {
    int t1 = 0;
    int t2 = 0;
};

/// Least t1 with alpha^(2 t1) <= eps / (6 2^n), then least t2 with
/// (rho0/rho1)^t2 <= alpha^(t1 m) eps / (6 2^(2 t1 m + n)),
/// where rho0 = alpha + lambda and rho1 = 1 + alpha lambda.
inline LayerSizes choose_t1_t2(double alpha, double lambda, int n, int m, double epsilon)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    if (!(lambda > 0.0 && lambda < 1.0))
        fail(ErrorCode::InvalidArgument, "lambda must lie in (0, 1); use 1/lambda for lambda > 1");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        fail(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
    if (n < 0 || m < 0)
        fail(ErrorCode::InvalidArgument, "sizes must be nonnegative");
    if (m == 0)
        fail(ErrorCode::DegenerateInstance, "graph has no edges; I_B = 2^n directly");

    const double ln2 = std::log(2.0);
    const double la = std::log(alpha);
    const double base = std::log(epsilon) - std::log(6.0);
    // Least positive integer t with t * slope <= rhs, for slope < 0.
    auto least = [](double slope, auto rhs_of) {
        long t = std::max(1L, static_cast<long>(std::ceil(rhs_of(1) / slope)) - 2);
        while (t > 1 && (t - 1) * slope <= rhs_of(t - 1))
            --t;
        while (t * slope > rhs_of(t))
            ++t;
        return t;
    };
    LayerSizes out;
    out.t1 = static_cast<int>(least(2.0 * la, [&](long) { return base - n * ln2; }));
    const double lr = std::log((alpha + lambda) / (1.0 + alpha * lambda));
    const double rhs2 = out.t1 * m * la + base - (2.0 * out.t1 * m + n) * ln2;
    out.t2 = static_cast<int>(least(lr, [&](long) { return rhs2; }));
    return out;
}

struct BisReductionPlan {
    int t1 = 0;
    int t2 = 0;
    double alpha = 0.0;
    /// Field actually placed on U (the input lambda).
    double lambda = 0.0;
    /// lambda or 1/lambda, whichever is below 1; the sizes are computed from it.
    double lambda_eff = 0.0;
    bool flipped = false;
    /// log C, including lambda^|U| when the field was flipped.
    double log_c = 0.0;
    BipartiteMultigraph b_prime;
    std::map<std::string, std::vector<std::string>> w_sets;
    std::map<std::string, std::vector<std::string>> u_sets;
    std::size_t w_count = 0;
    std::size_t u_count = 0;
};

/// Builds B' from B: every edge becomes t1 parallel edges, each vertex v gets
/// t1 deg(v) pendant neighbours W_v, and each w in W_v gets t2 pendant
/// neighbours carrying the field.
inline BisReductionPlan bis_to_ising(const BipartiteMultigraph& b, double alpha, double lambda, double epsilon,
    std::optional<LayerSizes> override_sizes = std::nullopt)
{
    if (!(lambda > 0.0) || lambda == 1.0)
        fail(ErrorCode::InvalidArgument, "lambda must be positive and different from 1");
    BisReductionPlan plan;
    plan.alpha = alpha;
    plan.lambda = lambda;
    plan.flipped = lambda > 1.0;
    plan.lambda_eff = plan.flipped ? 1.0 / lambda : lambda;
    const int n = static_cast<int>(b.vertex_count());
    const int m = static_cast<int>(b.edge_count());
    LayerSizes sz;
    if (override_sizes) {
        sz = *override_sizes;
        if (sz.t1 < 1 || sz.t2 < 1)
            fail(ErrorCode::InvalidArgument, "t1 and t2 must be positive");
        if (!(alpha > 0.0 && alpha < 1.0))
            fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    } else if (m == 0) {
        // No edges: B' = B, C = 1 and Z = 2^n = I_B.
        sz = { 0, 0 };
        if (!(alpha > 0.0 && alpha < 1.0) || !(epsilon > 0.0 && epsilon < 1.0))
            fail(ErrorCode::InvalidArgument, "alpha and epsilon must lie in (0, 1)");
    } else {
        sz = choose_t1_t2(alpha, plan.lambda_eff, n, m, epsilon);
    }
    plan.t1 = sz.t1;
    plan.t2 = sz.t2;

    std::vector<VertexSpec> vs = b.vertices();
    std::vector<EdgeSpec> es;
    for (const auto& e : b.edges())
        es.push_back({ e.u, e.v, e.mult * sz.t1 });
    std::vector<std::string> field;
    for (const auto& v : b.vertices()) {
        const int wn = sz.t1 * b.degree(v.id);
        auto& wset = plan.w_sets[v.id];
        for (int j = 1; j <= wn; ++j) {
            std::string w = "w[" + v.id + "," + padded(j) + "]";
            vs.push_back({ w, opposite(v.side) });
            es.push_back({ v.id, w, 1 });
            wset.push_back(w);
            auto& uset = plan.u_sets[w];
            for (int k = 1; k <= sz.t2; ++k) {
                std::string u = "u[" + v.id + "," + padded(j) + "," + padded(k) + "]";
                vs.push_back({ u, v.side });
                es.push_back({ w, u, 1 });
                uset.push_back(u);
                field.push_back(u);
            }
        }
        plan.w_count += wset.size();
    }
    plan.u_count = field.size();

    const double a = alpha, l = plan.lambda_eff;
    const double rho1 = 1.0 + a * l;
    plan.log_c = 2.0 * sz.t1 * double(sz.t2) * m * std::log(rho1) + double(sz.t1) * m * std::log(a);
    if (plan.flipped)
        plan.log_c += double(plan.u_count) * std::log(lambda);
    plan.b_prime = build_graph(std::move(vs), std::move(es), std::move(field));
    return plan;
}

struct BisCertificate {
    std::uint64_t independent_sets = 0;
    double log_z = 0.0;
    double log_c = 0.0;
    /// log of e^(-eps/2) I_B and e^(eps/2) I_B
    double log_lower = 0.0;
    double log_upper = 0.0;
    bool ok = false;
    BisReductionPlan plan;
};

/// Computes Z_{B',U}(alpha, alpha, lambda) exactly and checks
/// e^(-eps/2) I_B <= Z / C <= e^(eps/2) I_B.
inline BisCertificate verify_bis_reduction(const BipartiteMultigraph& b, double alpha, double lambda, double epsilon,
    const EngineOptions& opt = {}, std::optional<LayerSizes> override_sizes = std::nullopt)
{
    BisCertificate cert;
    cert.plan = bis_to_ising(b, alpha, lambda, epsilon, override_sizes);
    cert.independent_sets = count_independent_sets(b, opt);
    const SpinParams p = make_params(alpha, alpha, lambda);
    cert.log_z = partition_function(to_weighted_network(cert.plan.b_prime, p), opt).log();
    cert.log_c = cert.plan.log_c;
    const double log_ib = std::log(double(cert.independent_sets));
    cert.log_lower = log_ib - epsilon / 2.0;
    cert.log_upper = log_ib + epsilon / 2.0;
    const double ratio = cert.log_z - cert.log_c;
    cert.ok = ratio >= cert.log_lower && ratio <= cert.log_upper;
    return cert;
}

// ---------------------------------------------------------------------------
// Ising with a field on a subset -> bounded-degree bipartite 2-spin

struct DerivedIsingParams {
    /// N = M+ M (M+)^T with row/column 0 for phase '-' and 1 for '+'.
    Matrix2 n {};
    double det = 0.0;
    double alpha_out = 0.0;
    double lambda_out = 0.0;
    std::array<double, 2> rho_prime {};
    double mu1 = 0.0;
    double mu2 = 0.0;
    bool antiferromagnetic = true;
};

inline DerivedIsingParams derived_ising_params(const SpinParams& p, double q_minus, double q_plus,
    std::array<double, 2> rho)
{
    p.validate();
    if (!(q_minus > 0.0 && q_minus < q_plus && q_plus < 1.0))
        fail(ErrorCode::InvalidArgument, "need 0 < q_minus < q_plus < 1");
    if (std::abs(p.beta * p.gamma - 1.0) <= p.tol)
        fail(ErrorCode::DegenerateParameters, "beta*gamma = 1 makes det(N) = 0");
    const Matrix2 mp { { { 1.0 - q_minus, q_minus }, { 1.0 - q_plus, q_plus } } };
    const Matrix2 m = interaction_matrix(p);
    DerivedIsingParams d;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    s += mp[i][a] * m[a][b] * mp[j][b];
            d.n[i][j] = s;
        }
    d.det = d.n[0][0] * d.n[1][1] - d.n[0][1] * d.n[1][0];
    d.mu1 = d.n[1][1] * d.n[0][0];
    d.mu2 = d.n[1][0] * d.n[0][1];
    d.antiferromagnetic = p.beta * p.gamma < 1.0;
    d.alpha_out = d.antiferromagnetic ? d.mu1 / d.mu2 : d.mu2 / d.mu1;

    const double v0 = rho[0], v1 = rho[1] / p.lambda;
    d.rho_prime = { mp[0][0] * v0 + mp[0][1] * v1, mp[1][0] * v0 + mp[1][1] * v1 };
    d.lambda_out = d.rho_prime[1] / d.rho_prime[0];
    if (std::abs(d.lambda_out - 1.0) <= p.tol)
        fail(ErrorCode::DegenerateParameters, "lambda' = 1: the unary gadget does not break symmetry");
    return d;
}

struct OccupancyEntry {
    std::string copy;
    std::string terminal;
    std::string use;
};

struct IsingReductionPlan {
    DerivedIsingParams derived;
    BipartiteMultigraph b_prime;
    std::vector<OccupancyEntry> occupancy;
    int connections = 0;
    int identifications = 0;
    double rho1 = 0.0;
};

/// Replaces every vertex v of B by a copy G_v of the gadget, every edge of B
/// by one +/+ and one -/- terminal connection (crossed when ferromagnetic),
/// and attaches a copy of the unary gadget H to a positive terminal of G_u
/// for each u in U. Terminals are taken in lexicographic order of their ids.
inline IsingReductionPlan ising_to_2spin(const BipartiteMultigraph& b, const std::vector<std::string>& field_set,
    const SpinParams& p, const Gadget& g, const BipartiteMultigraph& h, const std::string& h_vertex, double q_minus,
    double q_plus, const EngineOptions& opt = {})
{
    const int delta = p.require_delta();
    if (p.degenerate())
        fail(ErrorCode::DegenerateParameters, "beta*gamma = 1");
    const bool crossed = p.ferromagnetic();
    if (!g.graph.terminals())
        fail(ErrorCode::NotEnoughTerminals, "gadget has no terminals");
    const auto plus = sorted_ids(g.graph.terminals()->plus);
    const auto minus = sorted_ids(g.graph.terminals()->minus);
    const Side plus_side = plus.empty() ? Side::L : g.graph.side_of(plus.front());
    const std::size_t hv = h.index_of(h_vertex);
    if (h.degree_at(hv) != 1)
        fail(ErrorCode::InvalidArgument, "the unary gadget's distinguished vertex must have degree 1");

    std::set<std::string> in_field(field_set.begin(), field_set.end());
    for (const auto& id : in_field)
        b.index_of(id);
    for (const auto& v : b.vertices()) {
        std::size_t need = static_cast<std::size_t>(b.degree(v.id)) + (in_field.count(v.id) ? 1 : 0);
        if (plus.size() < need || minus.size() < need)
            fail(ErrorCode::NotEnoughTerminals, "gadget copy for '" + v.id + "' needs " + std::to_string(need)
                    + " terminals per sign");
    }

    auto copy_id = [](const std::string& v, const std::string& id) { return "G[" + v + "]/" + id; };
    // Orientation: with equal-sign connections adjacent copies must be mirror
    // images, so a copy is flipped when its B vertex is on side R.
    auto copy_side = [&](const std::string& v, Side s) {
        bool flip = !crossed && b.side_of(v) == Side::R;
        return flip ? opposite(s) : s;
    };

    std::vector<VertexSpec> vs;
    std::vector<EdgeSpec> es;
    for (const auto& v : b.vertices()) {
        for (const auto& x : g.graph.vertices())
            vs.push_back({ copy_id(v.id, x.id), copy_side(v.id, x.side) });
        for (const auto& e : g.graph.edges())
            es.push_back({ copy_id(v.id, e.u), copy_id(v.id, e.v), e.mult });
    }

    IsingReductionPlan plan;
    std::map<std::string, std::size_t> next_plus, next_minus;
    std::set<std::string> used;
    auto take = [&](const std::string& v, bool positive, const std::string& use) {
        auto& next = positive ? next_plus[v] : next_minus[v];
        const auto& pool = positive ? plus : minus;
        if (next >= pool.size())
            fail(ErrorCode::NotEnoughTerminals, "gadget copy for '" + v + "' ran out of terminals");
        std::string id = copy_id(v, pool[next++]);
        if (!used.insert(id).second)
            fail(ErrorCode::InvalidArgument, "terminal '" + id + "' used twice");
        plan.occupancy.push_back({ v, id, use });
        return id;
    };

    for (const auto& e : b.edges()) {
        for (int k = 0; k < e.mult; ++k) {
            std::string tag = "edge " + e.u + "-" + e.v + "#" + std::to_string(k);
            std::string up = take(e.u, true, tag), um = take(e.u, false, tag);
            std::string vp = take(e.v, !crossed, tag), vm = take(e.v, crossed, tag);
            es.push_back({ up, vp, 1 });
            es.push_back({ um, vm, 1 });
            plan.connections += 2;
        }
    }

    for (const auto& u : in_field) {
        std::string t = take(u, true, "field");
        const Side t_side = copy_side(u, plus_side);
        const bool same = h.side_of(h_vertex) == t_side;
        auto hid = [&](const std::string& x) { return x == h_vertex ? t : "H[" + u + "]/" + x; };
        for (const auto& x : h.vertices())
            if (x.id != h_vertex)
                vs.push_back({ hid(x.id), same ? x.side : opposite(x.side) });
        for (const auto& e : h.edges())
            es.push_back({ hid(e.u), hid(e.v), e.mult });
        ++plan.identifications;
    }

    plan.b_prime = build_graph(std::move(vs), std::move(es), std::nullopt, std::nullopt, delta);
    plan.rho1 = marginal(to_weighted_network(h, p), h_vertex, opt);
    plan.derived = derived_ising_params(p, q_minus, q_plus, { 1.0 - plan.rho1, plan.rho1 });
    return plan;
}

} // namespace spinlab
