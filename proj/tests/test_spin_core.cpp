#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace spinlab;
using namespace spinlab::testing;

namespace {

ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const SpinError& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected a SpinError";
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST(Graph, SmallestBipartiteGraph)
{
    auto g = edge_graph();
    EXPECT_EQ(g.vertex_count(), 2u);
    EXPECT_EQ(g.edge_count(), 1u);
    EXPECT_EQ(g.degree("a"), 1);
    EXPECT_EQ(g.degree("b"), 1);
}

TEST(Graph, RejectsSameSideEdge)
{
    EXPECT_EQ(code_of([] { build_graph({ { "a", Side::L }, { "b", Side::L } }, { { "a", "b", 1 } }); }),
        ErrorCode::NonBipartite);
}

TEST(Graph, RejectsOverlappingTerminals)
{
    EXPECT_EQ(code_of([] {
        build_graph({ { "a", Side::L }, { "b", Side::R } }, { { "a", "b", 1 } }, std::nullopt,
            TerminalSets { { "a" }, { "a" } });
    }),
        ErrorCode::TerminalOverlap);
}

TEST(Graph, OtherStructuralErrors)
{
    EXPECT_EQ(code_of([] { build_graph({ { "a", Side::L }, { "a", Side::R } }, {}); }), ErrorCode::DuplicateVertex);
    EXPECT_EQ(code_of([] { build_graph({ { "a", Side::L } }, { { "a", "zz", 1 } }); }), ErrorCode::UnknownVertex);
    EXPECT_EQ(code_of([] { build_graph({ { "a", Side::L }, { "b", Side::R } }, { { "a", "b", 0 } }); }),
        ErrorCode::InvalidArgument);
    // Terminal vertices may only use Delta - 1 edges.
    EXPECT_EQ(code_of([] {
        build_graph({ { "a", Side::L }, { "b", Side::R } }, { { "a", "b", 3 } }, std::nullopt,
            TerminalSets { { "a" }, {} }, 3);
    }),
        ErrorCode::DegreeBoundViolated);
}

TEST(Graph, MultiplicityCountsTowardDegree)
{
    auto g = build_graph({ { "a", Side::L }, { "b", Side::R } }, { { "a", "b", 4 } });
    EXPECT_EQ(g.edge_count(), 4u);
    EXPECT_EQ(g.max_degree(), 4);
}

TEST(Params, Validation)
{
    EXPECT_EQ(code_of([] { make_params(-1, 1, 1); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { make_params(1, 1, 0); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { make_params(1, 1, 1, 2); }), ErrorCode::InvalidArgument);
    EXPECT_TRUE(make_params(0.5, 0.5, 1).antiferromagnetic());
    EXPECT_TRUE(make_params(2, 3, 1).ferromagnetic());
    EXPECT_TRUE(make_params(2, 0.5, 1).degenerate());
}

TEST(Network, SingleEdgeTranscription)
{
    auto net = to_weighted_network(edge_graph(), make_params(2, 3, 1));
    ASSERT_EQ(net.size(), 2u);
    EXPECT_EQ(net.vertex_weights[0], (Weight2 { 1, 1 }));
    EXPECT_EQ(net.vertex_weights[1], (Weight2 { 1, 1 }));
    ASSERT_EQ(net.edges.size(), 1u);
    EXPECT_EQ(net.edges[0].w, (Matrix2 { { { 2, 1 }, { 1, 3 } } }));
}

TEST(Network, MultiplicityIsElementwisePower)
{
    const auto p = make_params(0.5, 0.5, 1.3);
    auto multi = build_graph({ { "a", Side::L }, { "b", Side::R } }, { { "a", "b", 4 } });
    auto net = to_weighted_network(multi, p);
    EXPECT_DOUBLE_EQ(net.edges[0].w[0][0], 0.0625);
    EXPECT_DOUBLE_EQ(net.edges[0].w[0][1], 1.0);
    EXPECT_DOUBLE_EQ(net.edges[0].w[1][0], 1.0);
    EXPECT_DOUBLE_EQ(net.edges[0].w[1][1], 0.0625);

    // Same graph spelled as four parallel simple edges.
    auto parallel = build_graph({ { "a", Side::L }, { "b", Side::R } },
        { { "a", "b", 1 }, { "a", "b", 1 }, { "a", "b", 1 }, { "a", "b", 1 } });
    EXPECT_LT(rel_diff(brute_force_z(multi, p), brute_force_z(parallel, p)), 1e-15);
    EXPECT_LT(rel_diff(partition_function(net).linear(), brute_force_z(parallel, p)), 1e-13);
}

TEST(Network, NonuniformField)
{
    auto g = build_graph({ { "u", Side::L }, { "v", Side::R }, { "w", Side::L } }, { { "u", "v", 1 }, { "w", "v", 1 } },
        std::vector<std::string> { "v" });
    auto net = to_weighted_network(g, make_params(0.5, 0.5, 2));
    EXPECT_EQ(net.vertex_weights[0], (Weight2 { 1, 1 }));
    EXPECT_EQ(net.vertex_weights[1], (Weight2 { 1, 2 }));
    EXPECT_EQ(net.vertex_weights[2], (Weight2 { 1, 1 }));
}

TEST(Pendants, StarCollapsesToCenter)
{
    const auto p = make_params(0.7, 1.9, 1.6);
    auto g = star3();
    auto reduced = eliminate_pendants(to_weighted_network(g, p), { "c" });
    ASSERT_EQ(reduced.size(), 1u);
    EXPECT_EQ(reduced.kept_vertices[0], "c");
    EXPECT_TRUE(reduced.edges.empty());
    auto w = reduced.vertex_weights[0];
    double z = std::exp(reduced.log_scale) * (w[0] + w[1]);
    EXPECT_LT(rel_diff(z, brute_force_z(g, p)), 1e-14);
}

TEST(Pendants, LeafFoldGivesRhoPair)
{
    // Leaf u with weight (1, lambda) hanging off v in a symmetric antiferromagnetic Ising model.
    const double alpha = 0.3, lambda = 0.8;
    auto g = build_graph({ { "u", Side::L }, { "v", Side::R } }, { { "u", "v", 1 } }, std::vector<std::string> { "u" });
    auto reduced = eliminate_pendants(to_weighted_network(g, make_params(alpha, alpha, lambda)), { "v" });
    ASSERT_EQ(reduced.size(), 1u);
    const double s = std::exp(reduced.log_scale);
    EXPECT_NEAR(s * reduced.vertex_weights[0][0], alpha + lambda, 1e-15);
    EXPECT_NEAR(s * reduced.vertex_weights[0][1], 1.0 + alpha * lambda, 1e-15);
}

TEST(Pendants, PendantFreeGraphIsUnchanged)
{
    auto net = to_weighted_network(cycle4(), make_params(0.4, 1.2, 0.9));
    auto out = eliminate_pendants(net, {});
    EXPECT_EQ(out.kept_vertices, net.kept_vertices);
    EXPECT_EQ(out.vertex_weights, net.vertex_weights);
    EXPECT_EQ(out.edges.size(), net.edges.size());
    EXPECT_EQ(out.log_scale, 0.0);
}

TEST(Pendants, PreservesZOnRandomForests)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = random_graph(rng, { 2, 12, 3, 0.2, true });
        const auto p = make_params(uniform(rng, 0, 2), uniform(rng, 0, 2), uniform(rng, 0.1, 3));
        auto reduced = eliminate_pendants(to_weighted_network(g, p), {});
        EXPECT_LE(reduced.size(), g.vertex_count());
        EXPECT_LT(rel_diff(partition_function(reduced).linear(), brute_force_z(g, p)), 1e-11);
    }
}

TEST(FlipTransform, SingleEdge)
{
    auto r = flip_transform_check(edge_graph(), 0.5);
    EXPECT_NEAR(r.lhs.linear(), 3.0, 1e-14);
    EXPECT_NEAR(r.rhs.linear(), 3.0, 1e-14);
    EXPECT_LT(r.relative_gap, 1e-15);
}

TEST(FlipTransform, FourCycleAgainstBruteForce)
{
    auto g = cycle4();
    auto r = flip_transform_check(g, 0.3);
    EXPECT_LE(r.relative_gap, 1e-12);
    long double lhs = brute_force_z(g, make_params(0.3, 0.3, 1));
    long double rhs = std::pow(0.3L, 4) * brute_force_z(g, make_params(1 / 0.3, 1 / 0.3, 1));
    EXPECT_LT(rel_diff(lhs, rhs), 1e-15);
    EXPECT_LT(rel_diff(r.lhs.linear(), lhs), 1e-13);
}

TEST(FlipTransform, AlphaOneIsTrivial)
{
    auto g = path_graph(5);
    auto r = flip_transform_check(g, 1.0);
    EXPECT_EQ(r.relative_gap, 0.0);
    EXPECT_NEAR(r.lhs.linear(), 32.0, 1e-12);
}

TEST(FlipTransform, RejectsBadAlpha)
{
    EXPECT_EQ(code_of([] { flip_transform_check(edge_graph(), 0.0); }), ErrorCode::InvalidArgument);
}

TEST(LogValue, Arithmetic)
{
    auto a = LogValue::from_linear(3.0), b = LogValue::from_linear(5.0);
    EXPECT_NEAR((a + b).linear(), 8.0, 1e-14);
    EXPECT_NEAR((a * b).linear(), 15.0, 1e-13);
    EXPECT_TRUE((a * LogValue::zero()).is_zero());
    EXPECT_EQ((LogValue::zero() + b), b);
    // Sums far beyond double range stay finite in log form.
    auto big = LogValue::from_log(1000.0);
    EXPECT_NEAR((big + big).log(), 1000.0 + std::log(2.0), 1e-12);
}
