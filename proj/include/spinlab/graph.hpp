#pragma once

#include "spinlab/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace spinlab {

enum class Side : std::uint8_t { L, R };

inline Side opposite(Side s) { return s == Side::L ? Side::R : Side::L; }

struct VertexSpec {
    std::string id;
    Side side = Side::L;

    friend bool operator==(const VertexSpec&, const VertexSpec&) = default;
};

struct EdgeSpec {
    std::string u;
    std::string v;
    int mult = 1;

    friend bool operator==(const EdgeSpec&, const EdgeSpec&) = default;
};

struct TerminalSets {
    std::vector<std::string> plus;
    std::vector<std::string> minus;

    friend bool operator==(const TerminalSets&, const TerminalSets&) = default;
};

class BipartiteMultigraph;

BipartiteMultigraph build_graph(std::vector<VertexSpec> vertices, std::vector<EdgeSpec> edges,
    std::optional<std::vector<std::string>> field_subset = std::nullopt,
    std::optional<TerminalSets> terminals = std::nullopt, std::optional<int> degree_bound = std::nullopt);

/// Validated bipartite multigraph. Immutable once built; construct through
/// build_graph.
class BipartiteMultigraph {
public:
    BipartiteMultigraph() = default;

    const std::vector<VertexSpec>& vertices() const { return vertices_; }
    const std::vector<EdgeSpec>& edges() const { return edges_; }
    const std::optional<std::vector<std::string>>& field_subset() const { return field_subset_; }
    const std::optional<TerminalSets>& terminals() const { return terminals_; }

    std::size_t vertex_count() const { return vertices_.size(); }

    /// Number of edges counted with multiplicity.
    std::size_t edge_count() const
    {
        std::size_t m = 0;
        for (const auto& e : edges_)
            m += static_cast<std::size_t>(e.mult);
        return m;
    }

    bool contains(const std::string& id) const { return index_.count(id) != 0; }

    std::size_t index_of(const std::string& id) const
    {
        auto it = index_.find(id);
        if (it == index_.end())
            fail(ErrorCode::UnknownVertex, "unknown vertex '" + id + "'");
        return it->second;
    }

    /// Endpoint indices of edge i, in the (u, v) order it was given.
    std::pair<std::size_t, std::size_t> endpoints(std::size_t i) const { return endpoints_[i]; }

    Side side_of(const std::string& id) const { return vertices_[index_of(id)].side; }

    int degree(const std::string& id) const { return degrees_[index_of(id)]; }
    int degree_at(std::size_t i) const { return degrees_[i]; }
    const std::vector<int>& degrees() const { return degrees_; }

    int max_degree() const
    {
        return degrees_.empty() ? 0 : *std::max_element(degrees_.begin(), degrees_.end());
    }

    /// True when the vertex carries the external field (no subset means all vertices do).
    bool in_field(std::size_t i) const
    {
        if (!field_subset_)
            return true;
        return field_mask_[i];
    }

    bool is_terminal(const std::string& id) const
    {
        if (!terminals_)
            return false;
        auto has = [&](const std::vector<std::string>& s) { return std::find(s.begin(), s.end(), id) != s.end(); };
        return has(terminals_->plus) || has(terminals_->minus);
    }

    /// Degree-bound audit: every vertex <= bound and every terminal <= bound - 1.
    void check_degree_bound(int bound) const
    {
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            int cap = is_terminal(vertices_[i].id) ? bound - 1 : bound;
            if (degrees_[i] > cap)
                fail(ErrorCode::DegreeBoundViolated,
                    "vertex '" + vertices_[i].id + "' has degree " + std::to_string(degrees_[i]) + " > "
                        + std::to_string(cap));
        }
    }

    friend bool operator==(const BipartiteMultigraph& a, const BipartiteMultigraph& b)
    {
        return a.vertices_ == b.vertices_ && a.edges_ == b.edges_ && a.field_subset_ == b.field_subset_
            && a.terminals_ == b.terminals_;
    }

    friend BipartiteMultigraph build_graph(std::vector<VertexSpec>, std::vector<EdgeSpec>,
        std::optional<std::vector<std::string>>, std::optional<TerminalSets>, std::optional<int>);

private:
    std::vector<VertexSpec> vertices_;
    std::vector<EdgeSpec> edges_;
    std::optional<std::vector<std::string>> field_subset_;
    std::optional<TerminalSets> terminals_;

    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::pair<std::size_t, std::size_t>> endpoints_;
    std::vector<int> degrees_;
    std::vector<bool> field_mask_;
};

inline BipartiteMultigraph build_graph(std::vector<VertexSpec> vertices, std::vector<EdgeSpec> edges,
    std::optional<std::vector<std::string>> field_subset, std::optional<TerminalSets> terminals,
    std::optional<int> degree_bound)
{
    BipartiteMultigraph g;
    g.index_.reserve(vertices.size());
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (!g.index_.emplace(vertices[i].id, i).second)
            fail(ErrorCode::DuplicateVertex, "duplicate vertex id '" + vertices[i].id + "'");
    }
    g.vertices_ = std::move(vertices);
    g.degrees_.assign(g.vertices_.size(), 0);

    g.endpoints_.reserve(edges.size());
    for (const auto& e : edges) {
        auto u = g.index_of(e.u);
        auto v = g.index_of(e.v);
        if (e.mult < 1)
            fail(ErrorCode::InvalidArgument, "edge multiplicity must be >= 1");
        if (g.vertices_[u].side == g.vertices_[v].side)
            fail(ErrorCode::NonBipartite, "edge (" + e.u + ", " + e.v + ") joins two vertices on the same side");
        g.endpoints_.emplace_back(u, v);
        g.degrees_[u] += e.mult;
        g.degrees_[v] += e.mult;
    }
    g.edges_ = std::move(edges);

    g.field_mask_.assign(g.vertices_.size(), false);
    if (field_subset) {
        for (const auto& id : *field_subset)
            g.field_mask_[g.index_of(id)] = true;
    }
    g.field_subset_ = std::move(field_subset);

    if (terminals) {
        std::unordered_set<std::string> plus;
        for (const auto& id : terminals->plus) {
            g.index_of(id);
            plus.insert(id);
        }
        for (const auto& id : terminals->minus) {
            g.index_of(id);
            if (plus.count(id))
                fail(ErrorCode::TerminalOverlap, "vertex '" + id + "' is both a positive and a negative terminal");
        }
        auto same_side = [&](const std::vector<std::string>& ids) -> std::optional<Side> {
            if (ids.empty())
                return std::nullopt;
            Side s = g.side_of(ids.front());
            for (const auto& id : ids)
                if (g.side_of(id) != s)
                    fail(ErrorCode::TerminalLayout, "terminals of one sign must lie on one side");
            return s;
        };
        auto sp = same_side(terminals->plus);
        auto sm = same_side(terminals->minus);
        if (sp && sm && *sp == *sm)
            fail(ErrorCode::TerminalLayout, "positive and negative terminals must lie on opposite sides");
    }
    g.terminals_ = std::move(terminals);

    if (degree_bound)
        g.check_degree_bound(*degree_bound);
    return g;
}

} // namespace spinlab
