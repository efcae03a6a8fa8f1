#pragma once

#include "spinlab/errors.hpp"
#include "spinlab/gadgets.hpp"
#include "spinlab/graph.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinlab {

using Json = nlohmann::json;

/// Raised for unreadable files and for documents that do not match the
/// graph schema. Distinct from SpinError, which covers domain failures.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

    inline void dump_number(std::ostream& os, double x)
    {
        if (!std::isfinite(x)) {
            os << "null";
            return;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        os << buf;
    }

    inline void dump(std::ostream& os, const Json& j, int indent, int depth)
    {
        auto newline = [&](int d) {
            os << '\n';
            for (int i = 0; i < d * indent; ++i)
                os << ' ';
        };
        switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first)
                    os << ',';
                first = false;
                newline(depth + 1);
                os << Json(it.key()).dump() << ": ";
                dump(os, it.value(), indent, depth + 1);
            }
            newline(depth);
            os << '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            bool scalars = std::all_of(j.begin(), j.end(), [](const Json& x) { return !x.is_structured(); });
            os << '[';
            bool first = true;
            for (const auto& x : j) {
                if (!first)
                    os << (scalars ? ", " : ",");
                first = false;
                if (!scalars)
                    newline(depth + 1);
                dump(os, x, indent, depth + 1);
            }
            if (!scalars)
                newline(depth);
            os << ']';
            return;
        }
        case Json::value_t::number_float:
            dump_number(os, j.get<double>());
            return;
        default:
            os << j.dump();
        }
    }

} // namespace detail

/// Canonical text form: keys sorted, two-space indent, floats with 17
/// significant digits, non-finite numbers as null, trailing newline.
inline std::string canonical_dump(const Json& j)
{
    std::ostringstream os;
    detail::dump(os, j, 2, 0);
    os << '\n';
    return os.str();
}

inline std::string side_name(Side s) { return s == Side::L ? "L" : "R"; }

inline Json graph_to_json(const BipartiteMultigraph& g)
{
    Json j = Json::object();
    j["vertices"] = Json::array();
    for (const auto& v : g.vertices())
        j["vertices"].push_back({ { "id", v.id }, { "side", side_name(v.side) } });
    j["edges"] = Json::array();
    for (const auto& e : g.edges())
        j["edges"].push_back({ { "u", e.u }, { "v", e.v }, { "mult", e.mult } });
    if (g.field_subset())
        j["field_subset"] = *g.field_subset();
    if (g.terminals())
        j["terminals"] = { { "plus", g.terminals()->plus }, { "minus", g.terminals()->minus } };
    return j;
}

namespace detail {

    [[noreturn]] inline void schema_fail(const std::string& what) { throw InputError("graph schema: " + what); }

    inline const Json& field(const Json& j, const char* key)
    {
        if (!j.is_object() || !j.contains(key))
            schema_fail(std::string("missing key '") + key + "'");
        return j.at(key);
    }

    inline std::string as_string(const Json& j, const char* what)
    {
        if (!j.is_string())
            schema_fail(std::string(what) + " must be a string");
        return j.get<std::string>();
    }

    inline std::vector<std::string> as_strings(const Json& j, const char* what)
    {
        if (!j.is_array())
            schema_fail(std::string(what) + " must be an array of strings");
        std::vector<std::string> out;
        for (const auto& x : j)
            out.push_back(as_string(x, what));
        return out;
    }

} // namespace detail

inline BipartiteMultigraph graph_from_json(const Json& j, std::optional<int> degree_bound = std::nullopt)
{
    using namespace detail;
    if (!j.is_object())
        schema_fail("document must be an object");
    static const std::set<std::string> known { "vertices", "edges", "field_subset", "terminals", "metadata", "layout" };
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            schema_fail("unknown key '" + it.key() + "'");
    std::vector<VertexSpec> vs;
    const Json& jv = field(j, "vertices");
    if (!jv.is_array())
        schema_fail("'vertices' must be an array");
    for (const auto& v : jv) {
        std::string side = as_string(field(v, "side"), "side");
        if (side != "L" && side != "R")
            schema_fail("side must be \"L\" or \"R\"");
        vs.push_back({ as_string(field(v, "id"), "id"), side == "L" ? Side::L : Side::R });
    }
    std::vector<EdgeSpec> es;
    const Json& je = field(j, "edges");
    if (!je.is_array())
        schema_fail("'edges' must be an array");
    for (const auto& e : je) {
        int mult = 1;
        if (e.is_object() && e.contains("mult")) {
            if (!e.at("mult").is_number_integer())
                schema_fail("mult must be an integer");
            mult = e.at("mult").get<int>();
        }
        es.push_back({ as_string(field(e, "u"), "u"), as_string(field(e, "v"), "v"), mult });
    }
    std::optional<std::vector<std::string>> fs;
    if (j.contains("field_subset"))
        fs = as_strings(j.at("field_subset"), "field_subset");
    std::optional<TerminalSets> ts;
    if (j.contains("terminals")) {
        const Json& jt = j.at("terminals");
        ts = TerminalSets { as_strings(field(jt, "plus"), "terminals.plus"),
            as_strings(field(jt, "minus"), "terminals.minus") };
    }
    return build_graph(std::move(vs), std::move(es), std::move(fs), std::move(ts), degree_bound);
}

inline Json gadget_to_json(const Gadget& g)
{
    Json j = graph_to_json(g.graph);
    const auto& m = g.metadata;
    j["metadata"] = { { "family", m.family }, { "t", m.t }, { "t_prime", m.t_prime }, { "tree_depth", m.tree_depth },
        { "seed", m.seed ? Json(*m.seed) : Json(nullptr) }, { "theta", m.theta ? Json(*m.theta) : Json(nullptr) },
        { "psi", m.psi ? Json(*m.psi) : Json(nullptr) } };
    j["layout"] = { { "plus", g.layout.v_plus }, { "minus", g.layout.v_minus } };
    return j;
}

inline Gadget gadget_from_json(const Json& j, std::optional<int> degree_bound = std::nullopt)
{
    using namespace detail;
    Gadget g;
    g.graph = graph_from_json(j, degree_bound);
    g.layout = side_layout(g.graph);
    if (j.contains("layout")) {
        const Json& jl = j.at("layout");
        g.layout.v_plus = as_strings(field(jl, "plus"), "layout.plus");
        g.layout.v_minus = as_strings(field(jl, "minus"), "layout.minus");
        for (const auto& id : g.layout.v_plus)
            g.graph.index_of(id);
        for (const auto& id : g.layout.v_minus)
            g.graph.index_of(id);
    }
    if (j.contains("metadata")) {
        const Json& m = j.at("metadata");
        if (!m.is_object())
            schema_fail("metadata must be an object");
        g.metadata.family = m.value("family", "");
        g.metadata.t = m.value("t", 0);
        g.metadata.t_prime = m.value("t_prime", 0);
        g.metadata.tree_depth = m.value("tree_depth", 0);
        if (m.contains("seed") && m.at("seed").is_number_integer())
            g.metadata.seed = m.at("seed").get<std::uint64_t>();
        if (m.contains("theta") && m.at("theta").is_number())
            g.metadata.theta = m.at("theta").get<double>();
        if (m.contains("psi") && m.at("psi").is_number())
            g.metadata.psi = m.at("psi").get<double>();
    } else {
        g.metadata.family = "custom";
        g.metadata.t = g.graph.terminals() ? static_cast<int>(g.graph.terminals()->plus.size()) : 0;
    }
    return g;
}

inline Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write '" + path + "'");
    out << text;
    if (!out)
        throw InputError("write to '" + path + "' failed");
}

inline std::string csv_number(double x)
{
    if (!std::isfinite(x))
        return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace spinlab
