#pragma once

#include "spinlab/exact.hpp"
#include "spinlab/gadgets.hpp"
#include "spinlab/io.hpp"
#include "spinlab/moments.hpp"
#include "spinlab/reductions.hpp"
#include "spinlab/tree.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace spinlab::cli {

/// Everything any subcommand may read. Each subcommand registers only the
/// flags it uses, so stray flags are rejected by the parser.
struct Options {
    double beta = 1.0;
    double gamma = 1.0;
    double lambda = 1.0;
    std::optional<int> delta;
    double eps = 0.1;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::string graph;
    std::string gadget;
    std::string out;
    std::string graph_out;
    std::string format = "json";
    std::size_t cap = 28;
    std::string vertex;
    double alpha = 0.5;
    std::optional<int> t1;
    std::optional<int> t2;
    std::optional<double> q_minus;
    std::optional<double> q_plus;
    std::optional<double> chi_plus;
    std::optional<double> chi_minus;
    double lambda_min = 0.01;
    double lambda_max = 100.0;
    int points = 41;
    int n_side = 6;
    int t = 2;
    int depth = 0;
    int t_prime = 1;
    int rejection_cap = 10000;
};

namespace detail {

    inline double tol_or(const Options& o, double fallback) { return o.tol.value_or(fallback); }

    inline SpinParams params(const Options& o) { return make_params(o.beta, o.gamma, o.lambda, o.delta, tol_or(o, 1e-9)); }

    inline Json params_json(const SpinParams& p)
    {
        return { { "beta", p.beta }, { "gamma", p.gamma }, { "lambda", p.lambda },
            { "delta", p.delta ? Json(*p.delta) : Json(nullptr) } };
    }

    inline EngineOptions engine(const Options& o) { return { o.cap, 0 }; }

    inline Json phase_point_json(const PhasePoint& pp)
    {
        return { { "regime", to_string(pp.regime) }, { "q_minus", pp.q_minus }, { "q_plus", pp.q_plus },
            { "r_minus", pp.r_minus }, { "r_plus", pp.r_plus }, { "p_minus", pp.p_minus }, { "p_plus", pp.p_plus },
            { "fixed_point", pp.fixed_point }, { "slope", pp.slope } };
    }

    inline Json matrix_json(const Matrix2& m) { return { { m[0][0], m[0][1] }, { m[1][0], m[1][1] } }; }

    inline Json error_json(const std::string& code, const std::string& message)
    {
        return { { "error", { { "code", code }, { "message", message } } } };
    }

    inline std::pair<double, double> terminal_marginals(const Options& o, const SpinParams& p)
    {
        if (o.q_minus && o.q_plus)
            return { *o.q_minus, *o.q_plus };
        PhasePoint pp = extremal_marginals(p);
        return { o.q_minus.value_or(pp.q_minus), o.q_plus.value_or(pp.q_plus) };
    }

    inline Json verdict_json(const GadgetVerdict& v)
    {
        const auto& d = v.decomposition;
        return { { "prob_plus", v.prob_plus }, { "prob_minus", v.prob_minus },
            { "max_ratio_deviation", { { "plus", v.deviation_plus }, { "minus", v.deviation_minus } } },
            { "passed", v.passed }, { "eps", v.epsilon }, { "log_z_plus", d.z_plus.log() },
            { "log_z_minus", d.z_minus.log() }, { "log_z", d.total.log() }, { "terminals", d.terminals },
            { "tables", { { "plus", d.tables[0] }, { "minus", d.tables[1] } } } };
    }

} // namespace detail

/// Runs one command. Reports go to `out` (or to --out), diagnostics to `err`.
/// Exit status: 0 success, 1 domain error, 2 usage, I/O or parse error.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
    using detail::params;
    Options o;
    CLI::App app { "Exact and numerical tools for 2-spin systems on bipartite graphs", "spinlab" };
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    auto add_params = [&](CLI::App* c, bool with_lambda, bool with_delta) {
        c->add_option("--beta", o.beta, "weight of (0,0) edges")->capture_default_str();
        c->add_option("--gamma", o.gamma, "weight of (1,1) edges")->capture_default_str();
        if (with_lambda)
            c->add_option("--lambda", o.lambda, "weight of spin-1 vertices")->capture_default_str();
        if (with_delta)
            c->add_option("--delta", o.delta, "degree bound (>= 3)");
    };
    auto add_tol = [&](CLI::App* c, const char* what) { c->add_option("--tol", o.tol, what); };
    auto add_graph = [&](CLI::App* c) { c->add_option("--graph", o.graph, "input graph (JSON)")->required(); };
    auto add_cap = [&](CLI::App* c) {
        c->add_option("--cap", o.cap, "enumeration cap on kept vertices")->capture_default_str();
    };
    auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "write the report here instead of stdout"); };
    auto add_format = [&](CLI::App* c, bool csv) {
        auto* opt = c->add_option("--format", o.format, "report format")->capture_default_str();
        opt->check(csv ? CLI::IsMember({ "json", "csv" }) : CLI::IsMember({ "json" }));
    };
    auto common = [&](CLI::App* c, bool csv = false) {
        add_out(c);
        add_format(c, csv);
    };

    std::function<Json()> action;
    std::function<std::string()> csv_action;

    // z ---------------------------------------------------------------------
    auto* c_z = app.add_subcommand("z", "exact partition function");
    add_graph(c_z);
    add_params(c_z, true, false);
    add_cap(c_z);
    add_tol(c_z, "parameter tolerance");
    common(c_z);
    c_z->callback([&] {
        action = [&] {
            SpinParams p = params(o);
            auto g = graph_from_json(read_json_file(o.graph));
            auto net = to_weighted_network(g, p);
            auto reduced = eliminate_pendants(net, {});
            LogValue z = partition_function(net, detail::engine(o));
            return Json { { "log_z", z.log() }, { "z", z.linear() }, { "vertices", g.vertex_count() },
                { "edges", g.edge_count() }, { "kept_after_elimination", reduced.size() }, { "cap", o.cap },
                { "params", detail::params_json(p) }, { "tol", p.tol } };
        };
    });

    // marginal --------------------------------------------------------------
    auto* c_marg = app.add_subcommand("marginal", "Pr(spin 1) at one vertex");
    add_graph(c_marg);
    c_marg->add_option("--vertex", o.vertex, "vertex id")->required();
    add_params(c_marg, true, false);
    add_cap(c_marg);
    add_tol(c_marg, "parameter tolerance");
    common(c_marg);
    c_marg->callback([&] {
        action = [&] {
            SpinParams p = params(o);
            auto g = graph_from_json(read_json_file(o.graph));
            double pr = marginal(to_weighted_network(g, p), o.vertex, detail::engine(o));
            return Json { { "vertex", o.vertex }, { "probability", pr }, { "params", detail::params_json(p) },
                { "tol", p.tol } };
        };
    });

    // classify --------------------------------------------------------------
    auto* c_cls = app.add_subcommand("classify", "tree uniqueness regime and extremal marginals");
    add_params(c_cls, true, true);
    add_tol(c_cls, "band around |f'| = 1 reported as critical");
    common(c_cls);
    c_cls->callback([&] {
        action = [&] {
            SpinParams p = params(o);
            Json j = detail::phase_point_json(extremal_marginals(p));
            j["params"] = detail::params_json(p);
            j["tol"] = p.tol;
            return j;
        };
    });

    // thresholds ------------------------------------------------------------
    auto* c_thr = app.add_subcommand("thresholds", "critical lambda interval and hard-core lambda_c");
    add_params(c_thr, false, true);
    common(c_thr);
    c_thr->callback([&] {
        action = [&] {
            SpinParams p = make_params(o.beta, o.gamma, 1.0, o.delta);
            const int delta = p.require_delta();
            auto iv = lambda_interval(o.beta, o.gamma, delta);
            Json j { { "hardcore_lambda_c", hardcore_lambda_c(delta) },
                { "sqrt_beta_gamma", std::sqrt(o.beta * o.gamma) }, { "critical_ratio", double(delta - 2) / delta },
                { "endpoint_tol", 1e-8 } };
            j["lambda_interval"] = iv ? Json { iv->first, iv->second } : Json(nullptr);
            j["params"] = { { "beta", o.beta }, { "gamma", o.gamma }, { "delta", delta } };
            return j;
        };
    });

    // sweep -----------------------------------------------------------------
    auto* c_sw = app.add_subcommand("sweep", "phase diagram along a log-spaced lambda grid");
    add_params(c_sw, false, true);
    c_sw->add_option("--lambda-min", o.lambda_min)->capture_default_str();
    c_sw->add_option("--lambda-max", o.lambda_max)->capture_default_str();
    c_sw->add_option("--points", o.points)->capture_default_str();
    add_tol(c_sw, "critical band");
    common(c_sw, true);
    c_sw->callback([&] {
        auto rows = [&] {
            SpinParams p = make_params(o.beta, o.gamma, 1.0, o.delta, detail::tol_or(o, 1e-9));
            return lambda_sweep(o.beta, o.gamma, p.require_delta(), o.lambda_min, o.lambda_max, o.points, p.tol);
        };
        if (o.format == "csv") {
            csv_action = [&, rows] {
                std::ostringstream os;
                os << "beta,gamma,lambda,delta,regime,q_minus,q_plus,p_minus,p_plus\n";
                for (const auto& r : rows()) {
                    const auto& q = r.point;
                    os << csv_number(r.params.beta) << ',' << csv_number(r.params.gamma) << ','
                       << csv_number(r.params.lambda) << ',' << *r.params.delta << ',' << to_string(q.regime) << ','
                       << csv_number(q.q_minus) << ',' << csv_number(q.q_plus) << ',' << csv_number(q.p_minus) << ','
                       << csv_number(q.p_plus) << '\n';
                }
                return os.str();
            };
        } else {
            action = [&, rows] {
                Json arr = Json::array();
                for (const auto& r : rows()) {
                    Json j = detail::phase_point_json(r.point);
                    j["lambda"] = r.params.lambda;
                    arr.push_back(j);
                }
                return Json { { "rows", arr }, { "params", { { "beta", o.beta }, { "gamma", o.gamma }, { "delta", *o.delta } } },
                    { "tol", detail::tol_or(o, 1e-9) } };
            };
        }
    });

    // moments ---------------------------------------------------------------
    auto* c_mom = app.add_subcommand("moments", "first/second moment report");
    add_params(c_mom, true, true);
    add_tol(c_mom, "tolerance on the overlap argmax location");
    c_mom->add_option("--chi-plus", o.chi_plus, "also evaluate psi1/psi2 at this density");
    c_mom->add_option("--chi-minus", o.chi_minus, "also evaluate psi1/psi2 at this density");
    common(c_mom);
    c_mom->callback([&] {
        action = [&] {
            SpinParams p = make_params(o.beta, o.gamma, o.lambda, o.delta);
            p.require_delta();
            const double tol = detail::tol_or(o, 1e-4);
            MomentReport r = check_condition1(p, tol);
            Json j { { "p_plus", r.psi1_max.chi_plus }, { "p_minus", r.psi1_max.chi_minus }, { "psi1", r.psi1_max.value },
                { "psi2", r.psi2_value }, { "psi2_at_product", r.psi2_at_product },
                { "condition1",
                    { { "holds", r.holds }, { "gap", r.gap }, { "argmax", { r.upsilon_plus, r.upsilon_minus } },
                        { "tol", tol } } },
                { "identity_residuals",
                    { { "moment_equality", r.identities.moment_equality },
                        { "product_point", r.identities.product_point },
                        { "psi1_lambda_shift", r.identities.psi1_shift },
                        { "psi2_prime_lambda_shift", r.identities.psi2_prime_shift } } },
                { "params", detail::params_json(p) } };
            if (p.antiferromagnetic()) {
                PhasePoint pp = extremal_marginals(p);
                j["tree"] = { { "p_plus", pp.p_plus }, { "p_minus", pp.p_minus }, { "regime", to_string(pp.regime) } };
            }
            if (o.chi_plus || o.chi_minus) {
                double cp = o.chi_plus.value_or(0.5), cm = o.chi_minus.value_or(0.5);
                auto b = psi2(p, cp, cm);
                j["at_point"] = { { "chi_plus", cp }, { "chi_minus", cm }, { "psi1", psi1(p, cp, cm) },
                    { "psi2", b.value }, { "argmax", { b.upsilon_plus, b.upsilon_minus } } };
            }
            return j;
        };
    });

    // condition1 ------------------------------------------------------------
    auto* c_c1 = app.add_subcommand("condition1", "check that the overlap maximizer is the product point");
    add_params(c_c1, true, true);
    add_tol(c_c1, "tolerance on the overlap argmax location");
    common(c_c1);
    c_c1->callback([&] {
        action = [&] {
            SpinParams p = make_params(o.beta, o.gamma, o.lambda, o.delta);
            p.require_delta();
            const double tol = detail::tol_or(o, 1e-4);
            MomentReport r = check_condition1(p, tol);
            const double pp = r.psi1_max.chi_plus, pm = r.psi1_max.chi_minus;
            return Json { { "holds", r.holds }, { "gap", r.gap }, { "argmax", { r.upsilon_plus, r.upsilon_minus } },
                { "product_point", { pp * pp, pm * pm } }, { "p_plus", pp }, { "p_minus", pm },
                { "moment_equality_residual", r.identities.moment_equality }, { "tol", tol },
                { "params", detail::params_json(p) } };
        };
    });

    // gadget-sample ---------------------------------------------------------
    auto* c_gs = app.add_subcommand("gadget-sample", "sample a random bipartite phase gadget");
    add_params(c_gs, true, true);
    c_gs->add_option("--seed", o.seed, "random seed (required)")->required();
    c_gs->add_option("--n-side", o.n_side, "|U| per side")->capture_default_str();
    c_gs->add_option("--t", o.t, "terminals per sign")->capture_default_str();
    c_gs->add_option("--depth", o.depth, "even tree depth")->capture_default_str();
    c_gs->add_option("--rejection-cap", o.rejection_cap)->capture_default_str();
    common(c_gs);
    c_gs->callback([&] {
        action = [&] {
            SpinParams p = make_params(o.beta, o.gamma, o.lambda, o.delta);
            const int arity = p.require_delta() - 1;
            std::uint64_t r = static_cast<std::uint64_t>(o.t) * spinlab::detail::ipow(arity, o.depth);
            if (o.depth < 0 || r > 1000000)
                fail(ErrorCode::InfeasibleSizes, "tree sizes out of range");
            Gadget g = sample_phase_gadget(p, o.n_side, static_cast<int>(r), o.t, o.depth, *o.seed,
                { o.rejection_cap });
            return gadget_to_json(g);
        };
    });

    // gadget-verify ---------------------------------------------------------
    auto* c_gv = app.add_subcommand("gadget-verify", "phase balance and terminal deviations of a gadget");
    c_gv->add_option("--graph", o.graph, "gadget (JSON)")->required();
    add_params(c_gv, true, true);
    c_gv->add_option("--eps", o.eps, "epsilon")->capture_default_str();
    c_gv->add_option("--q-minus", o.q_minus);
    c_gv->add_option("--q-plus", o.q_plus);
    add_cap(c_gv);
    common(c_gv);
    c_gv->callback([&] {
        action = [&] {
            SpinParams p = make_params(o.beta, o.gamma, o.lambda, o.delta);
            Gadget g = gadget_from_json(read_json_file(o.graph));
            auto [qm, qp] = detail::terminal_marginals(o, p);
            Json j = detail::verdict_json(verify_gadget(g, p, o.eps, qm, qp, detail::engine(o)));
            j["q_minus"] = qm;
            j["q_plus"] = qp;
            j["params"] = detail::params_json(p);
            return j;
        };
    });

    // gadget-balance --------------------------------------------------------
    auto* c_gb = app.add_subcommand("gadget-balance", "join two copies of a gadget to balance its phases");
    c_gb->add_option("--graph", o.graph, "gadget (JSON)")->required();
    add_params(c_gb, true, true);
    c_gb->add_option("--t-prime", o.t_prime, "terminal pairs joined per sign")->capture_default_str();
    common(c_gb);
    c_gb->callback([&] {
        action = [&] {
            SpinParams p = make_params(o.beta, o.gamma, o.lambda, o.delta);
            Gadget g = gadget_from_json(read_json_file(o.graph));
            return gadget_to_json(balance_gadget(g, o.t_prime, p));
        };
    });

    // symbreak --------------------------------------------------------------
    auto* c_sb = app.add_subcommand("symbreak", "search for a unary symmetry-breaking gadget H_k");
    add_params(c_sb, true, false);
    add_tol(c_sb, "distance from 0, lambda/(1+lambda) and 1 required");
    common(c_sb);
    c_sb->callback([&] {
        action = [&] {
            SpinParams p = params(o);
            SymmetryBreaker s = symmetry_breaking_search(p);
            Json j { { "found", s.found }, { "params", detail::params_json(p) }, { "tol", p.tol } };
            if (s.found) {
                j["k"] = s.k;
                j["rho1"] = s.rho1;
                j["distinguished"] = s.distinguished;
                j["graph"] = graph_to_json(*s.graph);
            } else {
                j["reason"] = s.reason;
            }
            return j;
        };
    });

    // reduce-bis / verify-bis ------------------------------------------------
    auto add_bis = [&](CLI::App* c) {
        add_graph(c);
        c->add_option("--alpha", o.alpha, "Ising edge weight (beta = gamma = alpha)")->capture_default_str();
        c->add_option("--lambda", o.lambda, "field on the pendant layer")->capture_default_str();
        c->add_option("--eps", o.eps, "approximation parameter")->capture_default_str();
        c->add_option("--t1", o.t1, "override the parallel-edge count");
        c->add_option("--t2", o.t2, "override the pendant-layer size");
    };
    auto sizes_override = [&]() -> std::optional<LayerSizes> {
        if (!o.t1 && !o.t2)
            return std::nullopt;
        if (!o.t1 || !o.t2)
            fail(ErrorCode::InvalidArgument, "--t1 and --t2 must be given together");
        return LayerSizes { *o.t1, *o.t2 };
    };
    auto* c_rb = app.add_subcommand("reduce-bis", "build the Ising instance for counting independent sets");
    add_bis(c_rb);
    c_rb->add_option("--graph-out", o.graph_out, "write B' here");
    common(c_rb);
    c_rb->callback([&] {
        action = [&] {
            auto b = graph_from_json(read_json_file(o.graph));
            auto plan = bis_to_ising(b, o.alpha, o.lambda, o.eps, sizes_override());
            if (!o.graph_out.empty())
                write_text_file(o.graph_out, canonical_dump(graph_to_json(plan.b_prime)));
            return Json { { "t1", plan.t1 }, { "t2", plan.t2 }, { "logC", plan.log_c },
                { "lambda_flipped", plan.flipped },
                { "sizes",
                    { { "n", b.vertex_count() }, { "m", b.edge_count() }, { "W", plan.w_count }, { "U", plan.u_count },
                        { "vertices", plan.b_prime.vertex_count() } } },
                { "alpha", o.alpha }, { "lambda", o.lambda }, { "eps", o.eps } };
        };
    });
    auto* c_vb = app.add_subcommand("verify-bis", "check the reduction sandwich exactly");
    add_bis(c_vb);
    add_cap(c_vb);
    common(c_vb);
    c_vb->callback([&] {
        action = [&] {
            auto b = graph_from_json(read_json_file(o.graph));
            auto cert = verify_bis_reduction(b, o.alpha, o.lambda, o.eps, detail::engine(o), sizes_override());
            return Json { { "I_B", cert.independent_sets }, { "log_Z", cert.log_z }, { "log_C", cert.log_c },
                { "lower", cert.log_lower }, { "upper", cert.log_upper }, { "ok", cert.ok }, { "t1", cert.plan.t1 },
                { "t2", cert.plan.t2 }, { "alpha", o.alpha }, { "lambda", o.lambda }, { "eps", o.eps } };
        };
    });

    // reduce-ising ----------------------------------------------------------
    auto* c_ri = app.add_subcommand("reduce-ising", "replace an Ising instance by gadget copies");
    c_ri->add_option("--graph", o.graph, "Ising instance B; its field_subset is U")->required();
    c_ri->add_option("--gadget", o.gadget, "phase gadget (JSON)")->required();
    add_params(c_ri, true, true);
    c_ri->add_option("--q-minus", o.q_minus);
    c_ri->add_option("--q-plus", o.q_plus);
    c_ri->add_option("--graph-out", o.graph_out, "write B' here");
    add_tol(c_ri, "parameter tolerance");
    common(c_ri);
    c_ri->callback([&] {
        action = [&] {
            SpinParams p = params(o);
            auto b = graph_from_json(read_json_file(o.graph));
            Gadget g = gadget_from_json(read_json_file(o.gadget));
            SymmetryBreaker h = symmetry_breaking_search(p);
            if (!h.found)
                fail(ErrorCode::DegenerateParameters, h.reason);
            auto [qm, qp] = detail::terminal_marginals(o, p);
            std::vector<std::string> u;
            if (b.field_subset())
                u = *b.field_subset();
            else
                for (const auto& v : b.vertices())
                    u.push_back(v.id);
            auto plan = ising_to_2spin(b, u, p, g, *h.graph, h.distinguished, qm, qp);
            if (!o.graph_out.empty())
                write_text_file(o.graph_out, canonical_dump(graph_to_json(plan.b_prime)));
            const auto& d = plan.derived;
            const int max_deg = plan.b_prime.max_degree();
            std::set<std::string> distinct;
            for (const auto& e : plan.occupancy)
                distinct.insert(e.terminal);
            return Json { { "N", detail::matrix_json(d.n) }, { "det", d.det }, { "alpha_out", d.alpha_out },
                { "lambda_out", d.lambda_out }, { "rho_prime", { d.rho_prime[0], d.rho_prime[1] } }, { "mu1", d.mu1 },
                { "mu2", d.mu2 }, { "rho1", plan.rho1 }, { "symmetry_k", h.k }, { "q_minus", qm }, { "q_plus", qp },
                { "connections", plan.connections }, { "identifications", plan.identifications },
                { "sizes", { { "vertices", plan.b_prime.vertex_count() }, { "edges", plan.b_prime.edge_count() } } },
                { "audits",
                    { { "bipartite", true }, { "max_degree", max_deg }, { "degree_ok", max_deg <= *p.delta },
                        { "occupancy_ok", distinct.size() == plan.occupancy.size() },
                        { "terminal_uses", plan.occupancy.size() } } },
                { "params", detail::params_json(p) }, { "tol", p.tol } };
        };
    });

    // verify-flip -----------------------------------------------------------
    auto* c_vf = app.add_subcommand("verify-flip", "check Z(a,a,1) = a^m Z(1/a,1/a,1)");
    add_graph(c_vf);
    c_vf->add_option("--alpha", o.alpha)->capture_default_str();
    add_tol(c_vf, "accepted relative gap");
    add_cap(c_vf);
    common(c_vf);
    c_vf->callback([&] {
        action = [&] {
            auto g = graph_from_json(read_json_file(o.graph));
            auto r = flip_transform_check(g, o.alpha, detail::engine(o));
            const double tol = detail::tol_or(o, 1e-10);
            return Json { { "log_lhs", r.lhs.log() }, { "log_rhs", r.rhs.log() }, { "relative_gap", r.relative_gap },
                { "ok", r.relative_gap <= tol }, { "alpha", o.alpha }, { "tol", tol } };
        };
    });

    // count-is --------------------------------------------------------------
    auto* c_is = app.add_subcommand("count-is", "number of independent sets");
    add_graph(c_is);
    add_cap(c_is);
    common(c_is);
    c_is->callback([&] {
        action = [&] {
            auto g = graph_from_json(read_json_file(o.graph));
            return Json { { "count", count_independent_sets(g, detail::engine(o)) } };
        };
    });

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        out << canonical_dump(detail::error_json("UsageError", e.what()));
        err << "spinlab: " << e.what() << '\n';
        return 2;
    } catch (const SpinError& e) {
        out << canonical_dump(detail::error_json(std::string(to_string(e.code())), e.what()));
        err << "spinlab: " << e.what() << '\n';
        return 1;
    }

    try {
        std::string text = csv_action ? csv_action() : canonical_dump(action());
        if (o.out.empty())
            out << text;
        else
            write_text_file(o.out, text);
        return 0;
    } catch (const SpinError& e) {
        out << canonical_dump(detail::error_json(std::string(to_string(e.code())), e.what()));
        err << "spinlab: " << e.what() << '\n';
        return 1;
    } catch (const InputError& e) {
        out << canonical_dump(detail::error_json("InputError", e.what()));
        err << "spinlab: " << e.what() << '\n';
        return 2;
    }
}

} // namespace spinlab::cli
