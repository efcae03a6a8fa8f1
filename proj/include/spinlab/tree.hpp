#pragma once

#include "spinlab/errors.hpp"
#include "spinlab/params.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spinlab {

enum class Regime { Uniqueness, NonUniqueness, Critical };

inline std::string to_string(Regime r)
{
    switch (r) {
    case Regime::Uniqueness:
        return "uniqueness";
    case Regime::NonUniqueness:
        return "non-uniqueness";
    case Regime::Critical:
        return "critical-within-tol";
    }
    return "unknown";
}

/// Tree recursion for the ratio x = Pr(spin 1)/Pr(spin 0) at a vertex of the
/// (Delta-1)-ary tree given the common ratio of its children:
///     f(x) = lambda * ((1 + gamma x) / (beta + x))^(Delta-1).
/// A spin-1 child contributes gamma (if the parent is 1) or 1 (if 0); a
/// spin-0 child contributes 1 or beta respectively.
struct TreeMap {
    double beta = 1.0;
    double gamma = 1.0;
    double lambda = 1.0;
    int arity = 2; // Delta - 1

    /// Accepts x = +inf (all children pinned to spin 1).
    double operator()(double x) const { return lambda * std::pow(kernel(x), arity); }

    /// The per-child factor (1 + gamma x)/(beta + x).
    double kernel(double x) const
    {
        if (!(x >= 0.0))
            fail(ErrorCode::DomainError, "tree map needs x >= 0");
        if (std::isinf(x))
            return gamma;
        double den = beta + x;
        if (den == 0.0)
            fail(ErrorCode::DomainError, "tree map is singular at x = 0 when beta = 0");
        return (1.0 + gamma * x) / den;
    }

    double derivative(double x) const
    {
        return (*this)(x) * arity * (beta * gamma - 1.0) / ((1.0 + gamma * x) * (beta + x));
    }

    /// log f(exp(t)), finite for every real t when beta > 0 or t is not -inf.
    double log_at(double t) const
    {
        double x = std::exp(t);
        return std::log(lambda) + arity * (std::log1p(gamma * x) - std::log(beta + x));
    }
};

inline TreeMap tree_map(const SpinParams& p)
{
    p.validate();
    return TreeMap { p.beta, p.gamma, p.lambda, p.require_delta() - 1 };
}

namespace detail {

    /// Root of an increasing function h on the real line, by outward
    /// bracketing from t0 followed by TOMS 748.
    template <class F>
    double increasing_root(F h, double t0 = 0.0)
    {
        double lo = t0 - 1.0, hi = t0 + 1.0;
        double hlo = h(lo), hhi = h(hi);
        for (int i = 0; hlo > 0.0 && i < 200; ++i) {
            lo = t0 - 2.0 * (t0 - lo);
            hlo = h(lo);
        }
        for (int i = 0; hhi < 0.0 && i < 200; ++i) {
            hi = t0 + 2.0 * (hi - t0);
            hhi = h(hi);
        }
        if (hlo > 0.0 || hhi < 0.0)
            fail(ErrorCode::NoConvergence, "could not bracket a root");
        if (hlo == 0.0)
            return lo;
        if (hhi == 0.0)
            return hi;
        std::uintmax_t iters = 200;
        auto r = boost::math::tools::toms748_solve(h, lo, hi, hlo, hhi, boost::math::tools::eps_tolerance<double>(52),
            iters);
        return 0.5 * (r.first + r.second);
    }

} // namespace detail

/// The unique fixed point of the decreasing map f (antiferromagnetic case).
inline double tree_fixed_point(const TreeMap& f)
{
    double t = detail::increasing_root([&](double t) { return t - f.log_at(t); });
    return std::exp(t);
}

/// |f'(x)| at a fixed point, where f(x) = x.
inline double fixed_point_slope(const TreeMap& f, double x)
{
    return f.arity * std::abs(1.0 - f.beta * f.gamma) * x / ((1.0 + f.gamma * x) * (f.beta + x));
}

inline Regime classify_slope(double slope, double tol)
{
    if (slope > 1.0 + tol)
        return Regime::NonUniqueness;
    if (slope < 1.0 - tol)
        return Regime::Uniqueness;
    return Regime::Critical;
}

inline Regime classify_uniqueness(const SpinParams& p)
{
    p.validate();
    require_antiferromagnetic(p);
    TreeMap f = tree_map(p);
    return classify_slope(fixed_point_slope(f, tree_fixed_point(f)), p.tol);
}

/// (Delta-1)^(Delta-1) / (Delta-2)^Delta.
inline double hardcore_lambda_c(int delta)
{
    if (delta < 3)
        fail(ErrorCode::InvalidArgument, "delta must be at least 3");
    return std::pow(double(delta - 1), delta - 1) / std::pow(double(delta - 2), delta);
}

/// Open interval of lambda with non-uniqueness, or nullopt when none exists.
/// An endpoint is 0 or +inf when the interval is unbounded on that side
/// (beta = 0 or gamma = 0 respectively).
inline std::optional<std::pair<double, double>> lambda_interval(double beta, double gamma, int delta)
{
    SpinParams p = make_params(beta, gamma, 1.0, delta);
    require_antiferromagnetic(p);
    const double s = std::sqrt(beta * gamma);
    if (s >= double(delta - 2) / delta)
        return std::nullopt;

    // At a fixed point x, |f'(x)| > 1 exactly when
    //   gamma x^2 + (1 + beta gamma - d(1 - beta gamma)) x + beta < 0,
    // and lambda(x) = x ((beta + x)/(1 + gamma x))^d is increasing in x. The
    // geometric mean of the roots is inside the non-uniqueness window and
    // gives a seed for the bracketing below.
    const int d = delta - 1;
    const double b = 1.0 + beta * gamma - d * (1.0 - beta * gamma);
    double x_mid;
    if (gamma == 0.0)
        x_mid = 2.0 * beta / (-b) + 1.0;
    else if (beta == 0.0)
        x_mid = -b / (2.0 * gamma);
    else
        x_mid = std::sqrt(beta / gamma);
    const double log_lambda_mid = std::log(x_mid) + d * (std::log(beta + x_mid) - std::log1p(gamma * x_mid));

    auto excess = [&](double log_lambda) {
        TreeMap f { beta, gamma, std::exp(log_lambda), d };
        return fixed_point_slope(f, tree_fixed_point(f)) - 1.0;
    };
    auto endpoint = [&](double direction) {
        double inside = log_lambda_mid;
        double step = 1.0;
        double outside = inside + direction * step;
        while (excess(outside) > 0.0) {
            inside = outside;
            step *= 2.0;
            outside = log_lambda_mid + direction * step;
            if (step > 1e4)
                fail(ErrorCode::NoConvergence, "lambda interval endpoint not bracketed");
        }
        double lo = std::min(inside, outside), hi = std::max(inside, outside);
        std::uintmax_t iters = 200;
        auto r = boost::math::tools::toms748_solve(excess, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
        return std::exp(0.5 * (r.first + r.second));
    };
    double lo = beta == 0.0 ? 0.0 : endpoint(-1.0);
    double hi = gamma == 0.0 ? std::numeric_limits<double>::infinity() : endpoint(1.0);
    return std::make_pair(lo, hi);
}

struct PhasePoint {
    double q_minus = 0.0;
    double q_plus = 0.0;
    double r_minus = 0.0;
    double r_plus = 0.0;
    double p_minus = 0.0;
    double p_plus = 0.0;
    Regime regime = Regime::Uniqueness;
    double fixed_point = 0.0;
    double slope = 0.0;
};

namespace detail {

    inline double ratio_to_prob(double r) { return std::isinf(r) ? 1.0 : r / (1.0 + r); }

    /// Root-of-regular-tree ratio when each of the Delta children has ratio r.
    inline double root_ratio(const TreeMap& f, double r) { return f.lambda * std::pow(f.kernel(r), f.arity + 1); }

} // namespace detail

/// Extremal root marginals of the (Delta-1)-ary tree under all-1 and all-0
/// boundary conditions at even depth, plus their Delta-regular analogues.
inline PhasePoint extremal_marginals(const SpinParams& p)
{
    p.validate();
    require_antiferromagnetic(p);
    const TreeMap f = tree_map(p);
    PhasePoint out;
    out.fixed_point = tree_fixed_point(f);
    out.slope = fixed_point_slope(f, out.fixed_point);
    out.regime = classify_slope(out.slope, p.tol);
    const double xh = out.fixed_point;

    if (out.regime != Regime::NonUniqueness) {
        out.r_minus = out.r_plus = xh;
    } else {
        auto F = [&](double x) { return f(f(x)); };
        // F is increasing, so iterating from +inf descends monotonically to
        // the largest fixed point of F.
        double x = std::numeric_limits<double>::infinity();
        bool converged = false;
        for (int k = 0; k < 100000; ++k) {
            double nx = F(x);
            if (std::isinf(nx)) {
                x = nx;
                converged = true;
                break;
            }
            if (std::abs(nx - x) <= 1e-15 * nx) {
                x = nx;
                converged = true;
                break;
            }
            x = nx;
        }
        if (!std::isinf(x)) {
            // Polish on log F(e^t) - t, which is positive just above the
            // repelling fixed point and negative above the attracting one.
            auto h = [&](double t) { return std::log(F(std::exp(t))) - t; };
            double hi = std::log(x) + 1e-9;
            double lo = std::log(xh);
            double probe = hi;
            bool bracketed = false;
            for (int i = 0; i < 80; ++i) {
                probe = 0.5 * (lo + probe);
                if (h(probe) > 0.0) {
                    bracketed = true;
                    break;
                }
            }
            if (bracketed && h(hi) < 0.0) {
                std::uintmax_t iters = 200;
                auto r = boost::math::tools::toms748_solve(h, probe, hi, boost::math::tools::eps_tolerance<double>(52),
                    iters);
                x = std::exp(0.5 * (r.first + r.second));
                converged = true;
            }
            if (!converged || std::abs(F(x) - x) > 1e-10 * std::max(1.0, x))
                fail(ErrorCode::NoConvergence, "extremal tree iteration did not converge");
        }
        out.r_plus = x;
        out.r_minus = f(x);
    }
    out.q_plus = detail::ratio_to_prob(out.r_plus);
    out.q_minus = detail::ratio_to_prob(out.r_minus);
    out.p_plus = detail::ratio_to_prob(detail::root_ratio(f, out.r_minus));
    out.p_minus = detail::ratio_to_prob(detail::root_ratio(f, out.r_plus));
    return out;
}

struct SweepRow {
    SpinParams params;
    PhasePoint point;
};

/// Log-spaced lambda sweep at fixed (beta, gamma, delta).
inline std::vector<SweepRow> lambda_sweep(double beta, double gamma, int delta, double lambda_min, double lambda_max,
    int points, double tol = 1e-9)
{
    if (points < 1 || !(lambda_min > 0.0) || !(lambda_max >= lambda_min))
        fail(ErrorCode::InvalidArgument, "sweep needs points >= 1 and 0 < lambda_min <= lambda_max");
    std::vector<SweepRow> rows;
    for (int i = 0; i < points; ++i) {
        double frac = points == 1 ? 0.0 : double(i) / (points - 1);
        double lam = std::exp(std::log(lambda_min) + frac * (std::log(lambda_max) - std::log(lambda_min)));
        SpinParams p = make_params(beta, gamma, lam, delta, tol);
        rows.push_back({ p, extremal_marginals(p) });
    }
    return rows;
}

} // namespace spinlab
