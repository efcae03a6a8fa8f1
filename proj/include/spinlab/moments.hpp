#pragma once

#include "spinlab/errors.hpp"
#include "spinlab/optimize.hpp"
#include "spinlab/params.hpp"
#include "spinlab/tree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace spinlab {

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<Vec4, 4>;

constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

namespace detail {

    inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

    /// coef * log(w) with 0 * log 0 = 0 and positive * log 0 = -inf.
    inline double weighted_log(double coef, double w)
    {
        if (coef == 0.0)
            return 0.0;
        if (w == 0.0)
            return kMinusInf;
        return coef * std::log(w);
    }

    /// Clamps tiny negative round-off to zero; rejects real negatives.
    inline double clean_mass(double x)
    {
        if (x < -1e-12)
            fail(ErrorCode::InvalidArgument, "negative marginal mass");
        return std::max(0.0, x);
    }

    inline void check_unit(double chi, const char* name)
    {
        if (!(chi >= 0.0 && chi <= 1.0))
            fail(ErrorCode::InvalidArgument, std::string(name) + " must lie in [0, 1]");
    }

} // namespace detail

/// Maximizer over x of the edge-entropy term g1 on
/// [max(0, chi+ + chi- - 1), min(chi+, chi-)].
inline double g1_argmax(double beta, double gamma, double chi_plus, double chi_minus)
{
    detail::check_unit(chi_plus, "chi_plus");
    detail::check_unit(chi_minus, "chi_minus");
    const double s = chi_plus + chi_minus;
    const double lo = std::max(0.0, s - 1.0);
    const double hi = std::min(chi_plus, chi_minus);
    if (hi <= lo)
        return lo;
    // With a zero edge weight the support of the weight forces the
    // corresponding edge class to be empty, which pins x at the lower end.
    if (beta == 0.0 || gamma == 0.0)
        return lo;

    const double bg = beta * gamma;
    const double a = bg - 1.0;
    const double b = bg * s + 1.0 - s;
    const double c = bg * chi_plus * chi_minus;
    double x;
    if (std::abs(a) < 1e-14) {
        x = c / b;
    } else {
        // a x^2 - b x + c = 0, stable form of the quadratic formula.
        double disc = std::max(0.0, b * b - 4.0 * a * c);
        double q = 0.5 * (b + std::copysign(std::sqrt(disc), b));
        double r1 = q / a;
        double r2 = q != 0.0 ? c / q : r1;
        auto dist = [&](double r) { return r < lo ? lo - r : (r > hi ? r - hi : 0.0); };
        x = dist(r1) <= dist(r2) ? r1 : r2;
    }
    return std::clamp(x, lo, hi);
}

inline double g1_value(double beta, double gamma, double chi_plus, double chi_minus, double x)
{
    using detail::weighted_log;
    using detail::xlogx;
    const double s = chi_plus + chi_minus;
    const double n00 = std::max(0.0, 1.0 - s + x);
    return weighted_log(n00, beta) + weighted_log(x, gamma) - xlogx(x) - xlogx(chi_plus - x) - xlogx(chi_minus - x)
        - xlogx(n00);
}

/// First-moment exponent at fixed spin-1 densities.
inline double psi1(const SpinParams& p, double chi_plus, double chi_minus)
{
    const int delta = p.require_delta();
    using detail::xlogx;
    double x = g1_argmax(p.beta, p.gamma, chi_plus, chi_minus);
    double g1 = g1_value(p.beta, p.gamma, chi_plus, chi_minus, x);
    double f1 = xlogx(chi_plus) + xlogx(1.0 - chi_plus) + xlogx(chi_minus) + xlogx(1.0 - chi_minus);
    if (g1 == kMinusInf)
        return kMinusInf;
    return (chi_plus + chi_minus) * std::log(p.lambda) + (delta - 1) * f1 + delta * g1;
}

struct TransportPlan {
    Mat4 y {};
    /// sum_ij y_ij log(w_ij / y_ij)
    double objective = 0.0;
    /// max absolute row/column marginal error
    double residual = 0.0;
    int sweeps = 0;
};

/// Maximizes sum y log(w/y) over nonnegative 4x4 matrices with row sums L and
/// column sums R. Cells that no feasible plan can load are removed first
/// (Hall-tight row sets), so scaling runs on a support where a strictly
/// positive plan exists.
inline TransportPlan transport_entropy_max(const Mat4& w, Vec4 L, Vec4 R)
{
    constexpr double tight = 1e-13;
    for (auto& x : L)
        x = detail::clean_mass(x);
    for (auto& x : R)
        x = detail::clean_mass(x);
    double sl = L[0] + L[1] + L[2] + L[3], sr = R[0] + R[1] + R[2] + R[3];
    if (std::abs(sl - sr) > 1e-10)
        fail(ErrorCode::InvalidArgument, "row and column totals differ");

    std::array<std::array<bool, 4>, 4> support {};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            support[i][j] = w[i][j] > 0.0 && L[i] > 0.0 && R[j] > 0.0;

    for (bool changed = true; changed;) {
        changed = false;
        for (unsigned A = 1; A < 16; ++A) {
            double la = 0.0;
            unsigned nbr = 0;
            bool any_mass = false;
            for (int i = 0; i < 4; ++i) {
                if (!(A >> i & 1u))
                    continue;
                la += L[i];
                any_mass |= L[i] > 0.0;
                for (int j = 0; j < 4; ++j)
                    if (support[i][j])
                        nbr |= 1u << j;
            }
            if (!any_mass)
                continue;
            double rn = 0.0;
            for (int j = 0; j < 4; ++j)
                if (nbr >> j & 1u)
                    rn += R[j];
            if (la > rn + tight)
                fail(ErrorCode::Infeasible, "weight zero pattern admits no plan with these marginals");
            if (la >= rn - tight) {
                for (int i = 0; i < 4; ++i) {
                    if (A >> i & 1u)
                        continue;
                    for (int j = 0; j < 4; ++j)
                        if ((nbr >> j & 1u) && support[i][j]) {
                            support[i][j] = false;
                            changed = true;
                        }
                }
            }
        }
    }

    Vec4 u {}, v {};
    v.fill(1.0);
    TransportPlan out;
    auto row_residual = [&] {
        double r = 0.0;
        for (int i = 0; i < 4; ++i) {
            double sum = 0.0;
            for (int j = 0; j < 4; ++j)
                if (support[i][j])
                    sum += u[i] * w[i][j] * v[j];
            r = std::max(r, std::abs(sum - L[i]));
        }
        return r;
    };
    for (int sweep = 1; sweep <= 100000; ++sweep) {
        for (int i = 0; i < 4; ++i) {
            double d = 0.0;
            for (int j = 0; j < 4; ++j)
                if (support[i][j])
                    d += w[i][j] * v[j];
            u[i] = d > 0.0 ? L[i] / d : 0.0;
        }
        for (int j = 0; j < 4; ++j) {
            double d = 0.0;
            for (int i = 0; i < 4; ++i)
                if (support[i][j])
                    d += u[i] * w[i][j];
            v[j] = d > 0.0 ? R[j] / d : 0.0;
        }
        out.sweeps = sweep;
        out.residual = row_residual();
        if (out.residual <= 1e-12)
            break;
    }

    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double y = support[i][j] ? u[i] * w[i][j] * v[j] : 0.0;
            out.y[i][j] = y;
            if (y > 0.0)
                out.objective += y * std::log(w[i][j] / y);
        }
    for (int j = 0; j < 4; ++j) {
        double sum = 0.0;
        for (int i = 0; i < 4; ++i)
            sum += out.y[i][j];
        out.residual = std::max(out.residual, std::abs(sum - R[j]));
    }
    return out;
}

/// Pair-configuration weight matrix. Class spins (a, b) run over
/// (1,1), (1,0), (0,1), (0,0); an edge between classes i and j carries one
/// copy of the edge interaction per replica.
inline Mat4 pair_weight_matrix(double beta, double gamma)
{
    static constexpr int cls[4][2] = { { 1, 1 }, { 1, 0 }, { 0, 1 }, { 0, 0 } };
    Mat4 w {};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            int eb = (1 - cls[i][0]) * (1 - cls[j][0]) + (1 - cls[i][1]) * (1 - cls[j][1]);
            int eg = cls[i][0] * cls[j][0] + cls[i][1] * cls[j][1];
            w[i][j] = std::pow(beta, eb) * std::pow(gamma, eg);
        }
    return w;
}

/// Class marginals of one side given spin-1 density chi and overlap upsilon.
inline Vec4 overlap_marginals(double chi, double upsilon)
{
    return { upsilon, chi - upsilon, chi - upsilon, 1.0 - 2.0 * chi + upsilon };
}

/// The overlap region for one side: [max(0, 2 chi - 1), chi].
inline std::pair<double, double> overlap_range(double chi) { return { std::max(0.0, 2.0 * chi - 1.0), chi }; }

struct Psi2PrimeValue {
    double value = kMinusInf;
    Mat4 y {};
    bool feasible = false;
};

inline Psi2PrimeValue psi2_prime(const SpinParams& p, double chi_plus, double chi_minus, double upsilon_plus,
    double upsilon_minus)
{
    const int delta = p.require_delta();
    detail::check_unit(chi_plus, "chi_plus");
    detail::check_unit(chi_minus, "chi_minus");
    auto [lp, hp] = overlap_range(chi_plus);
    auto [lm, hm] = overlap_range(chi_minus);
    constexpr double slack = 1e-12;
    if (upsilon_plus < lp - slack || upsilon_plus > hp + slack || upsilon_minus < lm - slack
        || upsilon_minus > hm + slack)
        fail(ErrorCode::InvalidArgument, "overlaps outside the feasible region");

    Vec4 L = overlap_marginals(chi_plus, upsilon_plus);
    Vec4 R = overlap_marginals(chi_minus, upsilon_minus);
    for (auto& x : L)
        x = detail::clean_mass(x);
    for (auto& x : R)
        x = detail::clean_mass(x);
    double f2 = 0.0;
    for (int i = 0; i < 4; ++i)
        f2 += detail::xlogx(L[i]) + detail::xlogx(R[i]);

    Psi2PrimeValue out;
    try {
        TransportPlan plan = transport_entropy_max(pair_weight_matrix(p.beta, p.gamma), L, R);
        out.y = plan.y;
        out.feasible = true;
        out.value = 2.0 * (chi_plus + chi_minus) * std::log(p.lambda) + (delta - 1) * f2 + delta * plan.objective;
    } catch (const SpinError& e) {
        if (e.code() != ErrorCode::Infeasible)
            throw;
    }
    return out;
}

struct OptimizerOptions {
    int grid = 41;
    int starts = 5;
    double size_tol = 1e-10;
};

namespace detail {

    struct Candidate {
        double value;
        double a;
        double b;
    };

    /// Grid scan over a box followed by Nelder-Mead from the best cells.
    /// Points outside the box are evaluated at their projection with a
    /// quadratic penalty so the simplex stays inside.
    template <class F>
    Candidate maximize_on_box(F objective, std::pair<double, double> ra, std::pair<double, double> rb,
        const OptimizerOptions& opt)
    {
        const int n = std::max(2, opt.grid);
        const double wa = ra.second - ra.first, wb = rb.second - rb.first;
        std::vector<Candidate> grid;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double a = ra.first + wa * i / (n - 1);
                double b = rb.first + wb * j / (n - 1);
                grid.push_back({ objective(a, b), a, b });
            }
        std::stable_sort(grid.begin(), grid.end(), [](const Candidate& x, const Candidate& y) { return x.value > y.value; });
        Candidate best = grid.front();
        if (wa <= 0.0 && wb <= 0.0)
            return best;

        auto penalized = [&](double a, double b) {
            double ca = std::clamp(a, ra.first, ra.second);
            double cb = std::clamp(b, rb.first, rb.second);
            double pen = (a - ca) * (a - ca) + (b - cb) * (b - cb);
            double v = objective(ca, cb);
            if (!std::isfinite(v))
                return std::numeric_limits<double>::infinity();
            return -v + 1e3 * pen;
        };
        const std::array<double, 2> step { wa > 0 ? wa / (n - 1) : 1e-3, wb > 0 ? wb / (n - 1) : 1e-3 };
        const int starts = std::min<int>(opt.starts, static_cast<int>(grid.size()));
        for (int k = 0; k < starts; ++k) {
            if (!std::isfinite(grid[k].value))
                break;
            auto r = nelder_mead_2d(penalized, { grid[k].a, grid[k].b }, step, opt.size_tol);
            double a = std::clamp(r.x[0], ra.first, ra.second);
            double b = std::clamp(r.x[1], rb.first, rb.second);
            double v = objective(a, b);
            if (v > best.value)
                best = { v, a, b };
        }
        return best;
    }

} // namespace detail

struct Psi2Value {
    double value = kMinusInf;
    double upsilon_plus = 0.0;
    double upsilon_minus = 0.0;
};

inline Psi2Value psi2(const SpinParams& p, double chi_plus, double chi_minus, const OptimizerOptions& opt = {})
{
    auto obj = [&](double up, double um) { return psi2_prime(p, chi_plus, chi_minus, up, um).value; };
    auto best = detail::maximize_on_box(obj, overlap_range(chi_plus), overlap_range(chi_minus), opt);
    return { best.value, best.a, best.b };
}

struct Psi1Max {
    double chi_plus = 0.5;
    double chi_minus = 0.5;
    double value = kMinusInf;
};

/// Global maximizer of psi1 over the unit square, reported with chi+ >= chi-.
inline Psi1Max maximize_psi1(const SpinParams& p, const OptimizerOptions& opt = { 81, 5, 1e-12 })
{
    p.require_delta();
    auto obj = [&](double a, double b) { return psi1(p, a, b); };
    auto best = detail::maximize_on_box(obj, { 0.0, 1.0 }, { 0.0, 1.0 }, opt);
    Psi1Max out { best.a, best.b, best.value };
    if (out.chi_plus < out.chi_minus)
        std::swap(out.chi_plus, out.chi_minus);
    return out;
}

/// Parameters with the field pushed into the edge weights:
/// (beta lambda^(-1/Delta), gamma lambda^(1/Delta), 1).
inline SpinParams lambda_shifted(const SpinParams& p)
{
    const double k = std::pow(p.lambda, 1.0 / p.require_delta());
    SpinParams q = p;
    q.beta = p.beta / k;
    q.gamma = p.gamma * k;
    q.lambda = 1.0;
    return q;
}

struct IdentityResiduals {
    /// |psi2(p+, p-) - 2 psi1(p+, p-)|
    double moment_equality = 0.0;
    /// |psi2'(p+, p-, (p+)^2, (p-)^2) - 2 psi1(p+, p-)|
    double product_point = 0.0;
    /// |psi1(lambda) - psi1(shifted) - log lambda| at (p+, p-)
    double psi1_shift = 0.0;
    /// |psi2'(lambda) - psi2'(shifted) - 2 log lambda| at the product point
    double psi2_prime_shift = 0.0;
};

struct MomentReport {
    Psi1Max psi1_max;
    double psi2_value = kMinusInf;
    double psi2_at_product = kMinusInf;
    bool holds = false;
    double gap = 0.0;
    double tol = 1e-4;
    double upsilon_plus = 0.0;
    double upsilon_minus = 0.0;
    IdentityResiduals identities;
};

inline MomentReport check_condition1(const SpinParams& p, double tol = 1e-4, const OptimizerOptions& opt = {})
{
    MomentReport rep;
    rep.tol = tol;
    rep.psi1_max = maximize_psi1(p);
    const double pp = rep.psi1_max.chi_plus, pm = rep.psi1_max.chi_minus;
    auto best = psi2(p, pp, pm, opt);
    rep.psi2_value = best.value;
    rep.upsilon_plus = best.upsilon_plus;
    rep.upsilon_minus = best.upsilon_minus;
    rep.psi2_at_product = psi2_prime(p, pp, pm, pp * pp, pm * pm).value;
    rep.gap = std::max(0.0, rep.psi2_value - rep.psi2_at_product);
    rep.holds = std::max(std::abs(best.upsilon_plus - pp * pp), std::abs(best.upsilon_minus - pm * pm)) <= tol;

    const double two_psi1 = 2.0 * rep.psi1_max.value;
    rep.identities.moment_equality = std::abs(rep.psi2_value - two_psi1);
    rep.identities.product_point = std::abs(rep.psi2_at_product - two_psi1);
    const SpinParams q = lambda_shifted(p);
    rep.identities.psi1_shift = std::abs(psi1(p, pp, pm) - psi1(q, pp, pm) - std::log(p.lambda));
    rep.identities.psi2_prime_shift
        = std::abs(rep.psi2_at_product - psi2_prime(q, pp, pm, pp * pp, pm * pm).value - 2.0 * std::log(p.lambda));
    return rep;
}

} // namespace spinlab
