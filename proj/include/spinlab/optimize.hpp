#pragma once

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <array>
#include <cmath>
#include <functional>
#include <limits>

namespace spinlab::detail {

struct MinimumResult {
    std::array<double, 2> x {};
    double value = 0.0;
    int iterations = 0;
};

/// Minimizes a function of two variables with the GSL Nelder-Mead simplex.
/// Non-finite values are replaced by a large constant so the simplex can
/// walk away from infeasible regions.
inline MinimumResult nelder_mead_2d(const std::function<double(double, double)>& fn, std::array<double, 2> start,
    std::array<double, 2> step, double size_tol = 1e-10, int max_iter = 2000)
{
    static const bool handler_off = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)handler_off;
    struct Ctx {
        const std::function<double(double, double)>* fn;
    } ctx { &fn };
    auto trampoline = [](const gsl_vector* v, void* params) -> double {
        auto* c = static_cast<Ctx*>(params);
        double y = (*c->fn)(gsl_vector_get(v, 0), gsl_vector_get(v, 1));
        return std::isfinite(y) ? y : 1e300;
    };
    gsl_multimin_function f { trampoline, 2, &ctx };

    gsl_vector* x = gsl_vector_alloc(2);
    gsl_vector* ss = gsl_vector_alloc(2);
    gsl_vector_set(x, 0, start[0]);
    gsl_vector_set(x, 1, start[1]);
    gsl_vector_set(ss, 0, step[0]);
    gsl_vector_set(ss, 1, step[1]);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
    gsl_multimin_fminimizer_set(s, &f, x, ss);

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS)
            break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), size_tol) == GSL_SUCCESS)
            break;
    }
    MinimumResult out;
    out.x = { gsl_vector_get(s->x, 0), gsl_vector_get(s->x, 1) };
    out.value = s->fval;
    out.iterations = iter;
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(ss);
    gsl_vector_free(x);
    return out;
}

} // namespace spinlab::detail
