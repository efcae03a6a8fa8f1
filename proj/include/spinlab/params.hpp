#pragma once

#include "spinlab/errors.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace spinlab {

/// Parameters of a 2-spin system. beta weights (0,0) edges, gamma weights
/// (1,1) edges, mixed edges weigh 1 and lambda weighs each spin-1 vertex.
/// An empty delta means no degree bound.
struct SpinParams {
    double beta = 1.0;
    double gamma = 1.0;
    double lambda = 1.0;
    std::optional<int> delta;
    double tol = 1e-9;

    double edge_product() const { return beta * gamma; }
    bool degenerate() const { return std::abs(beta * gamma - 1.0) <= tol; }
    bool antiferromagnetic() const { return !degenerate() && beta * gamma < 1.0; }
    bool ferromagnetic() const { return !degenerate() && beta * gamma > 1.0; }

    int require_delta() const
    {
        if (!delta)
            fail(ErrorCode::InvalidArgument, "a degree bound delta is required");
        return *delta;
    }

    void validate() const
    {
        std::ostringstream msg;
        if (!(beta >= 0.0) || !std::isfinite(beta))
            msg << "beta must be a finite nonnegative real; ";
        if (!(gamma >= 0.0) || !std::isfinite(gamma))
            msg << "gamma must be a finite nonnegative real; ";
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            msg << "lambda must be a finite positive real; ";
        if (delta && *delta < 3)
            msg << "delta must be at least 3; ";
        if (!(tol > 0.0))
            msg << "tol must be positive; ";
        if (!msg.str().empty())
            fail(ErrorCode::InvalidArgument, msg.str());
    }
};

inline SpinParams make_params(double beta, double gamma, double lambda, std::optional<int> delta = std::nullopt,
    double tol = 1e-9)
{
    SpinParams p { beta, gamma, lambda, delta, tol };
    p.validate();
    return p;
}

inline void require_antiferromagnetic(const SpinParams& p)
{
    if (!(p.beta * p.gamma < 1.0))
        fail(ErrorCode::NotAntiferromagnetic, "operation requires beta*gamma < 1");
}

} // namespace spinlab
