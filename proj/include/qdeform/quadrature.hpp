#pragma once

#include <functional>

namespace qdeform::quad
{

struct Result
{
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    int evaluations = 0;
    int intervals = 0;
    bool converged = false;
};

struct Options
{
    double relTol = 1e-10;
    double absTol = 0.0;
    int maxIntervals = 4000;
};

/// Globally adaptive 7/15-point Gauss-Kronrod on [a, b].
Result integrate(const std::function<double(double)>& f, double a, double b, const Options& options = {});

/// Integral over [a, inf) through x = a + t/(1-t), t in [0, 1). The
/// integrand is never evaluated at t = 1.
Result integrate_to_infinity(const std::function<double(double)>& f, double a, const Options& options = {});

} // namespace qdeform::quad
