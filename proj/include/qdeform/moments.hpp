#pragma once

#include "qdeform/algebra.hpp"
#include "qdeform/expr.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace qdeform
{

/// Radial weight W(x) on (0, R) for the moment condition
///   int_0^R x^n W(x) dx = f(n)!,   W(x) = 2 pi omega_f'(x) / N_f(x).
struct WeightSpec
{
    enum class Kind { Builtin, Expression };

    Kind kind = Kind::Expression;
    std::string name;  // builtin name, or the expression source
    Expression expression;
    Bindings bindings;
    double supportEnd = std::numeric_limits<double>::infinity();
    std::string description;

    bool infinite_support() const { return std::isinf(supportEnd); }
    /// W(x); throws EvalError if the value is not a finite nonnegative real.
    double operator()(double x) const;
};

/// Builtin weights: "harmonic" = exp(-x) on (0, inf).
WeightSpec builtin_weight(std::string_view name);
std::vector<std::string> builtin_weight_names();

/// Weight from an expression in x, validated on a probe grid of (0, supportEnd).
WeightSpec expression_weight(std::string_view source, Bindings bindings, double supportEnd);

struct MomentOptions
{
    int nMax = 20;
    double relTol = 1e-6;
    /// Quadrature tolerance; defaults to relTol / 100 when unset.
    std::optional<double> quadratureTol;
    int maxIntervals = 4000;
};

struct MomentEntry
{
    int n = 0;
    double logTarget = 0.0;  // ln f(n)!
    double logValue = 0.0;   // ln of the computed moment
    double relativeError = 0.0;
    double quadratureError = 0.0;  // estimated relative integration error
    int evaluations = 0;
    int intervals = 0;
    bool converged = true;
    bool pass = false;
};

struct MomentReport
{
    std::vector<MomentEntry> moments;
    double relTol = 0.0;
    double quadratureTol = 0.0;
    std::vector<std::string> warnings;
    bool pass = false;

    /// First n whose moment misses its target, if any.
    std::optional<int> first_failure() const;
};

MomentReport check_moments(const StructureTable& table, const WeightSpec& weight, const RadiusEstimate& radius,
                           const MomentOptions& options = {});

struct CarlemanDiagnostic
{
    enum class Trend { Diverging, Converging, Undetermined };

    double partialSum = 0.0;  // sum_{n=1..depth} (f(n)!)^{-1/(2n)}
    Trend trend = Trend::Undetermined;
    int depth = 0;            // terms actually summed
    /// Growth of the partial sum over the last decade relative to the one before.
    double decadeRatio = 0.0;
};

const char* to_string(CarlemanDiagnostic::Trend trend);

CarlemanDiagnostic carleman_diagnostic(const StructureTable& table, int depth = 10000);

} // namespace qdeform
