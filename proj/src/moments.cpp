#include "qdeform/moments.hpp"

#include "qdeform/error.hpp"
#include "qdeform/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qdeform
{

double WeightSpec::operator()(double x) const
{
    const complex w = evaluate(expression, complex(x, 0.0), bindings);
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || std::abs(w.imag()) > 1e-12 * std::abs(w.real()) ||
        w.real() < 0.0) {
        std::ostringstream os;
        os.precision(17);
        os << "weight '" << name << "' is not a finite nonnegative real at x = " << x;
        throw EvalError(EvalError::Kind::Domain, os.str());
    }
    return w.real();
}

namespace
{

constexpr int kProbePoints = 257;

// Probe abscissae covering (0, R) or (0, inf) via x = t/(1-t).
std::vector<double> probe_grid(double supportEnd)
{
    std::vector<double> xs;
    for (int j = 1; j < kProbePoints; ++j) {
        const double t = static_cast<double>(j) / kProbePoints;
        xs.push_back(std::isinf(supportEnd) ? t / (1.0 - t) : t * supportEnd);
    }
    return xs;
}

void validate(const WeightSpec& w)
{
    if (!(w.supportEnd > 0.0)) throw std::invalid_argument("weight support must be (0, R) with R > 0");
    for (double x : probe_grid(w.supportEnd)) {
        (void)w(x);
    }
}

} // namespace

WeightSpec builtin_weight(std::string_view name)
{
    if (name == "harmonic") {
        WeightSpec w;
        w.kind = WeightSpec::Kind::Builtin;
        w.name = "harmonic";
        w.expression = parse("exp(-x)", "x");
        w.description = "exp(-x) on (0, inf); moments n!";
        return w;
    }
    throw ConfigError("unknown builtin weight '" + std::string(name) + "'");
}

std::vector<std::string> builtin_weight_names() { return {"harmonic"}; }

WeightSpec expression_weight(std::string_view source, Bindings bindings, double supportEnd)
{
    WeightSpec w{WeightSpec::Kind::Expression, std::string(source), parse(source, "x"), std::move(bindings), supportEnd, ""};
    std::ostringstream os;
    os.precision(17);
    os << "W(x) = " << source << " on (0, " << (std::isinf(supportEnd) ? std::string("inf") : std::to_string(supportEnd)) << ")";
    w.description = os.str();
    validate(w);
    return w;
}

std::optional<int> MomentReport::first_failure() const
{
    for (const auto& m : moments) {
        if (!m.pass) return m.n;
    }
    return std::nullopt;
}

MomentReport check_moments(const StructureTable& table, const WeightSpec& weight, const RadiusEstimate& radius,
                           const MomentOptions& options)
{
    if (options.nMax < 0) throw std::invalid_argument("check_moments: nMax must be >= 0");
    if (!(options.relTol > 0.0)) throw std::invalid_argument("check_moments: relTol must be positive");

    MomentReport report;
    report.relTol = options.relTol;
    report.quadratureTol = options.quadratureTol.value_or(options.relTol / 100.0);

    switch (radius.kind) {
    case RadiusEstimate::Kind::Finite:
        if (weight.infinite_support() || std::abs(weight.supportEnd - radius.value) > 1e-6 * radius.value) {
            std::ostringstream os;
            os.precision(17);
            os << "weight support end " << weight.supportEnd << " does not match R_f = " << radius.value;
            report.warnings.push_back(os.str());
        }
        break;
    case RadiusEstimate::Kind::Infinite:
        if (!weight.infinite_support()) {
            report.warnings.push_back("weight has finite support but R_f is infinite");
        }
        break;
    case RadiusEstimate::Kind::Undetermined:
        report.warnings.push_back("R_f undetermined; support could not be cross-checked");
        break;
    }

    int nMax = options.nMax;
    if (auto n0 = table.degeneracy_within(nMax); n0) {
        nMax = *n0 - 1;
        report.warnings.push_back("degenerate ladder at n0 = " + std::to_string(*n0) + "; moments checked for n < n0");
    }

    const auto probes = probe_grid(weight.supportEnd);
    std::vector<double> logW;
    for (double x : probes) {
        const double w = weight(x);
        logW.push_back(w > 0.0 ? std::log(w) : kMinusInf);
    }

    for (int n = 0; n <= nMax; ++n) {
        MomentEntry entry;
        entry.n = n;
        entry.logTarget = table.log_f_factorial(n);

        // scale the integrand by its largest probed value so that
        // exp(n ln x + ln W - shift) stays representable
        double shift = kMinusInf;
        for (std::size_t j = 0; j < probes.size(); ++j) {
            shift = std::max(shift, n * std::log(probes[j]) + logW[j]);
        }
        if (shift == kMinusInf) shift = 0.0;

        auto integrand = [&weight, n, shift](double x) {
            if (!(x > 0.0) || std::isinf(x)) return 0.0;
            const double w = weight(x);
            if (w == 0.0) return 0.0;
            return std::exp(n * std::log(x) + std::log(w) - shift);
        };

        quad::Options qopt{report.quadratureTol, 0.0, options.maxIntervals};
        const quad::Result r = weight.infinite_support() ? quad::integrate_to_infinity(integrand, 0.0, qopt)
                                                         : quad::integrate(integrand, 0.0, weight.supportEnd, qopt);
        entry.evaluations = r.evaluations;
        entry.intervals = r.intervals;
        entry.converged = r.converged;
        if (r.value > 0.0) {
            entry.logValue = shift + std::log(r.value);
            entry.quadratureError = r.error / r.value;
            entry.relativeError = std::abs(std::expm1(entry.logValue - entry.logTarget));
        } else {
            entry.logValue = kMinusInf;
            entry.quadratureError = std::numeric_limits<double>::infinity();
            entry.relativeError = 1.0;
        }
        entry.pass = entry.relativeError <= options.relTol;
        if (!entry.converged) {
            report.warnings.push_back("quadrature did not converge for n = " + std::to_string(n));
        }
        report.moments.push_back(entry);
    }

    report.pass = std::all_of(report.moments.begin(), report.moments.end(), [](const MomentEntry& m) { return m.pass; });
    return report;
}

const char* to_string(CarlemanDiagnostic::Trend trend)
{
    switch (trend) {
    case CarlemanDiagnostic::Trend::Diverging:
        return "diverging";
    case CarlemanDiagnostic::Trend::Converging:
        return "converging";
    case CarlemanDiagnostic::Trend::Undetermined:
        return "undetermined";
    }
    return "undetermined";
}

CarlemanDiagnostic carleman_diagnostic(const StructureTable& table, int depth)
{
    if (depth < 100) throw std::invalid_argument("carleman_diagnostic: depth must be >= 100");

    CarlemanDiagnostic diag;
    const int available = table.extend_up_to(depth);
    std::vector<double> partial(1, 0.0);  // partial[n] = sum_{k<=n}
    for (int n = 1; n <= available; ++n) {
        const double lf = table.log_f_factorial(n);
        if (lf == kMinusInf) {
            // only finitely many nonzero moments: determinate
            diag.partialSum = partial.back();
            diag.depth = n - 1;
            diag.trend = CarlemanDiagnostic::Trend::Diverging;
            return diag;
        }
        if (!std::isfinite(lf)) break;
        partial.push_back(partial.back() + std::exp(-lf / (2.0 * n)));
    }

    const int N = static_cast<int>(partial.size()) - 1;
    diag.depth = N;
    diag.partialSum = partial.back();
    if (N < 100) {
        diag.trend = CarlemanDiagnostic::Trend::Undetermined;
        return diag;
    }
    const double last = partial[N] - partial[N / 10];
    const double before = partial[N / 10] - partial[N / 100];
    if (before <= 0.0) {
        diag.decadeRatio = last > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
        diag.decadeRatio = last / before;
    }
    // sum n^-p: ratio 10^{1-p}; p <= ~1 diverges
    if (diag.decadeRatio >= 0.9) {
        diag.trend = CarlemanDiagnostic::Trend::Diverging;
    } else if (diag.decadeRatio <= 0.5) {
        diag.trend = CarlemanDiagnostic::Trend::Converging;
    } else {
        diag.trend = CarlemanDiagnostic::Trend::Undetermined;
    }
    return diag;
}

} // namespace qdeform
