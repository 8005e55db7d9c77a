#include "qdeform/coherent.hpp"

#include "qdeform/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qdeform
{

namespace
{

// Running log-sum-exp accumulator.
struct LogSum
{
    double maxLog = kMinusInf;
    double scaled = 0.0;

    void add(double t)
    {
        if (t == kMinusInf) return;
        if (t > maxLog) {
            scaled = scaled * std::exp(maxLog - t) + 1.0;
            maxLog = t;
        } else {
            scaled += std::exp(t - maxLog);
        }
    }

    double log() const { return maxLog + std::log(scaled); }
};

constexpr int kConsecutiveSmallTerms = 8;
constexpr int kTailWindow = 64;
constexpr double kNormalizationRelTol = 1e-17;

std::string describe(const RadiusEstimate& radius)
{
    std::ostringstream os;
    os.precision(17);
    os << "R_f " << to_string(radius.kind);
    if (radius.kind == RadiusEstimate::Kind::Finite) os << " = " << radius.value;
    return os.str();
}

} // namespace

DeformedExp deformed_exp(const StructureTable& table, double x, const RadiusEstimate& radius,
                         const SeriesOptions& options)
{
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("deformed_exp: x must be a finite nonnegative real");
    if (!radius.contains(x)) {
        std::ostringstream os;
        os.precision(17);
        os << "deformed exponential diverges: x = " << x << " >= " << describe(radius);
        throw DomainError(os.str());
    }
    if (x == 0.0) return {0.0, 1};

    const double lx = std::log(x);
    const double logTol = std::log(options.relTol);
    LogSum sum;
    sum.add(0.0);
    int consecutive = 0;
    long n = 1;
    for (;; ++n) {
        if (n > options.termBudget) {
            throw ConvergenceError("deformed_exp: no convergence within " + std::to_string(options.termBudget) +
                                   " terms at x = " + std::to_string(x));
        }
        const double lf = table.log_f_factorial(static_cast<int>(n));
        if (lf == kMinusInf) break;  // degenerate ladder: the sum is finite and exact
        const double t = static_cast<double>(n) * lx - lf;
        sum.add(t);
        if (t < logTol + sum.log()) {
            if (++consecutive >= kConsecutiveSmallTerms) {
                ++n;
                break;
            }
        } else {
            consecutive = 0;
        }
    }
    return {sum.log(), n};
}

complex CoherentState::amplitude(int n) const
{
    if (n < 0 || n > truncation()) return complex(0.0, 0.0);
    const double mag = std::exp(logMag_[static_cast<std::size_t>(n)]);
    if (n == 0) return complex(mag, 0.0);
    return std::polar(mag, static_cast<double>(n) * std::arg(z_));
}

Vector CoherentState::amplitudes(int dim) const
{
    if (dim < truncation() + 1) throw DimensionMismatch("amplitudes: dimension below truncation + 1");
    Vector v = Vector::Zero(dim);
    for (int n = 0; n <= truncation(); ++n) v(n) = amplitude(n);
    return v;
}

CoherentState make_state(const StructureTable& table, complex z, const RadiusEstimate& radius,
                         const StateOptions& options)
{
    CoherentState state(table);
    state.z_ = z;
    state.radius_ = radius;

    const double x = std::norm(z);
    if (!options.unsafe && !radius.contains(x)) {
        std::ostringstream os;
        os.precision(17);
        os << "z outside D_f: |z|^2 = " << x << ", " << describe(radius);
        throw DomainError(os.str());
    }
    state.nearBoundary_ = radius.kind == RadiusEstimate::Kind::Finite && x > 0.99 * radius.value;

    if (x == 0.0) {
        state.logMag_ = {0.0};
        return state;
    }

    RadiusEstimate series = radius;
    if (options.unsafe) series.kind = RadiusEstimate::Kind::Undetermined;
    const double logNorm =
        deformed_exp(table, x, series, SeriesOptions{kNormalizationRelTol, options.termBudget}).logValue;
    state.normalizationLog_ = logNorm;

    const double lx = std::log(x);
    for (int n = 0;; ++n) {
        if (n > options.termBudget) {
            throw ConvergenceError("make_state: truncation exceeds term budget");
        }
        const double lf = table.log_f_factorial(n);
        state.logMag_.push_back(0.5 * (static_cast<double>(n) * lx - lf - logNorm));

        const double lfNext = table.log_f_factorial(n + 1);
        if (lfNext == kMinusInf) {
            state.tailBound_ = 0.0;  // exact finite expansion
            break;
        }
        const double pNext = std::exp(static_cast<double>(n + 1) * lx - lfNext - logNorm);
        if (pNext > options.tailTol) continue;

        // ratio of successive tail terms is x / f(k); bound it over a window
        double fMin = std::numeric_limits<double>::infinity();
        bool ladderEnds = false;
        for (int k = n + 2; k <= n + 1 + kTailWindow; ++k) {
            const double fk = table.f(k);
            if (fk == 0.0) {
                ladderEnds = true;
                break;
            }
            fMin = std::min(fMin, fk);
        }
        if (ladderEnds) continue;  // finish the finite expansion exactly
        const double ratio = std::isinf(fMin) ? 0.0 : x / fMin;
        if (ratio >= 1.0) continue;
        const double bound = pNext / (1.0 - ratio);
        if (bound <= options.tailTol) {
            // keep the first discarded term as well: |c_M|^2 <= tailTol then
            // bounds the top-edge eigen residual |z c_M|
            state.logMag_.push_back(0.5 * (static_cast<double>(n + 1) * lx - lfNext - logNorm));
            state.tailBound_ = bound;
            break;
        }
    }
    return state;
}

double eigen_residual(const CoherentState& state, const FockRep& rep)
{
    if (rep.dim() < state.truncation() + 1) {
        throw DimensionMismatch("eigen_residual: representation smaller than truncation + 1");
    }
    const Vector v = state.amplitudes(rep.dim());
    return (rep.a() * v - state.z() * v).norm();
}

complex overlap(const CoherentState& s1, const CoherentState& s2)
{
    if (!s1.table().same_algebra(s2.table())) {
        throw std::invalid_argument("overlap: states belong to different structure tables");
    }
    const int M = std::min(s1.truncation(), s2.truncation());
    const double dArg = std::arg(s2.z()) - std::arg(s1.z());
    complex sum(0.0, 0.0);
    for (int n = 0; n <= M; ++n) {
        const double mag = std::exp(s1.log_magnitude(n) + s2.log_magnitude(n));
        sum += n == 0 ? complex(mag, 0.0) : std::polar(mag, static_cast<double>(n) * dArg);
    }
    return sum;
}

PhotonStatistics photon_statistics(const CoherentState& state)
{
    PhotonStatistics stats;
    double second = 0.0;
    for (int n = 0; n <= state.truncation(); ++n) {
        const double p = std::exp(2.0 * state.log_magnitude(n));
        stats.pmf.push_back(p);
        stats.meanN += n * p;
        second += static_cast<double>(n) * n * p;
    }
    stats.varN = second - stats.meanN * stats.meanN;
    if (stats.meanN > 0.0) {
        stats.mandelQ = (stats.varN - stats.meanN) / stats.meanN;
    }
    return stats;
}

namespace
{

Vector normalized_state(const CoherentState& state, const FockRep& rep, const char* who)
{
    // A degenerate ladder is represented exactly once it is complete.
    const auto n0 = rep.table().degeneracy();
    const bool complete = n0 && rep.dim() == *n0 && *n0 == state.truncation() + 1;
    if (rep.dim() < state.truncation() + 2 && !complete) {
        throw DimensionMismatch(std::string(who) + ": representation must exceed truncation + 1");
    }
    Vector v = state.amplitudes(rep.dim());
    v /= v.norm();
    return v;
}

} // namespace

double uncertainty_product(const CoherentState& state, const FockRep& rep)
{
    const Vector v = normalized_state(state, rep, "uncertainty_product");
    const double s = 1.0 / std::sqrt(2.0);
    const Matrix Q = s * (rep.a() + rep.adag());
    const Matrix P = (s / complex(0.0, 1.0)) * (rep.a() - rep.adag());
    const double meanQ = expectation(rep, Q, v).real();
    const double meanP = expectation(rep, P, v).real();
    const double varQ = std::max(0.0, expectation(rep, Q * Q, v).real() - meanQ * meanQ);
    const double varP = std::max(0.0, expectation(rep, P * P, v).real() - meanP * meanP);
    return std::sqrt(varQ * varP);
}

double robertson_bound(const CoherentState& state, const FockRep& rep)
{
    const Vector v = normalized_state(state, rep, "robertson_bound");
    const Matrix comm = rep.a() * rep.adag() - rep.adag() * rep.a();
    return 0.5 * std::abs(expectation(rep, comm, v));
}

} // namespace qdeform
