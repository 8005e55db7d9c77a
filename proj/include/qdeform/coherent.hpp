#pragma once

#include "qdeform/algebra.hpp"
#include "qdeform/fock.hpp"

#include <optional>
#include <vector>

namespace qdeform
{

struct SeriesOptions
{
    double relTol = 1e-14;
    long termBudget = 1'000'000;
};

struct DeformedExp
{
    double logValue = 0.0;  // ln N_f(x)
    long termsUsed = 0;
};

/// N_f(x) = sum_n x^n / f(n)!, accumulated in log domain. Stops once the
/// term is below relTol times the running sum for 8 consecutive terms.
/// Throws DomainError for x >= R_f, ConvergenceError past the term budget.
DeformedExp deformed_exp(const StructureTable& table, double x, const RadiusEstimate& radius,
                         const SeriesOptions& options = {});

struct StateOptions
{
    double tailTol = 1e-14;
    long termBudget = 1'000'000;
    /// Skip the |z|^2 < R_f check.
    bool unsafe = false;
};

/// |z,f> = N_f(|z|^2)^{-1/2} sum_n z^n / sqrt(f(n)!) |n>, truncated at n = M
/// where both |c_M|^2 and the discarded weight beyond M are below tailTol.
class CoherentState
{
public:
    complex z() const { return z_; }
    const StructureTable& table() const { return table_; }
    int truncation() const { return static_cast<int>(logMag_.size()) - 1; }
    double normalization_log() const { return normalizationLog_; }
    /// Upper bound on the discarded weight sum_{n>M} |c_n|^2.
    double tail_bound() const { return tailBound_; }
    /// |z|^2 > 0.99 R_f for a finite radius.
    bool near_boundary() const { return nearBoundary_; }
    const RadiusEstimate& radius() const { return radius_; }

    double log_magnitude(int n) const { return logMag_[static_cast<std::size_t>(n)]; }
    complex amplitude(int n) const;
    /// Amplitudes c_0..c_M padded with zeros to `dim` entries (dim >= M+1).
    Vector amplitudes(int dim) const;
    Vector amplitudes() const { return amplitudes(truncation() + 1); }

private:
    friend CoherentState make_state(const StructureTable&, complex, const RadiusEstimate&, const StateOptions&);

    CoherentState(StructureTable table) : table_(std::move(table)) {}

    complex z_;
    StructureTable table_;
    std::vector<double> logMag_;
    double normalizationLog_ = 0.0;
    double tailBound_ = 0.0;
    bool nearBoundary_ = false;
    RadiusEstimate radius_;
};

CoherentState make_state(const StructureTable& table, complex z, const RadiusEstimate& radius,
                         const StateOptions& options = {});

/// || a|z> - z|z> ||_2 in the truncated space.
double eigen_residual(const CoherentState& state, const FockRep& rep);

/// sum_n conj(c_n(z1)) c_n(z2). Throws std::invalid_argument if the states
/// come from different algebras.
complex overlap(const CoherentState& s1, const CoherentState& s2);

struct PhotonStatistics
{
    std::vector<double> pmf;
    double meanN = 0.0;
    double varN = 0.0;
    /// (var - mean)/mean; empty when mean = 0.
    std::optional<double> mandelQ;
};

PhotonStatistics photon_statistics(const CoherentState& state);

/// Delta Q * Delta P with Q = (a + a+)/sqrt 2, P = (a - a+)/(i sqrt 2).
/// The representation must have at least M+2 states.
double uncertainty_product(const CoherentState& state, const FockRep& rep);

/// (1/2)|<[Q,P]>| = (1/2)|<[a,a+]>|, the Robertson lower bound on the product.
double robertson_bound(const CoherentState& state, const FockRep& rep);

} // namespace qdeform
