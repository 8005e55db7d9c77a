#pragma once

#include "qdeform/expr.hpp"

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qdeform
{

/// Deformed oscillator algebra  a abar - F(N) abar a = G(N).
struct DeformationSpec
{
    std::string name;
    Expression F;
    Expression G;
    Bindings params;
};

/// F and G must evaluate at n = 0..kSpecProbePoints-1 for a spec to be accepted.
inline constexpr int kSpecProbePoints = 16;

/// Parses F and G (variable n) and validates them at n = 0..15.
DeformationSpec make_spec(std::string name, std::string_view F, std::string_view G, Bindings params);

/// Log-magnitude plus unit phase; value = phase * exp(logAbs).
struct LogComplex
{
    double logAbs = 0.0;
    complex phase{1.0, 0.0};

    complex value() const;
};

inline constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

/// Tabulated structure data for one deformation:
///   phi(n)  solution of phi(n+1) = F(n) phi(n) + G(n), phi(0) = 0
///   f(n)    = |phi(n)|
///   phase   = phi/|phi|  (1 where phi = 0)
///   log [F(k)]!  and  log f(n)!
///
/// The table extends itself on demand. Entries are never modified once
/// computed, so sharing a table between threads is safe; extension is
/// serialized internally. Copies share the same storage.
class StructureTable
{
public:
    struct Entry
    {
        complex phi;
        double f;
        complex phase;
        LogComplex logFFactorial;  // log [F(n)]!
        double logFactorial;       // log f(n)!, -inf once degenerate
    };

    explicit StructureTable(DeformationSpec spec);

    const DeformationSpec& spec() const;

    /// Computes entries 0..nMax if not already present. Throws EvalError
    /// (wrapped with the offending n) if F or G fails to evaluate.
    void ensure(int nMax) const;
    int tabulated() const;

    Entry entry(int n) const;
    complex phi(int n) const { return entry(n).phi; }
    double f(int n) const { return entry(n).f; }
    complex phase(int n) const { return entry(n).phase; }
    double log_f_factorial(int n) const { return entry(n).logFactorial; }
    LogComplex log_F_factorial(int n) const { return entry(n).logFFactorial; }

    /// F(n) and G(n) as evaluated during tabulation.
    complex F(int n) const;
    complex G(int n) const;

    /// Tabulates up to nMax but stops at the first non-finite phi instead of
    /// throwing; returns the last tabulated index.
    int extend_up_to(int nMax) const;

    /// Smallest n0 >= 1 with phi(n0) = 0 among the tabulated entries.
    std::optional<int> degeneracy() const;
    /// Same, after tabulating up to nMax.
    std::optional<int> degeneracy_within(int nMax) const;

    /// First n at which phi is no longer finite, if reached.
    std::optional<int> overflow() const;

    /// Copy with f(n) shifted by delta (phi untouched); used to check that
    /// certification catches inconsistent tables.
    StructureTable with_fault(int n, double delta) const;
    bool is_faulted() const;

    /// True when both tables describe the same algebra with identical data.
    bool same_algebra(const StructureTable& other) const;

private:
    struct State;
    std::shared_ptr<State> state_;
};

/// Builds the table through n = nMax by forward recurrence.
StructureTable phi_recurrence(const DeformationSpec& spec, int nMax);

/// phi(n) = [F(n-1)]! * sum_{k<n} G(k) / [F(k)]!, evaluated from F and G
/// directly (independently of any table). Throws ClosedFormInapplicable
/// when some F(k), 1 <= k <= n-1, vanishes.
complex phi_closed_form(const DeformationSpec& spec, int n);

/// sum_{k=1..n} ln f(k); 0 for n = 0, -inf if some f(k) = 0.
double log_f_factorial(const StructureTable& table, int n);

struct RadiusEstimate
{
    enum class Kind { Finite, Infinite, Undetermined };

    Kind kind = Kind::Undetermined;
    double value = 0.0;
    int probeDepth = 0;
    std::vector<double> evidence;  // last tail samples of f

    bool contains(double x) const
    {
        return kind != Kind::Finite || x < value;
    }
};

const char* to_string(RadiusEstimate::Kind kind);

struct RadiusOptions
{
    int probeDepth = 10000;
    double tol = 1e-9;
    double unboundedThreshold = 1e12;
};

/// Ratio-test estimate of R_f = lim f(n).
RadiusEstimate estimate_radius(const StructureTable& table, const RadiusOptions& options = {});
RadiusEstimate estimate_radius(const DeformationSpec& spec, const RadiusOptions& options = {});

} // namespace qdeform
