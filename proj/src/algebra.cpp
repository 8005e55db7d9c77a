#include "qdeform/algebra.hpp"

#include "qdeform/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace qdeform
{

complex LogComplex::value() const
{
    if (logAbs == kMinusInf) return complex(0.0, 0.0);
    return phase * std::exp(logAbs);
}

namespace
{

complex eval_checked(const Expression& e, const char* which, long n, const Bindings& params)
{
    try {
        return evaluate(e, n, params);
    } catch (const EvalError& err) {
        throw EvalError(err.kind(), std::string("evaluating ") + which + " at n=" + std::to_string(n) + ": " + err.what());
    }
}

constexpr double kDegeneracyTol = 1e-14;

} // namespace

DeformationSpec make_spec(std::string name, std::string_view F, std::string_view G, Bindings params)
{
    DeformationSpec spec{std::move(name), parse(F, "n"), parse(G, "n"), std::move(params)};
    for (int n = 0; n < kSpecProbePoints; ++n) {
        eval_checked(spec.F, "F", n, spec.params);
        eval_checked(spec.G, "G", n, spec.params);
    }
    return spec;
}

struct StructureTable::State
{
    explicit State(DeformationSpec s) : spec(std::move(s)) {}

    DeformationSpec spec;
    std::map<int, double> faults;

    mutable std::mutex mutex;
    std::vector<Entry> entries;
    std::vector<complex> Fvals;
    std::vector<complex> Gvals;
    std::optional<int> degeneracy;
    std::optional<int> overflow;

    // Appends entry n = entries.size(). Caller holds the mutex.
    void append()
    {
        const int n = static_cast<int>(entries.size());
        const complex Fn = eval_checked(spec.F, "F", n, spec.params);
        const complex Gn = eval_checked(spec.G, "G", n, spec.params);

        Entry e{};
        if (n == 0) {
            e.phi = complex(0.0, 0.0);
            e.logFFactorial = LogComplex{0.0, complex(1.0, 0.0)};
            e.logFactorial = 0.0;
        } else {
            const Entry& prev = entries.back();
            const complex carried = Fvals.back() * prev.phi;
            e.phi = carried + Gvals.back();
            const double scale = 1.0 + std::abs(carried) + std::abs(Gvals.back());
            if (!std::isfinite(e.phi.real()) || !std::isfinite(e.phi.imag())) {
                if (!overflow) overflow = n;
            } else if (std::abs(e.phi) <= kDegeneracyTol * scale) {
                e.phi = complex(0.0, 0.0);
                if (!degeneracy) degeneracy = n;
            }

            // [F(n)]! = F(n) [F(n-1)]!
            const LogComplex& pf = prev.logFFactorial;
            const double absF = std::abs(Fn);
            if (pf.logAbs == kMinusInf || absF == 0.0) {
                e.logFFactorial = LogComplex{kMinusInf, pf.phase};
            } else {
                complex ph = pf.phase * (Fn / absF);
                ph /= std::abs(ph);
                e.logFFactorial = LogComplex{pf.logAbs + std::log(absF), ph};
            }
        }

        e.f = std::abs(e.phi);
        e.phase = e.f == 0.0 ? complex(1.0, 0.0) : e.phi / e.f;
        if (auto it = faults.find(n); it != faults.end()) {
            e.f += it->second;
        }
        if (n > 0) {
            const double prevLog = entries.back().logFactorial;
            e.logFactorial = (prevLog == kMinusInf || e.f <= 0.0) ? kMinusInf : prevLog + std::log(e.f);
        }

        entries.push_back(e);
        Fvals.push_back(Fn);
        Gvals.push_back(Gn);
    }
};

StructureTable::StructureTable(DeformationSpec spec) : state_(std::make_shared<State>(std::move(spec)))
{
    ensure(0);
}

const DeformationSpec& StructureTable::spec() const { return state_->spec; }

int StructureTable::extend_up_to(int nMax) const
{
    std::lock_guard lock(state_->mutex);
    auto& s = *state_;
    while (static_cast<int>(s.entries.size()) <= nMax && !s.overflow) {
        s.append();
    }
    return static_cast<int>(s.entries.size()) - 1;
}

void StructureTable::ensure(int nMax) const
{
    if (nMax < 0) throw std::out_of_range("StructureTable: negative index");
    if (extend_up_to(nMax) < nMax) {
        throw OverflowError("structure function overflows double precision at n=" + std::to_string(*overflow()));
    }
}

int StructureTable::tabulated() const
{
    std::lock_guard lock(state_->mutex);
    return static_cast<int>(state_->entries.size());
}

StructureTable::Entry StructureTable::entry(int n) const
{
    ensure(n);
    std::lock_guard lock(state_->mutex);
    return state_->entries[static_cast<std::size_t>(n)];
}

complex StructureTable::F(int n) const
{
    ensure(n);
    std::lock_guard lock(state_->mutex);
    return state_->Fvals[static_cast<std::size_t>(n)];
}

complex StructureTable::G(int n) const
{
    ensure(n);
    std::lock_guard lock(state_->mutex);
    return state_->Gvals[static_cast<std::size_t>(n)];
}

std::optional<int> StructureTable::degeneracy() const
{
    std::lock_guard lock(state_->mutex);
    return state_->degeneracy;
}

std::optional<int> StructureTable::degeneracy_within(int nMax) const
{
    extend_up_to(nMax);
    auto d = degeneracy();
    if (d && *d > nMax) return std::nullopt;
    return d;
}

std::optional<int> StructureTable::overflow() const
{
    std::lock_guard lock(state_->mutex);
    return state_->overflow;
}

StructureTable StructureTable::with_fault(int n, double delta) const
{
    if (n < 1) throw std::invalid_argument("with_fault: n must be >= 1");
    StructureTable copy(*this);
    auto state = std::make_shared<State>(state_->spec);
    state->faults = state_->faults;
    state->faults[n] += delta;
    copy.state_ = std::move(state);
    copy.ensure(0);
    return copy;
}

bool StructureTable::is_faulted() const { return !state_->faults.empty(); }

bool StructureTable::same_algebra(const StructureTable& other) const
{
    if (state_ == other.state_) return true;
    if (is_faulted() || other.is_faulted()) return false;
    const auto& a = spec();
    const auto& b = other.spec();
    return a.name == b.name && structurally_equal(a.F, b.F) && structurally_equal(a.G, b.G) && a.params == b.params;
}

StructureTable phi_recurrence(const DeformationSpec& spec, int nMax)
{
    if (nMax < 0) throw std::invalid_argument("phi_recurrence: nMax must be >= 0");
    StructureTable table(spec);
    table.ensure(nMax);
    return table;
}

complex phi_closed_form(const DeformationSpec& spec, int n)
{
    if (n < 0) throw std::invalid_argument("phi_closed_form: n must be >= 0");
    if (n == 0) return complex(0.0, 0.0);

    // log [F(k)]! for k = 0..n-1, with [F(0)]! = 1
    std::vector<LogComplex> logFact(static_cast<std::size_t>(n));
    logFact[0] = LogComplex{0.0, complex(1.0, 0.0)};
    for (int k = 1; k < n; ++k) {
        const complex Fk = eval_checked(spec.F, "F", k, spec.params);
        const double absF = std::abs(Fk);
        if (absF == 0.0) throw ClosedFormInapplicable(k);
        complex ph = logFact[k - 1].phase * (Fk / absF);
        ph /= std::abs(ph);
        logFact[k] = LogComplex{logFact[k - 1].logAbs + std::log(absF), ph};
    }

    const LogComplex& top = logFact[n - 1];
    complex sum(0.0, 0.0);
    for (int k = 0; k < n; ++k) {
        const complex Gk = eval_checked(spec.G, "G", k, spec.params);
        const complex ratio = top.phase * std::conj(logFact[k].phase) * std::exp(top.logAbs - logFact[k].logAbs);
        sum += Gk * ratio;
    }
    return sum;
}

double log_f_factorial(const StructureTable& table, int n)
{
    if (n < 0) throw std::out_of_range("log_f_factorial: negative index");
    return table.log_f_factorial(n);
}

const char* to_string(RadiusEstimate::Kind kind)
{
    switch (kind) {
    case RadiusEstimate::Kind::Finite:
        return "finite";
    case RadiusEstimate::Kind::Infinite:
        return "infinite";
    case RadiusEstimate::Kind::Undetermined:
        return "undetermined";
    }
    return "undetermined";
}

namespace
{

constexpr int kTailWindow = 32;

bool strictly_increasing(const std::vector<double>& f, int from, int to)
{
    for (int k = from + 1; k <= to; ++k) {
        if (!(f[k] > f[k - 1])) return false;
    }
    return true;
}

} // namespace

RadiusEstimate estimate_radius(const StructureTable& table, const RadiusOptions& options)
{
    if (options.probeDepth < 16) throw std::invalid_argument("estimate_radius: probeDepth must be >= 16");

    RadiusEstimate est;
    est.probeDepth = options.probeDepth;

    std::vector<double> f;
    f.reserve(static_cast<std::size_t>(options.probeDepth) + 1);
    f.push_back(0.0);

    auto evidence_tail = [&](int last) {
        const int from = std::max(1, last - kTailWindow + 1);
        est.evidence.assign(f.begin() + from, f.begin() + last + 1);
    };

    constexpr int kChunk = 256;
    for (int n = 1; n <= options.probeDepth; ++n) {
        if (n >= table.tabulated()) {
            table.extend_up_to(std::min(options.probeDepth, n + kChunk));
        }
        if (n >= table.tabulated()) {
            // phi overflowed double precision: f grew without bound
            est.kind = RadiusEstimate::Kind::Infinite;
            est.probeDepth = n - 1;
            evidence_tail(n - 1);
            return est;
        }
        const auto e = table.entry(n);
        f.push_back(e.f);
        if (e.f == 0.0) {
            // polynomial deformed exponential
            est.kind = RadiusEstimate::Kind::Infinite;
            est.probeDepth = n;
            evidence_tail(n);
            return est;
        }
        if (e.f > options.unboundedThreshold && n > kTailWindow &&
            strictly_increasing(f, n - kTailWindow + 1, n)) {
            est.kind = RadiusEstimate::Kind::Infinite;
            est.probeDepth = n;
            evidence_tail(n);
            return est;
        }
    }

    const int last = options.probeDepth;
    evidence_tail(last);
    const auto& tail = est.evidence;
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    const double mean = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(tail.size());
    if (mean > 0.0 && std::isfinite(mean) && (*hi - *lo) / mean < options.tol) {
        est.kind = RadiusEstimate::Kind::Finite;
        est.value = mean;
        return est;
    }

    // Sustained power-law growth: f non-decreasing over the second half and
    // the log-log slope over [N/4, N/2] and [N/2, N] roughly constant.
    bool nondecreasing = true;
    for (int k = last / 2 + 1; k <= last && nondecreasing; ++k) {
        nondecreasing = f[k] >= f[k - 1];
    }
    if (nondecreasing && f[last / 4] > 0.0) {
        const double slopeLow = std::log2(f[last / 2] / f[last / 4]);
        const double slopeHigh = std::log2(f[last] / f[last / 2]);
        if (slopeHigh >= 0.05 && slopeHigh >= 0.95 * slopeLow) {
            est.kind = RadiusEstimate::Kind::Infinite;
            return est;
        }
    }

    est.kind = RadiusEstimate::Kind::Undetermined;
    return est;
}

RadiusEstimate estimate_radius(const DeformationSpec& spec, const RadiusOptions& options)
{
    return estimate_radius(StructureTable(spec), options);
}

} // namespace qdeform
