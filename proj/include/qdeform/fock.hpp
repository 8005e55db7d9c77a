#pragma once

#include "qdeform/algebra.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace qdeform
{

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Unit-modulus function c(n) in abar = c(N) a^dagger.
using PhaseFunction = std::function<complex(int n)>;

/// Truncated representation of N, a, a^dagger and abar on |0>..|D>.
class FockRep
{
public:
    int dim() const { return static_cast<int>(N_.rows()); }
    /// Highest basis index D.
    int top() const { return dim() - 1; }
    /// Requested top index before clamping to a degenerate ladder.
    int requested_top() const { return requestedTop_; }

    const StructureTable& table() const { return table_; }
    const Matrix& N() const { return N_; }
    const Matrix& a() const { return a_; }
    const Matrix& adag() const { return adag_; }
    const Matrix& abar() const { return abar_; }

private:
    friend FockRep build_rep(const StructureTable& table, int D, const PhaseFunction& phase);

    FockRep(StructureTable table) : table_(std::move(table)) {}

    StructureTable table_;
    int requestedTop_ = 0;
    Matrix N_, a_, adag_, abar_;
};

/// Builds the representation on span{|0>..|D>}. When the table is
/// degenerate at n0 <= D the ladder is cut at n0 - 1. The default phase is
/// c(n) = phi(n)/|phi(n)|; an override must have unit modulus.
FockRep build_rep(const StructureTable& table, int D, const PhaseFunction& phase = {});

struct RelationResidual
{
    std::string relation;
    double absolute = 0.0;  // max-entry norm of the residual
    double scale = 0.0;     // max-entry norm of the terms entering the relation
    double relative = 0.0;  // max over entries of |residual| / max(1, |terms| at that entry)
    bool pass = false;
};

struct CertificationReport
{
    std::vector<RelationResidual> relations;
    int subspaceTop = 0;  // relations checked on n <= subspaceTop
    double tol = 0.0;
    bool pass = false;

    const RelationResidual& find(const std::string& relation) const;
};

/// Residuals of
///   [N,a] + a,  [N,a^dagger] - a^dagger,  a abar - F(N) abar a - G(N),
///   a^dagger a - f(N),  a a^dagger - f(N+1)
/// restricted to n <= D-1, where f(N) is taken as |phi(N)|.
CertificationReport certify(const FockRep& rep, double tol = 1e-10);

/// <v|M|v>. Requires matching dimensions and |<v|v> - 1| <= 1e-12.
complex expectation(const FockRep& rep, const Matrix& op, const Vector& state);

/// Basis vector |n> in the representation.
Vector basis_state(const FockRep& rep, int n);

} // namespace qdeform
