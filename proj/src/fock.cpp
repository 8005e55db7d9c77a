#include "qdeform/fock.hpp"

#include "qdeform/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdeform
{

FockRep build_rep(const StructureTable& table, int D, const PhaseFunction& phase)
{
    if (D < 1) throw std::invalid_argument("build_rep: D must be >= 1");

    FockRep rep(table);
    rep.requestedTop_ = D;
    table.ensure(D + 1);
    if (auto n0 = table.degeneracy_within(D); n0) {
        D = *n0 - 1;
    }

    const int dim = D + 1;
    rep.N_ = Matrix::Zero(dim, dim);
    rep.a_ = Matrix::Zero(dim, dim);
    rep.abar_ = Matrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) {
        rep.N_(n, n) = static_cast<double>(n);
    }
    for (int n = 1; n < dim; ++n) {
        const double root = std::sqrt(table.f(n));
        if (!std::isfinite(root)) {
            throw OverflowError("build_rep: sqrt f(" + std::to_string(n) + ") is not finite");
        }
        complex c = table.phase(n);
        if (phase) {
            c = phase(n);
            if (std::abs(std::abs(c) - 1.0) > 1e-12) {
                throw std::invalid_argument("build_rep: phase override must have unit modulus");
            }
        }
        rep.a_(n - 1, n) = root;
        rep.abar_(n, n - 1) = c * root;
    }
    rep.adag_ = rep.a_.adjoint();
    return rep;
}

const RelationResidual& CertificationReport::find(const std::string& relation) const
{
    for (const auto& r : relations) {
        if (r.relation == relation) return r;
    }
    throw std::out_of_range("no relation named '" + relation + "'");
}

namespace
{

double max_entry(const Matrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Matrix diagonal_of(const std::vector<complex>& values, int dim)
{
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) m(n, n) = values[static_cast<std::size_t>(n)];
    return m;
}

} // namespace

CertificationReport certify(const FockRep& rep, double tol)
{
    if (!(tol > 0.0)) throw std::invalid_argument("certify: tol must be positive");

    const int dim = rep.dim();
    const int block = dim - 1;  // states n <= D-1
    const auto& table = rep.table();
    const auto& spec = table.spec();

    std::vector<complex> Fd, Gd, fN, fN1;
    for (int n = 0; n < dim; ++n) {
        Fd.push_back(evaluate(spec.F, n, spec.params));
        Gd.push_back(evaluate(spec.G, n, spec.params));
        fN.push_back(std::abs(table.phi(n)));
        fN1.push_back(std::abs(table.phi(n + 1)));
    }
    const Matrix Fm = diagonal_of(Fd, dim);
    const Matrix Gm = diagonal_of(Gd, dim);
    const Matrix fm = diagonal_of(fN, dim);
    const Matrix fm1 = diagonal_of(fN1, dim);

    const Matrix& N = rep.N();
    const Matrix& a = rep.a();
    const Matrix& ad = rep.adag();
    const Matrix& ab = rep.abar();

    CertificationReport report;
    report.subspaceTop = block - 1;
    report.tol = tol;

    auto add = [&](std::string name, const Matrix& residual, std::initializer_list<const Matrix*> terms) {
        RelationResidual r;
        r.relation = std::move(name);
        r.absolute = max_entry(residual.topLeftCorner(block, block));
        for (const Matrix* t : terms) {
            r.scale = std::max(r.scale, max_entry(t->topLeftCorner(block, block)));
        }
        // each entry against the size of the terms at that entry, so a
        // fault at small n is not hidden by large f further up the ladder
        for (int j = 0; j < block; ++j) {
            for (int i = 0; i < block; ++i) {
                double local = 1.0;
                for (const Matrix* t : terms) local = std::max(local, std::abs((*t)(i, j)));
                r.relative = std::max(r.relative, std::abs(residual(i, j)) / local);
            }
        }
        r.pass = r.relative <= tol;
        report.relations.push_back(std::move(r));
    };

    const Matrix Na = N * a, aN = a * N;
    add("[N,a]+a", Na - aN + a, {&Na, &aN, &a});
    const Matrix Nad = N * ad, adN = ad * N;
    add("[N,a+]-a+", Nad - adN - ad, {&Nad, &adN, &ad});
    const Matrix aab = a * ab, Faba = Fm * ab * a;
    add("a abar - F(N) abar a - G(N)", aab - Faba - Gm, {&aab, &Faba, &Gm});
    const Matrix ada = ad * a;
    add("a+a - f(N)", ada - fm, {&ada, &fm});
    const Matrix aad = a * ad;
    add("a a+ - f(N+1)", aad - fm1, {&aad, &fm1});

    report.pass = std::all_of(report.relations.begin(), report.relations.end(),
                              [](const RelationResidual& r) { return r.pass; });
    return report;
}

complex expectation(const FockRep& rep, const Matrix& op, const Vector& state)
{
    if (op.rows() != rep.dim() || op.cols() != rep.dim() || state.size() != rep.dim()) {
        throw DimensionMismatch("expectation: operator " + std::to_string(op.rows()) + "x" + std::to_string(op.cols()) +
                                ", state " + std::to_string(state.size()) + ", representation " +
                                std::to_string(rep.dim()));
    }
    const double norm = state.squaredNorm();
    if (std::abs(norm - 1.0) > 1e-12) {
        throw std::invalid_argument("expectation: state is not normalized");
    }
    return state.dot(op * state);
}

Vector basis_state(const FockRep& rep, int n)
{
    if (n < 0 || n >= rep.dim()) throw std::out_of_range("basis_state: index outside representation");
    Vector v = Vector::Zero(rep.dim());
    v(n) = 1.0;
    return v;
}

} // namespace qdeform
