#include "freespec/linalg.hpp"

#include <cmath>

#include <fmt/format.h>

#include "freespec/error.hpp"

namespace freespec {

SymmetricEigen symmetric_eigen(const Matrix& symmetric, bool with_vectors) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(
        symmetric, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver failed");
    SymmetricEigen out;
    out.values = solver.eigenvalues();
    if (with_vectors) out.vectors = solver.eigenvectors();
    return out;
}

RMatrix imag_part(const CMatrix& m) {
    // For entries, ((m - m^H) / 2i)_{jk} = (m_jk - conj(m_kj)) / 2i.
    const auto k = m.rows();
    RMatrix out(k, k);
    for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index l = 0; l < k; ++l) {
            const Complex d = m(j, l) - std::conj(m(l, j));
            out(j, l) = (d / Complex(0.0, 2.0)).real();
        }
    return out;
}

double min_eigenvalue(const RMatrix& symmetric) {
    if (symmetric.rows() == 1) return symmetric(0, 0);
    Eigen::SelfAdjointEigenSolver<RMatrix> solver(symmetric, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

double max_eigenvalue(const RMatrix& symmetric) {
    if (symmetric.rows() == 1) return symmetric(0, 0);
    Eigen::SelfAdjointEigenSolver<RMatrix> solver(symmetric, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(symmetric.rows() - 1);
}

double max_norm(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

CMatrix checked_inverse(const CMatrix& m, double max_condition) {
    if (m.rows() == 1) {
        if (m(0, 0) == Complex(0.0)) throw ConditioningError(INFINITY, "singular 1x1 matrix");
        return CMatrix::Constant(1, 1, 1.0 / m(0, 0));
    }
    Eigen::PartialPivLU<CMatrix> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > 0.0) || 1.0 / rcond > max_condition) {
        const double cond = rcond > 0.0 ? 1.0 / rcond : INFINITY;
        throw ConditioningError(cond, fmt::format("matrix inverse ill-conditioned (cond ~ {:.3g})", cond));
    }
    return lu.inverse();
}

}  // namespace freespec
