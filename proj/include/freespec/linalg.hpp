#pragma once

#include <complex>

#include <Eigen/Dense>

namespace freespec {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Operator-valued arguments are at most 4x4 (k = 1 for P1, k = 3 for the
// P2 linearization); the fixed upper bound keeps them off the heap.
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
using RMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

struct SymmetricEigen {
    Vector values;   // ascending
    Matrix vectors;  // column k pairs with values[k]; empty if not requested
};

SymmetricEigen symmetric_eigen(const Matrix& symmetric, bool with_vectors = true);

// (m - m^H) / 2i, the Hermitian imaginary part.
RMatrix imag_part(const CMatrix& m);
// Smallest / largest eigenvalue of a small Hermitian matrix.
double min_eigenvalue(const RMatrix& symmetric);
double max_eigenvalue(const RMatrix& symmetric);

double max_norm(const CMatrix& m);

// Inverse by LU with partial pivoting. Throws ConditioningError when the
// 1-norm condition estimate exceeds `max_condition`.
CMatrix checked_inverse(const CMatrix& m, double max_condition = 1e14);

}  // namespace freespec
