#pragma once

#include <complex>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "cptp/error.hpp"

namespace cptp {

using cplx = std::complex<double>;

/// Dense square complex matrix, row-major. Holds states, Hamiltonians,
/// jump operators and Kraus operators alike.
using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;
using RVector = Eigen::VectorXd;

struct EigDecomposition {
  RVector eigenvalues;  // ascending
  CMatrix eigenvectors; // orthonormal columns
};

CMatrix identity(Eigen::Index dim);
CMatrix zeros(Eigen::Index dim);
CMatrix dagger(const CMatrix& a);

double frobenius(const CMatrix& a);

/// ‖A − A†‖_F.
double hermiticity_residual(const CMatrix& a);

/// (A + A†)/2.
CMatrix symmetrize(const CMatrix& a);

bool all_finite(const CMatrix& a);

/// Throws kOverflow if any entry is NaN or infinite.
void require_finite(const CMatrix& a, const char* what);

void require_square(const CMatrix& a, const char* what);

/// Hermitian eigendecomposition. A is symmetrized before factoring; the
/// input must already be Hermitian to within 1e-8 relative (Frobenius).
EigDecomposition herm_eig(const CMatrix& a);

/// B = A^{-1/2} for Hermitian positive definite A. The floor guards against
/// callers feeding an S that is not a small perturbation of the identity.
CMatrix inv_sqrt_pd(const CMatrix& a, double floor = 0.5);

/// Sum of singular values.
double trace_norm(const CMatrix& a);

/// Matrix exponential (scaling and squaring with Padé approximants).
CMatrix expm(const CMatrix& a);

/// Solves A X = B by LU with partial pivoting.
CMatrix solve_linear(const CMatrix& a, const CMatrix& b);

/// Column-stacking vectorization: vec(ρ)[col * dim + row] = ρ(row, col).
CVector vec(const CMatrix& a);
CMatrix unvec(const CVector& v, Eigen::Index dim);

/// Kronecker product A ⊗ B.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Tally of dense matrix products and matrix additions performed by a
/// time step. Scalar scalings and traces are not counted.
struct OpCounter {
  std::int64_t matrix_mults = 0;
  std::int64_t matrix_adds = 0;
};

inline void count_mult(OpCounter* c, std::int64_t n = 1) {
  if (c) c->matrix_mults += n;
}
inline void count_add(OpCounter* c, std::int64_t n = 1) {
  if (c) c->matrix_adds += n;
}

/// A fixed operator used repeatedly as a left or right factor. When the
/// matrix is sparse enough (Fock-space ladder polynomials are banded) the
/// products go through a compressed copy; results are identical up to
/// summation order.
class Operand {
 public:
  Operand() = default;
  explicit Operand(CMatrix dense, double max_fill = 0.25);

  const CMatrix& dense() const { return dense_; }
  bool is_sparse() const { return sparse_.has_value(); }
  Eigen::Index dim() const { return dense_.rows(); }

  /// this · x
  CMatrix left(const CMatrix& x, OpCounter* counter = nullptr) const;
  /// x · this
  CMatrix right(const CMatrix& x, OpCounter* counter = nullptr) const;

 private:
  using SparseRows = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
  using SparseCols = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;
  CMatrix dense_;
  std::optional<SparseRows> sparse_;
  std::optional<SparseCols> sparse_cols_;  // for right products
};

}  // namespace cptp
