#include "cptp/matcore.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

namespace cptp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonHermitian: return "NonHermitian";
    case ErrorCode::kConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kOverflow: return "Overflow";
    case ErrorCode::kSingular: return "Singular";
    case ErrorCode::kLeakageTooLarge: return "LeakageTooLarge";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kNonHermitianHamiltonian: return "NonHermitianHamiltonian";
    case ErrorCode::kDimTooLarge: return "DimTooLarge";
    case ErrorCode::kDegenerateTrace: return "DegenerateTrace";
    case ErrorCode::kStepUnderflow: return "StepUnderflow";
    case ErrorCode::kMaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorCode::kTraceDrift: return "TraceDrift";
    case ErrorCode::kGridMismatch: return "GridMismatch";
    case ErrorCode::kInsufficientPoints: return "InsufficientPoints";
    case ErrorCode::kBadConfig: return "BadConfig";
  }
  return "Unknown";
}

CMatrix identity(Eigen::Index dim) { return CMatrix::Identity(dim, dim); }

CMatrix zeros(Eigen::Index dim) { return CMatrix::Zero(dim, dim); }

CMatrix dagger(const CMatrix& a) { return a.adjoint(); }

double frobenius(const CMatrix& a) { return a.norm(); }

double hermiticity_residual(const CMatrix& a) {
  return (a - a.adjoint()).norm();
}

CMatrix symmetrize(const CMatrix& a) {
  CMatrix out = 0.5 * (a + a.adjoint());
  return out;
}

bool all_finite(const CMatrix& a) { return a.allFinite(); }

void require_finite(const CMatrix& a, const char* what) {
  if (!a.allFinite()) {
    throw Error(ErrorCode::kOverflow, std::string(what) + " has non-finite entries");
  }
}

void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::kDimMismatch,
                std::string(what) + " is " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + ", expected square");
  }
}

EigDecomposition herm_eig(const CMatrix& a) {
  require_square(a, "herm_eig input");
  require_finite(a, "herm_eig input");
  const double scale = a.norm();
  const double residual = hermiticity_residual(a);
  if (residual > 1e-8 * scale) {
    throw Error(ErrorCode::kNonHermitian,
                "residual " + std::to_string(residual) + " vs norm " + std::to_string(scale));
  }
  Eigen::MatrixXcd sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kConvergenceFailure, "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix inv_sqrt_pd(const CMatrix& a, double floor) {
  const EigDecomposition eig = herm_eig(a);
  const double min_eig = eig.eigenvalues.size() ? eig.eigenvalues(0) : 1.0;
  if (!(min_eig > floor)) {
    throw Error(ErrorCode::kNotPositiveDefinite,
                "min eigenvalue " + std::to_string(min_eig) + " <= floor " + std::to_string(floor));
  }
  const RVector scales = eig.eigenvalues.array().rsqrt().matrix();
  const CMatrix& v = eig.eigenvectors;
  CMatrix out = v * scales.asDiagonal() * v.adjoint();
  return out;
}

double trace_norm(const CMatrix& a) {
  require_square(a, "trace_norm input");
  const double scale = a.norm();
  if (scale == 0.0) return 0.0;
  if (hermiticity_residual(a) <= 1e-12 * scale) {
    return herm_eig(a).eigenvalues.cwiseAbs().sum();
  }
  const CMatrix gram = a.adjoint() * a;
  const RVector lambda = herm_eig(gram).eigenvalues;
  return lambda.cwiseMax(0.0).cwiseSqrt().sum();
}

CMatrix expm(const CMatrix& a) {
  require_square(a, "expm input");
  require_finite(a, "expm input");
  Eigen::MatrixXcd in = a;
  Eigen::MatrixXcd out = in.exp();
  CMatrix result = out;
  require_finite(result, "expm result");
  return result;
}

CMatrix solve_linear(const CMatrix& a, const CMatrix& b) {
  require_square(a, "solve_linear matrix");
  if (b.rows() != a.rows()) {
    throw Error(ErrorCode::kDimMismatch, "solve_linear right-hand side rows differ");
  }
  Eigen::MatrixXcd lhs = a;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(lhs);
  const double threshold = 1e-14 * a.norm();
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (a.rows() > 0 && !(pivots.minCoeff() > threshold)) {
    throw Error(ErrorCode::kSingular, "pivot below " + std::to_string(threshold));
  }
  Eigen::MatrixXcd rhs = b;
  CMatrix x = lu.solve(rhs);
  return x;
}

CVector vec(const CMatrix& a) {
  const Eigen::Index n = a.rows();
  CVector v(n * a.cols());
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    for (Eigen::Index r = 0; r < n; ++r) v(c * n + r) = a(r, c);
  }
  return v;
}

CMatrix unvec(const CVector& v, Eigen::Index dim) {
  if (v.size() != dim * dim) {
    throw Error(ErrorCode::kDimMismatch, "unvec length is not dim^2");
  }
  CMatrix a(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) a(r, c) = v(c * dim + r);
  }
  return a;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Operand::Operand(CMatrix dense, double max_fill) : dense_(std::move(dense)) {
  require_square(dense_, "operand");
  const Eigen::Index n = dense_.rows();
  Eigen::Index nnz = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) nnz += dense_(i, j) != cplx(0.0, 0.0);
  }
  if (n > 0 && static_cast<double>(nnz) <= max_fill * static_cast<double>(n * n)) {
    sparse_ = dense_.sparseView(cplx(0.0, 0.0), 0.0);
    sparse_->makeCompressed();
    sparse_cols_ = SparseCols(*sparse_);
    sparse_cols_->makeCompressed();
  }
}

CMatrix Operand::left(const CMatrix& x, OpCounter* counter) const {
  count_mult(counter);
  CMatrix out(dense_.rows(), x.cols());
  if (sparse_) {
    out.noalias() = *sparse_ * x;
  } else {
    out.noalias() = dense_ * x;
  }
  return out;
}

CMatrix Operand::right(const CMatrix& x, OpCounter* counter) const {
  count_mult(counter);
  CMatrix out(x.rows(), dense_.cols());
  if (sparse_cols_) {
    // Eigen's dense*sparse path is several times slower than sparse*dense;
    // gather column by column instead. Real arithmetic sidesteps the
    // NaN-checking complex multiply.
    const auto* outer = sparse_cols_->outerIndexPtr();
    const auto* inner = sparse_cols_->innerIndexPtr();
    const cplx* val = sparse_cols_->valuePtr();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const cplx* xr = x.row(i).data();
      cplx* yr = out.row(i).data();
      for (Eigen::Index j = 0; j < out.cols(); ++j) {
        double re = 0.0, im = 0.0;
        for (auto p = outer[j]; p < outer[j + 1]; ++p) {
          const cplx u = xr[inner[p]], v = val[p];
          re += u.real() * v.real() - u.imag() * v.imag();
          im += u.real() * v.imag() + u.imag() * v.real();
        }
        yr[j] = cplx(re, im);
      }
    }
  } else {
    out.noalias() = x * dense_;
  }
  return out;
}

}  // namespace cptp
