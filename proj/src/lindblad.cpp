#include "cptp/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cptp {

LindbladModel build_model(const CMatrix& h, const std::vector<CMatrix>& jumps) {
  require_square(h, "Hamiltonian");
  require_finite(h, "Hamiltonian");
  const Eigen::Index n = h.rows();
  for (std::size_t j = 0; j < jumps.size(); ++j) {
    if (jumps[j].rows() != n || jumps[j].cols() != n) {
      throw Error(ErrorCode::kDimMismatch, "jump operator " + std::to_string(j) + " is " +
                                               std::to_string(jumps[j].rows()) + "x" +
                                               std::to_string(jumps[j].cols()) + ", H is " +
                                               std::to_string(n) + "x" + std::to_string(n));
    }
    require_finite(jumps[j], "jump operator");
  }
  const double residual = hermiticity_residual(h);
  if (residual > 1e-10 * std::max(1.0, h.norm())) {
    throw Error(ErrorCode::kNonHermitianHamiltonian, "‖H − H†‖_F = " + std::to_string(residual));
  }

  LindbladModel m;
  m.hamiltonian_ = symmetrize(h);
  m.jumps_ = jumps;
  m.q_ = zeros(n);
  for (const CMatrix& l : jumps) m.q_.noalias() += l.adjoint() * l;
  m.q_ = symmetrize(m.q_);
  CMatrix g = cplx(0.0, -1.0) * m.hamiltonian_ - 0.5 * m.q_;
  m.g_dag_ = Operand(g.adjoint());
  m.g_ = Operand(std::move(g));
  for (const CMatrix& l : jumps) {
    m.jump_ops_.emplace_back(l);
    m.jump_dag_ops_.emplace_back(l.adjoint());
  }
  return m;
}

void LindbladModel::accumulate(const CMatrix& rho, cplx scale, CMatrix& acc,
                               OpCounter* counter) const {
  if (rho.rows() != dim() || rho.cols() != dim() || acc.rows() != dim() || acc.cols() != dim()) {
    throw Error(ErrorCode::kDimMismatch, "state does not match model dimension " +
                                             std::to_string(dim()));
  }
  CMatrix drift = g_.left(rho, counter);
  drift += g_dag_.right(rho, counter);
  count_add(counter);
  acc += scale * drift;
  count_add(counter);
  for (std::size_t j = 0; j < jump_ops_.size(); ++j) {
    const CMatrix lr = jump_ops_[j].left(rho, counter);
    acc += scale * jump_dag_ops_[j].right(lr, counter);
    count_add(counter);
  }
}

DensityMatrix::DensityMatrix(CMatrix mat) : mat_(std::move(mat)) {
  require_square(mat_, "density matrix");
  require_finite(mat_, "density matrix");
  const double residual = hermiticity_residual(mat_);
  if (residual > 1e-10 * std::max(1.0, mat_.norm())) {
    throw Error(ErrorCode::kNonHermitian, "density matrix Hermiticity residual " +
                                              std::to_string(residual));
  }
  const double drift = std::abs(mat_.trace() - cplx(1.0, 0.0));
  if (drift > 1e-10) {
    throw Error(ErrorCode::kTraceDrift, "density matrix trace off by " + std::to_string(drift));
  }
}

double DensityMatrix::min_eigenvalue() const { return herm_eig(mat_).eigenvalues(0); }

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  return DensityMatrix(identity(dim) / static_cast<double>(dim));
}

CMatrix apply_lindbladian(const LindbladModel& m, const CMatrix& rho, OpCounter* counter) {
  CMatrix out = zeros(m.dim());
  m.accumulate(rho, 1.0, out, counter);
  return out;
}

CMatrix effective_G(const LindbladModel& m) { return m.effective_G(); }

CMatrix jump_gram(const LindbladModel& m) { return m.jump_gram(); }

namespace {

void require_oracle_dim(const LindbladModel& m) {
  if (m.dim() > kOracleMaxDim) {
    throw Error(ErrorCode::kDimTooLarge, "superoperator oracle limited to dim <= 16, got " +
                                             std::to_string(m.dim()));
  }
}

}  // namespace

CMatrix vectorize_superop(const LindbladModel& m) {
  require_oracle_dim(m);
  const Eigen::Index n = m.dim();
  const CMatrix id = identity(n);
  const CMatrix& h = m.hamiltonian();
  // vec(AρB) = (Bᵀ ⊗ A) vec(ρ)
  CMatrix k = cplx(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));
  for (const CMatrix& l : m.jumps()) {
    const CMatrix ldl = l.adjoint() * l;
    k += kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id);
  }
  return k;
}

CMatrix exact_channel(const LindbladModel& m, double t, const CMatrix& rho) {
  require_oracle_dim(m);
  if (rho.rows() != m.dim() || rho.cols() != m.dim()) {
    throw Error(ErrorCode::kDimMismatch, "state does not match model dimension");
  }
  if (t == 0.0) return rho;
  const CMatrix propagator = expm(t * vectorize_superop(m));
  const CVector out = propagator * vec(rho);
  return symmetrize(unvec(out, m.dim()));
}

DensityMatrix exact_channel(const LindbladModel& m, double t, const DensityMatrix& rho) {
  return DensityMatrix(exact_channel(m, t, rho.mat()));
}

}  // namespace cptp
