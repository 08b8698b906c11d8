#pragma once

#include <vector>

#include "cptp/matcore.hpp"

namespace cptp {

/// Time-independent GKSL generator
///   L(ρ) = −i[H, ρ] + Σ_j (L_j ρ L_j† − ½{L_j†L_j, ρ}).
/// Immutable after construction; G = −iH − ½Q and Q = Σ L_j†L_j are cached.
class LindbladModel {
 public:
  Eigen::Index dim() const { return hamiltonian_.rows(); }
  const CMatrix& hamiltonian() const { return hamiltonian_; }
  const std::vector<CMatrix>& jumps() const { return jumps_; }
  std::size_t n_dissipators() const { return jumps_.size(); }

  const CMatrix& effective_G() const { return g_.dense(); }
  const CMatrix& jump_gram() const { return q_; }

  /// acc += scale · L(ρ). Costs 2N_d + 2 products and N_d + 2 additions.
  void accumulate(const CMatrix& rho, cplx scale, CMatrix& acc,
                  OpCounter* counter = nullptr) const;

  friend LindbladModel build_model(const CMatrix& h, const std::vector<CMatrix>& jumps);

 private:
  LindbladModel() = default;

  CMatrix hamiltonian_;
  std::vector<CMatrix> jumps_;
  CMatrix q_;
  Operand g_;
  Operand g_dag_;
  std::vector<Operand> jump_ops_;
  std::vector<Operand> jump_dag_ops_;
};

/// Validates dimensions and Hermiticity of H (residual ≤ 1e-10·max(1, ‖H‖_F)),
/// then stores the symmetrized H.
LindbladModel build_model(const CMatrix& h, const std::vector<CMatrix>& jumps);

/// A Hermitian, unit-trace matrix. Positivity is checked on demand only.
class DensityMatrix {
 public:
  /// Throws kNonHermitian or kTraceDrift when the invariants fail at 1e-10.
  explicit DensityMatrix(CMatrix mat);

  const CMatrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }
  double min_eigenvalue() const;

  static DensityMatrix maximally_mixed(Eigen::Index dim);

 private:
  CMatrix mat_;
};

CMatrix apply_lindbladian(const LindbladModel& m, const CMatrix& rho,
                          OpCounter* counter = nullptr);

CMatrix effective_G(const LindbladModel& m);

/// Q = Σ_j L_j†L_j.
CMatrix jump_gram(const LindbladModel& m);

/// dim² × dim² matrix K with K·vec(ρ) = vec(L(ρ)) (column stacking).
/// Limited to dim ≤ 16.
CMatrix vectorize_superop(const LindbladModel& m);

/// e^{tL}(ρ) through the exponential of the vectorized generator. Oracle
/// for small dimensions (≤ 16); output is symmetrized.
CMatrix exact_channel(const LindbladModel& m, double t, const CMatrix& rho);
DensityMatrix exact_channel(const LindbladModel& m, double t, const DensityMatrix& rho);

inline constexpr Eigen::Index kOracleMaxDim = 16;

}  // namespace cptp
