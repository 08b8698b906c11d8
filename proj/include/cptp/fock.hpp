#pragma once

#include "cptp/matcore.hpp"

namespace cptp {

/// Number of retained Fock states N; the truncated space is
/// span{|0⟩, …, |N−1⟩}.
class FockDim {
 public:
  explicit FockDim(int n_fock);
  int value() const { return n_fock_; }
  operator Eigen::Index() const { return n_fock_; }

 private:
  int n_fock_;
};

struct StateVector {
  CVector amplitudes;
  /// Probability mass lost by truncating the infinite series, measured
  /// before renormalization.
  double leakage = 0.0;
};

/// Truncated annihilation operator: a|k⟩ = √k |k−1⟩.
CMatrix annihilation(FockDim dim);

/// diag(0, 1, …, N−1).
CMatrix number_op(FockDim dim);

/// diag((−1)^n).
CMatrix parity_op(FockDim dim);

/// |α⟩ truncated to N states and renormalized. Throws kLeakageTooLarge when
/// the truncation keeps less than 99% of the mass.
StateVector coherent_state(FockDim dim, cplx alpha);

/// (|α⟩ + |−α⟩) normalized.
StateVector cat_state_plus(FockDim dim, cplx alpha);

/// a_N^l − alpha_sq · Id. With alpha_sq = 0 this is the l-photon loss
/// jump operator.
CMatrix truncated_power_loss(FockDim dim, int l, cplx alpha_sq);

/// |ψ⟩⟨ψ|
CMatrix projector(const CVector& psi);

/// |k⟩⟨k| on the truncated space.
CMatrix fock_projector(FockDim dim, int k);

}  // namespace cptp
