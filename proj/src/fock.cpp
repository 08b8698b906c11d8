#include "cptp/fock.hpp"

#include <cmath>
#include <string>

namespace cptp {

FockDim::FockDim(int n_fock) : n_fock_(n_fock) {
  if (n_fock < 2) {
    throw Error(ErrorCode::kBadConfig, "Fock dimension must be >= 2, got " + std::to_string(n_fock));
  }
}

CMatrix annihilation(FockDim dim) {
  CMatrix a = zeros(dim);
  for (int k = 0; k + 1 < dim.value(); ++k) {
    a(k, k + 1) = std::sqrt(static_cast<double>(k + 1));
  }
  return a;
}

CMatrix number_op(FockDim dim) {
  CMatrix n = zeros(dim);
  for (int k = 0; k < dim.value(); ++k) n(k, k) = static_cast<double>(k);
  return n;
}

CMatrix parity_op(FockDim dim) {
  CMatrix p = zeros(dim);
  for (int k = 0; k < dim.value(); ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return p;
}

namespace {

// α^n/√(n!) by the recurrence v_{n+1} = v_n α/√(n+1); no factorial overflow.
CVector coherent_series(int n, cplx alpha) {
  CVector v(n);
  v(0) = 1.0;
  for (int k = 0; k + 1 < n; ++k) {
    v(k + 1) = v(k) * alpha / std::sqrt(static_cast<double>(k + 1));
  }
  return v;
}

double retained_mass(const CVector& series, cplx alpha) {
  return std::exp(-std::norm(alpha)) * series.squaredNorm();
}

void check_leakage(double retained, FockDim dim, cplx alpha) {
  if (retained < 0.99) {
    throw Error(ErrorCode::kLeakageTooLarge,
                "N = " + std::to_string(dim.value()) + " keeps mass " + std::to_string(retained) +
                    " of |alpha| = " + std::to_string(std::abs(alpha)));
  }
}

}  // namespace

StateVector coherent_state(FockDim dim, cplx alpha) {
  CVector v = coherent_series(dim.value(), alpha);
  const double retained = retained_mass(v, alpha);
  check_leakage(retained, dim, alpha);
  v /= v.norm();
  return {std::move(v), std::max(0.0, 1.0 - retained)};
}

StateVector cat_state_plus(FockDim dim, cplx alpha) {
  const CVector plus = coherent_series(dim.value(), alpha);
  const CVector minus = coherent_series(dim.value(), -alpha);
  const double retained = retained_mass(plus, alpha);
  check_leakage(retained, dim, alpha);
  CVector v = plus + minus;
  v /= v.norm();
  return {std::move(v), std::max(0.0, 1.0 - retained)};
}

CMatrix truncated_power_loss(FockDim dim, int l, cplx alpha_sq) {
  if (l < 1 || l >= dim.value()) {
    throw Error(ErrorCode::kBadConfig, "photon-loss order l must satisfy 1 <= l < N");
  }
  const CMatrix a = annihilation(dim);
  CMatrix out = identity(dim);
  for (int i = 0; i < l; ++i) out = (out * a).eval();
  out -= alpha_sq * identity(dim);
  return out;
}

CMatrix projector(const CVector& psi) {
  CMatrix out = psi * psi.adjoint();
  return out;
}

CMatrix fock_projector(FockDim dim, int k) {
  CMatrix out = zeros(dim);
  out(k, k) = 1.0;
  return out;
}

}  // namespace cptp
