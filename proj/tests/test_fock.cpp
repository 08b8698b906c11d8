#include <gtest/gtest.h>

#include <cmath>

#include "cptp/analysis.hpp"
#include "cptp/fock.hpp"

using namespace cptp;

TEST(FockDim, RejectsTooSmall) {
  EXPECT_THROW(FockDim(1), Error);
  EXPECT_EQ(FockDim(2).value(), 2);
}

TEST(Annihilation, Dim2) {
  CMatrix want(2, 2);
  want << 0, 1, 0, 0;
  EXPECT_EQ(annihilation(FockDim(2)), want);
}

TEST(Annihilation, Dim3) {
  const CMatrix a = annihilation(FockDim(3));
  EXPECT_EQ(a(0, 1), cplx(1.0));
  EXPECT_EQ(a(1, 2), cplx(std::sqrt(2.0)));
  EXPECT_EQ((a.array() != cplx(0.0)).count(), 2);
}

TEST(Annihilation, NumberIdentityExact) {
  for (int n : {8, 16, 64}) {
    const CMatrix a = annihilation(FockDim(n));
    const CMatrix ada = a.adjoint() * a;
    for (int k = 0; k < n; ++k) {
      // √k·√k is k only to rounding (√2·√2 = 2 + 4.4e-16).
      EXPECT_NEAR(ada(k, k).real(), k, 4e-16 * k) << "k = " << k;
      EXPECT_EQ(ada(k, k).imag(), 0.0);
    }
    EXPECT_EQ((ada - ada.diagonal().asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(NumberOp, Examples) {
  EXPECT_EQ(number_op(FockDim(2)), CMatrix(Eigen::Vector2cd(0, 1).asDiagonal()));
  EXPECT_EQ(number_op(FockDim(4)), CMatrix(Eigen::Vector4cd(0, 1, 2, 3).asDiagonal()));
  const CMatrix a = annihilation(FockDim(16));
  EXPECT_LE((number_op(FockDim(16)) - a.adjoint() * a).cwiseAbs().maxCoeff(), 16 * 4e-16);
}

TEST(CoherentState, Vacuum) {
  const StateVector s = coherent_state(FockDim(10), 0.0);
  EXPECT_EQ(s.amplitudes(0), cplx(1.0));
  EXPECT_EQ(s.amplitudes.tail(9).norm(), 0.0);
  EXPECT_EQ(s.leakage, 0.0);
}

TEST(CoherentState, NormAndLeakage) {
  const StateVector s = coherent_state(FockDim(32), 2.0);
  EXPECT_NEAR(s.amplitudes.norm(), 1.0, 1e-12);
  // Independent tail mass e^{-4} Σ_{n≥32} 4^n/n!.
  double term = std::exp(-4.0), head = 0.0;
  for (int n = 0; n < 32; ++n) {
    head += term;
    term *= 4.0 / (n + 1);
  }
  EXPECT_LT(s.leakage, 1e-10);
  EXPECT_NEAR(s.leakage, 1.0 - head, 1e-14);
}

TEST(CoherentState, Recurrence) {
  const cplx alpha(1.3, -0.4);
  const StateVector s = coherent_state(FockDim(24), alpha);
  for (int n = 0; n + 1 < 24; ++n) {
    const cplx ratio = s.amplitudes(n + 1) / s.amplitudes(n);
    EXPECT_LE(std::abs(ratio - alpha / std::sqrt(n + 1.0)), 1e-12 * std::abs(ratio));
  }
}

TEST(CoherentState, ParityRelation) {
  const StateVector p = coherent_state(FockDim(20), 1.5), m = coherent_state(FockDim(20), -1.5);
  for (int n = 0; n < 20; ++n) {
    EXPECT_NEAR(std::abs(m.amplitudes(n) - (n % 2 ? -1.0 : 1.0) * p.amplitudes(n)), 0.0, 1e-15);
  }
}

TEST(CoherentState, LeakageTooLarge) {
  try {
    coherent_state(FockDim(8), 3.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLeakageTooLarge);
  }
}

TEST(CatState, VacuumAtZero) {
  const StateVector s = cat_state_plus(FockDim(6), 0.0);
  EXPECT_NEAR(std::abs(s.amplitudes(0)), 1.0, 1e-15);
  EXPECT_EQ(s.amplitudes.tail(5).norm(), 0.0);
}

TEST(CatState, OddAmplitudesVanish) {
  const StateVector s = cat_state_plus(FockDim(32), 2.0);
  for (int n = 1; n < 32; n += 2) EXPECT_LE(std::abs(s.amplitudes(n)), 1e-14);
}

TEST(CatState, UnitNormAndParity) {
  const FockDim dim(64);
  const StateVector s = cat_state_plus(dim, 2.0);
  EXPECT_NEAR(s.amplitudes.norm(), 1.0, 1e-12);
  const CVector flipped = parity_op(dim) * s.amplitudes;
  EXPECT_LE((flipped - s.amplitudes).norm(), 1e-14);
}

TEST(PowerLoss, Examples) {
  EXPECT_EQ(truncated_power_loss(FockDim(2), 1, 0.0), annihilation(FockDim(2)));

  const CMatrix a2 = truncated_power_loss(FockDim(3), 2, 0.0);
  EXPECT_NEAR(std::abs(a2(0, 2) - std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_EQ((a2.array() != cplx(0.0)).count(), 1);

  const CMatrix a = annihilation(FockDim(4));
  const CMatrix shifted = truncated_power_loss(FockDim(4), 2, 4.0);
  EXPECT_LE((shifted - (a * a - 4.0 * identity(4))).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PowerLoss, EntriesAreSqrtC) {
  const int n = 12;
  for (int l = 1; l <= 3; ++l) {
    const CMatrix al = truncated_power_loss(FockDim(n), l, 0.0);
    for (int k = 0; k < n; ++k) {
      for (int r = 0; r < n; ++r) {
        const double want = (r == k - l) ? std::sqrt(coefficient_c(l, k)) : 0.0;
        EXPECT_NEAR(std::abs(al(r, k) - want), 0.0, 1e-12 * std::max(1.0, want));
      }
    }
  }
}

TEST(PowerLoss, RejectsBadOrder) {
  EXPECT_THROW(truncated_power_loss(FockDim(4), 0, 0.0), Error);
  EXPECT_THROW(truncated_power_loss(FockDim(4), 4, 0.0), Error);
}

TEST(Projectors, Basics) {
  const CMatrix p = fock_projector(FockDim(5), 3);
  EXPECT_EQ(p(3, 3), cplx(1.0));
  EXPECT_EQ(p.trace(), cplx(1.0));
  const CVector psi = coherent_state(FockDim(16), 0.8).amplitudes;
  const CMatrix q = projector(psi);
  EXPECT_LE((q * q - q).norm(), 1e-14);
}
