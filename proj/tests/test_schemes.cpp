#include <gtest/gtest.h>

#include <cmath>

#include "cptp/analysis.hpp"
#include "cptp/benchmark.hpp"
#include "cptp/fock.hpp"
#include "cptp/schemes.hpp"
#include "test_util.hpp"

using namespace cptp;
using cptp::testing::max_abs;
using cptp::testing::random_density;
using cptp::testing::random_hermitian;
using cptp::testing::random_model;

namespace {

LindbladModel decay(int n) { return build_model(zeros(n), {annihilation(FockDim(n))}); }

LindbladModel photon_loss(int n, int l) {
  return build_model(zeros(n), {truncated_power_loss(FockDim(n), l, 0.0)});
}

CMatrix ket_bra(int n, int k, int m) {
  CMatrix a = zeros(n);
  a(k, m) = 1.0;
  return a;
}

double op_norm(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

// Euler 1 for l-photon loss written out entrywise:
// ρ'_km = (1 − dt(c_k + c_m)/2) ρ_km + dt √(c_{k+l} c_{m+l}) ρ_{k+l, m+l}.
CMatrix euler_recursion(const CMatrix& rho, int l, double dt) {
  const auto n = static_cast<int>(rho.rows());
  CMatrix out(n, n);
  for (int k = 0; k < n; ++k) {
    for (int m = 0; m < n; ++m) {
      cplx v = (1.0 - dt * (coefficient_c(l, k) + coefficient_c(l, m)) / 2.0) * rho(k, m);
      if (k + l < n && m + l < n) {
        v += dt * std::sqrt(coefficient_c(l, k + l) * coefficient_c(l, m + l)) * rho(k + l, m + l);
      }
      out(k, m) = v;
    }
  }
  return out;
}

double local_error(Scheme s, const LindbladModel& m, double dt, const CMatrix& rho) {
  const Stepper st(s, m, dt);
  return trace_norm(st.step(rho) - exact_channel(m, dt, rho));
}

}  // namespace

TEST(SchemeNames, RoundTrip) {
  for (Scheme s : kAllSchemes) EXPECT_EQ(parse_scheme(to_string(s)), s);
  EXPECT_EQ(parse_scheme("QC-1"), Scheme::kQC1);
  EXPECT_EQ(parse_scheme("Lu_Cao 2"), Scheme::kLuCao2);
  EXPECT_FALSE(parse_scheme("rk5").has_value());
}

TEST(QC1, HandBuiltChannel) {
  // Q = diag(0, 1), S = diag(1, 2).
  const KrausChannel ch = build_qc1(decay(2), 2.0);
  ASSERT_EQ(ch.kraus_ops().size(), 2u);
  CMatrix m0 = zeros(2), m1 = zeros(2);
  m0(0, 0) = 1.0;
  m1(0, 1) = 1.0;
  EXPECT_LE(max_abs(ch.kraus_ops()[0] - m0), 1e-15);
  EXPECT_LE(max_abs(ch.kraus_ops()[1] - m1), 1e-15);
  EXPECT_LE(ch.completeness_residual(), 1e-15);
  CMatrix s = identity(2);
  s(1, 1) = 2.0;
  EXPECT_LE(max_abs(ch.gram() - s), 1e-15);
}

TEST(QC1, UnitaryWithoutJumps) {
  std::mt19937 rng(41);
  const KrausChannel ch = build_qc1(build_model(random_hermitian(rng, 6), {}), 0.3);
  ASSERT_EQ(ch.kraus_ops().size(), 1u);
  const CMatrix& u = ch.kraus_ops()[0];
  EXPECT_LE((u.adjoint() * u - identity(6)).norm(), 1e-12);
  EXPECT_LE(ch.completeness_residual(), 1e-12);
}

TEST(QC1, RandomCompleteness) {
  std::mt19937 rng(42);
  const KrausChannel ch = build_qc1(random_model(rng, 4, 2), 1e-3);
  EXPECT_LE(ch.completeness_residual(), 1e-12 * 4);
}

TEST(QC1, GramClosedForm) {
  for (double dt : {1e-3, 0.1, 1.0}) {
    const LindbladModel m = photon_loss(10, 2);
    const KrausChannel ch = build_qc1(m, dt);
    const CMatrix& q = m.jump_gram();
    const CMatrix want = identity(10) + 0.25 * dt * dt * (q * q);
    EXPECT_LE(max_abs(ch.gram() - want), 1e-12 * std::max(1.0, max_abs(want)));
  }
}

TEST(QC1, ContractiveOperators) {
  std::mt19937 rng(43);
  for (double dt : {1e-3, 0.1, 2.0}) {
    const KrausChannel ch = build_qc1(random_model(rng, 6, 2), dt);
    for (const CMatrix& k : ch.kraus_ops()) EXPECT_LE(op_norm(k), 1.0 + 1e-10);
  }
}

TEST(QC2, OperatorCount) {
  std::mt19937 rng(44);
  EXPECT_EQ(build_qc2(random_model(rng, 3, 1), 0.01).kraus_ops().size(), 3u);
  EXPECT_EQ(build_qc2(random_model(rng, 3, 2), 0.01).kraus_ops().size(), 7u);
}

TEST(QC2, UnitaryWithoutJumps) {
  std::mt19937 rng(45);
  const KrausChannel ch = build_qc2(build_model(random_hermitian(rng, 5), {}), 1e-2);
  const CMatrix& u = ch.kraus_ops()[0];
  EXPECT_LE((u.adjoint() * u - identity(5)).norm(), 1e-10);
  EXPECT_LE((u * u.adjoint() - identity(5)).norm(), 1e-10);
}

TEST(QC2, RandomCompleteness) {
  std::mt19937 rng(46);
  EXPECT_LE(build_qc2(random_model(rng, 4, 2), 1e-2).completeness_residual(), 1e-11 * 4);
}

TEST(Kraus, CompletenessAcrossScales) {
  // Fock models are stiff: ‖Q‖ grows like dim², so S is badly conditioned at
  // large dim and dt.
  for (int dim : {2, 8, 32, 128}) {
    std::vector<LindbladModel> models;
    if (dim == 2) {
      models.push_back(decay(2));
    } else {
      models.push_back(experiment_model(preset(Experiment::kCatPrep), dim));
      models.push_back(experiment_model(preset(Experiment::kZGate), dim));
    }
    for (const LindbladModel& m : models) {
      for (double dt : {1e-4, 1e-2, 1e-1, 2.0}) {
        EXPECT_LE(build_qc1(m, dt).completeness_residual(), 1e-11 * dim) << dim << " " << dt;
        EXPECT_LE(build_qc2(m, dt).completeness_residual(), 1e-11 * dim) << dim << " " << dt;
      }
    }
  }
}

TEST(Kraus, TraceNormContraction) {
  std::mt19937 rng(47);
  const LindbladModel m = random_model(rng, 5, 2);
  for (const KrausChannel& ch : {build_qc1(m, 0.2), build_qc2(m, 0.2)}) {
    for (int trial = 0; trial < 5; ++trial) {
      const CMatrix rho = random_density(rng, 5), sigma = random_density(rng, 5);
      EXPECT_LE(trace_norm(ch.apply(rho) - ch.apply(sigma)), trace_norm(rho - sigma) + 1e-10);
    }
  }
}

TEST(LuCao, FirstOrderHandValues) {
  const KrausFamily f = build_lucao(decay(2), 0.1, 1);
  ASSERT_EQ(f.kraus_ops().size(), 2u);
  CMatrix m0 = identity(2);
  m0(1, 1) = 0.95;
  EXPECT_LE(max_abs(f.kraus_ops()[0] - m0), 1e-15);
  EXPECT_LE(max_abs(f.kraus_ops()[1] - std::sqrt(0.1) * annihilation(FockDim(2))), 1e-15);
}

TEST(LuCao, FirstOrderGram) {
  std::mt19937 rng(48);
  std::vector<CMatrix> jumps = {cptp::testing::random_matrix(rng, 4, 0.5)};
  const LindbladModel m = build_model(zeros(4), jumps);
  const double dt = 0.05;
  const KrausFamily f = build_lucao(m, dt, 1);
  CMatrix s = zeros(4);
  for (const CMatrix& k : f.kraus_ops()) s += k.adjoint() * k;
  const CMatrix& q = m.jump_gram();
  EXPECT_LE(max_abs(s - (identity(4) + 0.25 * dt * dt * q * q)), 1e-12);
}

TEST(LuCao, SecondOrderCount) {
  std::mt19937 rng(49);
  EXPECT_EQ(build_lucao(random_model(rng, 3, 2), 0.01, 2).kraus_ops().size(), 7u);
  EXPECT_THROW(build_lucao(random_model(rng, 3, 2), 0.01, 3), Error);
}

TEST(ApplyKraus, VacuumFixedPoint) {
  const KrausChannel ch = build_qc1(decay(4), 0.3);
  EXPECT_LE(max_abs(ch.apply(ket_bra(4, 0, 0)) - ket_bra(4, 0, 0)), 1e-15);
}

TEST(ApplyKraus, FullDecayInOneStep) {
  const DensityMatrix out = apply_kraus(build_qc1(decay(2), 2.0), DensityMatrix(ket_bra(2, 1, 1)));
  EXPECT_LE(max_abs(out.mat() - ket_bra(2, 0, 0)), 1e-15);
}

TEST(ApplyKraus, TracePreserved) {
  std::mt19937 rng(50);
  const LindbladModel m = random_model(rng, 8, 2);
  for (const KrausChannel& ch : {build_qc1(m, 0.05), build_qc2(m, 0.05)}) {
    const CMatrix out = ch.apply(random_density(rng, 8));
    EXPECT_LE(std::abs(out.trace() - 1.0), 1e-12);
  }
}

TEST(ApplyLuCao, VacuumFixedPoint) {
  for (double dt : {1e-3, 0.5, 3.0}) {
    const DensityMatrix out = apply_lucao(build_lucao(decay(3), dt, 1), DensityMatrix(ket_bra(3, 0, 0)));
    EXPECT_LE(max_abs(out.mat() - ket_bra(3, 0, 0)), 1e-15);
  }
}

TEST(ApplyLuCao, HandValues) {
  const DensityMatrix out = apply_lucao(build_lucao(decay(2), 0.1, 1), DensityMatrix(ket_bra(2, 1, 1)));
  const CMatrix want = (0.1 * ket_bra(2, 0, 0) + 0.9025 * ket_bra(2, 1, 1)) / 1.0025;
  EXPECT_LE(max_abs(out.mat() - want), 1e-15);
}

TEST(ApplyLuCao, UnitTrace) {
  std::mt19937 rng(51);
  const LindbladModel m = random_model(rng, 6, 2);
  for (int order : {1, 2}) {
    const CMatrix out = apply_lucao(build_lucao(m, 0.3, order), random_density(rng, 6));
    EXPECT_NEAR(out.trace().real(), 1.0, 1e-15);
  }
}

TEST(Euler, SingleDecay) {
  const CMatrix out = step_euler(decay(2), 0.1, 1, ket_bra(2, 1, 1));
  EXPECT_LE(max_abs(out - (0.1 * ket_bra(2, 0, 0) + 0.9 * ket_bra(2, 1, 1))), 1e-15);
}

TEST(Euler, InstabilitySeed) {
  // n = 10, dt·c_n = 3: the top population flips sign and doubles.
  const CMatrix rho = ket_bra(11, 10, 10);
  const CMatrix out = step_euler(photon_loss(11, 1), 0.3, 1, rho);
  EXPECT_NEAR(out(10, 10).real(), -2.0, 1e-14);
}

TEST(Euler, MatchesEntrywiseRecursion) {
  std::mt19937 rng(52);
  for (int l : {1, 2, 3}) {
    const CMatrix rho = random_density(rng, 12);
    const CMatrix out = step_euler(photon_loss(12, l), 1e-3, 1, rho);
    EXPECT_LE(max_abs(out - euler_recursion(rho, l, 1e-3)), 1e-13) << "l = " << l;
  }
}

TEST(Euler, SecondOrderClosedSystem) {
  std::mt19937 rng(53);
  const LindbladModel m = build_model(random_hermitian(rng, 4), {});
  const CMatrix rho = random_density(rng, 4);
  auto err = [&](double dt) { return trace_norm(step_euler(m, dt, 2, rho) - exact_channel(m, dt, rho)); };
  for (double dt : {1e-2, 5e-3}) {
    const double ratio = err(dt) / err(dt / 2);
    EXPECT_GT(ratio, 7.0);
    EXPECT_LT(ratio, 9.0);
  }
}

TEST(RK4, ZeroField) {
  std::mt19937 rng(54);
  const CMatrix rho = random_density(rng, 3);
  EXPECT_EQ(step_rk4(build_model(zeros(3), {}), 0.1, rho), rho);
}

TEST(RK4, ScalarDecay) {
  const CMatrix out = step_rk4(decay(2), 0.5, ket_bra(2, 1, 1));
  const double h = -0.5;
  const double taylor4 = 1 + h + h * h / 2 + h * h * h / 6 + h * h * h * h / 24;
  EXPECT_NEAR(out(1, 1).real(), taylor4, 1e-15);
  EXPECT_NEAR(out(1, 1).real(), std::exp(-0.5), 3e-4);
}

TEST(RK4, TracePreserved) {
  std::mt19937 rng(55);
  const CMatrix out = step_rk4(random_model(rng, 6, 2), 0.05, random_density(rng, 6));
  EXPECT_NEAR(std::abs(out.trace() - 1.0), 0.0, 1e-13);
}

TEST(LocalOrder, AgainstExactChannel) {
  std::mt19937 rng(56);
  const LindbladModel m = random_model(rng, 4, 2);
  const CMatrix rho = random_density(rng, 4);
  for (Scheme s : {Scheme::kQC1, Scheme::kLuCao1}) {
    for (double dt : {1e-2, 1e-3, 2e-4}) {
      const double ratio = local_error(s, m, dt, rho) / local_error(s, m, dt / 2, rho);
      EXPECT_GT(ratio, 3.5) << to_string(s) << " " << dt;
      EXPECT_LT(ratio, 4.5) << to_string(s) << " " << dt;
    }
  }
  for (Scheme s : {Scheme::kQC2, Scheme::kLuCao2}) {
    for (double dt : {1e-2, 5e-3, 2.5e-3}) {
      const double ratio = local_error(s, m, dt, rho) / local_error(s, m, dt / 2, rho);
      EXPECT_GT(ratio, 7.0) << to_string(s) << " " << dt;
      EXPECT_LT(ratio, 9.0) << to_string(s) << " " << dt;
    }
  }
}

TEST(OpCounts, LindbladianAndRK4) {
  std::mt19937 rng(57);
  const LindbladModel m = random_model(rng, 3, 2);
  OpCounter c;
  step_rk4(m, 0.1, random_density(rng, 3), &c);
  EXPECT_EQ(c.matrix_mults, 24);
  EXPECT_EQ(c.matrix_adds, 22);
}

TEST(Integrate, ZeroSteps) {
  const Stepper s(Scheme::kQC1, decay(3), 0.1);
  const Trajectory t = integrate(s, ket_bra(3, 2, 2), 0, 1);
  ASSERT_EQ(t.states.size(), 1u);
  EXPECT_EQ(t.states[0], ket_bra(3, 2, 2));
  EXPECT_FALSE(t.blowup_flag);
}

TEST(Integrate, VacuumStaysPut) {
  const Stepper s(Scheme::kQC1, photon_loss(10, 2), 0.05);
  for (long n : {1L, 7L, 40L}) {
    const Trajectory t = integrate(s, ket_bra(10, 0, 0), n, 3);
    EXPECT_LE(max_abs(t.states.back() - ket_bra(10, 0, 0)), 1e-14);
    EXPECT_DOUBLE_EQ(t.times.back(), n * 0.05);
  }
}

TEST(Integrate, RecordsOnStride) {
  const Stepper s(Scheme::kRK4, decay(3), 0.01);
  const Trajectory t = integrate(s, ket_bra(3, 2, 2), 10, 4);
  const std::vector<double> want = {0.0, 0.04, 0.08, 0.1};
  ASSERT_EQ(t.times.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(t.times[i], want[i], 1e-15);
}

TEST(Integrate, EulerBlowsUpPastCfl) {
  // 2/(31·30) ≈ 2.15e-3 < 3e-3.
  const Stepper s(Scheme::kEuler1, photon_loss(32, 2), 3e-3);
  const Trajectory t = integrate(s, DensityMatrix::maximally_mixed(32).mat(), 2000, 10);
  EXPECT_TRUE(t.blowup_flag);
  EXPECT_LT(t.times.back(), 2000 * 3e-3);
}

TEST(Stepper, Precomputed) {
  for (Scheme s : kAllSchemes) {
    const Stepper st(s, decay(3), 0.1);
    const bool kraus = s == Scheme::kQC1 || s == Scheme::kQC2 || s == Scheme::kLuCao1 ||
                       s == Scheme::kLuCao2;
    EXPECT_EQ(st.has_precomputed(), kraus) << to_string(s);
  }
  EXPECT_THROW(Stepper(Scheme::kQC1, decay(3), 0.0), Error);
}
