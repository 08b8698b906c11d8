#include "cptp/schemes.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <string>

namespace cptp {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::kEuler1: return "euler1";
    case Scheme::kEuler2: return "euler2";
    case Scheme::kLuCao1: return "lucao1";
    case Scheme::kLuCao2: return "lucao2";
    case Scheme::kQC1: return "qc1";
    case Scheme::kQC2: return "qc2";
    case Scheme::kRK4: return "rk4";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c == '-' || c == '_' || c == ' ') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (Scheme s : kAllSchemes) {
    if (key == to_string(s)) return s;
  }
  return std::nullopt;
}

namespace {

void require_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::kBadConfig, "time step must be positive, got " + std::to_string(dt));
  }
}

void require_state_dim(Eigen::Index dim, const CMatrix& rho) {
  if (rho.rows() != dim || rho.cols() != dim) {
    throw Error(ErrorCode::kDimMismatch, "state is " + std::to_string(rho.rows()) + "x" +
                                             std::to_string(rho.cols()) + ", operators are " +
                                             std::to_string(dim) + "x" + std::to_string(dim));
  }
}

CMatrix kraus_gram(const std::vector<CMatrix>& ops) {
  CMatrix s = zeros(ops.front().rows());
  for (const CMatrix& m : ops) s.noalias() += m.adjoint() * m;
  return symmetrize(s);
}

// Σ_j M_j ρ M_j† over precomputed operands.
CMatrix kraus_sum(const std::vector<Operand>& left, const std::vector<Operand>& right,
                  const CMatrix& rho, OpCounter* counter) {
  CMatrix out = right[0].right(left[0].left(rho, counter), counter);
  for (std::size_t j = 1; j < left.size(); ++j) {
    out += right[j].right(left[j].left(rho, counter), counter);
    count_add(counter);
  }
  return out;
}

void make_operands(const std::vector<CMatrix>& ops, std::vector<Operand>& left,
                   std::vector<Operand>& right) {
  left.reserve(ops.size());
  right.reserve(ops.size());
  for (const CMatrix& m : ops) {
    left.emplace_back(m);
    right.emplace_back(m.adjoint());
  }
}

// M_0 = Id + dtG + dt²/2 G², M_j = √dt (Id + dt/2 G) L_j (Id + dt/2 G),
// M_ij = dt/√2 L_i L_j.
std::vector<CMatrix> second_order_ops(const LindbladModel& m, double dt) {
  const Eigen::Index n = m.dim();
  const CMatrix& g = m.effective_G();
  const CMatrix half_step = identity(n) + 0.5 * dt * g;
  std::vector<CMatrix> ops;
  const std::size_t nd = m.n_dissipators();
  ops.reserve(1 + nd + nd * nd);
  ops.push_back(identity(n) + dt * g + 0.5 * dt * dt * (g * g));
  for (const CMatrix& l : m.jumps()) {
    ops.push_back(std::sqrt(dt) * (half_step * l * half_step));
  }
  const double pair_scale = dt / std::sqrt(2.0);
  for (const CMatrix& li : m.jumps()) {
    for (const CMatrix& lj : m.jumps()) ops.push_back(pair_scale * (li * lj));
  }
  return ops;
}

}  // namespace

KrausChannel::KrausChannel(Scheme scheme, double dt, std::vector<CMatrix> raw)
    : dim_(raw.empty() ? 0 : raw.front().rows()), dt_(dt), scheme_(scheme) {
  if (raw.empty()) throw Error(ErrorCode::kBadConfig, "Kraus channel needs at least one operator");
  for (const CMatrix& m : raw) require_state_dim(dim_, m);
  gram_ = kraus_gram(raw);

  // M_j S^{-1/2} without forming S^{-1/2}: with A = [M_0; M_1; …] = QR and
  // the polar factor R = W P, P = S^{1/2}, we get M_j S^{-1/2} = Q_j W. The
  // stacked result has orthonormal columns to rounding, whereas the
  // eigendecomposition of S loses cond(S)·eps, which for the second-order
  // operators at large dt·‖G‖ exceeds 1e-8.
  const Eigen::Index n = dim_;
  const auto k = static_cast<Eigen::Index>(raw.size());
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic> stacked(k * n, n);
  for (Eigen::Index j = 0; j < k; ++j) stacked.middleRows(j * n, n) = raw[j];
  require_finite(CMatrix(stacked.topRows(n)), "Kraus operator");
  Eigen::HouseholderQR<decltype(stacked)> qr(stacked);
  const decltype(stacked) q_thin =
      qr.householderQ() * decltype(stacked)::Identity(k * n, n);
  const decltype(stacked) r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  Eigen::BDCSVD<decltype(stacked)> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& sigma = svd.singularValues();
  if (!(sigma(n - 1) > 1e-14 * sigma(0))) {
    throw Error(ErrorCode::kNotPositiveDefinite,
                "Kraus Gram matrix is singular (σ_min/σ_max = " +
                    std::to_string(sigma(n - 1) / sigma(0)) + ")");
  }
  const decltype(stacked) w = svd.matrixU() * svd.matrixV().adjoint();
  const decltype(stacked) normalized = q_thin * w;
  ops_.reserve(raw.size());
  for (Eigen::Index j = 0; j < k; ++j) ops_.emplace_back(normalized.middleRows(j * n, n));
  make_operands(ops_, left_, right_);
}

double KrausChannel::completeness_residual() const {
  return (kraus_gram(ops_) - identity(dim_)).norm();
}

CMatrix KrausChannel::apply(const CMatrix& rho, OpCounter* counter) const {
  require_state_dim(dim_, rho);
  return kraus_sum(left_, right_, rho, counter);
}

KrausFamily::KrausFamily(Scheme scheme, double dt, std::vector<CMatrix> ops)
    : dim_(ops.empty() ? 0 : ops.front().rows()), dt_(dt), scheme_(scheme), ops_(std::move(ops)) {
  if (ops_.empty()) throw Error(ErrorCode::kBadConfig, "Kraus family needs at least one operator");
  for (const CMatrix& m : ops_) require_state_dim(dim_, m);
  make_operands(ops_, left_, right_);
}

CMatrix KrausFamily::apply_unnormalized(const CMatrix& rho, OpCounter* counter) const {
  require_state_dim(dim_, rho);
  return kraus_sum(left_, right_, rho, counter);
}

KrausChannel build_qc1(const LindbladModel& m, double dt) {
  require_dt(dt);
  const Eigen::Index n = m.dim();
  const CMatrix& h = m.hamiltonian();
  const CMatrix& q = m.jump_gram();
  const cplx half_i(0.0, 0.5 * dt);
  // (Id − i dt/2 H)(Id + i dt/2 H)^{-1}; the two factors commute.
  const CMatrix cayley = solve_linear(identity(n) + half_i * h, identity(n) - half_i * h);
  std::vector<CMatrix> raw;
  raw.reserve(1 + m.n_dissipators());
  raw.push_back(cayley * (identity(n) - 0.5 * dt * q));
  for (const CMatrix& l : m.jumps()) raw.push_back(std::sqrt(dt) * l);

  KrausChannel ch(Scheme::kQC1, dt, std::move(raw));
  const CMatrix expected = identity(n) + 0.25 * dt * dt * (q * q);
  const double mismatch = (ch.gram() - expected).norm();
  if (mismatch > 1e-10 * std::max(1.0, expected.norm())) {
    throw Error(ErrorCode::kNotPositiveDefinite,
                "QC-1 Gram matrix deviates from Id + dt²Q²/4 by " + std::to_string(mismatch));
  }
  return ch;
}

KrausChannel build_qc2(const LindbladModel& m, double dt) {
  require_dt(dt);
  return KrausChannel(Scheme::kQC2, dt, second_order_ops(m, dt));
}

KrausFamily build_lucao(const LindbladModel& m, double dt, int order) {
  require_dt(dt);
  if (order == 1) {
    std::vector<CMatrix> ops;
    ops.reserve(1 + m.n_dissipators());
    ops.push_back(identity(m.dim()) + dt * m.effective_G());
    for (const CMatrix& l : m.jumps()) ops.push_back(std::sqrt(dt) * l);
    return KrausFamily(Scheme::kLuCao1, dt, std::move(ops));
  }
  if (order == 2) return KrausFamily(Scheme::kLuCao2, dt, second_order_ops(m, dt));
  throw Error(ErrorCode::kBadConfig, "Lu–Cao order must be 1 or 2");
}

CMatrix apply_kraus(const KrausChannel& ch, const CMatrix& rho, OpCounter* counter) {
  return ch.apply(rho, counter);
}

DensityMatrix apply_kraus(const KrausChannel& ch, const DensityMatrix& rho) {
  return DensityMatrix(symmetrize(ch.apply(rho.mat())));
}

CMatrix apply_lucao(const KrausFamily& f, const CMatrix& rho, OpCounter* counter) {
  CMatrix out = f.apply_unnormalized(rho, counter);
  const double tr = out.trace().real();
  if (!(tr > 1e-14)) {
    throw Error(ErrorCode::kDegenerateTrace, "unnormalized trace " + std::to_string(tr));
  }
  out /= tr;
  return out;
}

DensityMatrix apply_lucao(const KrausFamily& f, const DensityMatrix& rho) {
  CMatrix out = symmetrize(apply_lucao(f, rho.mat()));
  out /= out.trace().real();
  return DensityMatrix(std::move(out));
}

CMatrix step_euler(const LindbladModel& m, double dt, int order, const CMatrix& rho,
                   OpCounter* counter) {
  require_dt(dt);
  if (order != 1 && order != 2) throw Error(ErrorCode::kBadConfig, "Euler order must be 1 or 2");
  const CMatrix k1 = apply_lindbladian(m, rho, counter);
  if (order == 1) {
    count_add(counter);
    CMatrix out = rho + dt * k1;
    return out;
  }
  const CMatrix k2 = apply_lindbladian(m, k1, counter);
  count_add(counter, 2);
  CMatrix out = rho + dt * k1 + (0.5 * dt * dt) * k2;
  return out;
}

CMatrix step_rk4(const LindbladModel& m, double dt, const CMatrix& rho, OpCounter* counter) {
  require_dt(dt);
  const CMatrix k1 = apply_lindbladian(m, rho, counter);
  count_add(counter);
  const CMatrix k2 = apply_lindbladian(m, rho + (0.5 * dt) * k1, counter);
  count_add(counter);
  const CMatrix k3 = apply_lindbladian(m, rho + (0.5 * dt) * k2, counter);
  count_add(counter);
  const CMatrix stage4 = rho + dt * k3;
  // k4 is never materialized: its evaluation accumulates into the result.
  count_add(counter, 3);
  CMatrix out = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3);
  m.accumulate(stage4, dt / 6.0, out, counter);
  return out;
}

Stepper::Stepper(Scheme scheme, LindbladModel model, double dt)
    : scheme_(scheme), model_(std::move(model)), dt_(dt) {
  require_dt(dt);
  switch (scheme_) {
    case Scheme::kQC1: precomputed_ = build_qc1(model_, dt_); break;
    case Scheme::kQC2: precomputed_ = build_qc2(model_, dt_); break;
    case Scheme::kLuCao1: precomputed_ = build_lucao(model_, dt_, 1); break;
    case Scheme::kLuCao2: precomputed_ = build_lucao(model_, dt_, 2); break;
    default: break;
  }
}

CMatrix Stepper::step(const CMatrix& rho, OpCounter* counter) const {
  switch (scheme_) {
    case Scheme::kEuler1: return step_euler(model_, dt_, 1, rho, counter);
    case Scheme::kEuler2: return step_euler(model_, dt_, 2, rho, counter);
    case Scheme::kRK4: return step_rk4(model_, dt_, rho, counter);
    case Scheme::kQC1:
    case Scheme::kQC2: return std::get<KrausChannel>(precomputed_).apply(rho, counter);
    case Scheme::kLuCao1:
    case Scheme::kLuCao2: return apply_lucao(std::get<KrausFamily>(precomputed_), rho, counter);
  }
  return rho;
}

Trajectory integrate(const Stepper& s, const CMatrix& rho0, long n_steps, long record_every) {
  if (rho0.rows() != s.model().dim() || rho0.cols() != s.model().dim()) {
    throw Error(ErrorCode::kDimMismatch, "initial state does not match model dimension");
  }
  if (n_steps < 0 || record_every < 1) {
    throw Error(ErrorCode::kBadConfig, "n_steps must be >= 0 and record_every >= 1");
  }
  const auto start = std::chrono::steady_clock::now();
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(rho0);
  CMatrix rho = rho0;
  for (long k = 1; k <= n_steps; ++k) {
    try {
      rho = s.step(rho, nullptr);
    } catch (const Error& e) {
      // Lu–Cao normalization collapses when dt is far past stability.
      if (e.code() != ErrorCode::kDegenerateTrace) throw;
      traj.blowup_flag = true;
      break;
    }
    const double norm = rho.norm();
    if (!std::isfinite(norm) || norm > kBlowupNorm) {
      traj.blowup_flag = true;
      traj.times.push_back(grid_time(k, s.dt()));
      traj.states.push_back(rho);
      break;
    }
    if (k % record_every == 0 || k == n_steps) {
      traj.times.push_back(grid_time(k, s.dt()));
      traj.states.push_back(rho);
    }
  }
  traj.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

}  // namespace cptp
