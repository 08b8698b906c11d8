#include "cptp/reference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace cptp {

namespace {

// Dormand & Prince (1980) RK5(4)7M tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
// 5th-order weights (also row 7 of A: FSAL).
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b − b̂ (difference to the embedded 4th-order weights).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

void validate(const AdaptiveConfig& cfg) {
  if (!(cfg.rtol > 0) || !(cfg.atol > 0) || !(cfg.dt_min > 0) || !(cfg.dt_init > 0) ||
      !(cfg.safety > 0 && cfg.safety < 1) || cfg.max_steps < 1) {
    throw Error(ErrorCode::kBadConfig, "invalid adaptive solver configuration");
  }
}

double error_norm(const CMatrix& delta, const CMatrix& y0, const CMatrix& y1,
                  const AdaptiveConfig& cfg) {
  const auto scale = cfg.atol + cfg.rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array();
  return (delta.cwiseAbs().array() / scale).maxCoeff();
}

}  // namespace

Trajectory solve_reference(const LindbladModel& m, const CMatrix& rho0,
                           const std::vector<double>& sample_times, const AdaptiveConfig& cfg) {
  validate(cfg);
  if (rho0.rows() != m.dim() || rho0.cols() != m.dim()) {
    throw Error(ErrorCode::kDimMismatch, "initial state does not match model dimension");
  }
  if (!sample_times.empty() && sample_times.front() < 0.0) {
    throw Error(ErrorCode::kBadConfig, "sample times must be non-negative");
  }
  if (!std::is_sorted(sample_times.begin(), sample_times.end()) ||
      std::adjacent_find(sample_times.begin(), sample_times.end()) != sample_times.end()) {
    throw Error(ErrorCode::kBadConfig, "sample times must be strictly ascending");
  }

  const auto start = std::chrono::steady_clock::now();
  const double trace0 = rho0.trace().real();
  Trajectory traj;
  traj.times.reserve(sample_times.size());
  traj.states.reserve(sample_times.size());

  auto emit = [&](double t, const CMatrix& y) {
    CMatrix out = symmetrize(y);
    const double drift = std::abs(out.trace().real() - trace0);
    if (drift > 1e-10) {
      throw Error(ErrorCode::kTraceDrift,
                  "reference trace drifted by " + std::to_string(drift) + " at t = " + std::to_string(t));
    }
    traj.times.push_back(t);
    traj.states.push_back(std::move(out));
  };

  CMatrix y = rho0;
  double t = 0.0;
  double h = cfg.dt_init;
  long attempts = 0;
  CMatrix k1 = apply_lindbladian(m, y);
  CMatrix k2, k3, k4, k5, k6, k7;

  for (double target : sample_times) {
    while (t < target) {
      if (++attempts > cfg.max_steps) {
        throw Error(ErrorCode::kMaxStepsExceeded, "after " + std::to_string(cfg.max_steps) + " steps");
      }
      if (h < cfg.dt_min) {
        throw Error(ErrorCode::kStepUnderflow, "step " + std::to_string(h) + " at t = " + std::to_string(t));
      }
      const bool truncated = t + h >= target;
      const double step = truncated ? target - t : h;

      k2 = apply_lindbladian(m, y + step * (a21 * k1));
      k3 = apply_lindbladian(m, y + step * (a31 * k1 + a32 * k2));
      k4 = apply_lindbladian(m, y + step * (a41 * k1 + a42 * k2 + a43 * k3));
      k5 = apply_lindbladian(m, y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      k6 = apply_lindbladian(m, y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      CMatrix y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = apply_lindbladian(m, y_new);
      const CMatrix delta = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err = error_norm(delta, y, y_new, cfg);
      if (!std::isfinite(err)) err = 1e10;
      const double factor =
          err == 0.0 ? 5.0 : std::clamp(cfg.safety * std::pow(err, -0.2), 0.2, 5.0);

      if (err <= 1.0) {
        t = truncated ? target : t + step;
        y = std::move(y_new);
        k1 = std::move(k7);
        // A shortened landing step says nothing about the natural step size.
        h = truncated ? std::max(h, factor * step) : factor * step;
      } else {
        h = std::min(h, step) * std::min(1.0, factor);
      }
    }
    emit(target, y);
  }

  traj.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

}  // namespace cptp
