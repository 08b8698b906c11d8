#include "cptp/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace cptp {

double coefficient_c(int l, long k) {
  double c = 1.0;
  for (int j = 0; j < l; ++j) c *= static_cast<double>(k - j);
  return k < l ? 0.0 : c;
}

double cfl_threshold(int l, long n) {
  if (l < 1 || n < l) {
    throw Error(ErrorCode::kBadConfig, "cfl_threshold needs 1 <= l <= n");
  }
  return 2.0 / coefficient_c(l, n);
}

long steps_for(double T, double dt) {
  if (!(T > 0) || !(dt > 0)) throw Error(ErrorCode::kBadConfig, "T and dt must be positive");
  return std::max(1L, std::lround(T / dt));
}

long record_stride(long n_steps) {
  constexpr long kMaxSamples = 200;
  if (n_steps <= kMaxSamples) return 1;
  return (n_steps + kMaxSamples - 1) / kMaxSamples;
}

std::vector<double> evaluation_times(double T, long n_steps) {
  const double dt = T / static_cast<double>(n_steps);
  const long stride = record_stride(n_steps);
  std::vector<double> times;
  for (long k = 0; k <= n_steps; k += stride) times.push_back(grid_time(k, dt));
  if (n_steps % stride != 0) times.push_back(grid_time(n_steps, dt));
  return times;
}

std::vector<double> reference_grid(double T, const std::vector<double>& dt_list) {
  std::vector<double> grid;
  for (double dt : dt_list) {
    const auto t = evaluation_times(T, steps_for(T, dt));
    grid.insert(grid.end(), t.begin(), t.end());
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<double> log_spaced(double dt_max, double dt_min, int count) {
  if (!(dt_max > dt_min) || !(dt_min > 0) || count < 2) {
    throw Error(ErrorCode::kBadConfig, "dt sweep needs dt_max > dt_min > 0 and count >= 2");
  }
  std::vector<double> out(count);
  const double lo = std::log(dt_min), hi = std::log(dt_max);
  for (int i = 0; i < count; ++i) {
    out[i] = std::exp(hi + (lo - hi) * static_cast<double>(i) / (count - 1));
  }
  return out;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

const CMatrix& reference_at(const Trajectory& ref, double t, double tol) {
  const auto it = std::lower_bound(ref.times.begin(), ref.times.end(), t - tol);
  if (it == ref.times.end() || std::abs(*it - t) > tol) {
    throw Error(ErrorCode::kGridMismatch, "reference has no sample at t = " + std::to_string(t));
  }
  return ref.states[static_cast<std::size_t>(it - ref.times.begin())];
}

ErrorPoint evaluate_point(const LindbladModel& m, Scheme scheme, const CMatrix& rho0, double T,
                          double dt_requested, const Trajectory& reference) {
  ErrorPoint p;
  p.n_steps = steps_for(T, dt_requested);
  p.dt = T / static_cast<double>(p.n_steps);
  const double tol = 1e-12 * std::max(1.0, T);

  // Fail fast on a grid that cannot serve this point.
  for (double t : evaluation_times(T, p.n_steps)) reference_at(reference, t, tol);

  const Stepper stepper(scheme, m, p.dt);
  const Trajectory run = integrate(stepper, rho0, p.n_steps, record_stride(p.n_steps));
  p.wall_time = run.wall_time;
  if (run.blowup_flag) {
    p.blowup = true;
    p.sup_error = std::numeric_limits<double>::infinity();
    return p;
  }
  double sup = 0.0;
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const CMatrix diff = run.states[i] - reference_at(reference, run.times[i], tol);
    sup = std::max(sup, trace_norm(diff));
  }
  p.sup_error = sup;
  return p;
}

}  // namespace

ErrorCurve error_curve(const LindbladModel& m, Scheme scheme, const CMatrix& rho0, double T,
                       const std::vector<double>& dt_list, const Trajectory& reference,
                       std::string model_id, int threads) {
  ErrorCurve curve;
  curve.scheme = scheme;
  curve.dim = static_cast<long>(m.dim());
  curve.model_id = std::move(model_id);
  curve.points.resize(dt_list.size());
  parallel_for(dt_list.size(), threads, [&](std::size_t i) {
    curve.points[i] = evaluate_point(m, scheme, rho0, T, dt_list[i], reference);
  });
  std::stable_sort(curve.points.begin(), curve.points.end(),
                   [](const ErrorPoint& a, const ErrorPoint& b) { return a.dt > b.dt; });
  return curve;
}

double estimate_order(const ErrorCurve& curve, double err_lo, double err_hi) {
  std::vector<double> xs, ys;
  for (const ErrorPoint& p : curve.points) {
    if (p.blowup || !std::isfinite(p.sup_error) || p.sup_error < err_lo || p.sup_error > err_hi) {
      continue;
    }
    xs.push_back(std::log(p.dt));
    ys.push_back(std::log(p.sup_error));
  }
  if (xs.size() < 4) {
    throw Error(ErrorCode::kInsufficientPoints,
                std::to_string(xs.size()) + " points inside the error window, need 4");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

OpCount opcount(Scheme scheme, int n_dissipators) {
  const std::int64_t nd = n_dissipators;
  switch (scheme) {
    case Scheme::kEuler1: return {2 * nd + 2, nd + 3};
    case Scheme::kEuler2: return {4 * nd + 4, 2 * nd + 6};
    case Scheme::kLuCao1:
    case Scheme::kQC1: return {2 * nd + 2, nd};
    case Scheme::kLuCao2:
    case Scheme::kQC2: return {2 * nd * nd + 2 * nd + 2, 2 * nd * nd + 2 * nd};
    case Scheme::kRK4: return {8 * nd + 8, 4 * nd + 14};
  }
  return {};
}

}  // namespace cptp
