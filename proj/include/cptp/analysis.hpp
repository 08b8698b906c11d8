#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cptp/lindblad.hpp"
#include "cptp/schemes.hpp"
#include "cptp/trajectory.hpp"

namespace cptp {

/// c_k = Π_{j=0}^{l−1} (k − j): eigenvalue of (a^l)†a^l on |k⟩.
double coefficient_c(int l, long k);

/// 2/c_n: largest stable explicit-Euler step for l-photon loss truncated at
/// Fock index n (dimension n + 1). Requires n ≥ l.
double cfl_threshold(int l, long n);

struct ErrorPoint {
  double dt = 0.0;
  long n_steps = 0;
  double sup_error = 0.0;  // +inf when blowup
  double wall_time = 0.0;
  bool blowup = false;
};

struct ErrorCurve {
  Scheme scheme = Scheme::kQC1;
  long dim = 0;
  std::string model_id;
  std::vector<ErrorPoint> points;  // dt descending
};

/// round(T/dt), at least 1.
long steps_for(double T, double dt);

/// Recording stride: every step up to 200 steps, otherwise ~200 samples.
long record_stride(long n_steps);

/// Times at which a run of n_steps over [0, T] is compared to the reference.
std::vector<double> evaluation_times(double T, long n_steps);

/// Sorted union of evaluation_times over every dt in the list; the grid the
/// reference must be sampled on for error_curve.
std::vector<double> reference_grid(double T, const std::vector<double>& dt_list);

/// count values log-uniformly spaced from dt_max down to dt_min.
std::vector<double> log_spaced(double dt_max, double dt_min, int count);

/// For each dt: snap to T/n_steps, integrate, and record the supremum over the
/// evaluation times of ‖ρ_scheme − ρ_ref‖₁. Diverging runs get +inf and the
/// blowup flag. Points are independent; threads > 1 evaluates them
/// concurrently.
ErrorCurve error_curve(const LindbladModel& m, Scheme scheme, const CMatrix& rho0, double T,
                       const std::vector<double>& dt_list, const Trajectory& reference,
                       std::string model_id = {}, int threads = 1);

/// Least-squares slope of log(sup_error) against log(dt) over points with
/// err_lo ≤ sup_error ≤ err_hi. Needs at least 4 such points.
double estimate_order(const ErrorCurve& curve, double err_lo = 1e-8, double err_hi = 1e-2);

struct OpCount {
  std::int64_t matrix_mults = 0;
  std::int64_t matrix_adds = 0;
  bool operator==(const OpCount&) const = default;
};

/// Per-step matrix products and additions of each scheme as a function of
/// the number of dissipators.
OpCount opcount(Scheme scheme, int n_dissipators);

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace cptp
