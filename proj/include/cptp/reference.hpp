#pragma once

#include <vector>

#include "cptp/lindblad.hpp"
#include "cptp/trajectory.hpp"

namespace cptp {

struct AdaptiveConfig {
  double rtol = 1e-12;
  double atol = 1e-12;
  double dt_init = 1e-4;
  double dt_min = 1e-14;
  double safety = 0.9;
  long max_steps = 50'000'000;
};

/// Integrates ρ' = L(ρ) with the embedded Dormand–Prince 5(4) pair and emits
/// the state at exactly each of sample_times (ascending, first ≥ 0).
///
/// Error control: err = max_entries |y5 − y4| / (atol + rtol·max(|y_n|, |y_{n+1}|));
/// a step is accepted when err ≤ 1 and the next step is scaled by
/// safety·err^{-1/5} clamped to [0.2, 5]. Steps are shortened to land on
/// sample times rather than interpolated. Emitted states are symmetrized and
/// their trace must stay within 1e-10 of the initial trace.
Trajectory solve_reference(const LindbladModel& m, const CMatrix& rho0,
                           const std::vector<double>& sample_times,
                           const AdaptiveConfig& cfg = {});

}  // namespace cptp
