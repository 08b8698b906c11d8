#pragma once

#include <vector>

#include "cptp/matcore.hpp"

namespace cptp {

/// Time-stamped states from a stepper or the reference solver. States are
/// plain matrices: explicit schemes may leave the set of density matrices.
struct Trajectory {
  std::vector<double> times;
  std::vector<CMatrix> states;
  bool blowup_flag = false;
  double wall_time = 0.0;
};

/// Time of step k on a uniform grid of spacing dt. Shared by the steppers and
/// the reference sampler so that both produce bit-identical sample times.
inline double grid_time(long k, double dt) { return static_cast<double>(k) * dt; }

}  // namespace cptp
