#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cptp/analysis.hpp"
#include "cptp/lindblad.hpp"
#include "cptp/reference.hpp"
#include "cptp/schemes.hpp"

namespace cptp {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Experiment { kCatPrep, kZGate, kPhotonLossCfl };

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

enum class InitialState { kDefault, kVacuum, kMaximallyMixed, kCatPlus };

struct BenchmarkConfig {
  Experiment experiment = Experiment::kCatPrep;
  std::vector<int> dims;
  std::vector<Scheme> schemes;

  // Sweep: an explicit list wins over (dt_max, dt_min, count). Unset bounds
  // default to [T/5, T/100000] with 40 points.
  std::vector<double> dt_list;
  std::optional<double> dt_max;
  std::optional<double> dt_min;
  int dt_count = 40;

  std::optional<double> final_time;
  double alpha = 2.0;
  double epsilon_z = 0.2;
  double kappa1 = 0.01;
  double kappa2 = 1.0;
  int photon_order = 2;
  InitialState initial_state = InitialState::kDefault;

  double rtol = 1e-12;
  double atol = 1e-12;
  std::string output_dir = ".";
  unsigned seed = 0;
  int threads = 1;
};

/// Defaults reproducing the cat-qubit figures and the CFL demonstration.
BenchmarkConfig preset(Experiment e);

/// Reads the JSON document on top of `base` (fields absent from the
/// document keep their base value). Throws kBadConfig on malformed input.
BenchmarkConfig parse_config(std::string_view json_text, BenchmarkConfig base);

/// Throws kBadConfig when a field is out of range.
void validate(const BenchmarkConfig& cfg);

double final_time(const BenchmarkConfig& cfg);
std::vector<double> dt_sweep(const BenchmarkConfig& cfg);

LindbladModel experiment_model(const BenchmarkConfig& cfg, int dim);

struct ExperimentSetup {
  LindbladModel model;
  CMatrix rho0;
  double final_time;
  double leakage;  // truncation leakage of the initial state
};

ExperimentSetup build_experiment(const BenchmarkConfig& cfg, int dim);

struct BenchmarkResult {
  int exit_code = 0;
  std::string csv_path;
  std::string meta_path;
  std::vector<ErrorCurve> curves;
  std::string diagnostic;
};

inline constexpr std::string_view kCsvHeader =
    "experiment,scheme,dim,dt,n_steps,sup_error,wall_time_s,blowup";

/// One CSV line (no newline) for a point, floats with 17 significant digits.
std::string csv_row(Experiment e, const ErrorCurve& curve, const ErrorPoint& p);

/// For each dim: one reference solve, then every (scheme, dt) cell. Writes
/// <experiment>_<timestamp>.csv and .meta.json into cfg.output_dir, also when
/// a module error cuts the run short.
BenchmarkResult run_benchmark(const BenchmarkConfig& cfg, std::ostream& log);

}  // namespace cptp
