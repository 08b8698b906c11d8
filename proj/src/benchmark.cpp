#include "cptp/benchmark.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "cptp/fock.hpp"

namespace cptp {

using nlohmann::json;

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::kCatPrep: return "cat_prep";
    case Experiment::kZGate: return "z_gate";
    case Experiment::kPhotonLossCfl: return "photon_loss_cfl";
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::kCatPrep, Experiment::kZGate, Experiment::kPhotonLossCfl}) {
    if (name == to_string(e)) return e;
  }
  return std::nullopt;
}

namespace {

std::string_view to_string(InitialState s) {
  switch (s) {
    case InitialState::kDefault: return "default";
    case InitialState::kVacuum: return "vacuum";
    case InitialState::kMaximallyMixed: return "maximally_mixed";
    case InitialState::kCatPlus: return "cat_plus";
  }
  return "default";
}

std::optional<InitialState> parse_initial_state(std::string_view name) {
  for (InitialState s : {InitialState::kDefault, InitialState::kVacuum,
                         InitialState::kMaximallyMixed, InitialState::kCatPlus}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorCode::kBadConfig, what); }

std::vector<Scheme> all_schemes() { return {std::begin(kAllSchemes), std::end(kAllSchemes)}; }

}  // namespace

BenchmarkConfig preset(Experiment e) {
  BenchmarkConfig cfg;
  cfg.experiment = e;
  switch (e) {
    case Experiment::kCatPrep:
    case Experiment::kZGate:
      cfg.dims = {32, 64, 128};
      cfg.schemes = all_schemes();
      break;
    case Experiment::kPhotonLossCfl:
      cfg.dims = {32, 64, 128};
      cfg.schemes = {Scheme::kEuler1, Scheme::kQC1};
      cfg.final_time = 1.0;
      break;
  }
  return cfg;
}

BenchmarkConfig parse_config(std::string_view json_text, BenchmarkConfig base) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    bad_config(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) bad_config("config must be a JSON object");

  static const std::set<std::string> known = {
      "experiment", "dims",  "schemes",       "dt_list", "dt_sweep", "T",     "alpha",
      "epsilon_z",  "kappa1", "kappa2",       "l",       "rho0",     "rtol",  "atol",
      "output_dir", "seed",  "threads"};
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) bad_config("unknown config key '" + item.key() + "'");
  }

  BenchmarkConfig cfg = std::move(base);
  try {
    if (doc.contains("experiment")) {
      const auto name = doc["experiment"].get<std::string>();
      const auto e = parse_experiment(name);
      if (!e) bad_config("unknown experiment '" + name + "'");
      if (*e != cfg.experiment) {
        // A different experiment starts from its own preset.
        cfg = preset(*e);
      }
    }
    if (doc.contains("dims")) cfg.dims = doc["dims"].get<std::vector<int>>();
    if (doc.contains("schemes")) {
      cfg.schemes.clear();
      for (const auto& name : doc["schemes"].get<std::vector<std::string>>()) {
        const auto s = parse_scheme(name);
        if (!s) bad_config("unknown scheme '" + name + "'");
        cfg.schemes.push_back(*s);
      }
    }
    if (doc.contains("dt_list")) cfg.dt_list = doc["dt_list"].get<std::vector<double>>();
    if (doc.contains("dt_sweep")) {
      const json& sweep = doc["dt_sweep"];
      if (sweep.contains("dt_max")) cfg.dt_max = sweep["dt_max"].get<double>();
      if (sweep.contains("dt_min")) cfg.dt_min = sweep["dt_min"].get<double>();
      if (sweep.contains("count")) cfg.dt_count = sweep["count"].get<int>();
    }
    if (doc.contains("T")) cfg.final_time = doc["T"].get<double>();
    if (doc.contains("alpha")) cfg.alpha = doc["alpha"].get<double>();
    if (doc.contains("epsilon_z")) cfg.epsilon_z = doc["epsilon_z"].get<double>();
    if (doc.contains("kappa1")) cfg.kappa1 = doc["kappa1"].get<double>();
    if (doc.contains("kappa2")) cfg.kappa2 = doc["kappa2"].get<double>();
    if (doc.contains("l")) cfg.photon_order = doc["l"].get<int>();
    if (doc.contains("rho0")) {
      const auto name = doc["rho0"].get<std::string>();
      const auto s = parse_initial_state(name);
      if (!s) bad_config("unknown rho0 '" + name + "'");
      cfg.initial_state = *s;
    }
    if (doc.contains("rtol")) cfg.rtol = doc["rtol"].get<double>();
    if (doc.contains("atol")) cfg.atol = doc["atol"].get<double>();
    if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<unsigned>();
    if (doc.contains("threads")) cfg.threads = doc["threads"].get<int>();
  } catch (const json::exception& e) {
    bad_config(std::string("config field has the wrong type: ") + e.what());
  }
  return cfg;
}

double final_time(const BenchmarkConfig& cfg) {
  if (cfg.final_time) return *cfg.final_time;
  switch (cfg.experiment) {
    case Experiment::kZGate: return std::numbers::pi / (4.0 * cfg.alpha * cfg.epsilon_z);
    case Experiment::kCatPrep:
    case Experiment::kPhotonLossCfl: return 1.0;
  }
  return 1.0;
}

std::vector<double> dt_sweep(const BenchmarkConfig& cfg) {
  if (!cfg.dt_list.empty()) return cfg.dt_list;
  const double T = final_time(cfg);
  return log_spaced(cfg.dt_max.value_or(T / 5.0), cfg.dt_min.value_or(T / 1e5), cfg.dt_count);
}

void validate(const BenchmarkConfig& cfg) {
  if (cfg.dims.empty()) bad_config("dims is empty");
  for (int d : cfg.dims) {
    if (d < 2) bad_config("every dim must be >= 2");
  }
  if (cfg.schemes.empty()) bad_config("scheme list is empty");
  if (cfg.dt_list.empty()) {
    const double T = final_time(cfg);
    const double hi = cfg.dt_max.value_or(T / 5.0), lo = cfg.dt_min.value_or(T / 1e5);
    if (!(hi > lo) || !(lo > 0)) bad_config("dt sweep needs dt_max > dt_min > 0");
    if (cfg.dt_count < 2) bad_config("dt sweep count must be >= 2");
  } else {
    for (double dt : cfg.dt_list) {
      if (!(dt > 0)) bad_config("dt_list entries must be positive");
    }
  }
  if (cfg.final_time && !(*cfg.final_time > 0)) bad_config("T must be positive");
  if (!(cfg.rtol > 0) || !(cfg.atol > 0)) bad_config("reference tolerances must be positive");
  if (cfg.kappa1 < 0 || cfg.kappa2 < 0) bad_config("dissipation rates must be non-negative");
  if (cfg.experiment == Experiment::kPhotonLossCfl) {
    for (int d : cfg.dims) {
      if (cfg.photon_order < 1 || cfg.photon_order >= d) bad_config("photon order l must satisfy 1 <= l < dim");
    }
  }
}

LindbladModel experiment_model(const BenchmarkConfig& cfg, int dim) {
  const FockDim n(dim);
  const cplx alpha_sq = cfg.alpha * cfg.alpha;
  switch (cfg.experiment) {
    case Experiment::kCatPrep:
      return build_model(zeros(n), {truncated_power_loss(n, 2, alpha_sq)});
    case Experiment::kZGate: {
      const CMatrix a = annihilation(n);
      const CMatrix h = cfg.epsilon_z * (a + a.adjoint());
      // κ D[L] = D[√κ L]
      return build_model(h, {std::sqrt(cfg.kappa2) * truncated_power_loss(n, 2, alpha_sq),
                             std::sqrt(cfg.kappa1) * a});
    }
    case Experiment::kPhotonLossCfl:
      return build_model(zeros(n), {truncated_power_loss(n, cfg.photon_order, 0.0)});
  }
  bad_config("unknown experiment");
}

ExperimentSetup build_experiment(const BenchmarkConfig& cfg, int dim) {
  validate(cfg);
  const FockDim n(dim);
  InitialState init = cfg.initial_state;
  if (init == InitialState::kDefault) {
    init = cfg.experiment == Experiment::kCatPrep   ? InitialState::kVacuum
           : cfg.experiment == Experiment::kZGate ? InitialState::kCatPlus
                                                  : InitialState::kMaximallyMixed;
  }
  CMatrix rho0;
  double leakage = 0.0;
  switch (init) {
    case InitialState::kVacuum: rho0 = fock_projector(n, 0); break;
    case InitialState::kMaximallyMixed: rho0 = DensityMatrix::maximally_mixed(n).mat(); break;
    case InitialState::kCatPlus:
    case InitialState::kDefault: {
      const StateVector cat = cat_state_plus(n, cfg.alpha);
      rho0 = projector(cat.amplitudes);
      leakage = cat.leakage;
      break;
    }
  }
  return {experiment_model(cfg, dim), std::move(rho0), final_time(cfg), leakage};
}

namespace {

std::string fmt17(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &utc);
  return buf;
}

json config_echo(const BenchmarkConfig& cfg) {
  json j;
  j["experiment"] = std::string(to_string(cfg.experiment));
  j["dims"] = cfg.dims;
  std::vector<std::string> names;
  for (Scheme s : cfg.schemes) names.emplace_back(to_string(s));
  j["schemes"] = names;
  j["dt_list"] = dt_sweep(cfg);
  j["T"] = final_time(cfg);
  j["alpha"] = cfg.alpha;
  j["epsilon_z"] = cfg.epsilon_z;
  j["kappa1"] = cfg.kappa1;
  j["kappa2"] = cfg.kappa2;
  j["l"] = cfg.photon_order;
  j["rho0"] = std::string(to_string(cfg.initial_state));
  j["rtol"] = cfg.rtol;
  j["atol"] = cfg.atol;
  j["output_dir"] = cfg.output_dir;
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace

std::string csv_row(Experiment e, const ErrorCurve& curve, const ErrorPoint& p) {
  std::string row;
  row += to_string(e);
  row += ',';
  row += to_string(curve.scheme);
  row += ',' + std::to_string(curve.dim);
  row += ',' + fmt17(p.dt);
  row += ',' + std::to_string(p.n_steps);
  row += ',' + fmt17(p.sup_error);
  row += ',' + fmt17(p.wall_time);
  row += p.blowup ? ",1" : ",0";
  return row;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg, std::ostream& log) {
  BenchmarkResult result;
  json meta;
  meta["library_version"] = std::string(kVersion);
  json per_dim = json::array();

  try {
    validate(cfg);
    meta["config"] = config_echo(cfg);
  } catch (const Error& e) {
    result.exit_code = 2;
    result.diagnostic = e.what();
    log << "error: " << e.what() << '\n';
    return result;
  }

  const double T = final_time(cfg);
  const std::vector<double> dts = dt_sweep(cfg);
  meta["reference"] = {{"method", "Dormand-Prince 5(4), step truncation at sample times"},
                       {"rtol", cfg.rtol},
                       {"atol", cfg.atol}};
  meta["sample_grid"] =
      "sup over the scheme grid: every step when n_steps <= 200, otherwise every "
      "ceil(n_steps/200)-th step plus the final step";

  try {
    for (int dim : cfg.dims) {
      const ExperimentSetup setup = build_experiment(cfg, dim);
      log << to_string(cfg.experiment) << " dim " << dim << ": reference solve\n";
      AdaptiveConfig ref_cfg;
      ref_cfg.rtol = cfg.rtol;
      ref_cfg.atol = cfg.atol;
      const Trajectory reference =
          solve_reference(setup.model, setup.rho0, reference_grid(T, dts), ref_cfg);
      per_dim.push_back({{"dim", dim},
                         {"initial_state_leakage", setup.leakage},
                         {"reference_samples", reference.times.size()},
                         {"reference_wall_time_s", reference.wall_time}});
      for (Scheme s : cfg.schemes) {
        log << "  " << to_string(s) << '\n';
        result.curves.push_back(error_curve(setup.model, s, setup.rho0, T, dts, reference,
                                            std::string(to_string(cfg.experiment)), cfg.threads));
      }
    }
  } catch (const Error& e) {
    result.exit_code = 1;
    result.diagnostic = e.what();
    log << "error: " << e.what() << '\n';
  }
  meta["per_dim"] = per_dim;
  if (!result.diagnostic.empty()) meta["error"] = result.diagnostic;

  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  const std::string stem = std::string(to_string(cfg.experiment)) + "_" + timestamp();
  const std::filesystem::path dir(cfg.output_dir);
  result.csv_path = (dir / (stem + ".csv")).string();
  result.meta_path = (dir / (stem + ".meta.json")).string();

  std::ofstream csv(result.csv_path);
  std::ofstream meta_file(result.meta_path);
  if (!csv || !meta_file) {
    result.exit_code = 3;
    result.diagnostic = "cannot write into " + cfg.output_dir;
    log << "error: " << result.diagnostic << '\n';
    return result;
  }
  csv << kCsvHeader << '\n';
  for (const ErrorCurve& curve : result.curves) {
    for (const ErrorPoint& p : curve.points) csv << csv_row(cfg.experiment, curve, p) << '\n';
  }
  meta_file << meta.dump(2) << '\n';
  log << "wrote " << result.csv_path << '\n';
  return result;
}

}  // namespace cptp
