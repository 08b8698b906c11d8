// Benchmark runner: reference solve per dimension, then error curves for each
// scheme over a dt sweep. Results go to <experiment>_<timestamp>.csv.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include "cptp/benchmark.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int env_threads() {
  const char* v = std::getenv("BENCH_THREADS");
  if (!v || !*v) return 1;
  const int n = std::atoi(v);
  if (n <= 0) return std::max(1u, std::thread::hardware_concurrency());
  return n;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef __GLIBC__
  // Dense states above ~100x100 exceed the default mmap threshold, so each
  // temporary would be mapped and unmapped. Keep them on the heap.
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
  CLI::App app{"CPTP Lindblad scheme benchmark"};
  std::string config_path, experiment, out_dir, dims, schemes;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--experiment", experiment, "preset: cat_prep, z_gate, photon_loss_cfl");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--dims", dims, "comma-separated Hilbert space dimensions");
  app.add_option("--schemes", schemes, "comma-separated scheme names");
  app.set_version_flag("--version", std::string(cptp::kVersion));
  CLI11_PARSE(app, argc, argv);

  if (config_path.empty() && experiment.empty()) {
    std::cerr << "error: need --config or --experiment\n";
    return 2;
  }

  try {
    cptp::BenchmarkConfig cfg = cptp::preset(cptp::Experiment::kCatPrep);
    if (!experiment.empty()) {
      const auto e = cptp::parse_experiment(experiment);
      if (!e) throw cptp::Error(cptp::ErrorCode::kBadConfig, "unknown experiment '" + experiment + "'");
      cfg = cptp::preset(*e);
    }
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw cptp::Error(cptp::ErrorCode::kBadConfig, "cannot read " + config_path);
      std::stringstream buf;
      buf << in.rdbuf();
      cfg = cptp::parse_config(buf.str(), cfg);
    }
    if (!experiment.empty() && cptp::to_string(cfg.experiment) != experiment) {
      throw cptp::Error(cptp::ErrorCode::kBadConfig,
                        "--experiment disagrees with the experiment in " + config_path);
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!dims.empty()) {
      cfg.dims.clear();
      for (const auto& d : split_csv(dims)) cfg.dims.push_back(std::stoi(d));
    }
    if (!schemes.empty()) {
      cfg.schemes.clear();
      for (const auto& name : split_csv(schemes)) {
        const auto s = cptp::parse_scheme(name);
        if (!s) throw cptp::Error(cptp::ErrorCode::kBadConfig, "unknown scheme '" + name + "'");
        cfg.schemes.push_back(*s);
      }
    }
    cfg.threads = env_threads();
    return cptp::run_benchmark(cfg, std::cerr).exit_code;
  } catch (const cptp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument&) {
    std::cerr << "error: --dims expects integers\n";
    return 2;
  }
}
