#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cftplab/models.hpp"

namespace cftplab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string experiment = "sample";
  std::string model = "rc";
  std::string p = "1/2";      // fraction or integer → exact arithmetic; decimal → float
  std::string q = "2";
  std::string beta;           // decimal (float path)
  std::string e2beta;         // exp(2*beta) as fraction/integer → exact path
  double alpha = 2.0;
  int trunc = 2;
  std::vector<int> extent = {8, 8};
  std::string order = "real";  // real | digits
  int digit_base = 0;          // 0 = 3*maxdeg^2+1
  bool alphabet = false;       // snap update reals to the finite alphabet
  std::uint64_t seed = 1;
  std::int64_t replicas = 1000;
  std::int64_t horizon_cap = std::int64_t{1} << 20;
  int radius_cap = -1;
  int r_max = 5;
  int n_max = 8;
  std::string mode = "plus";   // sample experiment boundary mode
  int site = -1;               // -1 = deepest interior site
  int colors = 2;              // potts
  int boundary_color = 1;      // potts; 0 = free boundary
  std::string sampler = "cftp";  // potts: cftp | oracle
  std::string out = "out";
  int workers = 1;
};

// Plain-text key=value lines; '#' starts a comment; unknown keys rejected.
RunConfig parse_config_file(const std::string& path);
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

struct BuiltModel {
  std::shared_ptr<const SiteGraph> graph;         // the graph the spins live on
  std::shared_ptr<const SiteGraph> base;          // underlying box for edge models
  std::unique_ptr<Specification> spec;
};

BuiltModel build_model(const RunConfig& cfg);

struct RunResult {
  int exit_code = 0;          // 0 ok, 1 cap/unresolved, 2 config error
  std::string csv_path;
  std::string json_path;
  std::string summary;        // one-line human summary
};

RunResult run_experiment(const RunConfig& cfg);

// Replica fan-out: calls fn(k) for k in [0, n) across `workers` threads.
// Any exception is rethrown on the calling thread after all workers join.
void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& fn);

std::uint64_t default_master_seed();  // CFTP_LAB_SEED env var, else 1

}  // namespace cftplab
