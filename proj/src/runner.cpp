#include "cftplab/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "cftplab/engine.hpp"
#include "cftplab/es.hpp"
#include "cftplab/oracle.hpp"
#include "cftplab/stats.hpp"

namespace cftplab {

namespace {

constexpr const char* kVersion = "cftp-lab 0.1.0";
constexpr int kCensored = std::numeric_limits<int>::max();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<Rat> parse_rat(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto slash = s.find('/');
  const std::string num = slash == std::string::npos ? s : s.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  for (const std::string* part : {&num, &den}) {
    if (part->empty()) return std::nullopt;
    for (char c : *part)
      if (c < '0' || c > '9') return std::nullopt;
  }
  try {
    return Rat(std::stoll(num), std::stoll(den));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + s + "'");
  }
}

std::int64_t parse_int(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for " + key + ": '" + s + "'");
  }
}

std::vector<int> parse_extent(const std::string& s) {
  std::vector<int> out;
  std::string cur;
  for (char c : s + "x") {
    if (c == 'x' || c == 'X' || c == ',') {
      if (!cur.empty()) {
        out.push_back(static_cast<int>(parse_int(cur, "extent")));
        cur.clear();
      }
    } else {
      cur += c;
    }
  }
  if (out.empty()) throw ConfigError("empty extent");
  for (int e : out)
    if (e < 1) throw ConfigError("extent entries must be positive");
  return out;
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigError("bad boolean value for " + key + ": '" + s + "'");
}

BoundaryMode parse_mode(const std::string& s) {
  if (s == "plus" || s == "wired") return BoundaryMode::Plus;
  if (s == "minus" || s == "free") return BoundaryMode::Minus;
  throw ConfigError("bad mode '" + s + "' (want plus|minus)");
}

OrderKind parse_order(const std::string& s) {
  if (s == "real") return OrderKind::Real;
  if (s == "digits") return OrderKind::Digits;
  throw ConfigError("bad order '" + s + "' (want real|digits)");
}

DynamicsOptions dynamics_options(const RunConfig& cfg) {
  DynamicsOptions opt;
  opt.order = parse_order(cfg.order);
  opt.digit_base = cfg.digit_base;
  opt.snap_to_alphabet = cfg.alphabet;
  opt.horizon_cap = cfg.horizon_cap;
  opt.radius_cap = cfg.radius_cap;
  opt.time_cap = cfg.n_max;
  return opt;
}

std::string spins_field(const Config& cfg, const std::vector<SiteId>& sites) {
  std::string out;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (i > 0) out += ';';
    out += std::to_string(static_cast<int>(cfg[sites[i]]));
  }
  return out;
}

}  // namespace

std::uint64_t default_master_seed() {
  const char* env = std::getenv("CFTP_LAB_SEED");
  if (env == nullptr || *env == '\0') return 1;
  try {
    return static_cast<std::uint64_t>(std::stoull(env));
  } catch (const std::exception&) {
    throw ConfigError(std::string("bad CFTP_LAB_SEED value: '") + env + "'");
  }
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "experiment") cfg.experiment = value;
  else if (key == "model") cfg.model = value;
  else if (key == "p") cfg.p = value;
  else if (key == "q") cfg.q = value;
  else if (key == "beta") cfg.beta = value;
  else if (key == "e2beta") cfg.e2beta = value;
  else if (key == "alpha") cfg.alpha = parse_double(value, key);
  else if (key == "trunc") cfg.trunc = static_cast<int>(parse_int(value, key));
  else if (key == "extent") cfg.extent = parse_extent(value);
  else if (key == "order") cfg.order = value;
  else if (key == "D" || key == "digit_base") cfg.digit_base = static_cast<int>(parse_int(value, key));
  else if (key == "alphabet") cfg.alphabet = parse_bool(value, key);
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(value, key));
  else if (key == "replicas") cfg.replicas = parse_int(value, key);
  else if (key == "horizon_cap") cfg.horizon_cap = parse_int(value, key);
  else if (key == "radius_cap") cfg.radius_cap = static_cast<int>(parse_int(value, key));
  else if (key == "r_max") cfg.r_max = static_cast<int>(parse_int(value, key));
  else if (key == "n_max") cfg.n_max = static_cast<int>(parse_int(value, key));
  else if (key == "mode") cfg.mode = value;
  else if (key == "site") cfg.site = static_cast<int>(parse_int(value, key));
  else if (key == "colors") cfg.colors = static_cast<int>(parse_int(value, key));
  else if (key == "boundary_color") cfg.boundary_color = static_cast<int>(parse_int(value, key));
  else if (key == "sampler") cfg.sampler = value;
  else if (key == "out") cfg.out = value;
  else if (key == "workers") cfg.workers = static_cast<int>(parse_int(value, key));
  else throw ConfigError("unknown config key: '" + key + "'");
}

RunConfig parse_config_file(const std::string& path) {
  RunConfig cfg;
  cfg.seed = default_master_seed();
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

BuiltModel build_model(const RunConfig& cfg) {
  BuiltModel m;
  auto box = std::make_shared<SiteGraph>(build_grid(cfg.extent));
  m.base = box;
  if (cfg.model == "rc") {
    auto lg = std::make_shared<SiteGraph>(line_graph(*box));
    m.graph = lg;
    const auto pr = parse_rat(cfg.p);
    const auto qr = parse_rat(cfg.q);
    try {
      if (pr.has_value() && qr.has_value())
        m.spec = std::make_unique<RandomClusterModel>(lg, *pr, *qr);
      else
        m.spec = std::make_unique<RandomClusterModel>(lg, parse_double(cfg.p, "p"),
                                                      parse_double(cfg.q, "q"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (cfg.model == "ising") {
    m.graph = box;
    try {
      if (!cfg.e2beta.empty()) {
        const auto er = parse_rat(cfg.e2beta);
        if (!er.has_value()) throw ConfigError("e2beta must be an integer or fraction");
        m.spec = std::make_unique<IsingModel>(box, *er);
      } else if (!cfg.beta.empty()) {
        m.spec = std::make_unique<IsingModel>(box, parse_double(cfg.beta, "beta"));
      } else {
        throw ConfigError("ising needs beta or e2beta");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (cfg.model == "lrising") {
    m.graph = box;
    if (cfg.beta.empty()) throw ConfigError("lrising needs beta");
    try {
      m.spec = std::make_unique<LongRangeIsingModel>(box, parse_double(cfg.beta, "beta"),
                                                     cfg.alpha, cfg.trunc);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else {
    throw ConfigError("unknown model '" + cfg.model + "'");
  }
  return m;
}

void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::int64_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;
  auto work = [&]() {
    for (;;) {
      const std::int64_t k = next.fetch_add(1);
      if (k >= n) return;
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = static_cast<int>(std::min<std::int64_t>(workers, n));
  pool.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

struct ExperimentOutput {
  std::string csv;
  nlohmann::json extras;
  bool capped = false;
  std::string summary;
};

nlohmann::json counters_json(const std::vector<EngineCounters>& per_replica) {
  EngineCounters total;
  for (const auto& c : per_replica) {
    total.sweeps += c.sweeps;
    total.site_updates += c.site_updates;
    total.tie_events += c.tie_events;
    total.horizon_retries += c.horizon_retries;
  }
  return {{"sweeps", total.sweeps},
          {"site_updates", total.site_updates},
          {"tie_events", total.tie_events},
          {"horizon_retries", total.horizon_retries}};
}

void survival_rows(CsvWriter& csv, const SurvivalCurve& curve,
                   const std::vector<std::string>* extra_col = nullptr) {
  for (std::size_t i = 0; i < curve.rows.size(); ++i) {
    const auto& r = curve.rows[i];
    std::vector<std::string> fields = {
        std::to_string(r.abscissa),     std::to_string(r.trials),
        std::to_string(r.exceedances),  format_double(r.survival),
        format_double(r.std_error)};
    if (extra_col != nullptr) fields.push_back((*extra_col)[i]);
    csv.row(fields);
  }
}

nlohmann::json fit_json(const TailFit& fit) {
  return {{"ok", fit.ok},
          {"rate", fit.rate},
          {"intercept", fit.intercept},
          {"r2", fit.r2},
          {"points", fit.points},
          {"note", fit.note}};
}

ExperimentOutput run_sample(const RunConfig& cfg) {
  const BuiltModel m = build_model(cfg);
  const BoundaryMode mode = parse_mode(cfg.mode);
  const Window w = whole_graph_window(*m.graph, mode);
  const DynamicsOptions opt = dynamics_options(cfg);

  struct Row {
    std::int64_t horizon = -1;
    std::string spins;
  };
  std::vector<Row> rows(static_cast<std::size_t>(cfg.replicas));
  std::vector<EngineCounters> counters(static_cast<std::size_t>(cfg.replicas));
  parallel_for(cfg.replicas, cfg.workers, [&](std::int64_t k) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(k));
    ShellCache shells(*m.graph);
    WindowDynamics dyn(*m.spec, w, rng, opt, &shells, &counters[k]);
    std::int64_t horizon = -1;
    const auto sample = dyn.sample(&horizon);
    if (sample.has_value()) {
      rows[k].horizon = horizon;
      rows[k].spins = spins_field(*sample, w.interior);
    }
  });

  ExperimentOutput out;
  CsvWriter csv({"replica", "horizon", "spins"});
  std::int64_t unresolved = 0;
  for (std::int64_t k = 0; k < cfg.replicas; ++k) {
    unresolved += (rows[k].horizon < 0);
    csv.row({std::to_string(k), std::to_string(rows[k].horizon), rows[k].spins});
  }
  out.csv = csv.str();
  out.capped = unresolved > 0;
  out.extras = {{"counters", counters_json(counters)},
                {"unresolved", unresolved},
                {"window_sites", w.interior.size()},
                {"mode", to_string(mode)}};
  out.summary = std::to_string(cfg.replicas - unresolved) + "/" +
                std::to_string(cfg.replicas) + " draws coalesced";
  return out;
}

ExperimentOutput run_radius(const RunConfig& cfg) {
  const BuiltModel m = build_model(cfg);
  const SiteId v = cfg.site >= 0 ? cfg.site : deep_interior_site(*m.graph);
  if (v < 0 || v >= m.graph->size()) throw ConfigError("site out of range");
  const DynamicsOptions opt = dynamics_options(cfg);

  std::vector<int> values(static_cast<std::size_t>(cfg.replicas), kCensored);
  std::vector<EngineCounters> counters(static_cast<std::size_t>(cfg.replicas));
  std::atomic<std::int64_t> exhausted{0};
  parallel_for(cfg.replicas, cfg.workers, [&](std::int64_t k) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(k));
    const RadiusScan scan = coding_radius(*m.spec, v, rng, opt, &counters[k]);
    if (scan.resolved) values[k] = scan.radius;
    if (scan.cftp_exhausted) exhausted.fetch_add(1);
  });

  const SurvivalCurve curve = survival_from_values(values, cfg.r_max);

  // Exact one-sided window marginals, where small enough to enumerate.
  std::vector<std::string> bound_col(curve.rows.size(), "");
  const int spin_slack = m.spec->spins().size() - 1;
  for (int r = 0; r <= cfg.r_max; ++r) {
    try {
      const Window wp = ball(*m.graph, v, r, BoundaryMode::Plus);
      const Window wm = ball(*m.graph, v, r, BoundaryMode::Minus);
      const ExactDistribution dp = enumerate_gibbs(*m.spec, wp);
      const ExactDistribution dm = enumerate_gibbs(*m.spec, wm);
      bound_col[static_cast<std::size_t>(r)] =
          format_double(spin_slack * marginal_tv(dp, dm, v));
    } catch (const std::domain_error&) {
      break;  // windows only grow; nothing larger is enumerable either
    }
  }

  ExperimentOutput out;
  CsvWriter csv({"r", "trials", "exceedances", "survival", "stderr", "oracle_tv_bound"});
  survival_rows(csv, curve, &bound_col);
  out.csv = csv.str();
  const std::int64_t censored =
      static_cast<std::int64_t>(std::count(values.begin(), values.end(), kCensored));
  out.capped = censored > 0;
  out.extras = {{"counters", counters_json(counters)},
                {"site", v},
                {"censored", censored},
                {"cftp_exhausted", exhausted.load()},
                {"fit", fit_json(fit_tail(curve))}};
  out.summary = "coding radius over " + std::to_string(cfg.replicas) + " replicas, " +
                std::to_string(censored) + " censored";
  return out;
}

ExperimentOutput run_diagonal(const RunConfig& cfg) {
  const BuiltModel m = build_model(cfg);
  const SiteId v = cfg.site >= 0 ? cfg.site : deep_interior_site(*m.graph);
  if (v < 0 || v >= m.graph->size()) throw ConfigError("site out of range");
  const DynamicsOptions opt = dynamics_options(cfg);

  std::vector<int> values(static_cast<std::size_t>(cfg.replicas), kCensored);
  std::vector<Spin> agreed(static_cast<std::size_t>(cfg.replicas), 0);
  std::vector<EngineCounters> counters(static_cast<std::size_t>(cfg.replicas));
  parallel_for(cfg.replicas, cfg.workers, [&](std::int64_t k) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(k));
    const DiagonalScan scan = diagonal_agreement_time(*m.spec, v, rng, opt, &counters[k]);
    if (scan.resolved) {
      values[k] = scan.time;
      agreed[k] = scan.value;
    }
  });

  const SurvivalCurve curve = survival_from_values(values, cfg.n_max);
  ExperimentOutput out;
  CsvWriter csv({"n", "trials", "exceedances", "survival", "stderr"});
  survival_rows(csv, curve);
  out.csv = csv.str();
  const std::int64_t censored =
      static_cast<std::int64_t>(std::count(values.begin(), values.end(), kCensored));
  nlohmann::json hist = nlohmann::json::object();
  for (std::int64_t k = 0; k < cfg.replicas; ++k) {
    if (values[k] != kCensored) {
      const std::string key = std::to_string(static_cast<int>(agreed[k]));
      hist[key] = hist.value(key, 0) + 1;
    }
  }
  out.capped = censored > 0;
  out.extras = {{"counters", counters_json(counters)},
                {"site", v},
                {"censored", censored},
                {"agreed_spin_counts", hist},
                {"fit", fit_json(fit_tail(curve))}};
  out.summary = "diagonal agreement time over " + std::to_string(cfg.replicas) +
                " replicas, " + std::to_string(censored) + " censored";
  return out;
}

ExperimentOutput run_spacetime(const RunConfig& cfg) {
  const BuiltModel m = build_model(cfg);
  const SiteId v = cfg.site >= 0 ? cfg.site : deep_interior_site(*m.graph);
  if (v < 0 || v >= m.graph->size()) throw ConfigError("site out of range");
  const DynamicsOptions opt = dynamics_options(cfg);

  std::vector<int> values(static_cast<std::size_t>(cfg.replicas), kCensored);
  std::vector<EngineCounters> counters(static_cast<std::size_t>(cfg.replicas));
  std::atomic<std::int64_t> ties{0};
  parallel_for(cfg.replicas, cfg.workers, [&](std::int64_t k) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(k));
    const SpaceTimeScan scan = space_time_radius(*m.spec, v, rng, opt, &counters[k]);
    if (scan.resolved) values[k] = scan.radius;
    if (scan.order_tied) ties.fetch_add(1);
  });

  const SurvivalCurve curve = survival_from_values(values, 2 * cfg.n_max);
  ExperimentOutput out;
  CsvWriter csv({"rstar", "trials", "exceedances", "survival", "stderr"});
  survival_rows(csv, curve);
  out.csv = csv.str();
  const std::int64_t censored =
      static_cast<std::int64_t>(std::count(values.begin(), values.end(), kCensored));
  out.capped = censored > 0;
  out.extras = {{"counters", counters_json(counters)},
                {"site", v},
                {"censored", censored},
                {"order_tied_replicas", ties.load()},
                {"fit", fit_json(fit_tail(curve))}};
  out.summary = "space-time radius over " + std::to_string(cfg.replicas) + " replicas, " +
                std::to_string(censored) + " censored";
  return out;
}

ExperimentOutput run_mixing(const RunConfig& cfg) {
  const BuiltModel m = build_model(cfg);
  const SiteId v = cfg.site >= 0 ? cfg.site : deep_interior_site(*m.graph);
  if (v < 0 || v >= m.graph->size()) throw ConfigError("site out of range");
  const DynamicsOptions opt = dynamics_options(cfg);

  const int cap_r = resolve_radius_cap(*m.graph, v, opt);
  const int n_rows = std::min(cfg.n_max, cap_r);
  std::vector<std::vector<char>> indicators(static_cast<std::size_t>(cfg.replicas));
  std::vector<EngineCounters> counters(static_cast<std::size_t>(cfg.replicas));
  parallel_for(cfg.replicas, cfg.workers, [&](std::int64_t k) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(k));
    const DiagonalScan scan =
        diagonal_agreement_time(*m.spec, v, rng, opt, &counters[k], n_rows);
    indicators[k] = scan.disagree;
  });

  ExperimentOutput out;
  CsvWriter csv({"n", "r", "trials", "disagreements", "phi_hat", "stderr"});
  // n = 0: both chains are the untouched extremes, which differ at v.
  csv.row({"0", "0", std::to_string(cfg.replicas), std::to_string(cfg.replicas), "1", "0"});
  for (int n = 1; n <= n_rows; ++n) {
    std::int64_t dis = 0;
    for (const auto& ind : indicators) dis += ind[static_cast<std::size_t>(n - 1)];
    const double frac = static_cast<double>(dis) / static_cast<double>(cfg.replicas);
    const double se = std::sqrt(frac * (1.0 - frac) / static_cast<double>(cfg.replicas));
    csv.row({std::to_string(n), std::to_string(n), std::to_string(cfg.replicas),
             std::to_string(dis), format_double(frac), format_double(se)});
  }
  out.csv = csv.str();
  out.capped = n_rows < cfg.n_max;
  out.extras = {{"counters", counters_json(counters)}, {"site", v}, {"n_scanned", n_rows}};
  out.summary = "diagonal disagreement fractions for n in 0.." + std::to_string(n_rows);
  return out;
}

ExperimentOutput run_potts(const RunConfig& cfg) {
  if (cfg.colors < 2) throw ConfigError("colors must be at least 2");
  if (cfg.boundary_color < 0 || cfg.boundary_color > cfg.colors)
    throw ConfigError("boundary_color out of range");
  if (cfg.sampler != "cftp" && cfg.sampler != "oracle")
    throw ConfigError("sampler must be cftp or oracle");

  const auto box = std::make_shared<SiteGraph>(build_grid(cfg.extent));
  const bool wired = cfg.boundary_color >= 1;
  const auto base =
      wired ? std::make_shared<SiteGraph>(ghost_augmented_box(*box)) : box;
  const auto lg = std::make_shared<SiteGraph>(line_graph(*base));

  std::unique_ptr<RandomClusterModel> rc;
  const auto pr = parse_rat(cfg.p);
  try {
    if (pr.has_value())
      rc = std::make_unique<RandomClusterModel>(lg, *pr, Rat(cfg.colors));
    else
      rc = std::make_unique<RandomClusterModel>(lg, parse_double(cfg.p, "p"),
                                                static_cast<double>(cfg.colors));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const Window w = whole_graph_window(*lg, BoundaryMode::Minus);  // free counting
  const DynamicsOptions opt = dynamics_options(cfg);

  std::optional<ExactDistribution> oracle_dist;
  if (cfg.sampler == "oracle") {
    try {
      oracle_dist = enumerate_gibbs(*rc, w);
    } catch (const std::domain_error&) {
      throw ConfigError("graph too large for the oracle sampler");
    }
  }

  const int n_box = box->size();
  const int q = cfg.colors;
  std::vector<std::vector<int>> per_replica_colors(static_cast<std::size_t>(cfg.replicas));
  std::vector<EngineCounters> counters(static_cast<std::size_t>(cfg.replicas));
  std::atomic<std::int64_t> unresolved{0};
  parallel_for(cfg.replicas, cfg.workers, [&](std::int64_t k) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(k));
    Config omega;
    if (oracle_dist.has_value()) {
      const double u = rng.uniform(0, 0, Stream::Scratch);
      oracle_dist->materialize(oracle_dist->sample_rank(u), omega);
    } else {
      ShellCache shells(*lg);
      WindowDynamics dyn(*rc, w, rng, opt, &shells, &counters[k]);
      const auto sample = dyn.sample();
      if (!sample.has_value()) {
        unresolved.fetch_add(1);
        return;
      }
      omega = *sample;
    }
    const ClusterLabels cl = clusters(omega, w, false);
    const int ghost_cluster = base->ghost >= 0 ? cl.label[base->ghost] : -1;
    const ColorSources sources = draw_color_sources(*base, q, rng);
    per_replica_colors[k] = cluster_colors(*base, cl.label, cl.count_total, ghost_cluster,
                                           cfg.boundary_color, sources,
                                           RepresentativeRule::ArgminZ);
  });

  std::vector<std::vector<std::int64_t>> counts(
      static_cast<std::size_t>(n_box), std::vector<std::int64_t>(static_cast<std::size_t>(q), 0));
  std::int64_t colored = 0;
  for (const auto& col : per_replica_colors) {
    if (col.empty()) continue;
    ++colored;
    for (int vtx = 0; vtx < n_box; ++vtx) counts[vtx][static_cast<std::size_t>(col[vtx] - 1)]++;
  }

  ExperimentOutput out;
  CsvWriter csv({"vertex", "color", "count", "frequency"});
  for (int vtx = 0; vtx < n_box; ++vtx)
    for (int c = 0; c < q; ++c)
      csv.row({std::to_string(vtx), std::to_string(c + 1),
               std::to_string(counts[vtx][static_cast<std::size_t>(c)]),
               format_double(colored > 0 ? static_cast<double>(counts[vtx][c]) /
                                               static_cast<double>(colored)
                                         : 0.0)});
  out.csv = csv.str();
  out.capped = unresolved.load() > 0;

  // Cross-check against the direct color-model enumeration when feasible.
  nlohmann::json oracle_cmp;
  try {
    const double beta = -std::log1p(-rc->p());
    std::optional<Rat> ebeta;  // exact only when p = 1 - 1/e^beta is rational with e^beta integral
    if (rc->p_exact().has_value()) {
      const Rat one_minus_p = Rat(1) - *rc->p_exact();
      if (one_minus_p.num() == 1) ebeta = Rat(one_minus_p.den());
    }
    const ExactDistribution potts =
        enumerate_potts(*box, q, beta, cfg.boundary_color, ebeta);
    double max_tv = 0.0;
    for (int vtx = 0; vtx < n_box; ++vtx) {
      const auto marg = potts.marginal(vtx);
      double tv = 0.0;
      for (int c = 0; c < q; ++c) {
        const double emp = colored > 0 ? static_cast<double>(counts[vtx][c]) /
                                             static_cast<double>(colored)
                                       : 0.0;
        tv += std::fabs(emp - marg[static_cast<std::size_t>(c)]);
      }
      max_tv = std::max(max_tv, 0.5 * tv);
    }
    oracle_cmp = {{"available", true}, {"max_vertex_tv", max_tv}, {"beta", beta}};
  } catch (const std::domain_error&) {
    oracle_cmp = {{"available", false}};
  }

  out.extras = {{"counters", counters_json(counters)},
                {"unresolved", unresolved.load()},
                {"colored_replicas", colored},
                {"wired", wired},
                {"oracle", oracle_cmp}};
  out.summary = "colored " + std::to_string(colored) + "/" + std::to_string(cfg.replicas) +
                " draws on " + std::to_string(n_box) + " vertices";
  return out;
}

ExperimentOutput run_validate(const RunConfig& cfg) {
  const BuiltModel m = build_model(cfg);

  // Largest centered ball that stays enumerable; the whole graph when small.
  const SiteId center = deep_interior_site(*m.graph);
  const double log_states = std::log2(static_cast<double>(m.spec->spins().size()));
  const int max_sites = static_cast<int>(20.0 / log_states);
  auto pick_window = [&](BoundaryMode mode) {
    Window w = whole_graph_window(*m.graph, mode);
    for (int r = max_unclipped_radius(*m.graph, center); r >= 0; --r) {
      if (static_cast<int>(w.interior.size()) <= max_sites) return w;
      w = ball(*m.graph, center, r, mode);
    }
    if (static_cast<int>(w.interior.size()) > max_sites)
      throw ConfigError("graph too large to validate by enumeration");
    return w;
  };

  ExperimentOutput out;
  CsvWriter csv({"check", "value", "threshold", "pass"});
  bool all_pass = true;
  auto emit = [&](const std::string& name, double value, double threshold) {
    const bool pass = value <= threshold;
    all_pass = all_pass && pass;
    csv.row({name, format_double(value), format_double(threshold), pass ? "1" : "0"});
  };

  for (const BoundaryMode mode : {BoundaryMode::Plus, BoundaryMode::Minus}) {
    const Window w = pick_window(mode);
    const ConditionalCheck check = check_conditional(*m.spec, w);
    const std::string tag = mode == BoundaryMode::Plus ? "plus" : "minus";
    emit("conditional_max_err_" + tag, check.max_cdf_error, 1e-12);
    emit("stationarity_err_" + tag, check.stationarity_error, 1e-10);
    if (check.exact_checked)
      emit("exact_conditional_mismatch_" + tag, check.exact_equal ? 0.0 : 1.0, 0.0);
  }

  const FiniteAlphabet alpha = m.spec->finite_alphabet();
  double mass = 0.0;
  for (double wgt : alpha.weights) mass += wgt;
  emit("alphabet_mass_gap", std::fabs(mass - 1.0), 1e-12);
  double prev = 0.0;
  double worst_order = 0.0;
  for (double a : alpha.values) {
    worst_order = std::max(worst_order, prev - a);
    prev = a;
  }
  emit("alphabet_order_violation", worst_order, 0.0);

  out.csv = csv.str();
  out.capped = !all_pass;
  out.extras = {{"alphabet_size", alpha.values.size()}};
  out.summary = all_pass ? "all validation checks passed" : "validation FAILED";
  return out;
}

}  // namespace

RunResult run_experiment(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.replicas < 1) throw ConfigError("replicas must be at least 1");
  if (cfg.workers < 1) throw ConfigError("workers must be at least 1");
  if (cfg.n_max < 1) throw ConfigError("n_max must be at least 1");
  if (cfg.r_max < 0) throw ConfigError("r_max must be nonnegative");
  parse_order(cfg.order);  // validated early

  ExperimentOutput exp;
  if (cfg.experiment == "sample") exp = run_sample(cfg);
  else if (cfg.experiment == "radius") exp = run_radius(cfg);
  else if (cfg.experiment == "diagonal") exp = run_diagonal(cfg);
  else if (cfg.experiment == "spacetime") exp = run_spacetime(cfg);
  else if (cfg.experiment == "mixing") exp = run_mixing(cfg);
  else if (cfg.experiment == "potts") exp = run_potts(cfg);
  else if (cfg.experiment == "validate") exp = run_validate(cfg);
  else throw ConfigError("unknown experiment '" + cfg.experiment + "'");

  const auto t1 = std::chrono::steady_clock::now();
  const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();

  std::string extent_str;
  for (std::size_t i = 0; i < cfg.extent.size(); ++i) {
    if (i > 0) extent_str += 'x';
    extent_str += std::to_string(cfg.extent[i]);
  }
  nlohmann::json envelope = {
      {"version", kVersion},
      {"experiment", cfg.experiment},
      {"config",
       {{"experiment", cfg.experiment}, {"model", cfg.model},     {"p", cfg.p},
        {"q", cfg.q},                   {"beta", cfg.beta},       {"e2beta", cfg.e2beta},
        {"alpha", cfg.alpha},           {"trunc", cfg.trunc},     {"extent", extent_str},
        {"order", cfg.order},           {"D", cfg.digit_base},    {"alphabet", cfg.alphabet},
        {"seed", cfg.seed},             {"replicas", cfg.replicas},
        {"horizon_cap", cfg.horizon_cap}, {"radius_cap", cfg.radius_cap},
        {"r_max", cfg.r_max},           {"n_max", cfg.n_max},     {"mode", cfg.mode},
        {"site", cfg.site},             {"colors", cfg.colors},
        {"boundary_color", cfg.boundary_color}, {"sampler", cfg.sampler},
        {"workers", cfg.workers}}},
      {"wall_ms", wall_ms},
      {"capped", exp.capped},
      {"summary", exp.summary},
      {"extras", exp.extras}};

  std::filesystem::create_directories(cfg.out);
  RunResult res;
  res.csv_path = (std::filesystem::path(cfg.out) / (cfg.experiment + ".csv")).string();
  res.json_path = (std::filesystem::path(cfg.out) / (cfg.experiment + ".json")).string();
  write_text_file(res.csv_path, exp.csv);
  write_text_file(res.json_path, envelope.dump(2) + "\n");
  res.exit_code = exp.capped ? 1 : 0;
  res.summary = exp.summary;
  return res;
}

}  // namespace cftplab
