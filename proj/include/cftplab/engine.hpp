#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "cftplab/models.hpp"
#include "cftplab/order.hpp"
#include "cftplab/randomness.hpp"

namespace cftplab {

struct DynamicsOptions {
  OrderKind order = OrderKind::Real;
  int digit_base = 0;           // 0 = default for the graph
  bool snap_to_alphabet = false;
  std::int64_t horizon_cap = std::int64_t{1} << 20;
  int radius_cap = -1;          // -1 = largest boundary-free ball at the site
  std::int64_t time_cap = 64;   // cap for agreement-time scans
};

struct EngineCounters {
  std::uint64_t sweeps = 0;
  std::uint64_t site_updates = 0;
  std::uint64_t tie_events = 0;      // label degeneracies hit during sorting
  std::uint64_t horizon_retries = 0; // doubling restarts across all samples
};

// Top and bottom chains of one boundary mode, coupled through shared
// randomness.  The bottom chain never exceeds the top chain.
struct ChainPair {
  Config top, bottom;
  bool coalesced(const Window& w) const;
};

// Single-site heat-bath dynamics of one window: random site order per sweep,
// inverse-CDF updates keyed by (site, time), and backward-coupled exact
// sampling.  Reuses the (site, time) randomness across horizons, which is
// what makes the backward composition converge to a single exact draw.
class WindowDynamics {
 public:
  WindowDynamics(const Specification& spec, const Window& window,
                 const CounterRng& rng, const DynamicsOptions& opt,
                 ShellCache* shells, EngineCounters* counters);

  const Window& window() const { return *window_; }
  Config extreme_config(bool top) const;

  // Apply the sweep with time index t in place (sites in label order).
  void sweep(Config& cfg, std::int64_t t);

  // Compose sweeps t = n down to 1 from both extreme starts.  Returns the
  // common configuration when the chains meet, nullopt otherwise; the final
  // pair is written to `out` if given.
  std::optional<Config> run_pair(std::int64_t n, ChainPair* out = nullptr);

  // Exact sample of the window marginal via horizons 1, 2, 4, ... up to the
  // cap.  Returns nullopt when the cap is exhausted — never a biased draw.
  std::optional<Config> sample(std::int64_t* horizon_used = nullptr);

 private:
  const std::vector<SiteId>& sweep_order(std::int64_t t);

  const Specification* spec_;
  const Window* window_;
  const CounterRng* rng_;
  DynamicsOptions opt_;
  ShellCache* shells_;
  EngineCounters* counters_;
  std::unique_ptr<ConditionalEvaluator> eval_;
  FiniteAlphabet alphabet_;
  int digit_base_ = 0;
  std::map<std::int64_t, std::vector<SiteId>> order_cache_;
  std::vector<double> cdf_;
};

int resolve_radius_cap(const SiteGraph& g, SiteId v, const DynamicsOptions& opt);

// --- window-growth measurements --------------------------------------------
// All scans for one replica share one CounterRng, so the randomness at a
// given (site, time) is identical across window sizes; agreement observed at
// one size then persists at every larger size, and the measured thresholds
// are honest minima.

struct RadiusScan {
  int radius = -1;       // smallest r where both one-sided samples agree at v
  bool resolved = false;
  std::vector<Spin> plus_center;   // per r: center spin of the maximal-mode draw
  std::vector<Spin> minus_center;  // per r: center spin of the minimal-mode draw
  bool cftp_exhausted = false;     // a horizon cap fired before resolution
};

RadiusScan coding_radius(const Specification& spec, SiteId v, const CounterRng& rng,
                         const DynamicsOptions& opt, EngineCounters* counters = nullptr);

// Diagonal scan: for n = 1, 2, ... compare, at v, the maximal-mode chain
// started from the top with the minimal-mode chain started from the bottom,
// each after n sweeps on its radius-n window.  `time` is the first agreement
// n; agreement persists for larger n under the shared randomness, so this is
// the full survival information.  scan_to >= 1 forces scanning past the
// first agreement up to that n, recording per-n disagreement indicators.
struct DiagonalScan {
  int time = -1;
  bool resolved = false;
  Spin value = 0;              // the agreed spin
  std::vector<char> disagree;  // index n-1: chains differ at v for that n
};

DiagonalScan diagonal_agreement_time(const Specification& spec, SiteId v,
                                     const CounterRng& rng, const DynamicsOptions& opt,
                                     EngineCounters* counters = nullptr, int scan_to = -1);

struct SpaceTimeScan {
  int radius = -1;       // = 2n at the first n that is admissible
  int time = -1;         // that n
  bool resolved = false;
  bool order_tied = false;  // a label tie froze the order condition
};

// First n such that (a) the diagonal chains agree at v (as above) and
// (b) every pair of sites in the radius-n ball has its relative order decided
// within radius n at every time 0..n.  The center value is then a function
// of the randomness in the radius-2n ball across time layers 0..2n.
SpaceTimeScan space_time_radius(const Specification& spec, SiteId v,
                                const CounterRng& rng, const DynamicsOptions& opt,
                                EngineCounters* counters = nullptr);

struct PhiEstimate {
  std::int64_t trials = 0;
  std::int64_t disagreements = 0;
  double fraction = 0.0;
  double std_error = 0.0;
};

// Monte Carlo estimate of the probability that the maximal-mode chain from
// the top and the minimal-mode chain from the bottom still differ at v after
// n sweeps on the radius-r windows.  One replica = one randomness key.
PhiEstimate estimate_phi(const Specification& spec, SiteId v, int n, int r,
                         std::int64_t replicas, std::uint64_t master_seed,
                         const DynamicsOptions& opt);

}  // namespace cftplab
