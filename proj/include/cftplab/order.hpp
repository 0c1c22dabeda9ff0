#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "cftplab/lattice.hpp"
#include "cftplab/randomness.hpp"

namespace cftplab {

enum class OrderKind { Real, Digits };

// Per-site BFS shells, computed once per site and reused by every time step
// of a run.  Owned by a single run; not shared across threads.
class ShellCache {
 public:
  explicit ShellCache(const SiteGraph& g) : g_(&g) {}

  // Sites at distance exactly k from v; empty once the graph is exhausted.
  const std::vector<SiteId>& shell(SiteId v, int k);
  int max_depth(SiteId v);
  const SiteGraph& graph() const { return *g_; }

 private:
  void ensure(SiteId v);
  const SiteGraph* g_;
  std::unordered_map<SiteId, std::vector<std::vector<SiteId>>> shells_;
  std::vector<SiteId> empty_;
};

// A site ordering for one sweep.  Real labels order sites by label value
// directly (order radius 0).  Digit labels order sites by the lexicographic
// comparison of their shell-sum sequences Z_0, Z_1, ..., where Z_k sums the
// digits over the distance-k shell; the comparison is decided at the first
// shell where the sums differ, which is what makes the order locally
// determined with a geometric tail.
class OrderLabels {
 public:
  static OrderLabels reals(std::vector<double> labels);
  static OrderLabels reals_keyed(const CounterRng& rng, std::int64_t time, int n_sites);
  // Digits are uniform on {1, ..., base}.
  static OrderLabels digits(std::vector<int> labels, int base, ShellCache* shells);
  static OrderLabels digits_keyed(const CounterRng& rng, std::int64_t time, int n_sites,
                                  int base, ShellCache* shells);

  OrderKind kind() const { return kind_; }
  int base() const { return base_; }
  double real_label(SiteId v) const { return real_[v]; }
  int digit_label(SiteId v) const { return digit_[v]; }

  // Three-way comparison; 0 means the graph was exhausted without a decision
  // (a finite-size tie, impossible on the infinite lattice).
  int compare(SiteId u, SiteId v) const;
  bool precedes(SiteId u, SiteId v) const { return compare(u, v) <= 0; }

  // Smallest shell index at which the relative order of u and v is decided;
  // nullopt when tied within the graph.  Labels outside the two balls of
  // that radius cannot affect the comparison.
  std::optional<int> order_radius(SiteId u, SiteId v) const;

  // Deterministic ascending sort; exact ties fall back to site ids and are
  // reported through tie_flag (degeneracy event, never silent).
  std::vector<SiteId> sorted(const std::vector<SiteId>& sites, bool* tie_flag) const;

  std::int64_t shell_sum(SiteId v, int k) const;

 private:
  OrderLabels() = default;

  OrderKind kind_ = OrderKind::Real;
  std::vector<double> real_;
  std::vector<int> digit_;
  int base_ = 0;
  ShellCache* shells_ = nullptr;
  // Collision escalation for keyed real labels: extra independent label
  // levels drawn from the same counter stream.
  const CounterRng* rng_ = nullptr;
  std::int64_t time_ = 0;
  mutable std::unordered_map<std::uint64_t, std::int64_t> sums_;
};

// Default digit base: one more than 3 * (max degree)^2, the regime where the
// expected number of undecided pairs per shell contracts.
int default_digit_base(const SiteGraph& g);

}  // namespace cftplab
