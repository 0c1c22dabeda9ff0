#include "cftplab/order.hpp"

#include <algorithm>
#include <stdexcept>

namespace cftplab {

void ShellCache::ensure(SiteId v) {
  if (shells_.count(v)) return;
  const auto dist = g_->distances_from(v);
  int maxd = 0;
  for (int d : dist)
    if (d >= 0) maxd = std::max(maxd, d);
  std::vector<std::vector<SiteId>> sh(static_cast<std::size_t>(maxd) + 1);
  for (SiteId u = 0; u < g_->size(); ++u)
    if (dist[u] >= 0) sh[dist[u]].push_back(u);
  shells_.emplace(v, std::move(sh));
}

const std::vector<SiteId>& ShellCache::shell(SiteId v, int k) {
  ensure(v);
  const auto& sh = shells_.at(v);
  if (k < 0 || static_cast<std::size_t>(k) >= sh.size()) return empty_;
  return sh[static_cast<std::size_t>(k)];
}

int ShellCache::max_depth(SiteId v) {
  ensure(v);
  return static_cast<int>(shells_.at(v).size()) - 1;
}

OrderLabels OrderLabels::reals(std::vector<double> labels) {
  OrderLabels o;
  o.kind_ = OrderKind::Real;
  o.real_ = std::move(labels);
  return o;
}

OrderLabels OrderLabels::reals_keyed(const CounterRng& rng, std::int64_t time, int n_sites) {
  OrderLabels o;
  o.kind_ = OrderKind::Real;
  o.rng_ = &rng;
  o.time_ = time;
  o.real_.resize(static_cast<std::size_t>(n_sites));
  for (int v = 0; v < n_sites; ++v) o.real_[v] = rng.order_real(v, time, 0);
  return o;
}

OrderLabels OrderLabels::digits(std::vector<int> labels, int base, ShellCache* shells) {
  if (base < 2) throw std::invalid_argument("digit base must be at least 2");
  for (int d : labels)
    if (d < 1 || d > base) throw std::invalid_argument("digit label out of range");
  OrderLabels o;
  o.kind_ = OrderKind::Digits;
  o.digit_ = std::move(labels);
  o.base_ = base;
  o.shells_ = shells;
  return o;
}

OrderLabels OrderLabels::digits_keyed(const CounterRng& rng, std::int64_t time, int n_sites,
                                      int base, ShellCache* shells) {
  std::vector<int> labels(static_cast<std::size_t>(n_sites));
  for (int v = 0; v < n_sites; ++v) labels[v] = rng.order_digit(v, time, base);
  return digits(std::move(labels), base, shells);
}

std::int64_t OrderLabels::shell_sum(SiteId v, int k) const {
  if (kind_ != OrderKind::Digits) throw std::logic_error("shell sums need digit labels");
  const std::uint64_t key =
      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) << 24) |
      static_cast<std::uint64_t>(static_cast<std::uint32_t>(k));
  auto it = sums_.find(key);
  if (it != sums_.end()) return it->second;
  std::int64_t s = 0;
  for (SiteId u : shells_->shell(v, k)) s += digit_[u];
  sums_.emplace(key, s);
  return s;
}

int OrderLabels::compare(SiteId u, SiteId v) const {
  if (u == v) return 0;
  if (kind_ == OrderKind::Real) {
    if (real_[u] < real_[v]) return -1;
    if (real_[u] > real_[v]) return 1;
    if (rng_ != nullptr) {
      for (int level = 1; level <= 3; ++level) {
        const double au = rng_->order_real(u, time_, level);
        const double av = rng_->order_real(v, time_, level);
        if (au < av) return -1;
        if (au > av) return 1;
      }
    }
    return 0;
  }
  const int du = shells_->max_depth(u);
  const int dv = shells_->max_depth(v);
  const int kmax = std::max(du, dv);
  for (int k = 0; k <= kmax; ++k) {
    const std::int64_t su = shell_sum(u, k);
    const std::int64_t sv = shell_sum(v, k);
    if (su < sv) return -1;
    if (su > sv) return 1;
  }
  return 0;
}

std::optional<int> OrderLabels::order_radius(SiteId u, SiteId v) const {
  if (u == v) return 0;
  if (kind_ == OrderKind::Real) {
    if (real_[u] != real_[v]) return 0;
    if (rng_ != nullptr) {
      for (int level = 1; level <= 3; ++level) {
        if (rng_->order_real(u, time_, level) != rng_->order_real(v, time_, level)) return 0;
      }
    }
    return std::nullopt;
  }
  const int du = shells_->max_depth(u);
  const int dv = shells_->max_depth(v);
  const int kmax = std::max(du, dv);
  for (int k = 0; k <= kmax; ++k) {
    if (shell_sum(u, k) != shell_sum(v, k)) return k;
  }
  return std::nullopt;
}

std::vector<SiteId> OrderLabels::sorted(const std::vector<SiteId>& sites, bool* tie_flag) const {
  std::vector<SiteId> out = sites;
  bool tie = false;
  std::sort(out.begin(), out.end(), [&](SiteId a, SiteId b) {
    const int c = compare(a, b);
    if (c != 0) return c < 0;
    if (a != b) tie = true;
    return a < b;
  });
  if (tie_flag != nullptr) *tie_flag = tie;
  return out;
}

int default_digit_base(const SiteGraph& g) {
  int maxdeg = 0;
  if (g.closed_world) {
    for (SiteId v = 0; v < g.size(); ++v) maxdeg = std::max(maxdeg, g.degree(v));
  } else {
    for (int d : g.orbit_degree) maxdeg = std::max(maxdeg, d);
  }
  return 3 * maxdeg * maxdeg + 1;
}

}  // namespace cftplab
