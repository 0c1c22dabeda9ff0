#include "cftplab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cftplab {

bool ChainPair::coalesced(const Window& w) const {
  for (SiteId v : w.interior)
    if (top[v] != bottom[v]) return false;
  return true;
}

WindowDynamics::WindowDynamics(const Specification& spec, const Window& window,
                               const CounterRng& rng, const DynamicsOptions& opt,
                               ShellCache* shells, EngineCounters* counters)
    : spec_(&spec), window_(&window), rng_(&rng), opt_(opt), shells_(shells),
      counters_(counters) {
  static thread_local EngineCounters sink;
  if (counters_ == nullptr) counters_ = &sink;
  eval_ = spec.evaluator(window, window.mode);
  if (opt_.snap_to_alphabet) alphabet_ = spec.finite_alphabet();
  digit_base_ = opt_.digit_base > 0 ? opt_.digit_base : default_digit_base(spec.graph());
  if (opt_.order == OrderKind::Digits && shells_ == nullptr)
    throw std::invalid_argument("digit-ordered dynamics need a shell cache");
}

Config WindowDynamics::extreme_config(bool top) const {
  const SpinSpace& s = spec_->spins();
  Config cfg(static_cast<std::size_t>(spec_->graph().size()), extreme(s, window_->mode));
  const Spin inner = top ? s.max() : s.min();
  for (SiteId v : window_->interior) cfg[v] = inner;
  return cfg;
}

const std::vector<SiteId>& WindowDynamics::sweep_order(std::int64_t t) {
  auto it = order_cache_.find(t);
  if (it != order_cache_.end()) return it->second;
  const int n = spec_->graph().size();
  OrderLabels labels = opt_.order == OrderKind::Real
                           ? OrderLabels::reals_keyed(*rng_, t, n)
                           : OrderLabels::digits_keyed(*rng_, t, n, digit_base_, shells_);
  bool tie = false;
  auto order = labels.sorted(window_->interior, &tie);
  if (tie) ++counters_->tie_events;
  return order_cache_.emplace(t, std::move(order)).first->second;
}

void WindowDynamics::sweep(Config& cfg, std::int64_t t) {
  for (SiteId s : sweep_order(t)) {
    double a = rng_->update_a(s, t);
    if (opt_.snap_to_alphabet) a = alphabet_.snap(a);
    eval_->cumulative(cfg, s, cdf_);
    cfg[s] = inverse_cdf_spin(spec_->spins(), cdf_, a);
    ++counters_->site_updates;
  }
  ++counters_->sweeps;
}

std::optional<Config> WindowDynamics::run_pair(std::int64_t n, ChainPair* out) {
  Config top = extreme_config(true);
  Config bottom = extreme_config(false);
  bool met = (top == bottom);
  for (std::int64_t t = n; t >= 1; --t) {
    sweep(top, t);
    if (!met) {
      sweep(bottom, t);
      met = (top == bottom);
    }
  }
  if (met) bottom = top;
  if (out != nullptr) {
    out->top = top;
    out->bottom = std::move(bottom);
  }
  if (met) return top;
  return std::nullopt;
}

std::optional<Config> WindowDynamics::sample(std::int64_t* horizon_used) {
  for (std::int64_t h = 1;;) {
    auto res = run_pair(h);
    if (res.has_value()) {
      if (horizon_used != nullptr) *horizon_used = h;
      return res;
    }
    if (h >= opt_.horizon_cap) return std::nullopt;
    ++counters_->horizon_retries;
    h = std::min(h * 2, opt_.horizon_cap);
  }
}

int resolve_radius_cap(const SiteGraph& g, SiteId v, const DynamicsOptions& opt) {
  return opt.radius_cap >= 0 ? opt.radius_cap : max_unclipped_radius(g, v);
}

RadiusScan coding_radius(const Specification& spec, SiteId v, const CounterRng& rng,
                         const DynamicsOptions& opt, EngineCounters* counters) {
  const SiteGraph& g = spec.graph();
  const int cap = resolve_radius_cap(g, v, opt);
  ShellCache shells(g);
  RadiusScan out;
  for (int r = 0; r <= cap; ++r) {
    const Window wp = ball(g, v, r, BoundaryMode::Plus);
    const Window wm = ball(g, v, r, BoundaryMode::Minus);
    WindowDynamics dp(spec, wp, rng, opt, &shells, counters);
    WindowDynamics dm(spec, wm, rng, opt, &shells, counters);
    auto sp = dp.sample();
    auto sm = dm.sample();
    if (!sp.has_value() || !sm.has_value()) {
      out.cftp_exhausted = true;
      return out;
    }
    out.plus_center.push_back((*sp)[v]);
    out.minus_center.push_back((*sm)[v]);
    if ((*sp)[v] == (*sm)[v]) {
      out.radius = r;
      out.resolved = true;
      return out;
    }
  }
  return out;
}

namespace {

// The two ends of the diagonal coupling at scale n: maximal-mode chain from
// the top and minimal-mode chain from the bottom, n sweeps each, shared
// randomness.
std::pair<Spin, Spin> diagonal_ends(const Specification& spec, SiteId v, int n,
                                    const CounterRng& rng, const DynamicsOptions& opt,
                                    ShellCache* shells, EngineCounters* counters) {
  const SiteGraph& g = spec.graph();
  const Window wp = ball(g, v, n, BoundaryMode::Plus);
  const Window wm = ball(g, v, n, BoundaryMode::Minus);
  WindowDynamics dp(spec, wp, rng, opt, shells, counters);
  WindowDynamics dm(spec, wm, rng, opt, shells, counters);
  Config top = dp.extreme_config(true);
  Config bottom = dm.extreme_config(false);
  for (std::int64_t t = n; t >= 1; --t) {
    dp.sweep(top, t);
    dm.sweep(bottom, t);
  }
  return {top[v], bottom[v]};
}

}  // namespace

DiagonalScan diagonal_agreement_time(const Specification& spec, SiteId v,
                                     const CounterRng& rng, const DynamicsOptions& opt,
                                     EngineCounters* counters, int scan_to) {
  const SiteGraph& g = spec.graph();
  const int cap_r = resolve_radius_cap(g, v, opt);
  std::int64_t n_cap = std::min<std::int64_t>(opt.time_cap, cap_r);
  if (scan_to >= 1) n_cap = std::min<std::int64_t>(n_cap, scan_to);
  ShellCache shells(g);
  DiagonalScan out;
  for (std::int64_t n = 1; n <= n_cap; ++n) {
    const auto [hi, lo] =
        diagonal_ends(spec, v, static_cast<int>(n), rng, opt, &shells, counters);
    out.disagree.push_back(hi != lo);
    if (hi == lo && !out.resolved) {
      out.time = static_cast<int>(n);
      out.resolved = true;
      out.value = hi;
      if (scan_to < 1) return out;
    }
  }
  return out;
}

SpaceTimeScan space_time_radius(const Specification& spec, SiteId v,
                                const CounterRng& rng, const DynamicsOptions& opt,
                                EngineCounters* counters) {
  const SiteGraph& g = spec.graph();
  const int cap_r = resolve_radius_cap(g, v, opt);
  const std::int64_t n_cap = std::min<std::int64_t>(opt.time_cap, cap_r);
  ShellCache shells(g);
  const int base = opt.digit_base > 0 ? opt.digit_base : default_digit_base(g);

  std::vector<OrderLabels> labels;  // index = time, 0-based
  auto ensure_labels = [&](std::int64_t up_to) {
    while (static_cast<std::int64_t>(labels.size()) <= up_to) {
      const std::int64_t t = static_cast<std::int64_t>(labels.size());
      labels.push_back(opt.order == OrderKind::Real
                           ? OrderLabels::reals_keyed(rng, t, g.size())
                           : OrderLabels::digits_keyed(rng, t, g.size(), base, &shells));
    }
  };

  SpaceTimeScan out;
  std::vector<SiteId> prev_sites;
  std::vector<std::pair<SiteId, SiteId>> pairs;
  int max_order_radius = 0;
  bool tied = false;
  auto note = [&](std::optional<int> r) {
    if (r.has_value())
      max_order_radius = std::max(max_order_radius, *r);
    else
      tied = true;
  };

  for (std::int64_t n = 1; n <= n_cap; ++n) {
    const Window w = ball(g, v, static_cast<int>(n), BoundaryMode::Plus);
    ensure_labels(n);

    std::vector<SiteId> fresh;
    std::set_difference(w.interior.begin(), w.interior.end(), prev_sites.begin(),
                        prev_sites.end(), std::back_inserter(fresh));
    // Times 0..n-1 of the existing pairs were handled at earlier n; only the
    // new time index applies to them.
    for (const auto& [a, b] : pairs) note(labels[n].order_radius(a, b));
    std::vector<std::pair<SiteId, SiteId>> new_pairs;
    for (SiteId a : fresh)
      for (SiteId b : prev_sites) new_pairs.emplace_back(std::min(a, b), std::max(a, b));
    for (std::size_t i = 0; i < fresh.size(); ++i)
      for (std::size_t j = i + 1; j < fresh.size(); ++j)
        new_pairs.emplace_back(fresh[i], fresh[j]);
    for (const auto& [a, b] : new_pairs)
      for (std::int64_t t = 0; t <= n; ++t) note(labels[t].order_radius(a, b));
    pairs.insert(pairs.end(), new_pairs.begin(), new_pairs.end());
    prev_sites = w.interior;

    const auto [hi, lo] =
        diagonal_ends(spec, v, static_cast<int>(n), rng, opt, &shells, counters);
    const bool diagonal_ok = (hi == lo);

    if (diagonal_ok && !tied && max_order_radius <= n) {
      out.time = static_cast<int>(n);
      out.radius = 2 * static_cast<int>(n);
      out.resolved = true;
      break;
    }
  }
  out.order_tied = tied;
  return out;
}

PhiEstimate estimate_phi(const Specification& spec, SiteId v, int n, int r,
                         std::int64_t replicas, std::uint64_t master_seed,
                         const DynamicsOptions& opt) {
  const SiteGraph& g = spec.graph();
  const Window wp = ball(g, v, r, BoundaryMode::Plus);
  const Window wm = ball(g, v, r, BoundaryMode::Minus);
  PhiEstimate out;
  out.trials = replicas;
  for (std::int64_t k = 0; k < replicas; ++k) {
    CounterRng rng(master_seed, k);
    ShellCache shells(g);
    WindowDynamics dp(spec, wp, rng, opt, &shells, nullptr);
    WindowDynamics dm(spec, wm, rng, opt, &shells, nullptr);
    Config top = dp.extreme_config(true);
    Config bottom = dm.extreme_config(false);
    for (std::int64_t t = n; t >= 1; --t) {
      dp.sweep(top, t);
      dm.sweep(bottom, t);
    }
    if (top[v] != bottom[v]) ++out.disagreements;
  }
  if (replicas > 0) {
    out.fraction = static_cast<double>(out.disagreements) / static_cast<double>(replicas);
    out.std_error =
        std::sqrt(out.fraction * (1.0 - out.fraction) / static_cast<double>(replicas));
  }
  return out;
}

}  // namespace cftplab
