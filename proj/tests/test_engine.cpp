#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "cftplab/engine.hpp"
#include "cftplab/oracle.hpp"

using namespace cftplab;

namespace {

std::shared_ptr<const SiteGraph> edges_of(const std::vector<int>& extent) {
  return std::make_shared<SiteGraph>(line_graph(build_grid(extent)));
}

bool leq(const Config& a, const Config& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

bool leq_on(const Config& a, const Config& b, const std::vector<SiteId>& sites) {
  for (SiteId v : sites)
    if (a[v] > b[v]) return false;
  return true;
}

// Empirical TV between CFTP draws and the enumerated law.
double empirical_tv(const Specification& spec, const Window& w, const DynamicsOptions& opt,
                    std::uint64_t seed, int n_draws) {
  const ExactDistribution d = enumerate_gibbs(spec, w);
  std::vector<std::int64_t> counts(d.size(), 0);
  for (int k = 0; k < n_draws; ++k) {
    CounterRng rng(seed, static_cast<std::uint64_t>(k));
    ShellCache shells(spec.graph());
    WindowDynamics dyn(spec, w, rng, opt, &shells, nullptr);
    const auto s = dyn.sample();
    REQUIRE(s.has_value());
    counts[d.rank_of(*s)]++;
  }
  double tv = 0.0;
  for (std::size_t r = 0; r < d.size(); ++r)
    tv += std::fabs(static_cast<double>(counts[r]) / n_draws - d.mass[r]);
  return 0.5 * tv;
}

}  // namespace

TEST_CASE("chains from the two extremes stay ordered through every sweep") {
  const auto lg = edges_of({3, 3});
  const RandomClusterModel rc(lg, 0.45, 2.0);
  const DynamicsOptions opt;
  for (int rep = 0; rep < 30; ++rep) {
    CounterRng rng(2024, static_cast<std::uint64_t>(rep));
    for (const BoundaryMode mode : {BoundaryMode::Minus, BoundaryMode::Plus}) {
      const Window w = whole_graph_window(*lg, mode);
      WindowDynamics dyn(rc, w, rng, opt, nullptr, nullptr);
      Config top = dyn.extreme_config(true);
      Config bottom = dyn.extreme_config(false);
      for (std::int64_t t = 8; t >= 1; --t) {
        dyn.sweep(top, t);
        dyn.sweep(bottom, t);
        CHECK(leq(bottom, top));
      }
    }
  }
}

TEST_CASE("a minus-mode bottom chain never exceeds a plus-mode top chain") {
  const auto lg = edges_of({3, 3});
  const RandomClusterModel rc(lg, 0.5, 2.0);
  const DynamicsOptions opt;
  const SiteId c = deep_interior_site(*lg);
  for (int rep = 0; rep < 30; ++rep) {
    CounterRng rng(555, static_cast<std::uint64_t>(rep));
    const Window wp = ball(*lg, c, 2, BoundaryMode::Plus);
    const Window wm = ball(*lg, c, 2, BoundaryMode::Minus);
    WindowDynamics dp(rc, wp, rng, opt, nullptr, nullptr);
    WindowDynamics dm(rc, wm, rng, opt, nullptr, nullptr);
    Config hi = dp.extreme_config(true);
    Config lo = dm.extreme_config(false);
    for (std::int64_t t = 6; t >= 1; --t) {
      dp.sweep(hi, t);
      dm.sweep(lo, t);
      CHECK(leq_on(lo, hi, wp.interior));
    }
  }
}

TEST_CASE("extending the horizon can only lower a top chain and raise a bottom chain") {
  const auto lg = edges_of({3, 3});
  const RandomClusterModel rc(lg, 0.5, 2.0);
  const DynamicsOptions opt;
  const Window w = whole_graph_window(*lg, BoundaryMode::Plus);
  for (int rep = 0; rep < 25; ++rep) {
    CounterRng rng(91, static_cast<std::uint64_t>(rep));
    WindowDynamics dyn(rc, w, rng, opt, nullptr, nullptr);
    Config prev_top, prev_bottom;
    for (std::int64_t n = 1; n <= 6; ++n) {
      Config top = dyn.extreme_config(true);
      Config bottom = dyn.extreme_config(false);
      for (std::int64_t t = n; t >= 1; --t) {
        dyn.sweep(top, t);
        dyn.sweep(bottom, t);
      }
      if (n > 1) {
        CHECK(leq(top, prev_top));
        CHECK(leq(prev_bottom, bottom));
      }
      prev_top = top;
      prev_bottom = bottom;
    }
  }
}

TEST_CASE("growing the window lowers plus chains and raises minus chains") {
  const auto lg = edges_of({5, 5});
  const RandomClusterModel rc(lg, 0.55, 2.0);
  const auto box = std::make_shared<SiteGraph>(build_grid({5, 5}));
  const IsingModel ising(box, 0.45);
  const Specification* specs[] = {&rc, &ising};
  const DynamicsOptions opt;

  for (const Specification* spec : specs) {
    const SiteId c = deep_interior_site(spec->graph());
    for (int rep = 0; rep < 15; ++rep) {
      CounterRng rng(4242, static_cast<std::uint64_t>(rep));
      for (int n = 1; n <= 3; ++n) {
        for (int r = 0; r + 1 <= 3; ++r) {
          const Window ws = ball(spec->graph(), c, r, BoundaryMode::Plus);
          const Window wb = ball(spec->graph(), c, r + 1, BoundaryMode::Plus);
          WindowDynamics ds(*spec, ws, rng, opt, nullptr, nullptr);
          WindowDynamics db(*spec, wb, rng, opt, nullptr, nullptr);
          Config small_top = ds.extreme_config(true);
          Config big_top = db.extreme_config(true);
          for (std::int64_t t = n; t >= 1; --t) {
            ds.sweep(small_top, t);
            db.sweep(big_top, t);
          }
          CHECK(leq_on(big_top, small_top, ws.interior));

          const Window ms = ball(spec->graph(), c, r, BoundaryMode::Minus);
          const Window mb = ball(spec->graph(), c, r + 1, BoundaryMode::Minus);
          WindowDynamics es(*spec, ms, rng, opt, nullptr, nullptr);
          WindowDynamics eb(*spec, mb, rng, opt, nullptr, nullptr);
          Config small_bot = es.extreme_config(false);
          Config big_bot = eb.extreme_config(false);
          for (std::int64_t t = n; t >= 1; --t) {
            es.sweep(small_bot, t);
            eb.sweep(big_bot, t);
          }
          CHECK(leq_on(small_bot, big_bot, ms.interior));
        }
      }
    }
  }
}

TEST_CASE("a coalesced backward composition is unchanged by a deeper past") {
  const auto lg = edges_of({3, 3});
  const RandomClusterModel rc(lg, 0.5, 2.0);
  const Window w = whole_graph_window(*lg, BoundaryMode::Minus);
  const DynamicsOptions opt;
  int checked = 0;
  for (int rep = 0; rep < 40; ++rep) {
    CounterRng rng(7, static_cast<std::uint64_t>(rep));
    WindowDynamics dyn(rc, w, rng, opt, nullptr, nullptr);
    std::int64_t h = -1;
    const auto s = dyn.sample(&h);
    REQUIRE(s.has_value());
    for (const std::int64_t deeper : {h + 1, h + 3, 2 * h}) {
      const auto again = dyn.run_pair(deeper);
      REQUIRE(again.has_value());
      CHECK(*again == *s);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("sampling is deterministic in the replica key and varies across replicas") {
  const auto lg = edges_of({3, 3});
  const RandomClusterModel rc(lg, 0.5, 2.0);
  const Window w = whole_graph_window(*lg, BoundaryMode::Plus);
  const DynamicsOptions opt;

  CounterRng rng_a(99, 0);
  CounterRng rng_b(99, 0);
  WindowDynamics da(rc, w, rng_a, opt, nullptr, nullptr);
  WindowDynamics db(rc, w, rng_b, opt, nullptr, nullptr);
  CHECK(*da.sample() == *db.sample());

  int diffs = 0;
  Config first;
  for (int rep = 0; rep < 10; ++rep) {
    CounterRng rng(99, static_cast<std::uint64_t>(rep));
    WindowDynamics dyn(rc, w, rng, opt, nullptr, nullptr);
    const Config s = *dyn.sample();
    if (rep == 0) first = s;
    else diffs += (s != first);
  }
  CHECK(diffs > 0);
}

TEST_CASE("cftp draws match the enumerated law in both modes") {
  const auto lg = edges_of({2, 2});
  const RandomClusterModel rc(lg, Rat(1, 2), Rat(2));
  const DynamicsOptions opt;
  // 16 atoms, 20000 draws: expected TV about 0.01, so 0.035 is a loose gate.
  CHECK(empirical_tv(rc, whole_graph_window(*lg, BoundaryMode::Minus), opt, 31, 20000) < 0.035);
  CHECK(empirical_tv(rc, whole_graph_window(*lg, BoundaryMode::Plus), opt, 32, 20000) < 0.035);

  const auto box = std::make_shared<SiteGraph>(build_grid({2, 2}));
  const IsingModel ising(box, 0.5);
  CHECK(empirical_tv(ising, whole_graph_window(*box, BoundaryMode::Minus), opt, 33, 20000) < 0.035);
}

TEST_CASE("digit-ordered sweeps sample the same law") {
  const auto lg = edges_of({2, 2});
  const RandomClusterModel rc(lg, Rat(1, 2), Rat(2));
  DynamicsOptions opt;
  opt.order = OrderKind::Digits;
  CHECK(empirical_tv(rc, whole_graph_window(*lg, BoundaryMode::Minus), opt, 41, 20000) < 0.035);
}

TEST_CASE("digit-ordered dynamics refuse to run without a shell cache") {
  const auto lg = edges_of({2, 2});
  const RandomClusterModel rc(lg, Rat(1, 2), Rat(2));
  DynamicsOptions opt;
  opt.order = OrderKind::Digits;
  const Window w = whole_graph_window(*lg, BoundaryMode::Minus);
  CounterRng rng(1, 0);
  CHECK_THROWS_AS(WindowDynamics(rc, w, rng, opt, nullptr, nullptr), std::invalid_argument);
}

TEST_CASE("snapping update variables to the alphabet leaves every draw unchanged") {
  const auto lg = edges_of({2, 2});
  const RandomClusterModel rc(lg, Rat(1, 2), Rat(2));
  const Window w = whole_graph_window(*lg, BoundaryMode::Minus);
  DynamicsOptions plain;
  DynamicsOptions snapped;
  snapped.snap_to_alphabet = true;
  for (int rep = 0; rep < 200; ++rep) {
    CounterRng rng(17, static_cast<std::uint64_t>(rep));
    WindowDynamics a(rc, w, rng, plain, nullptr, nullptr);
    WindowDynamics b(rc, w, rng, snapped, nullptr, nullptr);
    CHECK(*a.sample() == *b.sample());
  }
}

TEST_CASE("an exhausted horizon cap reports failure instead of a biased draw") {
  const auto lg = edges_of({3, 3});
  const RandomClusterModel rc(lg, 0.5, 2.0);
  const Window w = whole_graph_window(*lg, BoundaryMode::Plus);
  DynamicsOptions opt;
  opt.horizon_cap = 1;
  int exhausted = 0;
  for (int rep = 0; rep < 50; ++rep) {
    CounterRng rng(23, static_cast<std::uint64_t>(rep));
    EngineCounters counters;
    WindowDynamics dyn(rc, w, rng, opt, nullptr, &counters);
    if (!dyn.sample().has_value()) ++exhausted;
  }
  CHECK(exhausted > 0);  // one sweep cannot always coalesce a 12-edge window
}

TEST_CASE("counters account for sweeps and site updates") {
  const auto lg = edges_of({2, 2});
  const RandomClusterModel rc(lg, 0.5, 2.0);
  const Window w = whole_graph_window(*lg, BoundaryMode::Minus);
  const DynamicsOptions opt;
  CounterRng rng(3, 0);
  EngineCounters counters;
  WindowDynamics dyn(rc, w, rng, opt, nullptr, &counters);
  Config top = dyn.extreme_config(true);
  dyn.sweep(top, 1);
  dyn.sweep(top, 2);
  CHECK(counters.sweeps == 2);
  CHECK(counters.site_updates == 2 * w.interior.size());
}

TEST_CASE("coding radius is the first window where the one-sided draws agree") {
  const auto lg = edges_of({9, 9});
  const RandomClusterModel rc(lg, 0.3, 2.0);
  const SiteId v = deep_interior_site(*lg);
  const DynamicsOptions opt;
  int resolved = 0;
  for (int rep = 0; rep < 60; ++rep) {
    CounterRng rng(303, static_cast<std::uint64_t>(rep));
    const RadiusScan scan = coding_radius(rc, v, rng, opt, nullptr);
    if (!scan.resolved) continue;
    ++resolved;
    REQUIRE(scan.plus_center.size() == static_cast<std::size_t>(scan.radius) + 1);
    for (int r = 0; r < scan.radius; ++r) {
      CHECK(scan.plus_center[r] != scan.minus_center[r]);
      CHECK(scan.plus_center[r] >= scan.minus_center[r]);
    }
    CHECK(scan.plus_center[scan.radius] == scan.minus_center[scan.radius]);
  }
  CHECK(resolved >= 55);
}

TEST_CASE("diagonal agreement persists at every deeper scan") {
  const auto lg = edges_of({13, 13});
  const RandomClusterModel rc(lg, 0.3, 2.0);
  const SiteId v = deep_interior_site(*lg);
  DynamicsOptions opt;
  opt.time_cap = 6;
  opt.radius_cap = 6;
  for (int rep = 0; rep < 50; ++rep) {
    CounterRng rng(606, static_cast<std::uint64_t>(rep));
    const DiagonalScan scan = diagonal_agreement_time(rc, v, rng, opt, nullptr, 6);
    REQUIRE(scan.disagree.size() == 6);
    // Once the chains meet they stay met: the indicator never rises again.
    for (std::size_t i = 0; i + 1 < scan.disagree.size(); ++i)
      CHECK(scan.disagree[i] >= scan.disagree[i + 1]);
    if (scan.resolved) {
      CHECK(scan.time >= 1);
      CHECK_FALSE(scan.disagree[static_cast<std::size_t>(scan.time) - 1]);
      if (scan.time >= 2) CHECK(scan.disagree[static_cast<std::size_t>(scan.time) - 2]);

      // The early-stopping scan reports the same first agreement.
      CounterRng rng2(606, static_cast<std::uint64_t>(rep));
      const DiagonalScan early = diagonal_agreement_time(rc, v, rng2, opt, nullptr);
      CHECK(early.resolved);
      CHECK(early.time == scan.time);
      CHECK(early.value == scan.value);
    }
  }
}

TEST_CASE("coding radius never exceeds the diagonal agreement time") {
  const auto lg = edges_of({13, 13});
  const RandomClusterModel rc(lg, 0.35, 2.0);
  const SiteId v = deep_interior_site(*lg);
  DynamicsOptions opt;
  opt.time_cap = 8;
  int both = 0;
  for (int rep = 0; rep < 40; ++rep) {
    CounterRng rng(909, static_cast<std::uint64_t>(rep));
    const RadiusScan rad = coding_radius(rc, v, rng, opt, nullptr);
    CounterRng rng2(909, static_cast<std::uint64_t>(rep));
    const DiagonalScan diag = diagonal_agreement_time(rc, v, rng2, opt, nullptr);
    if (rad.resolved && diag.resolved) {
      CHECK(rad.radius <= diag.time);
      ++both;
    }
  }
  CHECK(both >= 30);
}

TEST_CASE("space-time radii are even, at least twice the agreement time, and untied") {
  const auto lg = edges_of({13, 13});
  const RandomClusterModel rc(lg, 0.3, 2.0);
  const SiteId v = deep_interior_site(*lg);
  DynamicsOptions opt;
  opt.time_cap = 6;
  int resolved = 0;
  for (int rep = 0; rep < 30; ++rep) {
    CounterRng rng(111, static_cast<std::uint64_t>(rep));
    const SpaceTimeScan scan = space_time_radius(rc, v, rng, opt, nullptr);
    CHECK_FALSE(scan.order_tied);
    if (!scan.resolved) continue;
    ++resolved;
    CHECK(scan.radius == 2 * scan.time);
    CounterRng rng2(111, static_cast<std::uint64_t>(rep));
    const DiagonalScan diag = diagonal_agreement_time(rc, v, rng2, opt, nullptr);
    REQUIRE(diag.resolved);
    CHECK(scan.time >= diag.time);
  }
  CHECK(resolved >= 25);
}

TEST_CASE("the phi estimator agrees with per-replica diagonal indicators") {
  const auto lg = edges_of({9, 9});
  const RandomClusterModel rc(lg, 0.3, 2.0);
  const SiteId v = deep_interior_site(*lg);
  DynamicsOptions opt;
  opt.time_cap = 3;
  opt.radius_cap = 3;  // keep the diagonal scan from clamping below the probed depth
  const std::int64_t N = 400;
  for (int n = 1; n <= 3; ++n) {
    const PhiEstimate est = estimate_phi(rc, v, n, n, N, 2468, opt);
    std::int64_t manual = 0;
    for (std::int64_t k = 0; k < N; ++k) {
      CounterRng rng(2468, static_cast<std::uint64_t>(k));
      const DiagonalScan scan = diagonal_agreement_time(rc, v, rng, opt, nullptr, n);
      manual += scan.disagree[static_cast<std::size_t>(n) - 1];
    }
    CHECK(est.trials == N);
    CHECK(est.disagreements == manual);
    CHECK(est.fraction == doctest::Approx(static_cast<double>(manual) / N));
    if (est.disagreements > 0 && est.disagreements < N) CHECK(est.std_error > 0.0);
  }
}

TEST_CASE("phi estimates decay as the diagonal deepens") {
  const auto lg = edges_of({13, 13});
  const RandomClusterModel rc(lg, 0.3, 2.0);
  const SiteId v = deep_interior_site(*lg);
  DynamicsOptions opt;
  opt.time_cap = 4;
  const PhiEstimate p1 = estimate_phi(rc, v, 1, 1, 1500, 1357, opt);
  const PhiEstimate p3 = estimate_phi(rc, v, 3, 3, 1500, 1357, opt);
  CHECK(p1.fraction > p3.fraction);
  CHECK(p3.fraction < 0.02);
}
