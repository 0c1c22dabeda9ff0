#include "cftplab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cftplab {

namespace {

std::size_t checked_state_count(int spin_count, std::size_t n_sites) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n_sites; ++i) {
    if (total > (std::size_t{1} << 20) / static_cast<std::size_t>(spin_count))
      throw std::domain_error("window too large to enumerate");
    total *= static_cast<std::size_t>(spin_count);
  }
  return total;
}

void normalize(ExactDistribution& d, std::vector<double> weights,
               std::vector<Rat> exact_weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw std::runtime_error("enumeration has zero total weight");
  d.mass.resize(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) d.mass[i] = weights[i] / total;
  if (!exact_weights.empty()) {
    Rat sum(0);
    for (const Rat& w : exact_weights) sum = sum + w;
    d.exact_mass.resize(exact_weights.size());
    for (std::size_t i = 0; i < exact_weights.size(); ++i)
      d.exact_mass[i] = exact_weights[i] / sum;
    d.exact = true;
    // The float masses shadow the exact ones; keep them consistent.
    for (std::size_t i = 0; i < weights.size(); ++i) d.mass[i] = d.exact_mass[i].to_double();
  }
  d.cumulative.resize(d.mass.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < d.mass.size(); ++i) {
    acc += d.mass[i];
    d.cumulative[i] = acc;
  }
  d.cumulative.back() = 1.0;
}

}  // namespace

void ExactDistribution::materialize(std::size_t rank, Config& out) const {
  out = base_config;
  const int s = spins.size();
  for (SiteId v : sites) {
    out[v] = spins.values[rank % static_cast<std::size_t>(s)];
    rank /= static_cast<std::size_t>(s);
  }
}

std::size_t ExactDistribution::rank_of(const Config& cfg) const {
  const std::size_t s = static_cast<std::size_t>(spins.size());
  std::size_t rank = 0;
  std::size_t stride = 1;
  for (SiteId v : sites) {
    rank += static_cast<std::size_t>(spins.index_of(cfg[v])) * stride;
    stride *= s;
  }
  return rank;
}

int ExactDistribution::digit(std::size_t rank, std::size_t site_index) const {
  const std::size_t s = static_cast<std::size_t>(spins.size());
  for (std::size_t i = 0; i < site_index; ++i) rank /= s;
  return static_cast<int>(rank % s);
}

std::vector<double> ExactDistribution::marginal(SiteId v) const {
  const auto it = std::lower_bound(sites.begin(), sites.end(), v);
  if (it == sites.end() || *it != v) throw std::invalid_argument("site not in window");
  const std::size_t iv = static_cast<std::size_t>(it - sites.begin());
  std::vector<double> out(static_cast<std::size_t>(spins.size()), 0.0);
  for (std::size_t r = 0; r < mass.size(); ++r) out[digit(r, iv)] += mass[r];
  return out;
}

std::vector<Rat> ExactDistribution::marginal_exact(SiteId v) const {
  if (!exact) throw std::logic_error("no exact masses available");
  const auto it = std::lower_bound(sites.begin(), sites.end(), v);
  if (it == sites.end() || *it != v) throw std::invalid_argument("site not in window");
  const std::size_t iv = static_cast<std::size_t>(it - sites.begin());
  std::vector<Rat> out(static_cast<std::size_t>(spins.size()), Rat(0));
  for (std::size_t r = 0; r < exact_mass.size(); ++r)
    out[digit(r, iv)] = out[digit(r, iv)] + exact_mass[r];
  return out;
}

std::size_t ExactDistribution::sample_rank(double u) const {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
  return std::min(idx, mass.size() - 1);
}

double exact_tv(const ExactDistribution& a, const ExactDistribution& b) {
  if (a.sites != b.sites || a.spins.values != b.spins.values)
    throw std::invalid_argument("distributions live on different windows");
  double s = 0.0;
  for (std::size_t i = 0; i < a.mass.size(); ++i) s += std::fabs(a.mass[i] - b.mass[i]);
  return 0.5 * s;
}

std::optional<Rat> exact_tv_exact(const ExactDistribution& a, const ExactDistribution& b) {
  if (!a.exact || !b.exact) return std::nullopt;
  Rat s(0);
  for (std::size_t i = 0; i < a.exact_mass.size(); ++i)
    s = s + (a.exact_mass[i] - b.exact_mass[i]).abs();
  return s / Rat(2);
}

double marginal_tv(const ExactDistribution& a, const ExactDistribution& b, SiteId v) {
  const auto ma = a.marginal(v);
  const auto mb = b.marginal(v);
  double s = 0.0;
  for (std::size_t i = 0; i < ma.size(); ++i) s += std::fabs(ma[i] - mb[i]);
  return 0.5 * s;
}

// --- model-specific weights -------------------------------------------------

namespace {

struct BondList {
  // Pairs met once each: (u, v) with cfg[v] read from the configuration, and
  // virtual partners beyond the sides with a fixed extreme spin.
  std::vector<std::pair<SiteId, SiteId>> internal;   // both ends interior
  std::vector<std::pair<SiteId, SiteId>> boundary;   // (interior, frozen site)
  std::vector<std::pair<SiteId, int>> missing;       // (interior, multiplicity)
};

BondList vertex_bonds(const SiteGraph& g, const Window& w) {
  BondList out;
  for (SiteId v : w.interior) {
    for (SiteId u : g.adj[v]) {
      if (w.contains(u)) {
        if (u < v) out.internal.emplace_back(u, v);
      } else {
        out.boundary.emplace_back(v, u);
      }
    }
    if (!g.closed_world) {
      const int miss = g.orbit_degree[g.orbit[v]] - g.degree(v);
      if (miss > 0) out.missing.emplace_back(v, miss);
    }
  }
  return out;
}

ExactDistribution enumerate_rc(const RandomClusterModel& m, const Window& w) {
  const SiteGraph& g = m.graph();
  const bool wired = (w.mode == BoundaryMode::Plus);
  ExactDistribution d;
  d.spins = m.spins();
  d.sites = w.interior;
  d.base_config.assign(static_cast<std::size_t>(g.size()), extreme(m.spins(), w.mode));
  const std::size_t total = checked_state_count(2, d.sites.size());

  const bool exact = m.p_exact().has_value() && m.q_exact().has_value();
  std::vector<double> weights(total);
  std::vector<Rat> exact_weights;
  if (exact) exact_weights.resize(total);

  Config buf;
  for (std::size_t r = 0; r < total; ++r) {
    d.materialize(r, buf);
    long open = 0;
    for (SiteId e : d.sites) open += (buf[e] > 0);
    const long closed = static_cast<long>(d.sites.size()) - open;
    const ClusterLabels cl = clusters(buf, w, wired);
    const long k = cl.count_interior;
    weights[r] = std::pow(m.p(), static_cast<double>(open)) *
                 std::pow(1.0 - m.p(), static_cast<double>(closed)) *
                 std::pow(m.q(), static_cast<double>(k));
    if (exact) {
      const Rat p = *m.p_exact();
      exact_weights[r] = p.pow(open) * (Rat(1) - p).pow(closed) * m.q_exact()->pow(k);
    }
  }
  normalize(d, std::move(weights), std::move(exact_weights));
  return d;
}

ExactDistribution enumerate_ising(const IsingModel& m, const Window& w) {
  const SiteGraph& g = m.graph();
  const Spin ext = extreme(m.spins(), w.mode);
  ExactDistribution d;
  d.spins = m.spins();
  d.sites = w.interior;
  d.base_config.assign(static_cast<std::size_t>(g.size()), ext);
  const std::size_t total = checked_state_count(2, d.sites.size());
  const BondList bonds = vertex_bonds(g, w);

  const bool exact = m.e2beta_exact().has_value();
  std::vector<double> weights(total);
  std::vector<Rat> exact_weights;
  if (exact) exact_weights.resize(total);

  Config buf;
  for (std::size_t r = 0; r < total; ++r) {
    d.materialize(r, buf);
    long disagree = 0;
    for (const auto& [u, v] : bonds.internal) disagree += (buf[u] != buf[v]);
    for (const auto& [v, u] : bonds.boundary) disagree += (buf[v] != buf[u]);
    for (const auto& [v, mult] : bonds.missing) disagree += (buf[v] != ext) * mult;
    weights[r] = std::exp(-2.0 * m.beta() * static_cast<double>(disagree));
    if (exact) exact_weights[r] = m.e2beta_exact()->pow(-disagree);
  }
  normalize(d, std::move(weights), std::move(exact_weights));
  return d;
}

ExactDistribution enumerate_lrising(const LongRangeIsingModel& m, const Window& w) {
  const SiteGraph& g = m.graph();
  const Spin ext = extreme(m.spins(), w.mode);
  ExactDistribution d;
  d.spins = m.spins();
  d.sites = w.interior;
  d.base_config.assign(static_cast<std::size_t>(g.size()), ext);
  const std::size_t total = checked_state_count(2, d.sites.size());

  std::vector<double> weights(total);
  double emax = -1e300;
  Config buf;
  std::vector<double> energies(total);
  for (std::size_t r = 0; r < total; ++r) {
    d.materialize(r, buf);
    double e = 0.0;
    for (SiteId v : d.sites) {
      for (const auto& b : m.bonds_of(v)) {
        if (w.contains(b.other) && b.other > v) continue;  // interior pairs met once
        e += b.coupling * buf[v] * buf[b.other];
      }
      e += m.exterior_coupling(v) * buf[v] * ext;
    }
    energies[r] = e;
    emax = std::max(emax, e);
  }
  for (std::size_t r = 0; r < total; ++r) weights[r] = std::exp(energies[r] - emax);
  normalize(d, std::move(weights), {});
  return d;
}

}  // namespace

ExactDistribution enumerate_gibbs(const Specification& spec, const Window& w) {
  if (auto* rc = dynamic_cast<const RandomClusterModel*>(&spec)) return enumerate_rc(*rc, w);
  if (auto* is = dynamic_cast<const IsingModel*>(&spec)) return enumerate_ising(*is, w);
  if (auto* lr = dynamic_cast<const LongRangeIsingModel*>(&spec))
    return enumerate_lrising(*lr, w);
  throw std::invalid_argument("no enumeration rule for model " + spec.name());
}

ExactDistribution enumerate_potts(const SiteGraph& box, int q, double beta,
                                  int boundary_color, const std::optional<Rat>& e_beta) {
  if (box.is_line_graph()) throw std::invalid_argument("vertex graph expected");
  if (q < 2 || q > 100) throw std::invalid_argument("color count out of range");
  if (boundary_color < 0 || boundary_color > q)
    throw std::invalid_argument("boundary color out of range");

  ExactDistribution d;
  std::vector<Spin> colors(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) colors[static_cast<std::size_t>(i)] = static_cast<Spin>(i + 1);
  d.spins = SpinSpace{colors};
  d.sites.resize(static_cast<std::size_t>(box.size()));
  for (int v = 0; v < box.size(); ++v) d.sites[static_cast<std::size_t>(v)] = v;
  d.base_config.assign(static_cast<std::size_t>(box.size()), Spin{0});
  const std::size_t total = checked_state_count(q, d.sites.size());

  std::vector<std::pair<SiteId, SiteId>> edges;
  for (SiteId v = 0; v < box.size(); ++v)
    for (SiteId u : box.adj[v])
      if (u < v) edges.emplace_back(u, v);

  std::vector<double> weights(total);
  std::vector<Rat> exact_weights;
  if (e_beta.has_value()) exact_weights.resize(total);

  Config buf;
  for (std::size_t r = 0; r < total; ++r) {
    d.materialize(r, buf);
    long h = 0;
    for (const auto& [u, v] : edges) h += (buf[u] == buf[v]);
    if (boundary_color >= 1 && !box.closed_world) {
      for (SiteId v = 0; v < box.size(); ++v) {
        const int miss = box.orbit_degree[box.orbit[v]] - box.degree(v);
        if (miss > 0 && buf[v] == boundary_color) h += miss;
      }
    }
    weights[r] = std::exp(beta * static_cast<double>(h));
    if (e_beta.has_value()) exact_weights[r] = e_beta->pow(h);
  }
  normalize(d, std::move(weights), std::move(exact_weights));
  return d;
}

ConditionalCheck check_conditional(const Specification& spec, const Window& w) {
  const ExactDistribution d = enumerate_gibbs(spec, w);
  const std::size_t s = static_cast<std::size_t>(d.spins.size());
  ConditionalCheck out;

  Config buf;
  std::size_t stride = 1;
  for (std::size_t iv = 0; iv < d.sites.size(); ++iv, stride *= s) {
    const SiteId v = d.sites[iv];
    for (std::size_t r = 0; r < d.mass.size(); ++r) {
      if (d.digit(r, iv) != 0) continue;  // one representative per class
      double class_total = 0.0;
      for (std::size_t k = 0; k < s; ++k) class_total += d.mass[r + k * stride];
      if (class_total <= 0.0) continue;
      d.materialize(r, buf);
      const auto cdf = spec.conditional_cdf(buf, v, w.mode);
      double acc = 0.0;
      for (std::size_t k = 0; k < s; ++k) {
        acc += d.mass[r + k * stride];
        out.max_cdf_error = std::max(out.max_cdf_error, std::fabs(acc / class_total - cdf[k]));
      }
      if (d.exact) {
        const auto cdf_exact = spec.conditional_cdf_exact(buf, v, w.mode);
        if (cdf_exact.has_value()) {
          out.exact_checked = true;
          Rat class_sum(0);
          for (std::size_t k = 0; k < s; ++k) class_sum = class_sum + d.exact_mass[r + k * stride];
          if (!(class_sum == Rat(0))) {
            Rat acc_exact(0);
            for (std::size_t k = 0; k < s; ++k) {
              acc_exact = acc_exact + d.exact_mass[r + k * stride];
              if (!(acc_exact / class_sum == (*cdf_exact)[k])) out.exact_equal = false;
            }
          }
        }
      }
    }
  }

  // One full deterministic-order sweep of the heat-bath kernel applied to the
  // exact law must return the exact law.
  std::vector<double> pi = d.mass;
  std::vector<double> next(pi.size());
  stride = 1;
  for (std::size_t iv = 0; iv < d.sites.size(); ++iv, stride *= s) {
    const SiteId v = d.sites[iv];
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t r = 0; r < pi.size(); ++r) {
      if (d.digit(r, iv) != 0) continue;
      double class_total = 0.0;
      for (std::size_t k = 0; k < s; ++k) class_total += pi[r + k * stride];
      if (class_total <= 0.0) continue;
      d.materialize(r, buf);
      const auto cdf = spec.conditional_cdf(buf, v, w.mode);
      double prev = 0.0;
      for (std::size_t k = 0; k < s; ++k) {
        next[r + k * stride] = class_total * (cdf[k] - prev);
        prev = cdf[k];
      }
    }
    pi.swap(next);
  }
  for (std::size_t r = 0; r < pi.size(); ++r)
    out.stationarity_error = std::max(out.stationarity_error, std::fabs(pi[r] - d.mass[r]));
  return out;
}

double coupling_disagreement(const std::vector<double>& cdf_a,
                             const std::vector<double>& cdf_b) {
  double equal_mass = 0.0;
  double prev_a = 0.0, prev_b = 0.0;
  for (std::size_t k = 0; k < cdf_a.size(); ++k) {
    const double lo = std::max(prev_a, prev_b);
    const double hi = std::min(cdf_a[k], cdf_b[k]);
    if (hi > lo) equal_mass += hi - lo;
    prev_a = cdf_a[k];
    prev_b = cdf_b[k];
  }
  return 1.0 - equal_mass;
}

}  // namespace cftplab
