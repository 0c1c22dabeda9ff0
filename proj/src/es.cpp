#include "cftplab/es.hpp"

#include <algorithm>
#include <stdexcept>

namespace cftplab {

ColorSources draw_color_sources(const SiteGraph& base, int q, const CounterRng& rng) {
  const int n = base.size();
  ColorSources s;
  s.z.resize(static_cast<std::size_t>(n));
  s.color.resize(static_cast<std::size_t>(n));
  // Tags live at time 1, colors at time 0: disjoint counters, independent.
  for (int level = 0;; ++level) {
    for (int v = 0; v < n; ++v) s.z[v] = rng.uniform(v, 1, Stream::Source, level);
    std::vector<double> sorted = s.z;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) break;
    if (level >= 15) throw std::runtime_error("could not draw distinct vertex tags");
  }
  for (int v = 0; v < n; ++v)
    s.color[v] = 1 + rng.uniform_int(v, 0, Stream::Source, q);
  return s;
}

std::vector<int> cluster_colors(const SiteGraph& base, const std::vector<int>& cluster_label,
                                int cluster_count, int ghost_cluster, int boundary_color,
                                const ColorSources& sources, RepresentativeRule rule) {
  const int n = base.size();
  std::vector<SiteId> rep(static_cast<std::size_t>(cluster_count), -1);
  for (SiteId v = 0; v < n; ++v) {
    const int c = cluster_label[v];
    if (c < 0) continue;
    SiteId& r = rep[c];
    if (r < 0) {
      r = v;
      continue;
    }
    if (rule == RepresentativeRule::ArgminZ) {
      if (sources.z[v] < sources.z[r]) r = v;
    } else {
      if (base.coord_of(v) < base.coord_of(r)) r = v;
    }
  }
  std::vector<int> out(static_cast<std::size_t>(n), 0);
  for (SiteId v = 0; v < n; ++v) {
    const int c = cluster_label[v];
    if (c < 0) continue;
    out[v] = (c == ghost_cluster) ? boundary_color : sources.color[rep[c]];
  }
  return out;
}

std::optional<std::vector<std::uint64_t>> edge_payload_order(
    const SiteGraph& lg, const std::vector<std::vector<std::uint64_t>>& y,
    const std::vector<double>& z) {
  if (!lg.is_line_graph()) throw std::invalid_argument("line graph expected");
  const SiteGraph& base = *lg.base;
  {
    std::vector<double> sorted = z;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      return std::nullopt;  // tags collide; caller redraws
  }
  std::vector<std::uint64_t> out(lg.endpoints.size());
  for (std::size_t e = 0; e < lg.endpoints.size(); ++e) {
    auto [a, b] = lg.endpoints[e];
    const SiteId u = z[a] < z[b] ? a : b;
    const SiteId v = z[a] < z[b] ? b : a;
    int slot = 0;
    for (SiteId w : base.adj[u])
      if (z[u] <= z[w] && z[w] <= z[v]) ++slot;
    // slot >= 1 because v itself qualifies; tuples are 0-indexed.
    out[e] = y[u][static_cast<std::size_t>(slot - 1)];
  }
  return out;
}

std::vector<std::uint64_t> edge_payload_axis(const SiteGraph& lg,
                                             const std::vector<std::vector<std::uint64_t>>& y) {
  if (!lg.is_line_graph()) throw std::invalid_argument("line graph expected");
  const SiteGraph& base = *lg.base;
  if (base.ghost >= 0) throw std::invalid_argument("axis payloads need a plain box");
  std::vector<std::uint64_t> out(lg.endpoints.size());
  for (std::size_t e = 0; e < lg.endpoints.size(); ++e) {
    auto [a, b] = lg.endpoints[e];
    const SiteId u = std::min(a, b);  // row-major ids grow with coordinates
    const SiteId v = std::max(a, b);
    const auto cu = base.coord_of(u);
    const auto cv = base.coord_of(v);
    int axis = -1;
    for (int k = 0; k < base.dim; ++k)
      if (cu[k] != cv[k]) axis = k;
    if (axis < 0) throw std::logic_error("degenerate edge");
    out[e] = y[u][static_cast<std::size_t>(axis)];
  }
  return out;
}

}  // namespace cftplab
