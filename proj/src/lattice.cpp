#include "cftplab/lattice.hpp"

#include <algorithm>
#include <climits>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace cftplab {

std::vector<int> SiteGraph::coord_of(SiteId v) const {
  if (coords.empty()) return {};
  std::vector<int> c(dim);
  for (int k = 0; k < dim; ++k) c[k] = coords[static_cast<size_t>(v) * dim + k];
  return c;
}

SiteId SiteGraph::site_at(const std::vector<int>& c) const {
  if (static_cast<int>(c.size()) != dim || extent.empty()) return -1;
  // Row-major ranking; only valid for plain boxes, whose sites are exactly
  // the lattice points of the box in construction order.
  SiteId id = 0;
  for (int k = 0; k < dim; ++k) {
    if (c[k] < 0 || c[k] >= extent[k]) return -1;
    id = id * extent[k] + c[k];
  }
  if (id >= size() || coord_of(id) != c) return -1;
  return id;
}

std::vector<int> SiteGraph::distances_from(SiteId v, int cap) const {
  std::vector<int> dist(size(), -1);
  std::deque<SiteId> queue;
  dist[v] = 0;
  queue.push_back(v);
  while (!queue.empty()) {
    SiteId u = queue.front();
    queue.pop_front();
    if (cap >= 0 && dist[u] >= cap) continue;
    for (SiteId w : adj[u]) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

SiteGraph build_grid(const std::vector<int>& extent) {
  if (extent.empty()) throw std::invalid_argument("build_grid: empty extent");
  for (int e : extent)
    if (e < 1) throw std::invalid_argument("build_grid: extent entries must be >= 1");

  SiteGraph g;
  g.dim = static_cast<int>(extent.size());
  g.extent = extent;
  long long n = 1;
  for (int e : extent) n *= e;
  if (n > (1 << 24)) throw std::invalid_argument("build_grid: box too large");

  g.adj.resize(n);
  g.coords.resize(n * g.dim);
  g.orbit.assign(n, 0);
  g.orbit_degree = {2 * g.dim};

  std::vector<int> c(g.dim, 0);
  for (SiteId v = 0; v < n; ++v) {
    for (int k = 0; k < g.dim; ++k) g.coords[static_cast<size_t>(v) * g.dim + k] = c[k];
    // Neighbors along each axis; row-major stride per axis.
    long long stride = 1;
    for (int k = g.dim - 1; k >= 0; --k) {
      if (c[k] > 0) g.adj[v].push_back(static_cast<SiteId>(v - stride));
      if (c[k] + 1 < extent[k]) g.adj[v].push_back(static_cast<SiteId>(v + stride));
      stride *= extent[k];
    }
    std::sort(g.adj[v].begin(), g.adj[v].end());
    // Advance the row-major coordinate counter.
    for (int k = g.dim - 1; k >= 0; --k) {
      if (++c[k] < extent[k]) break;
      c[k] = 0;
    }
  }
  return g;
}

SiteGraph line_graph(const SiteGraph& g) {
  auto base = std::make_shared<SiteGraph>(g);
  SiteGraph lg;
  lg.dim = g.dim;
  lg.extent = g.extent;
  lg.base = base;
  lg.closed_world = g.closed_world;

  // Enumerate base edges (u, v) with u < v; parallel edges stay distinct.
  // Self-ordering of adj lists makes the enumeration deterministic.
  for (SiteId u = 0; u < g.size(); ++u)
    for (SiteId v : g.adj[u])
      if (u < v) lg.endpoints.emplace_back(u, v);

  int m = static_cast<int>(lg.endpoints.size());
  lg.adj.resize(m);

  std::vector<std::vector<int>> incident(g.size());
  for (int e = 0; e < m; ++e) {
    incident[lg.endpoints[e].first].push_back(e);
    incident[lg.endpoints[e].second].push_back(e);
  }
  for (const auto& group : incident)
    for (size_t i = 0; i < group.size(); ++i)
      for (size_t j = i + 1; j < group.size(); ++j) {
        lg.adj[group[i]].push_back(group[j]);
        lg.adj[group[j]].push_back(group[i]);
      }
  for (auto& nbrs : lg.adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }

  // Orbits: axis direction of the base edge when coordinates exist; edges to
  // a ghost vertex fall in their own class past the axis classes.
  lg.orbit.assign(m, 0);
  bool have_coords = !g.coords.empty();
  for (int e = 0; e < m; ++e) {
    auto [u, v] = lg.endpoints[e];
    if (g.ghost >= 0 && (u == g.ghost || v == g.ghost)) {
      lg.orbit[e] = g.dim;
    } else if (have_coords) {
      for (int k = 0; k < g.dim; ++k)
        if (g.coords[static_cast<size_t>(u) * g.dim + k] !=
            g.coords[static_cast<size_t>(v) * g.dim + k]) {
          lg.orbit[e] = k;
          break;
        }
    }
  }
  int orbit_count = 1 + *std::max_element(lg.orbit.begin(), lg.orbit.end());
  lg.orbit_degree.assign(orbit_count, 0);
  if (!lg.closed_world) {
    // In the infinite lattice both endpoints of an edge have full degree, so
    // every line site of an axis class has 2*(2d - 1) neighbors.
    for (int o = 0; o < orbit_count; ++o) lg.orbit_degree[o] = 2 * (2 * g.dim - 1);
  } else {
    for (int e = 0; e < m; ++e)
      lg.orbit_degree[lg.orbit[e]] = std::max(lg.orbit_degree[lg.orbit[e]], lg.degree(e));
  }
  return lg;
}

SiteGraph ghost_augmented_box(const SiteGraph& box) {
  if (box.is_line_graph() || box.ghost >= 0 || box.coords.empty())
    throw std::invalid_argument("ghost_augmented_box: expects a plain box");
  SiteGraph g;
  g.dim = box.dim;
  g.extent = box.extent;
  g.closed_world = true;
  int n = box.size();
  g.ghost = n;
  g.adj.resize(n + 1);
  g.coords.assign(static_cast<size_t>(n + 1) * g.dim, INT32_MIN);
  std::copy(box.coords.begin(), box.coords.end(), g.coords.begin());
  int full = 2 * box.dim;
  for (SiteId v = 0; v < n; ++v) {
    g.adj[v] = box.adj[v];
    int missing = full - box.degree(v);
    for (int k = 0; k < missing; ++k) {
      g.adj[v].push_back(g.ghost);
      g.adj[g.ghost].push_back(v);
    }
    std::sort(g.adj[v].begin(), g.adj[v].end());
  }
  std::sort(g.adj[g.ghost].begin(), g.adj[g.ghost].end());
  g.orbit.assign(n + 1, 0);
  g.orbit[g.ghost] = 1;
  g.orbit_degree = {full, g.degree(g.ghost)};
  return g;
}

Window ball(const SiteGraph& g, SiteId v, int r, BoundaryMode mode) {
  if (v < 0 || v >= g.size()) throw std::invalid_argument("ball: bad center");
  if (r < 0) throw std::invalid_argument("ball: negative radius");
  Window w;
  w.g = &g;
  w.center = v;
  w.radius = r;
  w.mode = mode;
  w.inside.assign(g.size(), 0);
  auto dist = g.distances_from(v, r);
  for (SiteId u = 0; u < g.size(); ++u)
    if (dist[u] >= 0 && dist[u] <= r) {
      w.interior.push_back(u);
      w.inside[u] = 1;
      if (g.deficient(u)) w.clipped = true;
    }
  return w;
}

Window whole_graph_window(const SiteGraph& g, BoundaryMode mode) {
  Window w;
  w.g = &g;
  w.center = deep_interior_site(g);
  w.radius = -1;
  w.mode = mode;
  w.inside.assign(g.size(), 1);
  w.interior.resize(g.size());
  std::iota(w.interior.begin(), w.interior.end(), 0);
  for (SiteId u = 0; u < g.size(); ++u)
    if (g.deficient(u)) {
      w.clipped = true;
      break;
    }
  // Radius of the covering ball, for reporting.
  auto dist = g.distances_from(w.center);
  w.radius = *std::max_element(dist.begin(), dist.end());
  return w;
}

std::vector<SiteId> sphere_shell(const SiteGraph& g, SiteId v, int n) {
  auto dist = g.distances_from(v, n);
  std::vector<SiteId> shell;
  for (SiteId u = 0; u < g.size(); ++u)
    if (dist[u] == n) shell.push_back(u);
  return shell;
}

int max_unclipped_radius(const SiteGraph& g, SiteId v) {
  auto dist = g.distances_from(v);
  int nearest_side = -1;
  int ecc = 0;
  for (SiteId u = 0; u < g.size(); ++u) {
    ecc = std::max(ecc, dist[u]);
    if (g.deficient(u) && (nearest_side < 0 || dist[u] < nearest_side)) nearest_side = dist[u];
  }
  return nearest_side < 0 ? ecc : nearest_side - 1;
}

SiteId deep_interior_site(const SiteGraph& g) {
  std::vector<SiteId> sources;
  for (SiteId u = 0; u < g.size(); ++u)
    if (g.deficient(u)) sources.push_back(u);

  if (sources.empty()) {
    // Closed world: minimize eccentricity instead.
    SiteId best = 0;
    int best_ecc = INT_MAX;
    for (SiteId v = 0; v < g.size(); ++v) {
      auto dist = g.distances_from(v);
      int ecc = *std::max_element(dist.begin(), dist.end());
      if (ecc < best_ecc) {
        best_ecc = ecc;
        best = v;
      }
    }
    return best;
  }

  // Multi-source BFS from the deficient sites; pick the farthest site.
  std::vector<int> dist(g.size(), -1);
  std::deque<SiteId> queue;
  for (SiteId s : sources) {
    dist[s] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    SiteId u = queue.front();
    queue.pop_front();
    for (SiteId w : g.adj[u])
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
  }
  SiteId best = 0;
  for (SiteId v = 1; v < g.size(); ++v)
    if (dist[v] > dist[best]) best = v;
  return best;
}

ClusterLabels clusters(const Config& edge_states, const Window& w, bool wired) {
  const SiteGraph& lg = *w.g;
  if (!lg.is_line_graph())
    throw std::invalid_argument("clusters: window must live on a line graph");
  if (edge_states.size() != static_cast<size_t>(lg.size()))
    throw std::invalid_argument("clusters: edge_states size mismatch");
  const SiteGraph& base = *lg.base;

  int n = base.size();
  int virtual_ghost = n;  // counting device, distinct from any real vertex
  UnionFind uf(n + 1);

  for (SiteId e = 0; e < lg.size(); ++e) {
    bool open = w.contains(e) ? edge_states[e] > 0 : wired;
    if (open) uf.unite(lg.endpoints[e].first, lg.endpoints[e].second);
  }
  if (wired) {
    // Sides of the box have open bonds beyond it: wire them to infinity.
    for (SiteId u = 0; u < n; ++u)
      if (base.deficient(u)) uf.unite(u, virtual_ghost);
  }

  ClusterLabels out;
  out.label.assign(n, -1);
  std::vector<int> compress(n + 1, -1);
  int next = 0;
  for (SiteId u = 0; u <= n; ++u) {
    int root = uf.find(u);
    if (compress[root] < 0) compress[root] = next++;
    if (u < n) out.label[u] = compress[root];
  }
  if (wired) out.ghost_cluster = compress[uf.find(virtual_ghost)];

  std::vector<char> seen_vertex(n, 0);
  for (SiteId e : w.interior) {
    for (SiteId u : {lg.endpoints[e].first, lg.endpoints[e].second})
      if (!seen_vertex[u]) {
        seen_vertex[u] = 1;
        out.universe.push_back(u);
      }
  }
  std::sort(out.universe.begin(), out.universe.end());

  std::vector<char> counted(next, 0);
  for (SiteId u : out.universe) {
    int c = out.label[u];
    if (!counted[c]) {
      counted[c] = 1;
      ++out.count_total;
      if (c != out.ghost_cluster) ++out.count_interior;
    }
  }
  return out;
}

}  // namespace cftplab
