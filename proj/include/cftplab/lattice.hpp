#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

namespace cftplab {

using SiteId = std::int32_t;
using Spin = std::int8_t;
// A configuration always covers every site of the ambient graph; sites outside
// whatever window is in play are held at the extreme value of the boundary
// mode, so conditional laws can read the exterior straight out of the vector.
using Config = std::vector<Spin>;

// Minus = free / minimal boundary, Plus = wired / maximal boundary.
// The order of the enumerators mirrors the order of the extremes.
enum class BoundaryMode { Minus = 0, Plus = 1 };

inline const char* to_string(BoundaryMode m) {
  return m == BoundaryMode::Plus ? "plus" : "minus";
}

// Finite site graph: a box in Z^d, the line graph of one (sites = edges of the
// base box, used by bond models), or a box augmented with a ghost vertex that
// absorbs the missing boundary bonds.  Immutable after construction and safe
// to share across worker threads.
struct SiteGraph {
  int dim = 0;
  std::vector<int> extent;                      // box extents (boxes and their descendants)
  std::vector<std::vector<SiteId>> adj;         // sorted; repeated entries = parallel edges
  std::vector<int> coords;                      // size()*dim, flattened; INT32_MIN = no coordinate
  std::vector<int> orbit;                       // translation class of each site
  std::vector<int> orbit_degree;                // degree of that class in the infinite completion
  bool closed_world = false;                    // graph is not a finite stand-in for anything larger
  SiteId ghost = -1;                            // real ghost vertex (augmented boxes), else -1
  std::shared_ptr<const SiteGraph> base;        // set iff this is a line graph
  std::vector<std::pair<SiteId, SiteId>> endpoints;  // line site -> base endpoints

  int size() const { return static_cast<int>(adj.size()); }
  bool is_line_graph() const { return base != nullptr; }
  int degree(SiteId v) const { return static_cast<int>(adj[v].size()); }

  // True when the site would have further neighbors in the infinite
  // completion of the graph, i.e. it sits on a box side.
  bool deficient(SiteId v) const {
    if (closed_world) return false;
    return degree(v) < orbit_degree[orbit[v]];
  }

  std::vector<int> coord_of(SiteId v) const;
  SiteId site_at(const std::vector<int>& c) const;  // -1 when outside the box

  // BFS distances; unreachable sites get -1.  cap < 0 means unlimited.
  std::vector<int> distances_from(SiteId v, int cap = -1) const;
};

SiteGraph build_grid(const std::vector<int>& extent);
SiteGraph line_graph(const SiteGraph& g);

// Box plus one ghost vertex, with every vertex's degree topped up to 2*dim by
// parallel edges to the ghost.  This closes the box: the boundary bonds exist
// as ordinary (random) edges instead of being imagined beyond the sides.
SiteGraph ghost_augmented_box(const SiteGraph& box);

// Ball window around a center.  `clipped` is set when the ball touches sites
// with missing neighbors (box sides); the window is never silently shrunk —
// callers decide whether a clipped window is acceptable.
struct Window {
  const SiteGraph* g = nullptr;
  SiteId center = 0;
  int radius = 0;
  BoundaryMode mode = BoundaryMode::Plus;
  std::vector<SiteId> interior;  // sorted site ids with distance <= radius
  std::vector<char> inside;      // indicator over all sites
  bool clipped = false;

  bool contains(SiteId v) const { return inside[v] != 0; }
};

Window ball(const SiteGraph& g, SiteId v, int r, BoundaryMode mode);
Window whole_graph_window(const SiteGraph& g, BoundaryMode mode);
std::vector<SiteId> sphere_shell(const SiteGraph& g, SiteId v, int n);

// Largest r such that ball(g, v, r) is unclipped; the whole-graph radius when
// nothing is deficient.
int max_unclipped_radius(const SiteGraph& g, SiteId v);

// Site furthest from any deficient site (ties broken by id); the natural
// place to center measurement windows.
SiteId deep_interior_site(const SiteGraph& g);

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n), size_(n, 1), count_(n) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (size_[x] < size_[y]) std::swap(x, y);
    parent_[y] = x;
    size_[x] += size_[y];
    --count_;
    return true;
  }
  bool connected(int x, int y) { return find(x) == find(y); }
  int count() const { return count_; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  int count_;
};

// Open-cluster decomposition of the base-graph vertices under an edge
// configuration, seen through a window on the line graph.  Edges outside the
// window's interior follow the boundary: all open when wired, all closed when
// free.  When wired, every vertex with an open route to the outside of the
// box is merged into a single ghost cluster, and count_interior counts only
// the clusters of window-incident vertices that avoid it; when free, every
// cluster of a window-incident vertex counts (isolated vertices are their own
// clusters).
struct ClusterLabels {
  std::vector<int> label;        // per base vertex, compressed cluster ids
  int ghost_cluster = -1;        // label of the ghost cluster, -1 when free
  int count_interior = 0;
  int count_total = 0;           // clusters of window-incident vertices, ghost included
  std::vector<SiteId> universe;  // base vertices incident to the window interior

  bool same_cluster(SiteId u, SiteId v) const { return label[u] == label[v]; }
  bool in_ghost(SiteId u) const { return ghost_cluster >= 0 && label[u] == ghost_cluster; }
};

ClusterLabels clusters(const Config& edge_states, const Window& w, bool wired);

}  // namespace cftplab
