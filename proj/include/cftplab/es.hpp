#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cftplab/lattice.hpp"
#include "cftplab/randomness.hpp"

namespace cftplab {

// Per-vertex ingredients for turning an edge configuration into a coloring:
// a real tag z (for representatives and edge slots) and a uniform color in
// 1..q.  All deterministic functions of one CounterRng, so a replica's
// coloring is reproducible.
struct ColorSources {
  std::vector<double> z;
  std::vector<int> color;
};

ColorSources draw_color_sources(const SiteGraph& base, int q, const CounterRng& rng);

enum class RepresentativeRule { ArgminZ, LexMinCoord };

// Colors every cluster with the color drawn at its representative vertex;
// the ghost's cluster (when ghost_cluster >= 0) gets boundary_color instead.
// The representative is a cluster-internal choice, so each cluster's color
// is an independent uniform.
std::vector<int> cluster_colors(const SiteGraph& base, const std::vector<int>& cluster_label,
                                int cluster_count, int ghost_cluster, int boundary_color,
                                const ColorSources& sources, RepresentativeRule rule);

// Per-edge payload read off per-vertex payload tuples, one tuple slot per
// incident edge, such that distinct edges always read distinct (vertex, slot)
// pairs: edge {u, v} (u the endpoint with the smaller z) reads slot
// #{w adjacent to u : z_u <= z_w <= z_v}.  Requires all z distinct — returns
// nullopt when they are not, so the caller can redraw.
// `lg` is the line graph of `base`; results are indexed by its sites.
std::optional<std::vector<std::uint64_t>> edge_payload_order(
    const SiteGraph& lg, const std::vector<std::vector<std::uint64_t>>& y,
    const std::vector<double>& z);

// Axis variant on boxes: the edge from v to v + e_k reads slot k of the
// lower endpoint.  No tags needed.
std::vector<std::uint64_t> edge_payload_axis(const SiteGraph& lg,
                                             const std::vector<std::vector<std::uint64_t>>& y);

}  // namespace cftplab
