#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cftplab/models.hpp"

namespace cftplab {

// A fully enumerated window marginal: one mass per assignment of interior
// spins, exterior frozen at the window mode's extreme.  Ranks run over the
// interior sites in ascending id order, first site least significant.
struct ExactDistribution {
  SpinSpace spins;
  std::vector<SiteId> sites;       // sorted interior
  Config base_config;              // full-length; exterior already frozen
  std::vector<double> mass;        // normalized
  std::vector<Rat> exact_mass;     // normalized, when exact arithmetic applies
  std::vector<double> cumulative;  // prefix sums of mass
  bool exact = false;

  std::size_t size() const { return mass.size(); }
  void materialize(std::size_t rank, Config& out) const;  // out = base + rank digits
  std::size_t rank_of(const Config& cfg) const;
  int digit(std::size_t rank, std::size_t site_index) const;

  std::vector<double> marginal(SiteId v) const;      // law of the spin at v
  std::vector<Rat> marginal_exact(SiteId v) const;
  std::size_t sample_rank(double u) const;            // inverse-CDF over ranks
};

// Total variation distance between two distributions on the same window.
double exact_tv(const ExactDistribution& a, const ExactDistribution& b);
std::optional<Rat> exact_tv_exact(const ExactDistribution& a, const ExactDistribution& b);
double marginal_tv(const ExactDistribution& a, const ExactDistribution& b, SiteId v);

// Brute-force Gibbs law of the window interior under the window's boundary
// mode.  Weights are computed from the model parameters directly — open/
// closed edge counts and cluster counts, or bond disagreement counts — never
// through the conditional interface being tested.  Throws when the state
// space exceeds 2^20.
ExactDistribution enumerate_gibbs(const Specification& spec, const Window& w);

// Brute-force q-state ferromagnet on the vertices of a box: weight
// exp(beta * (#equal-endpoint edges + #boundary contacts with the chosen
// color)), missing neighbors beyond the sides counting as boundary contacts.
// boundary_color 0 drops the boundary term (free sides).
ExactDistribution enumerate_potts(const SiteGraph& box, int q, double beta,
                                  int boundary_color,
                                  const std::optional<Rat>& e_beta = std::nullopt);

struct ConditionalCheck {
  double max_cdf_error = 0.0;       // conditional-by-restriction vs the model
  double stationarity_error = 0.0;  // one full sweep applied to the exact law
  bool exact_checked = false;       // exact-arithmetic comparison also ran
  bool exact_equal = true;
};

// Cross-checks the model's conditional CDFs against the enumerated law: the
// restriction of the law to one free site must reproduce them, and a sweep
// built from them must leave the law invariant.
ConditionalCheck check_conditional(const Specification& spec, const Window& w);

// Probability that the shared-uniform coupling of two single-site
// conditionals produces different spins: one minus the overlap of the
// per-spin u-intervals of the two inverse CDFs.
double coupling_disagreement(const std::vector<double>& cdf_a,
                             const std::vector<double>& cdf_b);

}  // namespace cftplab
