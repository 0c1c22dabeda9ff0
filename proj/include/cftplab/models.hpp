#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cftplab/lattice.hpp"
#include "cftplab/rational.hpp"

namespace cftplab {

struct SpinSpace {
  std::vector<Spin> values;  // strictly ascending

  int size() const { return static_cast<int>(values.size()); }
  Spin min() const { return values.front(); }
  Spin max() const { return values.back(); }
  int index_of(Spin s) const {
    for (int i = 0; i < size(); ++i)
      if (values[i] == s) return i;
    return -1;
  }
};

inline Spin extreme(const SpinSpace& s, BoundaryMode m) {
  return m == BoundaryMode::Plus ? s.max() : s.min();
}

// The finitely many values the cumulative conditional law can take, sorted
// ascending with 1 last, together with their first-difference weights.  A
// finite update variable is drawn from the weights; feeding the value into
// the inverse-CDF update reproduces the conditional law exactly.
struct FiniteAlphabet {
  std::vector<double> values;
  std::vector<double> weights;
  std::vector<Rat> exact_values;   // parallel to values when exact
  std::vector<Rat> exact_weights;  // parallel to weights when exact
  bool exact = false;

  int size() const { return static_cast<int>(values.size()); }

  // Index drawn with probability weights[i] from a uniform u in [0,1):
  // the least i with values[i] > u.  Zero-weight atoms are never picked.
  int pick(double u) const;
  double snap(double u) const { return values[pick(u)]; }
  bool contains(double a, double tol = 1e-12) const;
};

// Window-specialized conditional evaluator used by the dynamics; agrees with
// Specification::conditional_cdf pointwise but may precompute everything the
// window's exterior determines.
class ConditionalEvaluator {
 public:
  virtual ~ConditionalEvaluator() = default;
  virtual void cumulative(const Config& cfg, SiteId v, std::vector<double>& cdf) = 0;
};

// A monotone single-site specification: for every site, the conditional law
// of its spin given everything else, represented as a cumulative distribution
// over the ordered spin space.  Configurations passed in must hold the
// extreme spin of the boundary mode everywhere outside the region the caller
// treats as free; sites beyond the box sides count as extreme implicitly.
class Specification {
 public:
  virtual ~Specification() = default;

  virtual const SiteGraph& graph() const = 0;
  virtual const SpinSpace& spins() const = 0;
  virtual std::string name() const = 0;

  virtual std::vector<double> conditional_cdf(const Config& cfg, SiteId v,
                                              BoundaryMode mode) const = 0;

  // Exact-arithmetic conditional when the parameters admit one.
  virtual std::optional<std::vector<Rat>> conditional_cdf_exact(const Config&, SiteId,
                                                                BoundaryMode) const {
    return std::nullopt;
  }

  virtual FiniteAlphabet finite_alphabet() const = 0;

  virtual std::unique_ptr<ConditionalEvaluator> evaluator(const Window& w,
                                                          BoundaryMode mode) const;
};

// min { s : cumulative(s) >= a }.  Raising cfg pointwise lowers the
// cumulative values of these models, so this map is monotone in cfg for
// every fixed a; that is the property the coupled dynamics rely on.
Spin inverse_cdf_spin(const SpinSpace& s, const std::vector<double>& cdf, double a);

Spin update_spin(const Specification& spec, const Config& cfg, SiteId v, double a,
                 BoundaryMode mode);

// Same map restricted to alphabet members; rejects other update values.
Spin finite_update_spin(const Specification& spec, const FiniteAlphabet& alpha,
                        const Config& cfg, SiteId v, double a, BoundaryMode mode);

// ---------------------------------------------------------------------------
// Random-cluster model on the edges (line-graph sites) of a base graph.
// Spin 1 = open, 0 = closed.  The conditional for an edge depends only on
// whether its endpoints are connected off that edge; in Plus mode the
// connection may run through the wired exterior (ghost).
class RandomClusterModel : public Specification {
 public:
  RandomClusterModel(std::shared_ptr<const SiteGraph> edges, double p, double q);
  RandomClusterModel(std::shared_ptr<const SiteGraph> edges, Rat p, Rat q);

  const SiteGraph& graph() const override { return *edges_; }
  const SpinSpace& spins() const override { return spins_; }
  std::string name() const override { return "rc"; }

  double p() const { return p_; }
  double q() const { return q_; }
  const std::optional<Rat>& p_exact() const { return p_exact_; }
  const std::optional<Rat>& q_exact() const { return q_exact_; }

  std::vector<double> conditional_cdf(const Config& cfg, SiteId v,
                                      BoundaryMode mode) const override;
  std::optional<std::vector<Rat>> conditional_cdf_exact(const Config& cfg, SiteId v,
                                                        BoundaryMode mode) const override;
  FiniteAlphabet finite_alphabet() const override;
  std::unique_ptr<ConditionalEvaluator> evaluator(const Window& w,
                                                  BoundaryMode mode) const override;

  // Endpoints of edge e connected when e itself is removed?  Slow exact path
  // over the whole base graph; the window evaluator is the fast equivalent.
  bool connected_off_edge(const Config& cfg, SiteId e, BoundaryMode mode) const;

 private:
  void validate() const;

  std::shared_ptr<const SiteGraph> edges_;
  SpinSpace spins_{{0, 1}};
  double p_, q_;
  std::optional<Rat> p_exact_, q_exact_;
};

// ---------------------------------------------------------------------------
// Nearest-neighbor Ising model on the vertices of a box; spins -1 / +1.
// P(+1 | rest) = 1 / (1 + exp(-2 * beta * field)), field = sum of the 2d
// neighboring spins, with missing neighbors beyond the box sides read as the
// mode extreme.
class IsingModel : public Specification {
 public:
  IsingModel(std::shared_ptr<const SiteGraph> box, double beta);
  // Exact variant keyed by e^(2*beta) rational.
  IsingModel(std::shared_ptr<const SiteGraph> box, Rat e2beta);

  const SiteGraph& graph() const override { return *box_; }
  const SpinSpace& spins() const override { return spins_; }
  std::string name() const override { return "ising"; }

  double beta() const { return beta_; }
  const std::optional<Rat>& e2beta_exact() const { return e2beta_; }

  int neighbor_field(const Config& cfg, SiteId v, BoundaryMode mode) const;

  std::vector<double> conditional_cdf(const Config& cfg, SiteId v,
                                      BoundaryMode mode) const override;
  std::optional<std::vector<Rat>> conditional_cdf_exact(const Config& cfg, SiteId v,
                                                        BoundaryMode mode) const override;
  FiniteAlphabet finite_alphabet() const override;

 private:
  std::shared_ptr<const SiteGraph> box_;
  SpinSpace spins_{{-1, 1}};
  double beta_;
  std::optional<Rat> e2beta_;
};

// ---------------------------------------------------------------------------
// Ising model with couplings J(u, v) = beta * dist(u, v)^(-alpha) truncated at
// graph distance L; box graphs only, where graph distance is the l1 distance.
// Sites beyond the box sides contribute their couplings at the mode extreme.
class LongRangeIsingModel : public Specification {
 public:
  LongRangeIsingModel(std::shared_ptr<const SiteGraph> box, double beta, double alpha,
                      int truncation);

  const SiteGraph& graph() const override { return *box_; }
  const SpinSpace& spins() const override { return spins_; }
  std::string name() const override { return "lrising"; }

  double beta() const { return beta_; }
  double alpha() const { return alpha_; }
  int truncation() const { return trunc_; }

  struct Bond {
    SiteId other;
    double coupling;
  };
  const std::vector<Bond>& bonds_of(SiteId v) const { return bonds_[v]; }
  double exterior_coupling(SiteId v) const { return exterior_coupling_[v]; }
  // Total coupling of the shell at l1 distance r in the infinite lattice.
  const std::vector<double>& shell_couplings() const { return shell_couplings_; }
  const std::vector<int>& shell_counts() const { return shell_counts_; }

  double field(const Config& cfg, SiteId v, BoundaryMode mode) const;

  std::vector<double> conditional_cdf(const Config& cfg, SiteId v,
                                      BoundaryMode mode) const override;
  FiniteAlphabet finite_alphabet() const override;

 private:
  std::shared_ptr<const SiteGraph> box_;
  SpinSpace spins_{{-1, 1}};
  double beta_, alpha_;
  int trunc_;
  std::vector<std::vector<Bond>> bonds_;
  std::vector<double> exterior_coupling_;
  std::vector<double> shell_couplings_;  // per-offset coupling at distance r (index r)
  std::vector<int> shell_counts_;        // lattice points at l1 distance r
};

}  // namespace cftplab
