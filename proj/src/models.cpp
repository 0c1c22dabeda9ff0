#include "cftplab/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cftplab {

int FiniteAlphabet::pick(double u) const {
  auto it = std::upper_bound(values.begin(), values.end(), u);
  if (it == values.end()) --it;  // u >= 1 cannot happen for uniforms; guard anyway
  return static_cast<int>(it - values.begin());
}

bool FiniteAlphabet::contains(double a, double tol) const {
  for (double v : values)
    if (std::abs(v - a) <= tol) return true;
  return false;
}

Spin inverse_cdf_spin(const SpinSpace& s, const std::vector<double>& cdf, double a) {
  for (int k = 0; k < s.size(); ++k)
    if (cdf[k] >= a) return s.values[k];
  return s.values.back();
}

Spin update_spin(const Specification& spec, const Config& cfg, SiteId v, double a,
                 BoundaryMode mode) {
  return inverse_cdf_spin(spec.spins(), spec.conditional_cdf(cfg, v, mode), a);
}

Spin finite_update_spin(const Specification& spec, const FiniteAlphabet& alpha,
                        const Config& cfg, SiteId v, double a, BoundaryMode mode) {
  if (!alpha.contains(a))
    throw std::invalid_argument("finite_update_spin: update value not in the alphabet");
  return update_spin(spec, cfg, v, a, mode);
}

namespace {

class SlowEvaluator : public ConditionalEvaluator {
 public:
  SlowEvaluator(const Specification& s, BoundaryMode m) : spec_(s), mode_(m) {}
  void cumulative(const Config& cfg, SiteId v, std::vector<double>& cdf) override {
    cdf = spec_.conditional_cdf(cfg, v, mode_);
  }

 private:
  const Specification& spec_;
  BoundaryMode mode_;
};

// Deduplicate a sorted candidate list of cumulative values; the exact list
// (when present) is deduplicated by exact equality instead of tolerance.
FiniteAlphabet assemble_alphabet(std::vector<double> vals, std::vector<Rat> exact) {
  FiniteAlphabet a;
  a.exact = !exact.empty();
  if (a.exact) {
    std::vector<size_t> idx(exact.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t i, size_t j) { return exact[i] < exact[j]; });
    for (size_t i : idx) {
      if (!a.exact_values.empty() && a.exact_values.back() == exact[i]) continue;
      a.exact_values.push_back(exact[i]);
      a.values.push_back(exact[i].to_double());
    }
    Rat prev(0);
    for (const Rat& v : a.exact_values) {
      a.exact_weights.push_back(v - prev);
      a.weights.push_back((v - prev).to_double());
      prev = v;
    }
  } else {
    std::sort(vals.begin(), vals.end());
    for (double v : vals) {
      if (!a.values.empty() && v - a.values.back() <= 1e-12) continue;
      a.values.push_back(v);
    }
    a.values.back() = 1.0;  // the top value is exactly 1 by construction
    double prev = 0.0;
    for (double v : a.values) {
      a.weights.push_back(v - prev);
      prev = v;
    }
  }
  return a;
}

}  // namespace

std::unique_ptr<ConditionalEvaluator> Specification::evaluator(const Window&,
                                                               BoundaryMode mode) const {
  return std::make_unique<SlowEvaluator>(*this, mode);
}

// ---------------------------------------------------------------------------
// Random-cluster model

RandomClusterModel::RandomClusterModel(std::shared_ptr<const SiteGraph> edges, double p,
                                       double q)
    : edges_(std::move(edges)), p_(p), q_(q) {
  validate();
}

RandomClusterModel::RandomClusterModel(std::shared_ptr<const SiteGraph> edges, Rat p, Rat q)
    : edges_(std::move(edges)),
      p_(p.to_double()),
      q_(q.to_double()),
      p_exact_(p),
      q_exact_(q) {
  validate();
}

void RandomClusterModel::validate() const {
  if (!edges_ || !edges_->is_line_graph())
    throw std::invalid_argument("rc: graph must be the line graph of a base graph");
  if (!(p_ >= 0.0 && p_ <= 1.0)) throw std::invalid_argument("rc: p must lie in [0, 1]");
  if (!(q_ >= 1.0)) throw std::invalid_argument("rc: q must be >= 1 (monotone regime)");
}

bool RandomClusterModel::connected_off_edge(const Config& cfg, SiteId e,
                                            BoundaryMode mode) const {
  const SiteGraph& lg = *edges_;
  const SiteGraph& base = *lg.base;
  int nb = base.size();
  int vghost = nb;
  UnionFind uf(nb + 1);
  for (SiteId f = 0; f < lg.size(); ++f)
    if (f != e && cfg[f] > 0) uf.unite(lg.endpoints[f].first, lg.endpoints[f].second);
  if (mode == BoundaryMode::Plus)
    for (SiteId u = 0; u < nb; ++u)
      if (base.deficient(u)) uf.unite(u, vghost);
  return uf.connected(lg.endpoints[e].first, lg.endpoints[e].second);
}

std::vector<double> RandomClusterModel::conditional_cdf(const Config& cfg, SiteId v,
                                                        BoundaryMode mode) const {
  bool conn = connected_off_edge(cfg, v, mode);
  double closed = conn ? 1.0 - p_ : (1.0 - p_) * q_ / (p_ + (1.0 - p_) * q_);
  return {closed, 1.0};
}

std::optional<std::vector<Rat>> RandomClusterModel::conditional_cdf_exact(
    const Config& cfg, SiteId v, BoundaryMode mode) const {
  if (!p_exact_ || !q_exact_) return std::nullopt;
  const Rat& p = *p_exact_;
  const Rat& q = *q_exact_;
  bool conn = connected_off_edge(cfg, v, mode);
  Rat one(1);
  Rat closed = conn ? one - p : (one - p) * q / (p + (one - p) * q);
  return std::vector<Rat>{closed, one};
}

FiniteAlphabet RandomClusterModel::finite_alphabet() const {
  if (p_exact_ && q_exact_) {
    Rat one(1);
    const Rat& p = *p_exact_;
    const Rat& q = *q_exact_;
    std::vector<Rat> cand{one - p, (one - p) * q / (p + (one - p) * q), one};
    return assemble_alphabet({}, cand);
  }
  std::vector<double> cand{1.0 - p_, (1.0 - p_) * q_ / (p_ + (1.0 - p_) * q_), 1.0};
  return assemble_alphabet(cand, {});
}

namespace {

// Fast conditional for the dynamics: the exterior of the window is fixed by
// the mode, so its connectivity contribution is a static partition of the
// base vertices computed once.  Per query only the open interior edges other
// than the queried one are merged on top of that partition.
class RcWindowEvaluator : public ConditionalEvaluator {
 public:
  RcWindowEvaluator(const RandomClusterModel& model, const Window& w, BoundaryMode mode) {
    const SiteGraph& lg = model.graph();
    const SiteGraph& base = *lg.base;
    int nb = base.size();
    int vghost = nb;
    bool wired = mode == BoundaryMode::Plus;

    UnionFind pre(nb + 1);
    if (wired) {
      for (SiteId e = 0; e < lg.size(); ++e)
        if (!w.contains(e)) pre.unite(lg.endpoints[e].first, lg.endpoints[e].second);
      for (SiteId u = 0; u < nb; ++u)
        if (base.deficient(u)) pre.unite(u, vghost);
    }

    std::vector<int> dense(nb + 1, -1);
    auto cls = [&](int x) {
      int root = pre.find(x);
      if (dense[root] < 0) dense[root] = n_classes_++;
      return dense[root];
    };
    own_class_.assign(lg.size(), {-1, -1});
    edges_.reserve(w.interior.size());
    for (SiteId e : w.interior) {
      int cx = cls(lg.endpoints[e].first);
      int cy = cls(lg.endpoints[e].second);
      own_class_[e] = {cx, cy};
      edges_.push_back({cx, cy, e});
    }
    parent_.resize(n_classes_);

    double p = model.p(), q = model.q();
    closed_connected_ = 1.0 - p;
    closed_split_ = p + (1.0 - p) * q == 0.0 ? 1.0 : (1.0 - p) * q / (p + (1.0 - p) * q);
  }

  void cumulative(const Config& cfg, SiteId v, std::vector<double>& cdf) override {
    auto [qx, qy] = own_class_[v];
    if (qx < 0) throw std::invalid_argument("rc evaluator: site outside window interior");
    std::iota(parent_.begin(), parent_.end(), 0);
    for (const Edge& ed : edges_)
      if (ed.e != v && cfg[ed.e] > 0) unite(ed.cx, ed.cy);
    bool conn = find(qx) == find(qy);
    cdf.resize(2);
    cdf[0] = conn ? closed_connected_ : closed_split_;
    cdf[1] = 1.0;
  }

 private:
  struct Edge {
    int cx, cy;
    SiteId e;
  };

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x != y) parent_[y] = x;
  }

  int n_classes_ = 0;
  std::vector<std::pair<int, int>> own_class_;
  std::vector<Edge> edges_;
  std::vector<int> parent_;
  double closed_connected_ = 0.0, closed_split_ = 0.0;
};

}  // namespace

std::unique_ptr<ConditionalEvaluator> RandomClusterModel::evaluator(const Window& w,
                                                                    BoundaryMode mode) const {
  return std::make_unique<RcWindowEvaluator>(*this, w, mode);
}

// ---------------------------------------------------------------------------
// Nearest-neighbor Ising

IsingModel::IsingModel(std::shared_ptr<const SiteGraph> box, double beta)
    : box_(std::move(box)), beta_(beta) {
  if (!box_ || box_->is_line_graph())
    throw std::invalid_argument("ising: expects a vertex graph");
  if (!(beta_ >= 0.0)) throw std::invalid_argument("ising: beta must be >= 0");
}

IsingModel::IsingModel(std::shared_ptr<const SiteGraph> box, Rat e2beta)
    : IsingModel(std::move(box), 0.5 * std::log(e2beta.to_double())) {
  if (!(e2beta >= Rat(1))) throw std::invalid_argument("ising: e^(2 beta) must be >= 1");
  e2beta_ = e2beta;
}

int IsingModel::neighbor_field(const Config& cfg, SiteId v, BoundaryMode mode) const {
  int m = 0;
  for (SiteId u : box_->adj[v]) m += cfg[u];
  int missing = box_->closed_world
                    ? 0
                    : box_->orbit_degree[box_->orbit[v]] - box_->degree(v);
  m += missing * (mode == BoundaryMode::Plus ? 1 : -1);
  return m;
}

std::vector<double> IsingModel::conditional_cdf(const Config& cfg, SiteId v,
                                                BoundaryMode mode) const {
  int m = neighbor_field(cfg, v, mode);
  double minus = 1.0 / (1.0 + std::exp(2.0 * beta_ * m));
  return {minus, 1.0};
}

std::optional<std::vector<Rat>> IsingModel::conditional_cdf_exact(const Config& cfg, SiteId v,
                                                                  BoundaryMode mode) const {
  if (!e2beta_) return std::nullopt;
  int m = neighbor_field(cfg, v, mode);
  Rat minus = Rat(1) / (Rat(1) + e2beta_->pow(m));
  return std::vector<Rat>{minus, Rat(1)};
}

FiniteAlphabet IsingModel::finite_alphabet() const {
  // Counting the implicit sites beyond box sides, every site has exactly
  // orbit_degree neighbors, so the field runs over one parity class.
  int dmax = box_->closed_world
                 ? *std::max_element(box_->orbit_degree.begin(), box_->orbit_degree.end())
                 : box_->orbit_degree[0];
  int step = box_->closed_world ? 1 : 2;
  if (e2beta_) {
    std::vector<Rat> cand{Rat(1)};
    for (int m = -dmax; m <= dmax; m += step) cand.push_back(Rat(1) / (Rat(1) + e2beta_->pow(m)));
    return assemble_alphabet({}, cand);
  }
  std::vector<double> cand{1.0};
  for (int m = -dmax; m <= dmax; m += step)
    cand.push_back(1.0 / (1.0 + std::exp(2.0 * beta_ * m)));
  return assemble_alphabet(cand, {});
}

// ---------------------------------------------------------------------------
// Truncated long-range Ising

LongRangeIsingModel::LongRangeIsingModel(std::shared_ptr<const SiteGraph> box, double beta,
                                         double alpha, int truncation)
    : box_(std::move(box)), beta_(beta), alpha_(alpha), trunc_(truncation) {
  if (!box_ || box_->is_line_graph() || box_->coords.empty())
    throw std::invalid_argument("lrising: expects a plain box");
  if (!(beta_ >= 0.0)) throw std::invalid_argument("lrising: beta must be >= 0");
  if (!(alpha_ > 0.0)) throw std::invalid_argument("lrising: alpha must be > 0");
  if (trunc_ < 1) throw std::invalid_argument("lrising: truncation radius must be >= 1");

  int d = box_->dim;
  shell_counts_.assign(trunc_ + 1, 0);
  shell_couplings_.assign(trunc_ + 1, 0.0);
  for (int r = 1; r <= trunc_; ++r) shell_couplings_[r] = beta_ * std::pow(r, -alpha_);

  // Enumerate offsets with 1 <= |delta|_1 <= L once, then resolve them per
  // site against the box; out-of-box mass accumulates as a fixed exterior
  // coupling felt at the mode extreme.
  std::vector<std::vector<int>> offsets;
  std::vector<int> delta(d, -trunc_);
  while (true) {
    int l1 = 0;
    for (int k = 0; k < d; ++k) l1 += std::abs(delta[k]);
    if (l1 >= 1 && l1 <= trunc_) {
      offsets.push_back(delta);
      ++shell_counts_[l1];
    }
    int k = d - 1;
    while (k >= 0 && delta[k] == trunc_) delta[k--] = -trunc_;
    if (k < 0) break;
    ++delta[k];
  }

  bonds_.resize(box_->size());
  exterior_coupling_.assign(box_->size(), 0.0);
  for (SiteId v = 0; v < box_->size(); ++v) {
    auto c = box_->coord_of(v);
    for (const auto& off : offsets) {
      int l1 = 0;
      std::vector<int> t(d);
      for (int k = 0; k < d; ++k) {
        t[k] = c[k] + off[k];
        l1 += std::abs(off[k]);
      }
      SiteId u = box_->site_at(t);
      double j = shell_couplings_[l1];
      if (u >= 0)
        bonds_[v].push_back({u, j});
      else if (!box_->closed_world)
        exterior_coupling_[v] += j;
    }
  }
}

double LongRangeIsingModel::field(const Config& cfg, SiteId v, BoundaryMode mode) const {
  double h = 0.0;
  for (const Bond& b : bonds_[v]) h += b.coupling * cfg[b.other];
  h += exterior_coupling_[v] * (mode == BoundaryMode::Plus ? 1.0 : -1.0);
  return h;
}

std::vector<double> LongRangeIsingModel::conditional_cdf(const Config& cfg, SiteId v,
                                                         BoundaryMode mode) const {
  double h = field(cfg, v, mode);
  double minus = 1.0 / (1.0 + std::exp(2.0 * h));
  return {minus, 1.0};
}

FiniteAlphabet LongRangeIsingModel::finite_alphabet() const {
  // The field is a sum of shell contributions J_r * k_r with k_r running over
  // {-c_r, -c_r + 2, ..., c_r}; enumerate the product of those ranges.
  long long combos = 1;
  for (int r = 1; r <= trunc_; ++r) {
    combos *= shell_counts_[r] + 1;
    if (combos > 2'000'000)
      throw std::domain_error("lrising: conditional value enumeration too large");
  }
  std::vector<double> fields{0.0};
  for (int r = 1; r <= trunc_; ++r) {
    std::vector<double> next;
    next.reserve(fields.size() * (shell_counts_[r] + 1));
    for (double h : fields)
      for (int k = -shell_counts_[r]; k <= shell_counts_[r]; k += 2)
        next.push_back(h + shell_couplings_[r] * k);
    fields.swap(next);
  }
  std::vector<double> cand{1.0};
  cand.reserve(fields.size() + 1);
  for (double h : fields) cand.push_back(1.0 / (1.0 + std::exp(2.0 * h)));
  return assemble_alphabet(cand, {});
}

}  // namespace cftplab
