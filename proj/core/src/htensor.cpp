#include "htst/htensor.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>

namespace htst {

namespace {

void thin_qr(const Eigen::MatrixXd& m, Eigen::MatrixXd& q, Eigen::MatrixXd& r) {
  if (m.rows() == 0 || m.cols() == 0) {
    q = Eigen::MatrixXd(m.rows(), 0);
    r = Eigen::MatrixXd(0, m.cols());
    return;
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::Index k = std::min(m.rows(), m.cols());
  q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), k);
  r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

// all sites ordered by nonincreasing distance from the given edge
std::vector<int> sites_far_to_near(const DimensionTree& tree, int edge) {
  auto [a, b] = tree.edge_sites(edge);
  std::vector<int> dist(tree.num_sites(), -1);
  std::deque<int> queue{a, b};
  dist[a] = dist[b] = 0;
  std::vector<int> order;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    order.push_back(v);
    const auto& st = tree.site(v);
    for (int l = 0; l < st.num_legs; ++l) {
      auto [x, y] = tree.edge_sites(st.legs[l]);
      int nbr = x == v ? y : x;
      if (dist[nbr] < 0) {
        dist[nbr] = dist[v] + 1;
        queue.push_back(nbr);
      }
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

void check_compatible(const HTensor& u, const HTensor& v) {
  if (!u.tree() || !v.tree() ||
      (u.tree() != v.tree() && !u.tree()->same_structure(*v.tree())))
    throw std::invalid_argument("HTensor: dimension tree mismatch");
  if (u.mode_sizes() != v.mode_sizes())
    throw std::invalid_argument("HTensor: mode size mismatch");
}

}  // namespace

HTensor::HTensor(TreePtr tree, std::vector<int> mode_sizes)
    : tree_(std::move(tree)), mode_sizes_(std::move(mode_sizes)) {
  if (static_cast<int>(mode_sizes_.size()) != tree_->order())
    throw std::invalid_argument("HTensor: mode count does not match tree order");
  for (int n : mode_sizes_)
    if (n <= 0) throw std::invalid_argument("HTensor: mode sizes must be positive");
  leaf_.resize(tree_->num_sites());
  interior_.resize(tree_->num_sites());
}

int HTensor::leaf_site_of_mode(int mode) const {
  for (int s = 0; s < tree_->num_sites(); ++s)
    if (tree_->site(s).is_leaf && tree_->site(s).mode == mode) return s;
  throw std::logic_error("leaf site not found");
}

HTensor HTensor::zero(TreePtr tree, std::vector<int> mode_sizes) {
  HTensor u(std::move(tree), std::move(mode_sizes));
  for (int s = 0; s < u.tree_->num_sites(); ++s) {
    const auto& st = u.tree_->site(s);
    if (st.is_leaf)
      u.leaf_[s] = Eigen::MatrixXd(u.mode_sizes_[st.mode], 0);
    else
      u.interior_[s] = Tensor3(0, 0, 0);
  }
  u.gauge_edge_ = u.tree_->schedule().front();
  u.gauge_ = Eigen::MatrixXd(0, 0);
  u.canonical_ = true;
  return u;
}

HTensor HTensor::rank_one(TreePtr tree, const std::vector<Eigen::VectorXd>& factors) {
  std::vector<int> sizes;
  sizes.reserve(factors.size());
  for (const auto& f : factors) sizes.push_back(static_cast<int>(f.size()));
  HTensor u(std::move(tree), std::move(sizes));

  double weight = 1.0;
  for (int s = 0; s < u.tree_->num_sites(); ++s) {
    const auto& st = u.tree_->site(s);
    if (st.is_leaf) {
      const Eigen::VectorXd& f = factors[st.mode];
      double nf = f.norm();
      weight *= nf;
      u.leaf_[s] = nf > 0 ? Eigen::MatrixXd(f / nf) : Eigen::MatrixXd::Zero(f.size(), 1);
    } else {
      Tensor3 b(1, 1, 1);
      b(0, 0, 0) = 1.0;
      u.interior_[s] = b;
    }
  }
  u.gauge_edge_ = u.tree_->schedule().front();
  u.gauge_ = Eigen::MatrixXd::Constant(1, 1, weight);
  u.canonical_ = true;
  return u;
}

HTensor HTensor::random(TreePtr tree, std::vector<int> mode_sizes,
                        const std::vector<int>& edge_ranks, std::uint64_t seed) {
  HTensor u(std::move(tree), std::move(mode_sizes));
  if (static_cast<int>(edge_ranks.size()) != u.tree_->num_edges())
    throw std::invalid_argument("HTensor::random: need one rank per edge");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto fill = [&](auto&& setter, Eigen::Index count) {
    for (Eigen::Index i = 0; i < count; ++i) setter(i, gauss(rng));
  };
  for (int s = 0; s < u.tree_->num_sites(); ++s) {
    const auto& st = u.tree_->site(s);
    if (st.is_leaf) {
      Eigen::MatrixXd m(u.mode_sizes_[st.mode], edge_ranks[st.legs[0]]);
      fill([&](Eigen::Index i, double x) { m.data()[i] = x; }, m.size());
      u.leaf_[s] = std::move(m);
    } else {
      Tensor3 b(edge_ranks[st.legs[0]], edge_ranks[st.legs[1]], edge_ranks[st.legs[2]]);
      for (int i2 = 0; i2 < b.dim(2); ++i2)
        for (int i1 = 0; i1 < b.dim(1); ++i1)
          for (int i0 = 0; i0 < b.dim(0); ++i0) b(i0, i1, i2) = gauss(rng);
      u.interior_[s] = std::move(b);
    }
  }
  u.gauge_edge_ = u.tree_->schedule().front();
  int r = edge_ranks[u.gauge_edge_];
  u.gauge_ = Eigen::MatrixXd::Identity(r, r);
  u.canonical_ = false;
  return u;
}

int HTensor::edge_rank(int t) const {
  if (t == gauge_edge_)
    return static_cast<int>(std::min(gauge_.rows(), gauge_.cols()));
  auto [a, b] = tree_->edge_sites(t);
  const auto& st = tree_->site(a);
  if (st.is_leaf) return static_cast<int>(leaf_[a].cols());
  return interior_[a].dim(tree_->leg_of_edge(a, t));
}

std::vector<int> HTensor::edge_ranks() const {
  std::vector<int> out(tree_->num_edges());
  for (int t = 0; t < tree_->num_edges(); ++t) out[t] = edge_rank(t);
  return out;
}

int HTensor::max_rank() const {
  auto r = edge_ranks();
  return *std::max_element(r.begin(), r.end());
}

int HTensor::min_rank() const {
  auto r = edge_ranks();
  return *std::min_element(r.begin(), r.end());
}

// ------------------------------------------------------------- re-gauging

void HTensor::absorb_gauge_into(int site) {
  auto [a, b] = tree_->edge_sites(gauge_edge_);
  Eigen::MatrixXd m = site == a ? gauge_ : Eigen::MatrixXd(gauge_.transpose());
  const auto& st = tree_->site(site);
  if (st.is_leaf)
    leaf_[site] = leaf_[site] * m;
  else
    interior_[site] = interior_[site].contract(tree_->leg_of_edge(site, gauge_edge_), m);
}

Eigen::MatrixXd HTensor::regauge_site(int site, int out_leg) {
  Eigen::MatrixXd q, r;
  const auto& st = tree_->site(site);
  if (st.is_leaf) {
    thin_qr(leaf_[site], q, r);
    leaf_[site] = std::move(q);
  } else {
    const Tensor3& b = interior_[site];
    int da = -1, db = -1;
    for (int l = 0; l < 3; ++l) {
      if (l == out_leg) continue;
      (da < 0 ? da : db) = b.dim(l);
    }
    thin_qr(b.unfold_cols(out_leg), q, r);
    interior_[site] = Tensor3::fold_cols(out_leg, q, da, db);
  }
  return r;
}

void HTensor::push_into(int site, int leg, const Eigen::MatrixXd& r) {
  const auto& st = tree_->site(site);
  if (st.is_leaf)
    leaf_[site] = leaf_[site] * r.transpose();
  else
    interior_[site] = interior_[site].contract(leg, r.transpose());
}

void HTensor::move_gauge_to(int edge) {
  for (int v : tree_->path_sites(gauge_edge_, edge)) {
    absorb_gauge_into(v);
    int f = tree_->next_edge_toward(v, edge);
    Eigen::MatrixXd r = regauge_site(v, tree_->leg_of_edge(v, f));
    auto [fa, fb] = tree_->edge_sites(f);
    gauge_ = v == fa ? r : Eigen::MatrixXd(r.transpose());
    gauge_edge_ = f;
  }
}

void HTensor::canonicalize_full(int edge) {
  auto [ga, gb] = tree_->edge_sites(gauge_edge_);
  absorb_gauge_into(ga);

  auto [a, b] = tree_->edge_sites(edge);
  for (int s : sites_far_to_near(*tree_, edge)) {
    if (s == a || s == b) continue;
    int e = tree_->next_edge_toward(s, edge);
    Eigen::MatrixXd r = regauge_site(s, tree_->leg_of_edge(s, e));
    auto [x, y] = tree_->edge_sites(e);
    int nbr = x == s ? y : x;
    push_into(nbr, tree_->leg_of_edge(nbr, e), r);
  }
  Eigen::MatrixXd ra = regauge_site(a, tree_->leg_of_edge(a, edge));
  Eigen::MatrixXd rb = regauge_site(b, tree_->leg_of_edge(b, edge));
  gauge_ = ra * rb.transpose();
  gauge_edge_ = edge;
  canonical_ = true;
}

void HTensor::ensure_canonical_at(int edge) {
  if (canonical_) {
    if (gauge_edge_ != edge) move_gauge_to(edge);
  } else {
    canonicalize_full(edge);
  }
}

HTensor HTensor::canonicalized_at(int edge) const {
  if (edge < 0 || edge >= tree_->num_edges())
    throw std::invalid_argument("HTensor: edge index out of range");
  if (canonical_ && gauge_edge_ == edge) return *this;
  HTensor out = *this;
  out.ensure_canonical_at(edge);
  return out;
}

HTensor HTensor::scaled(double a) const {
  HTensor out = *this;
  out.gauge_ *= a;
  return out;
}

// ----------------------------------------------------------------- sweeps

HTensor HTensor::spectrum_sweep(std::span<const int> edges,
                                const SpectrumTransform& fn) const {
  if (edges.empty()) return *this;
  HTensor w = *this;
  w.ensure_canonical_at(edges.front());
  bool first = true;
  for (int t : edges) {
    if (!first) w.move_gauge_to(t);
    first = false;

    auto [a, b] = tree_->edge_sites(t);
    int leg_a = tree_->leg_of_edge(a, t);
    int leg_b = tree_->leg_of_edge(b, t);
    auto shrink_to = [&](const Eigen::MatrixXd& pa, const Eigen::MatrixXd& pb,
                         const std::vector<double>& vals, int r) {
      if (tree_->site(a).is_leaf)
        w.leaf_[a] = w.leaf_[a] * pa.leftCols(r);
      else
        w.interior_[a] = w.interior_[a].contract(leg_a, pa.leftCols(r));
      if (tree_->site(b).is_leaf)
        w.leaf_[b] = w.leaf_[b] * pb.leftCols(r);
      else
        w.interior_[b] = w.interior_[b].contract(leg_b, pb.leftCols(r));
      w.gauge_ = Eigen::MatrixXd::Zero(r, r);
      for (int i = 0; i < r; ++i) w.gauge_(i, i) = vals[i];
    };

    if (w.gauge_.rows() == 0 || w.gauge_.cols() == 0) {
      std::vector<double> out = fn(t, {});
      int keep = 0;
      while (keep < static_cast<int>(out.size()) && out[keep] > 0.0) ++keep;
      if (keep != 0) throw std::logic_error("spectrum_sweep: cannot grow rank");
      shrink_to(Eigen::MatrixXd(w.gauge_.rows(), 0), Eigen::MatrixXd(w.gauge_.cols(), 0),
                {}, 0);
      continue;
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(w.gauge_,
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    std::vector<double> sigma(sv.data(), sv.data() + sv.size());
    std::vector<double> out = fn(t, sigma);
    int keep = 0;
    while (keep < static_cast<int>(out.size()) &&
           keep < static_cast<int>(sigma.size()) && out[keep] > 0.0)
      ++keep;
    shrink_to(svd.matrixU(), svd.matrixV(), out, keep);
  }
  return w;
}

std::vector<EdgeSpectrum> hsvd_spectra(const HTensor& u) {
  const auto& schedule = u.tree()->schedule();
  std::vector<EdgeSpectrum> out(u.tree()->num_edges());
  HTensor w = u;
  w.ensure_canonical_at(schedule.front());
  bool first = true;
  for (int t : schedule) {
    if (!first) w.move_gauge_to(t);
    first = false;
    EdgeSpectrum spec;
    spec.edge = t;
    if (w.gauge_.rows() > 0 && w.gauge_.cols() > 0) {
      Eigen::BDCSVD<Eigen::MatrixXd> svd(w.gauge_);
      const Eigen::VectorXd& sv = svd.singularValues();
      double cutoff = sv.size() > 0 ? kSingularValueCutoff * sv[0] : 0.0;
      for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > cutoff) spec.sigma.push_back(sv[i]);
    }
    out[t] = std::move(spec);
  }
  return out;
}

HTensor hard_truncate(const HTensor& u, double tol) {
  if (tol < 0) throw std::invalid_argument("hard_truncate: tol must be nonnegative");
  const double budget2 = tol * tol / u.tree()->num_edges();
  return u.spectrum_sweep(
      u.tree()->schedule(), [&](int, const std::vector<double>& sigma) {
        int r = static_cast<int>(sigma.size());
        double acc = 0.0;
        while (r > 0 && acc + sigma[r - 1] * sigma[r - 1] <= budget2) {
          acc += sigma[r - 1] * sigma[r - 1];
          --r;
        }
        return std::vector<double>(sigma.begin(), sigma.begin() + r);
      });
}

HTensor hard_truncate(const HTensor& u, const std::vector<int>& rank_caps) {
  if (static_cast<int>(rank_caps.size()) != u.tree()->num_edges())
    throw std::invalid_argument("hard_truncate: need one cap per edge");
  return u.spectrum_sweep(
      u.tree()->schedule(), [&](int t, const std::vector<double>& sigma) {
        int r = std::min<int>(rank_caps[t], static_cast<int>(sigma.size()));
        if (r < 0) throw std::invalid_argument("hard_truncate: negative rank cap");
        return std::vector<double>(sigma.begin(), sigma.begin() + r);
      });
}

// ------------------------------------------------------ linear combinations

HTensor linear_combination(std::span<const HTensor* const> terms,
                           std::span<const double> coeffs) {
  if (terms.empty() || terms.size() != coeffs.size())
    throw std::invalid_argument("linear_combination: term/coefficient mismatch");
  const HTensor& first = *terms.front();
  for (const HTensor* tp : terms) check_compatible(first, *tp);

  const int g = first.gauge_edge();
  std::vector<HTensor> aligned;
  aligned.reserve(terms.size());
  for (const HTensor* tp : terms) {
    if (tp->gauge_edge() == g)
      aligned.push_back(*tp);
    else
      aligned.push_back(tp->canonicalized_at(g));
  }

  const DimensionTree& tree = *first.tree();
  HTensor out = HTensor::zero(first.tree(), first.mode_sizes());
  for (int s = 0; s < tree.num_sites(); ++s) {
    const auto& st = tree.site(s);
    if (st.is_leaf) {
      Eigen::Index total = 0;
      for (const auto& t : aligned) total += t.leaf_[s].cols();
      Eigen::MatrixXd m(first.mode_sizes()[st.mode], total);
      Eigen::Index off = 0;
      for (const auto& t : aligned) {
        m.middleCols(off, t.leaf_[s].cols()) = t.leaf_[s];
        off += t.leaf_[s].cols();
      }
      out.leaf_[s] = std::move(m);
    } else {
      std::array<int, 3> total{{0, 0, 0}};
      for (const auto& t : aligned)
        for (int l = 0; l < 3; ++l) total[l] += t.interior_[s].dim(l);
      Tensor3 b(total[0], total[1], total[2]);
      std::array<int, 3> off{{0, 0, 0}};
      for (const auto& t : aligned) {
        const Tensor3& bt = t.interior_[s];
        for (int i2 = 0; i2 < bt.dim(2); ++i2)
          for (int i1 = 0; i1 < bt.dim(1); ++i1)
            for (int i0 = 0; i0 < bt.dim(0); ++i0)
              b(off[0] + i0, off[1] + i1, off[2] + i2) = bt(i0, i1, i2);
        for (int l = 0; l < 3; ++l) off[l] += bt.dim(l);
      }
      out.interior_[s] = std::move(b);
    }
  }
  Eigen::Index rows = 0, cols = 0;
  for (const auto& t : aligned) {
    rows += t.gauge_.rows();
    cols += t.gauge_.cols();
  }
  out.gauge_ = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::Index ro = 0, co = 0;
  for (std::size_t i = 0; i < aligned.size(); ++i) {
    const auto& gt = aligned[i].gauge_;
    out.gauge_.block(ro, co, gt.rows(), gt.cols()) = coeffs[i] * gt;
    ro += gt.rows();
    co += gt.cols();
  }
  out.gauge_edge_ = g;
  out.canonical_ = false;
  out.canonicalize_full(tree.schedule().front());
  return out;
}

HTensor axpy(double a, const HTensor& u, const HTensor& v) {
  const HTensor* terms[2] = {&u, &v};
  double coeffs[2] = {a, 1.0};
  return linear_combination(terms, coeffs);
}

// ------------------------------------------------------------ inner / norm

double inner(const HTensor& u, const HTensor& v) {
  check_compatible(u, v);
  const DimensionTree& tree = *u.tree();
  const int g = u.gauge_edge_;
  HTensor vc = v;
  if (vc.gauge_edge_ != g) vc.ensure_canonical_at(g);

  auto [a, b] = tree.edge_sites(g);
  std::vector<Eigen::MatrixXd> part(tree.num_sites());
  for (int s : sites_far_to_near(tree, g)) {
    const auto& st = tree.site(s);
    int k = tree.leg_of_edge(s, tree.next_edge_toward(s, g));
    if (st.is_leaf) {
      part[s] = u.leaf_[s].transpose() * vc.leaf_[s];
      continue;
    }
    Tensor3 bt = vc.interior_[s];
    for (int l = 0; l < 3; ++l) {
      if (l == k) continue;
      int e = st.legs[l];
      auto [x, y] = tree.edge_sites(e);
      int nbr = x == s ? y : x;
      bt = bt.contract(l, part[nbr].transpose());
    }
    part[s] = u.interior_[s].unfold_cols(k).transpose() * bt.unfold_cols(k);
  }
  if (u.gauge_.size() == 0 || vc.gauge_.size() == 0) return 0.0;
  return (part[a].transpose() * u.gauge_ * part[b]).cwiseProduct(vc.gauge_).sum();
}

double norm(const HTensor& u) {
  if (u.is_canonical()) return u.gauge().norm();
  HTensor w = u.canonicalized_at(u.gauge_edge());
  return w.gauge().norm();
}

// ------------------------------------------------------------- dense round trip

std::pair<Eigen::MatrixXd, std::vector<int>> HTensor::expand_side(
    int site, int via_leg, std::size_t cap) const {
  const auto& st = tree_->site(site);
  if (st.is_leaf) return {leaf_[site], {st.mode}};

  std::array<int, 2> other{};
  int cnt = 0;
  for (int l = 0; l < 3; ++l)
    if (l != via_leg) other[cnt++] = l;

  Tensor3 t = interior_[site];
  std::vector<int> order;
  for (int l : other) {
    int e = st.legs[l];
    auto [x, y] = tree_->edge_sites(e);
    int nbr = x == site ? y : x;
    auto [xm, xo] = expand_side(nbr, tree_->leg_of_edge(nbr, e), cap);
    t = t.contract(l, Eigen::MatrixXd(xm.transpose()));
    order.insert(order.end(), xo.begin(), xo.end());
  }
  return {t.unfold_cols(via_leg), std::move(order)};
}

DenseTensor HTensor::to_dense(std::size_t cap) const {
  std::size_t total = 1;
  for (int n : mode_sizes_) {
    if (total > cap / static_cast<std::size_t>(n))
      throw std::length_error("HTensor::to_dense: entry count exceeds capacity");
    total *= static_cast<std::size_t>(n);
  }
  auto [a, b] = tree_->edge_sites(gauge_edge_);
  auto [ma, oa] = expand_side(a, tree_->leg_of_edge(a, gauge_edge_), cap);
  auto [mb, ob] = expand_side(b, tree_->leg_of_edge(b, gauge_edge_), cap);
  Eigen::MatrixXd m = ma * gauge_ * mb.transpose();
  return DenseTensor::fold(m, oa, ob, mode_sizes_);
}

HTensor HTensor::from_dense(const DenseTensor& x, TreePtr tree, double tol) {
  if (tol < 0) throw std::invalid_argument("HTensor::from_dense: tol must be nonnegative");
  HTensor u(tree, x.dims());
  const DimensionTree& tr = *u.tree_;
  const double budget2 = tol * tol / tr.num_sites();

  // per-site orthonormal cut bases
  std::vector<Eigen::MatrixXd> basis(tr.num_sites());
  std::vector<std::vector<int>> order(tr.num_sites());
  for (int s = 0; s < tr.num_sites(); ++s) {
    const auto& st = tr.site(s);
    int parent_leg = st.is_leaf ? 0 : 2;
    order[s] = tr.side_modes(s, parent_leg);
    Eigen::MatrixXd m = x.unfold(order[s]);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
    const Eigen::VectorXd& sv = svd.singularValues();
    double cutoff = sv.size() > 0 ? kSingularValueCutoff * sv[0] : 0.0;
    int r = static_cast<int>(sv.size());
    while (r > 0 && sv[r - 1] <= cutoff) --r;
    double acc = 0.0;
    while (r > 0 && acc + sv[r - 1] * sv[r - 1] <= budget2) {
      acc += sv[r - 1] * sv[r - 1];
      --r;
    }
    basis[s] = svd.matrixU().leftCols(r);
  }

  // components: leaves take the basis, interiors the projected transfer
  for (int s = 0; s < tr.num_sites(); ++s) {
    const auto& st = tr.site(s);
    if (st.is_leaf) {
      u.leaf_[s] = basis[s];
      continue;
    }
    auto child_site = [&](int l) {
      int e = st.legs[l];
      auto [x0, y0] = tr.edge_sites(e);
      return x0 == s ? y0 : x0;
    };
    int cl = child_site(0), cr = child_site(1);
    Eigen::Index pl = basis[cl].rows(), pr = basis[cr].rows();
    Tensor3 t = Tensor3::fold_cols(2, basis[s], static_cast<int>(pl), static_cast<int>(pr));
    u.interior_[s] = t.contract(0, basis[cl]).contract(1, basis[cr]);
  }

  // gauge on the edge between the two root clusters
  int root_edge = -1;
  for (int t = 0; t < tr.num_edges(); ++t) {
    auto [a, b] = tr.edge_sites(t);
    if ((tr.site(a).cluster & tr.site(b).cluster) == 0) {
      root_edge = t;
      break;
    }
  }
  auto [a, b] = tr.edge_sites(root_edge);
  Eigen::MatrixXd m = x.unfold(order[a], order[b]);
  u.gauge_ = basis[a].transpose() * m * basis[b];
  u.gauge_edge_ = root_edge;
  u.canonical_ = false;
  u.canonicalize_full(tr.schedule().front());
  return u;
}

HTensor HTensor::with_mapped_leaves(
    const std::vector<const Eigen::MatrixXd*>& maps) const {
  if (static_cast<int>(maps.size()) != tree_->order())
    throw std::invalid_argument("with_mapped_leaves: need one map per mode");
  HTensor out = *this;
  for (int mode = 0; mode < tree_->order(); ++mode) {
    if (!maps[mode]) continue;
    int s = leaf_site_of_mode(mode);
    if (maps[mode]->cols() != leaf_[s].rows())
      throw std::invalid_argument("with_mapped_leaves: shape mismatch");
    out.leaf_[s] = (*maps[mode]) * leaf_[s];
    out.mode_sizes_[mode] = static_cast<int>(maps[mode]->rows());
    out.canonical_ = false;
  }
  return out;
}

}  // namespace htst
