#include "htst/dimension_tree.hpp"

#include <bit>
#include <deque>
#include <functional>
#include <stdexcept>

namespace htst {

namespace {

ModeSet full_mask(int d) {
  return d >= 64 ? ~ModeSet{0} : ((ModeSet{1} << d) - 1);
}

}  // namespace

int mode_count(ModeSet s) { return std::popcount(s); }

int lowest_mode(ModeSet s) {
  return s == 0 ? -1 : std::countr_zero(s);
}

std::vector<int> modes_of(ModeSet s) {
  std::vector<int> out;
  while (s) {
    int m = std::countr_zero(s);
    out.push_back(m);
    s &= s - 1;
  }
  return out;
}

ModeSet DimensionTree::full_set() const { return full_mask(d_); }

ModeSet DimensionTree::edge_complement(int t) const {
  return full_set() & ~edges_[t].canonical;
}

int DimensionTree::leg_of_edge(int s, int t) const {
  const Site& st = sites_[s];
  for (int l = 0; l < st.num_legs; ++l)
    if (st.legs[l] == t) return l;
  throw std::logic_error("edge not incident to site");
}

std::vector<int> DimensionTree::path_sites(int from_edge, int to_edge) const {
  std::vector<int> path;
  int cur = from_edge;
  while (cur != to_edge) {
    auto [a, b] = edge_sites(cur);
    int s = next_edge_toward(a, to_edge) != cur ? a : b;
    path.push_back(s);
    cur = next_edge_toward(s, to_edge);
  }
  return path;
}

std::vector<int> DimensionTree::side_modes(int s, int via_leg) const {
  const Site& st = sites_[s];
  if (st.is_leaf) return {st.mode};
  std::vector<int> out;
  for (int l = 0; l < st.num_legs; ++l) {
    if (l == via_leg) continue;
    int e = st.legs[l];
    auto [a, b] = edge_sites(e);
    int nbr = a == s ? b : a;
    auto sub = side_modes(nbr, leg_of_edge(nbr, e));
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

bool DimensionTree::same_structure(const DimensionTree& other) const {
  if (d_ != other.d_ || edges_.size() != other.edges_.size()) return false;
  for (std::size_t t = 0; t < edges_.size(); ++t)
    if (edges_[t].canonical != other.edges_[t].canonical) return false;
  return true;
}

void DimensionTree::finalize_from_rooted(
    const std::vector<ModeSet>& clusters, const std::vector<int>& parent,
    const std::vector<std::array<int, 2>>& children) {
  d_ = mode_count(clusters[0]);
  const ModeSet full = full_mask(d_);
  const int n_nodes = static_cast<int>(clusters.size());

  // sites: one per non-root node
  std::vector<int> site_of(n_nodes, -1);
  for (int n = 1; n < n_nodes; ++n) {
    Site s;
    s.cluster = clusters[n];
    s.is_leaf = children[n][0] < 0;
    if (s.is_leaf) s.mode = lowest_mode(clusters[n]);
    site_of[n] = static_cast<int>(sites_.size());
    sites_.push_back(s);
  }

  // edges in depth-first sweep order; the two root children share one edge
  std::vector<int> edge_of(n_nodes, -1);
  std::function<void(int)> visit = [&](int n) {
    if (children[n][0] >= 0) {
      visit(children[n][0]);
      visit(children[n][1]);
    }
    if (n == 0) return;
    if (parent[n] == 0) {
      int sib = children[0][0] == n ? children[0][1] : children[0][0];
      if (edge_of[sib] >= 0) {
        edge_of[n] = edge_of[sib];
        return;
      }
    }
    Edge e;
    ModeSet mine = clusters[n];
    ModeSet comp = full & ~mine;
    bool keep_mine =
        mode_count(mine) < mode_count(comp) ||
        (mode_count(mine) == mode_count(comp) && lowest_mode(mine) < lowest_mode(comp));
    e.canonical = keep_mine ? mine : comp;
    e.site_a = site_of[n];
    if (parent[n] == 0) {
      int sib = children[0][0] == n ? children[0][1] : children[0][0];
      e.site_b = site_of[sib];
    } else {
      e.site_b = site_of[parent[n]];
    }
    edge_of[n] = static_cast<int>(edges_.size());
    edges_.push_back(e);
  };
  visit(0);

  // legs in fixed order [left child, right child, parent]
  for (int n = 1; n < n_nodes; ++n) {
    Site& s = sites_[site_of[n]];
    if (s.is_leaf) {
      s.legs[0] = edge_of[n];
      s.num_legs = 1;
    } else {
      s.legs[0] = edge_of[children[n][0]];
      s.legs[1] = edge_of[children[n][1]];
      s.legs[2] = edge_of[n];
      s.num_legs = 3;
    }
  }

  schedule_.resize(edges_.size());
  for (std::size_t t = 0; t < edges_.size(); ++t) schedule_[t] = static_cast<int>(t);

  // toward_[s][t]: incident edge of s on the path from s to edge t
  const int E = num_edges();
  toward_.assign(static_cast<std::size_t>(num_sites()) * E, -1);
  for (int s0 = 0; s0 < num_sites(); ++s0) {
    auto toward_here = [&](int t) -> int& {
      return toward_[static_cast<std::size_t>(s0) * E + t];
    };
    std::deque<std::pair<int, int>> queue;  // (site, first leg taken)
    std::vector<char> seen(num_sites(), 0);
    seen[s0] = 1;
    for (int l = 0; l < sites_[s0].num_legs; ++l) {
      int e = sites_[s0].legs[l];
      toward_here(e) = e;
      auto [a, b] = edge_sites(e);
      queue.emplace_back(a == s0 ? b : a, e);
    }
    while (!queue.empty()) {
      auto [v, first] = queue.front();
      queue.pop_front();
      if (seen[v]) continue;
      seen[v] = 1;
      for (int l = 0; l < sites_[v].num_legs; ++l) {
        int e = sites_[v].legs[l];
        if (toward_here(e) < 0) toward_here(e) = first;
        auto [a, b] = edge_sites(e);
        int nbr = a == v ? b : a;
        if (!seen[nbr]) queue.emplace_back(nbr, first);
      }
    }
  }
}

std::shared_ptr<const DimensionTree> DimensionTree::linear(int order) {
  if (order < 2) throw std::invalid_argument("DimensionTree: order must be >= 2");
  if (order > 64) throw std::invalid_argument("DimensionTree: order must be <= 64");

  std::vector<ModeSet> clusters;
  std::vector<int> parent;
  std::vector<std::array<int, 2>> children;
  auto add = [&](ModeSet c, int par) {
    clusters.push_back(c);
    parent.push_back(par);
    children.push_back({-1, -1});
    return static_cast<int>(clusters.size()) - 1;
  };

  int root = add(full_mask(order), -1);
  // interior spine {0..k-1} for k = order-1, ..., 2, then leaves
  std::function<int(int, int)> build = [&](int k, int par) -> int {
    if (k == 1) return add(ModeSet{1} << 0, par);
    int n = add(full_mask(k), par);
    children[n][0] = build(k - 1, n);
    children[n][1] = add(ModeSet{1} << (k - 1), n);
    return n;
  };
  children[root][0] = order == 2 ? add(ModeSet{1} << 0, root) : build(order - 1, root);
  children[root][1] = add(ModeSet{1} << (order - 1), root);

  auto tree = std::shared_ptr<DimensionTree>(new DimensionTree());
  tree->finalize_from_rooted(clusters, parent, children);
  return tree;
}

std::shared_ptr<const DimensionTree> linear_tree(int order) {
  return DimensionTree::linear(order);
}

}  // namespace htst
