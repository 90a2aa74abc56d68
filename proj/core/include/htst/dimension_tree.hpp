#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

namespace htst {

//! Set of tensor modes encoded as a bitmask (mode i <-> bit i, i = 0..d-1).
using ModeSet = std::uint64_t;

int mode_count(ModeSet s);
int lowest_mode(ModeSet s);
std::vector<int> modes_of(ModeSet s);

//! Binary dimension tree over the modes {0,...,d-1} together with the
//! enumeration of its E = 2d-3 edges and the edge order used by sweeps.
//!
//! Every non-root node n induces the cut {n, [n]} with [n] the complement;
//! the two children of the root induce the same cut and are merged into a
//! single edge. Besides the rooted view, the tree exposes an unrooted
//! "site" graph: one component site per non-root node (d leaf sites and
//! d-2 interior sites) connected by the E edges. This is the graph on
//! which representations are stored and re-gauged.
class DimensionTree {
public:
  struct Site {
    bool is_leaf = false;
    int mode = -1;               // mode index for leaf sites
    std::array<int, 3> legs{{-1, -1, -1}};  // incident edges, fixed order
    int num_legs = 0;            // 1 for leaves, 3 for interior sites
    ModeSet cluster = 0;         // rooted-tree cluster of the node
  };

  //! Linear (tensor-train shaped) tree: interior nodes {0..k}, k < d-1.
  //! Edge order is the depth-first sweep order; consecutive edges share a
  //! site, so moving the gauge between sweep steps costs a single re-gauge.
  static std::shared_ptr<const DimensionTree> linear(int order);

  int order() const { return d_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_sites() const { return static_cast<int>(sites_.size()); }

  ModeSet full_set() const;
  //! Cut set n_t (the smaller side of the cut; ties resolved by lowest mode).
  ModeSet edge_modes(int t) const { return edges_[t].canonical; }
  ModeSet edge_complement(int t) const;

  //! Edge visit order of the thresholding sweep. Edges are stored in sweep
  //! order, so this is the identity permutation.
  const std::vector<int>& schedule() const { return schedule_; }

  const Site& site(int s) const { return sites_[s]; }
  //! Endpoint sites of edge t. The gauge matrix on t has rows indexed by
  //! the rank toward `first` and columns by the rank toward `second`.
  std::pair<int, int> edge_sites(int t) const {
    return {edges_[t].site_a, edges_[t].site_b};
  }
  //! Leg index of edge t at an incident site.
  int leg_of_edge(int s, int t) const;
  //! Incident edge of site s lying on the path from s to edge `target`
  //! (returns `target` itself when incident).
  int next_edge_toward(int s, int target_edge) const {
    return toward_[static_cast<std::size_t>(s) * edges_.size() + target_edge];
  }
  //! Sites to re-gauge through when moving the gauge from one edge to
  //! another; empty when the edges coincide.
  std::vector<int> path_sites(int from_edge, int to_edge) const;

  //! Modes of the subtree hanging off site s away from leg `via_leg`,
  //! in the component index order used by matricizations.
  std::vector<int> side_modes(int s, int via_leg) const;

  bool same_structure(const DimensionTree& other) const;

private:
  struct Edge {
    ModeSet canonical = 0;  // n_t
    int site_a = -1;
    int site_b = -1;
  };

  DimensionTree() = default;
  void finalize_from_rooted(const std::vector<ModeSet>& clusters,
                            const std::vector<int>& parent,
                            const std::vector<std::array<int, 2>>& children);

  int d_ = 0;
  std::vector<Site> sites_;
  std::vector<Edge> edges_;
  std::vector<int> schedule_;
  std::vector<int> toward_;  // num_sites x num_edges
};

std::shared_ptr<const DimensionTree> linear_tree(int order);

}  // namespace htst
