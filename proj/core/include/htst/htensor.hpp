#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "htst/dense_tensor.hpp"
#include "htst/dimension_tree.hpp"
#include "htst/tensor3.hpp"

namespace htst {

using TreePtr = std::shared_ptr<const DimensionTree>;

//! Singular values of the matricization at one edge, nonincreasing, with
//! entries below the numerical-zero cutoff removed.
struct EdgeSpectrum {
  int edge = -1;
  std::vector<double> sigma;
};

//! Relative cutoff below which singular values count as exact zeros.
inline constexpr double kSingularValueCutoff = 1e-14;

//! Tensor in the hierarchical format over a binary dimension tree:
//! one mode-frame matrix per leaf site, one 3-way transfer tensor per
//! interior site, and a gauge matrix sitting on one edge. In the canonical
//! state every component is an isometry toward the gauge edge, so the
//! singular values of the gauge are those of the matricization there.
//!
//! Values are immutable as seen through the public interface; all
//! operations return new tensors.
class HTensor {
public:
  HTensor() = default;

  static HTensor zero(TreePtr tree, std::vector<int> mode_sizes);
  //! Elementary tensor factor_1 x ... x factor_d (all edge ranks one).
  static HTensor rank_one(TreePtr tree, const std::vector<Eigen::VectorXd>& factors);
  //! Gaussian random components with the given representation rank per edge.
  //! The representation is generally not orthogonal (and the requested ranks
  //! may exceed the matricization ranks the cut can support).
  static HTensor random(TreePtr tree, std::vector<int> mode_sizes,
                        const std::vector<int>& edge_ranks, std::uint64_t seed);
  //! Hierarchical SVD of a dense tensor: per-cut orthonormal bases with an
  //! l2 truncation budget of `tol` split over the cuts. tol = 0 keeps the
  //! exact matricization ranks.
  static HTensor from_dense(const DenseTensor& x, TreePtr tree, double tol);

  DenseTensor to_dense(std::size_t cap = DenseTensor::kDefaultCap) const;

  const TreePtr& tree() const { return tree_; }
  const std::vector<int>& mode_sizes() const { return mode_sizes_; }

  //! Representation rank of edge t (dimension of the connecting legs).
  int edge_rank(int t) const;
  std::vector<int> edge_ranks() const;
  int max_rank() const;
  int min_rank() const;

  bool is_canonical() const { return canonical_; }
  int gauge_edge() const { return gauge_edge_; }
  //! Gauge matrix; in the canonical state its singular values are the
  //! singular values of the matricization at the gauge edge.
  const Eigen::MatrixXd& gauge() const { return gauge_; }

  //! Same tensor re-gauged so that the gauge sits on `edge` and every
  //! component away from it is orthonormal.
  HTensor canonicalized_at(int edge) const;

  HTensor scaled(double a) const;

  //! Map the singular values exposed at each listed edge in turn (in the
  //! given order, single re-gauge between consecutive edges). The transform
  //! returns replacement values; only the strictly positive prefix is kept,
  //! so shrinking and truncation prune ranks immediately.
  using SpectrumTransform =
      std::function<std::vector<double>(int edge, const std::vector<double>& sigma)>;
  HTensor spectrum_sweep(std::span<const int> edges, const SpectrumTransform& fn) const;

  //! Components (used by operator application and the dense converters).
  const Eigen::MatrixXd& leaf_component(int site) const { return leaf_[site]; }
  const Tensor3& interior_component(int site) const { return interior_[site]; }

  //! a*u + v and general linear combinations; exact (ranks add).
  friend HTensor axpy(double a, const HTensor& u, const HTensor& v);
  friend HTensor linear_combination(std::span<const HTensor* const> terms,
                                    std::span<const double> coeffs);
  friend double inner(const HTensor& u, const HTensor& v);
  friend std::vector<EdgeSpectrum> hsvd_spectra(const HTensor& u);

  //! Replace the leaf frame of one mode (exact, result loses orthogonality
  //! until re-canonicalized). Used for separable operator application.
  HTensor with_mapped_leaves(const std::vector<const Eigen::MatrixXd*>& maps) const;

private:
  explicit HTensor(TreePtr tree, std::vector<int> mode_sizes);

  int leaf_site_of_mode(int mode) const;
  void absorb_gauge_into(int site);
  Eigen::MatrixXd regauge_site(int site, int out_leg);  // QR, returns R
  void push_into(int site, int leg, const Eigen::MatrixXd& r);
  void move_gauge_to(int edge);
  void canonicalize_full(int edge);
  void ensure_canonical_at(int edge);
  std::pair<Eigen::MatrixXd, std::vector<int>> expand_side(int site, int via_leg,
                                                           std::size_t cap) const;

  TreePtr tree_;
  std::vector<int> mode_sizes_;
  std::vector<Eigen::MatrixXd> leaf_;  // per site; empty unless leaf site
  std::vector<Tensor3> interior_;     // per site; empty unless interior site
  int gauge_edge_ = 0;
  Eigen::MatrixXd gauge_;
  bool canonical_ = false;
};

double norm(const HTensor& u);
double inner(const HTensor& u, const HTensor& v);
HTensor axpy(double a, const HTensor& u, const HTensor& v);
HTensor linear_combination(std::span<const HTensor* const> terms,
                           std::span<const double> coeffs);

//! Singular values of every edge matricization (one root-moving sweep).
std::vector<EdgeSpectrum> hsvd_spectra(const HTensor& u);

//! Rank truncation with an absolute l2 error budget (split over the edges;
//! the discarded energy certifies the bound), or with per-edge rank caps.
HTensor hard_truncate(const HTensor& u, double tol);
HTensor hard_truncate(const HTensor& u, const std::vector<int>& rank_caps);

}  // namespace htst
