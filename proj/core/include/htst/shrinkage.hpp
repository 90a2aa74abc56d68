#pragma once

#include <optional>
#include <span>
#include <vector>

#include "htst/htensor.hpp"

namespace htst {

//! Scalar soft thresholding sgn(x) * max{|x| - alpha, 0}.
double scalar_soft(double x, double alpha);

//! Soft thresholding of the singular values of the matricization at one
//! edge. Directions shrunk to zero are pruned (ties at sigma = alpha count
//! as zero).
HTensor edge_soft_threshold(const HTensor& u, int edge, double alpha);

//! The complete soft shrinkage operator: sequential singular-value soft
//! thresholding at every edge of the tree, visited in the sweep order with
//! one re-gauge between consecutive edges. Non-expansive; the output has
//! finite representation ranks.
HTensor soft_threshold(const HTensor& u, double alpha);

// Shrinkage error functionals on a nonincreasing singular value sequence.

//! Number of values strictly above delta.
int count_above(std::span<const double> sigma, double delta);
//! l2 tail beyond the leading `rank` values.
double tail_energy(std::span<const double> sigma, int rank);
//! Distance of the shrunk spectrum: sqrt(alpha^2 r + tau^2) with
//! r = count_above(alpha), tau = tail_energy(r).
double shrink_error(std::span<const double> sigma, double alpha);

struct EdgeDiagnostics {
  int edge = -1;
  int r_alpha = 0;      // singular values strictly above alpha
  double tau_alpha = 0; // tail energy beyond them
  double d_alpha = 0;   // sqrt(alpha^2 r + tau^2)
};

//! Per-edge shrinkage error functionals together with the resulting
//! two-sided bound max_t d_t <= ||S_alpha(u) - u|| <= sum_t d_t.
struct ThresholdDiagnostics {
  double alpha = 0;
  std::vector<EdgeDiagnostics> edges;
  double lower = 0;
  double upper = 0;
};

ThresholdDiagnostics threshold_diagnostics(const HTensor& u, double alpha);
ThresholdDiagnostics threshold_diagnostics(const std::vector<EdgeSpectrum>& spectra,
                                           double alpha);

//! Fitted singular value decay regime; reporting aid only, no solver
//! decision depends on it.
struct DecayModel {
  enum class Kind { WeakLp, Exponential };
  Kind kind = Kind::WeakLp;
  // weak-lp parameters: sup_n n^(1/p) sigma_n estimate
  double p = 0;
  double wlp_norm = 0;
  // exponential parameters: sigma_k <= C exp(-c k^beta)
  double C = 0;
  double c = 0;
  double beta = 0;
};

//! Least-squares fit of the longest observed spectrum against the algebraic
//! and exponential decay families; empty when neither family fits.
std::optional<DecayModel> fit_decay(const std::vector<EdgeSpectrum>& spectra);

}  // namespace htst
