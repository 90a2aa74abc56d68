#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "htst/htensor.hpp"

namespace htst {

//! Two-sided spectrum bounds gamma ||v||^2 <= <Av,v> <= Gamma ||v||^2.
struct SpectrumBounds {
  double gamma = 0;
  double Gamma = 0;
  double kappa() const { return Gamma / gamma; }
  void validate() const;
};

//! Linear operator given as a sum of Kronecker products of mode matrices.
//! An empty entry stands for the identity on that mode.
class KronSumOperator {
public:
  using Term = std::vector<std::optional<Eigen::MatrixXd>>;

  KronSumOperator(std::vector<int> mode_sizes, std::vector<Term> terms,
                  SpectrumBounds bounds);

  static KronSumOperator identity(std::vector<int> mode_sizes);

  int order() const { return static_cast<int>(mode_sizes_.size()); }
  const std::vector<int>& mode_sizes() const { return mode_sizes_; }
  const std::vector<Term>& terms() const { return terms_; }
  const SpectrumBounds& bounds() const { return bounds_; }

private:
  std::vector<int> mode_sizes_;
  std::vector<Term> terms_;
  SpectrumBounds bounds_;
};

//! Dirichlet finite-difference Laplacian (-1, 2, -1)/h^2 on n interior points.
Eigen::MatrixXd laplacian_1d(int n, double h);
//! Analytic eigenvalue range of laplacian_1d: lambda_k = (2 - 2 cos(k pi/(n+1)))/h^2.
std::pair<double, double> laplacian_1d_eigen_range(int n, double h);

//! A = sum_i I x ... x L x ... x I with the 1d Laplacian in slot i;
//! spectrum bounds are d * [lambda_min, lambda_max] of the factor.
KronSumOperator kron_sum_laplacian(int d, int n, double h);

//! Diagonal Kronecker sum with spectrum exactly [1, kappa]; fast synthetic
//! test operator with configurable conditioning.
KronSumOperator synthetic_diagonal(int d, int n, double kappa);

//! Exact operator application; representation ranks grow by at most the
//! number of terms.
HTensor apply_exact(const KronSumOperator& a, const HTensor& u);

//! r with ||r - (A u - f)|| <= delta, certified by the discarded-energy
//! bound of the truncation. delta = 0 keeps the exact residual.
HTensor residual_inexact(const KronSumOperator& a, const HTensor& u, const HTensor& f,
                         double delta);

}  // namespace htst
