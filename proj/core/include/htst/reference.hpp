#pragma once

#include <Eigen/Dense>

#include "htst/dense_tensor.hpp"
#include "htst/htensor.hpp"
#include "htst/operators.hpp"

namespace htst {

//! Entry cap for materialized systems.
inline constexpr std::size_t kDenseSolveCap = std::size_t{1} << 16;

//! Materialize the operator as a matrix acting on mode-0-fastest vectors.
Eigen::MatrixXd dense_operator_matrix(const KronSumOperator& a,
                                      std::size_t cap = kDenseSolveCap);

//! Direct solve of the materialized system (Cholesky; the operators here
//! are symmetric positive definite by their spectrum bounds).
DenseTensor dense_solve(const KronSumOperator& a, const HTensor& f,
                        std::size_t cap = kDenseSolveCap);

//! Quadrature t_j = e^{jh}, w_j = h e^{jh} for 1/lambda on [gamma, Gamma].
struct ExpSumQuadrature {
  std::vector<double> t;
  std::vector<double> w;
  static ExpSumQuadrature build(double gamma, double Gamma, int terms);
  double eval_inverse(double lambda) const;
};

//! Low-rank approximate inverse: A^{-1} f ~ sum_j w_j (x)_i exp(-t_j L) f_i
//! for a pure Kronecker sum with equal factors L and rank-one f. Every edge
//! rank of the result is at most `terms`; accuracy improves exponentially.
HTensor expsum_inverse(const KronSumOperator& a, const HTensor& f, int terms);

double error_vs_reference(const HTensor& u, const HTensor& ref);
double error_vs_reference(const HTensor& u, const DenseTensor& ref);

}  // namespace htst
