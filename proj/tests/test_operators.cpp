#include "doctest.h"

#include <cmath>
#include <random>

#include "htst/operators.hpp"
#include "htst/reference.hpp"
#include "htst/solver.hpp"
#include "test_support.hpp"

using namespace htst;
using namespace htst::test;

TEST_CASE("1d Laplacian stencil and analytic eigenvalues") {
  Eigen::MatrixXd l = laplacian_1d(3, 1.0);
  CHECK(l(0, 0) == 2.0);
  CHECK(l(0, 1) == -1.0);
  CHECK(l(0, 2) == 0.0);
  CHECK((l - l.transpose()).norm() == 0.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(l);
  CHECK(eig.eigenvalues()[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(eig.eigenvalues()[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(eig.eigenvalues()[2] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));

  auto [lo, hi] = laplacian_1d_eigen_range(3, 1.0);
  CHECK(lo == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(hi == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig2(laplacian_1d(2, 1.0));
  CHECK(eig2.eigenvalues()[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig2.eigenvalues()[1] == doctest::Approx(3.0).epsilon(1e-12));

  CHECK_THROWS_AS(laplacian_1d(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(laplacian_1d(4, 0.0), std::invalid_argument);
}

TEST_CASE("Kronecker sum bounds match a dense eigensolve") {
  KronSumOperator a = kron_sum_laplacian(2, 3, 1.0);
  Eigen::MatrixXd m = dense_operator_matrix(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  CHECK(std::abs(eig.eigenvalues().minCoeff() - a.bounds().gamma) < 1e-10);
  CHECK(std::abs(eig.eigenvalues().maxCoeff() - a.bounds().Gamma) < 1e-10);
  CHECK(a.bounds().gamma == doctest::Approx(2 * (2 - std::sqrt(2.0))).epsilon(1e-12));
  CHECK(a.bounds().Gamma == doctest::Approx(2 * (2 + std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("2x2 Kronecker sum spectrum is the sumset") {
  KronSumOperator a = kron_sum_laplacian(2, 2, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense_operator_matrix(a));
  Eigen::VectorXd want(4);
  want << 2, 4, 4, 6;
  for (int i = 0; i < 4; ++i)
    CHECK(eig.eigenvalues()[i] == doctest::Approx(want[i]).epsilon(1e-12));
  CHECK(a.bounds().gamma == doctest::Approx(2.0));
  CHECK(a.bounds().Gamma == doctest::Approx(6.0));
}

TEST_CASE("Rayleigh quotients stay inside the spectrum bounds") {
  KronSumOperator a = kron_sum_laplacian(3, 4, 0.5);
  auto tree = linear_tree(3);
  std::mt19937_64 rng(7);
  for (int it = 0; it < 100; ++it) {
    HTensor v = random_canonical(tree, a.mode_sizes(), 3, rng());
    double q = inner(apply_exact(a, v), v) / inner(v, v);
    CHECK(q >= a.bounds().gamma * (1 - 1e-10));
    CHECK(q <= a.bounds().Gamma * (1 + 1e-10));
  }
}

TEST_CASE("identity operator application is exact") {
  auto tree = linear_tree(3);
  std::vector<int> dims{4, 3, 4};
  KronSumOperator id = KronSumOperator::identity(dims);
  HTensor u = random_canonical(tree, dims, 3, 11, false);
  CHECK(norm(axpy(-1.0, u, apply_exact(id, u))) <= 1e-12 * norm(u));

  HTensor z = HTensor::zero(tree, dims);
  CHECK(norm(apply_exact(id, z)) == 0.0);
}

TEST_CASE("operator application matches the dense matrix-vector product") {
  KronSumOperator a = kron_sum_laplacian(3, 4, 1.0);
  HTensor u = random_canonical(linear_tree(3), a.mode_sizes(), 3, 13, false);
  DenseTensor ud = u.to_dense();
  Eigen::Map<const Eigen::VectorXd> uv(ud.data(), static_cast<Eigen::Index>(ud.size()));
  Eigen::VectorXd want = dense_operator_matrix(a) * uv;

  DenseTensor got = apply_exact(a, u).to_dense();
  double diff = 0;
  for (std::size_t i = 0; i < got.size(); ++i)
    diff += (got[i] - want[static_cast<Eigen::Index>(i)]) *
            (got[i] - want[static_cast<Eigen::Index>(i)]);
  CHECK(std::sqrt(diff) <= 1e-10 * want.norm());
}

TEST_CASE("application bounds the rank growth by the term count") {
  KronSumOperator a = kron_sum_laplacian(4, 3, 1.0);
  HTensor u = random_canonical(linear_tree(4), a.mode_sizes(), 2, 17);
  HTensor au = apply_exact(a, u);
  const int terms = static_cast<int>(a.terms().size());
  for (int t = 0; t < u.tree()->num_edges(); ++t)
    CHECK(au.edge_rank(t) <= terms * u.edge_rank(t));
}

TEST_CASE("exact residual and the inexact certificate") {
  KronSumOperator a = kron_sum_laplacian(3, 4, 1.0);
  auto tree = linear_tree(3);
  std::vector<Eigen::VectorXd> ones(3, Eigen::VectorXd::Ones(4));
  HTensor f = HTensor::rank_one(tree, ones);
  HTensor u = random_canonical(tree, a.mode_sizes(), 2, 19, false);

  HTensor r0 = residual_inexact(a, u, f, 0.0);
  DenseTensor ud = u.to_dense(), fd = f.to_dense();
  Eigen::Map<const Eigen::VectorXd> uv(ud.data(), static_cast<Eigen::Index>(ud.size()));
  Eigen::Map<const Eigen::VectorXd> fv(fd.data(), static_cast<Eigen::Index>(fd.size()));
  Eigen::VectorXd want = dense_operator_matrix(a) * uv - fv;
  DenseTensor got = r0.to_dense();
  double diff = 0;
  for (std::size_t i = 0; i < got.size(); ++i)
    diff += (got[i] - want[static_cast<Eigen::Index>(i)]) *
            (got[i] - want[static_cast<Eigen::Index>(i)]);
  CHECK(std::sqrt(diff) <= 1e-12 * (1 + want.norm()));

  for (double delta : {1e-3, 1e-1, 1.0}) {
    HTensor r = residual_inexact(a, u, f, delta);
    CHECK(norm(axpy(-1.0, r0, r)) <= delta * (1 + 1e-12));
    CHECK(r.max_rank() <= r0.max_rank());
  }
}

TEST_CASE("residual at the exact solution is within delta") {
  KronSumOperator a = kron_sum_laplacian(3, 4, 1.0);
  auto tree = linear_tree(3);
  std::vector<Eigen::VectorXd> ones(3, Eigen::VectorXd::Ones(4));
  HTensor f = HTensor::rank_one(tree, ones);
  HTensor ustar = HTensor::from_dense(dense_solve(a, f), tree, 0.0);
  for (double delta : {1e-6, 1e-3}) {
    HTensor r = residual_inexact(a, ustar, f, delta);
    CHECK(norm(r) <= delta + 1e-10);
  }
}

TEST_CASE("operator symmetry through inner products") {
  KronSumOperator a = kron_sum_laplacian(3, 3, 1.0);
  auto tree = linear_tree(3);
  std::mt19937_64 rng(23);
  for (int it = 0; it < 20; ++it) {
    HTensor u = random_canonical(tree, a.mode_sizes(), 2, rng());
    HTensor v = random_canonical(tree, a.mode_sizes(), 2, rng());
    double lhs = inner(apply_exact(a, u), v);
    double rhs = inner(u, apply_exact(a, v));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1 + std::abs(lhs)));
  }
}

TEST_CASE("Richardson map contracts at the predicted rate") {
  KronSumOperator a = synthetic_diagonal(3, 4, 3.0);
  auto [mu, rho] = contraction_params(a.bounds());
  auto tree = linear_tree(3);
  std::mt19937_64 rng(29);
  for (int it = 0; it < 20; ++it) {
    HTensor v = random_canonical(tree, a.mode_sizes(), 2, rng());
    HTensor w = random_canonical(tree, a.mode_sizes(), 2, rng());
    HTensor fv = axpy(-mu, apply_exact(a, v), v);
    HTensor fw = axpy(-mu, apply_exact(a, w), w);
    CHECK(norm(axpy(-1.0, fv, fw)) <= rho * norm(axpy(-1.0, v, w)) + 1e-10);
  }
}

TEST_CASE("synthetic operator attains its spectrum bounds exactly") {
  KronSumOperator a = synthetic_diagonal(2, 3, 3.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense_operator_matrix(a));
  CHECK(eig.eigenvalues().minCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig.eigenvalues().maxCoeff() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("shape mismatches are rejected") {
  KronSumOperator a = kron_sum_laplacian(3, 4, 1.0);
  HTensor u = random_canonical(linear_tree(3), {3, 3, 3}, 2, 31);
  CHECK_THROWS_AS(apply_exact(a, u), std::invalid_argument);
}
