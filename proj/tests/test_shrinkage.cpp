#include "doctest.h"

#include <cmath>
#include <random>

#include "htst/shrinkage.hpp"
#include "test_support.hpp"

using namespace htst;
using namespace htst::test;

namespace {

HTensor matrix_to_htensor(const Eigen::MatrixXd& m) {
  DenseTensor x({static_cast<int>(m.rows()), static_cast<int>(m.cols())});
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      x[static_cast<std::size_t>(i + m.rows() * j)] = m(i, j);
  return HTensor::from_dense(x, linear_tree(2), 0.0);
}

Eigen::MatrixXd htensor_to_matrix(const HTensor& u) {
  DenseTensor x = u.to_dense();
  Eigen::MatrixXd m(x.dims()[0], x.dims()[1]);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      m(i, j) = x[static_cast<std::size_t>(i + m.rows() * j)];
  return m;
}

// matrix with prescribed singular values
Eigen::MatrixXd prescribed_spectrum(const Eigen::VectorXd& sigma, int rows, int cols,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd a(rows, rows), b(cols, cols);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = gauss(rng);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = gauss(rng);
  Eigen::MatrixXd qa = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
  Eigen::MatrixXd qb = Eigen::HouseholderQR<Eigen::MatrixXd>(b).householderQ();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index i = 0; i < sigma.size(); ++i) s(i, i) = sigma[i];
  return qa * s * qb.transpose();
}

}  // namespace

TEST_CASE("scalar soft thresholding") {
  CHECK(scalar_soft(3.0, 1.0) == 2.0);
  CHECK(scalar_soft(-0.5, 1.0) == 0.0);
  CHECK(scalar_soft(-7.25, 0.0) == -7.25);
  CHECK(scalar_soft(-3.0, 1.0) == -2.0);
  CHECK_THROWS_AS(scalar_soft(1.0, -0.1), std::invalid_argument);
}

TEST_CASE("scalar soft thresholding is 1-Lipschitz") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 3.0);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    double x = gauss(rng), y = gauss(rng), a = unif(rng);
    CHECK(std::abs(scalar_soft(x, a) - scalar_soft(y, a)) <= std::abs(x - y) + 1e-15);
  }
}

TEST_CASE("edge shrink with alpha 0 is the identity") {
  HTensor u = random_canonical(linear_tree(3), {4, 4, 4}, 3, 7, false);
  for (int t = 0; t < 3; ++t) {
    HTensor s = edge_soft_threshold(u, t, 0.0);
    CHECK(norm(axpy(-1.0, u, s)) <= 1e-12 * norm(u));
  }
}

TEST_CASE("matrix edge shrink drops the thresholded direction") {
  Eigen::VectorXd sigma(2);
  sigma << 3.0, 1.0;
  HTensor u = matrix_to_htensor(prescribed_spectrum(sigma, 4, 5, 11));
  HTensor s = edge_soft_threshold(u, 0, 2.0);
  auto spec = hsvd_spectra(s);
  REQUIRE(spec[0].sigma.size() == 1);
  CHECK(spec[0].sigma[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.edge_rank(0) == 1);
}

TEST_CASE("edge shrink above the top singular value yields zero") {
  HTensor u = random_canonical(linear_tree(4), {3, 3, 3, 3}, 2, 13);
  auto spec = hsvd_spectra(u);
  double top = spec[2].sigma.empty() ? 0.0 : spec[2].sigma[0];
  HTensor s = edge_soft_threshold(u, 2, top * 1.0001);
  CHECK(norm(s) == 0.0);
  CHECK(s.edge_rank(2) == 0);
}

TEST_CASE("edge shrink error equals the shrink distance of the spectrum") {
  HTensor u = random_canonical(linear_tree(4), {4, 3, 4, 3}, 3, 17);
  auto spec = hsvd_spectra(u);
  for (int t = 0; t < u.tree()->num_edges(); ++t) {
    double alpha = 0.4 * (spec[t].sigma.empty() ? 1.0 : spec[t].sigma[0]);
    HTensor s = edge_soft_threshold(u, t, alpha);
    double want = shrink_error(spec[t].sigma, alpha);
    CHECK(norm(axpy(-1.0, u, s)) == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("full shrink of a rank-one tensor with norm E*alpha is exactly zero") {
  auto tree = linear_tree(4);
  const int e = tree->num_edges();
  std::vector<Eigen::VectorXd> factors;
  std::mt19937_64 rng(19);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd f(3);
    for (int k = 0; k < 3; ++k) f[k] = gauss(rng);
    f.normalize();
    factors.push_back(f);
  }
  const double alpha = 0.37;
  factors[0] *= e * alpha;
  HTensor u = HTensor::rank_one(tree, factors);
  HTensor s = soft_threshold(u, alpha);
  CHECK(norm(s) <= 1e-12 * norm(u));
}

TEST_CASE("full shrink with alpha 0 preserves the tensor") {
  HTensor u = random_canonical(linear_tree(5), {3, 4, 3, 4, 3}, 3, 23, false);
  HTensor s = soft_threshold(u, 0.0);
  CHECK(norm(axpy(-1.0, u, s)) <= 1e-12 * norm(u));
}

TEST_CASE("d=2 shrink equals the nuclear norm proximity map") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  for (int it = 0; it < 25; ++it) {
    int rows = 2 + static_cast<int>(rng() % 7);
    int cols = 2 + static_cast<int>(rng() % 7);
    Eigen::MatrixXd x(rows, cols);
    std::normal_distribution<double> gauss;
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = gauss(rng);
    double alpha = unif(rng) * x.norm() / 2;

    Eigen::MatrixXd got = htensor_to_matrix(soft_threshold(matrix_to_htensor(x), alpha));
    Eigen::MatrixXd want = dense_svd_shrink(x, alpha);
    CHECK((got - want).norm() <= 1e-10 * (1 + x.norm()));

    // the prox objective at the shrink output beats nearby competitors
    auto objective = [&](const Eigen::MatrixXd& v) {
      return alpha * nuclear_norm(v) + 0.5 * (x - v).squaredNorm();
    };
    double base = objective(want);
    for (int p = 0; p < 10; ++p) {
      Eigen::MatrixXd pert(rows, cols);
      for (Eigen::Index i = 0; i < pert.size(); ++i) pert.data()[i] = gauss(rng);
      pert *= 0.1 * alpha / pert.norm();
      CHECK(base < objective(want + pert));
    }
  }
}

TEST_CASE("threshold diagnostics on a prescribed spectrum") {
  Eigen::VectorXd sigma(3);
  sigma << 3.0, 1.0, 0.5;
  HTensor u = matrix_to_htensor(prescribed_spectrum(sigma, 5, 4, 31));
  ThresholdDiagnostics d = threshold_diagnostics(u, 0.8);
  REQUIRE(d.edges.size() == 1);
  CHECK(d.edges[0].r_alpha == 2);
  CHECK(d.edges[0].tau_alpha == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(d.edges[0].d_alpha == doctest::Approx(std::sqrt(1.53)).epsilon(1e-9));
  CHECK(d.lower == doctest::Approx(d.upper).epsilon(1e-12));  // single edge
}

TEST_CASE("diagnostics when everything is below the threshold") {
  Eigen::VectorXd sigma(3);
  sigma << 0.5, 0.3, 0.1;
  HTensor u = matrix_to_htensor(prescribed_spectrum(sigma, 4, 4, 37));
  ThresholdDiagnostics d = threshold_diagnostics(u, 0.9);
  CHECK(d.edges[0].r_alpha == 0);
  CHECK(d.edges[0].tau_alpha == doctest::Approx(sigma.norm()).epsilon(1e-9));
  CHECK(d.edges[0].d_alpha == doctest::Approx(sigma.norm()).epsilon(1e-9));
}

TEST_CASE("exact ties are excluded from r_alpha") {
  std::vector<double> sigma{3.0, 1.0, 0.5};
  CHECK(count_above(sigma, 1.0) == 1);
  CHECK(count_above(sigma, 0.9999) == 2);
  CHECK(count_above(sigma, 3.0) == 0);
  CHECK(tail_energy(sigma, 1) == doctest::Approx(std::sqrt(1.25)));
  CHECK(shrink_error(sigma, 1.0) ==
        doctest::Approx(std::sqrt(1.0 + 1.25)).epsilon(1e-12));
}

TEST_CASE("diagnostics formula invariant d = sqrt(alpha^2 r + tau^2)") {
  HTensor u = random_canonical(linear_tree(4), {4, 4, 4, 4}, 3, 41);
  ThresholdDiagnostics d = threshold_diagnostics(u, 0.2);
  CHECK(d.lower <= d.upper + 1e-15);
  for (const auto& e : d.edges) {
    CHECK(e.d_alpha ==
          doctest::Approx(std::sqrt(0.04 * e.r_alpha + e.tau_alpha * e.tau_alpha))
              .epsilon(1e-12));
    CHECK(e.tau_alpha >= 0);
    CHECK(e.r_alpha >= 0);
  }
}

TEST_CASE("non-expansiveness of the full shrink") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> unif(0.0, 0.6);
  for (int it = 0; it < 60; ++it) {
    int d = 2 + static_cast<int>(rng() % 4);
    std::vector<int> dims(d, 3 + static_cast<int>(rng() % 3));
    auto tree = linear_tree(d);
    HTensor u = random_canonical(tree, dims, 3, rng());
    HTensor v = random_canonical(tree, dims, 3, rng());
    double alpha = unif(rng) + 1e-4;
    double lhs = norm(axpy(-1.0, soft_threshold(u, alpha), soft_threshold(v, alpha)));
    double rhs = norm(axpy(-1.0, u, v));
    CHECK(lhs <= rhs * (1 + 1e-10));
  }
}

TEST_CASE("single-edge shrinks never increase any singular value") {
  std::mt19937_64 rng(47);
  for (int it = 0; it < 10; ++it) {
    int d = 2 + static_cast<int>(rng() % 4);
    std::vector<int> dims(d, 3 + static_cast<int>(rng() % 3));
    auto tree = linear_tree(d);
    HTensor u = random_canonical(tree, dims, 3, rng());
    auto before = hsvd_spectra(u);
    double alpha = 0.1 + 0.2 * (it % 3);
    for (int s = 0; s < tree->num_edges(); ++s) {
      auto after = hsvd_spectra(edge_soft_threshold(u, s, alpha));
      for (int t = 0; t < tree->num_edges(); ++t)
        for (std::size_t i = 0; i < after[t].sigma.size(); ++i) {
          double b = i < before[t].sigma.size() ? before[t].sigma[i] : 0.0;
          CHECK(after[t].sigma[i] <= b + 1e-10);
        }
    }
  }
}

TEST_CASE("sandwich bound around the full shrink error") {
  std::mt19937_64 rng(53);
  for (int it = 0; it < 40; ++it) {
    int d = 2 + static_cast<int>(rng() % 4);
    std::vector<int> dims(d, 3 + static_cast<int>(rng() % 3));
    HTensor u = random_canonical(linear_tree(d), dims, 3, rng());
    double alpha = 0.01 + 0.1 * (it % 5);
    ThresholdDiagnostics diag = threshold_diagnostics(u, alpha);
    double err = norm(axpy(-1.0, u, soft_threshold(u, alpha)));
    CHECK(err >= diag.lower - 1e-9);
    CHECK(err <= diag.upper + 1e-9);
  }
}

TEST_CASE("shrink error decays no faster than the threshold") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int it = 0; it < 200; ++it) {
    int len = 1 + static_cast<int>(rng() % 12);
    std::vector<double> sigma(len);
    double last = 2.0;
    for (int i = 0; i < len; ++i) sigma[i] = last = last * (0.3 + 0.7 * unif(rng));
    double alpha = unif(rng) * 2.0 + 1e-6;
    for (double theta : {0.5, 0.75, 0.9}) {
      CHECK(shrink_error(sigma, alpha) <=
            shrink_error(sigma, theta * alpha) / theta + 1e-10);
    }
  }
}

TEST_CASE("shrink output ranks never exceed input ranks") {
  HTensor u = random_canonical(linear_tree(5), {4, 4, 4, 4, 4}, 4, 61);
  HTensor s = soft_threshold(u, 0.05);
  auto ru = u.edge_ranks(), rs = s.edge_ranks();
  for (std::size_t t = 0; t < ru.size(); ++t) CHECK(rs[t] <= ru[t]);
}

TEST_CASE("fit_decay recovers an algebraic tail") {
  EdgeSpectrum spec;
  spec.edge = 0;
  for (int k = 1; k <= 40; ++k)
    spec.sigma.push_back(1.0 / (static_cast<double>(k) * k));
  auto model = fit_decay({spec});
  REQUIRE(model.has_value());
  REQUIRE(model->kind == DecayModel::Kind::WeakLp);
  CHECK(std::abs(1.0 / model->p - 2.0) <= 0.1);  // fitted slope -2 within 0.1
  CHECK(model->p == doctest::Approx(0.5).epsilon(0.05));
  CHECK(model->wlp_norm > 0);
}

TEST_CASE("fit_decay recovers an exponential tail") {
  EdgeSpectrum spec;
  spec.edge = 0;
  for (int k = 1; k <= 30; ++k) spec.sigma.push_back(std::exp(-static_cast<double>(k)));
  auto model = fit_decay({spec});
  REQUIRE(model.has_value());
  REQUIRE(model->kind == DecayModel::Kind::Exponential);
  CHECK(std::abs(model->c - 1.0) <= 0.1);
  CHECK(std::abs(model->beta - 1.0) <= 0.1);
}

TEST_CASE("fit_decay flags flat spectra as neither") {
  EdgeSpectrum spec;
  spec.edge = 0;
  spec.sigma = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  CHECK_FALSE(fit_decay({spec}).has_value());
}

TEST_CASE("fit_decay needs at least three nonzero values") {
  EdgeSpectrum spec;
  spec.edge = 0;
  spec.sigma = {1.0, 0.5};
  CHECK_THROWS_AS(fit_decay({spec}), std::invalid_argument);
}
