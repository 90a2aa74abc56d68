#include "htst/operators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace htst {

void SpectrumBounds::validate() const {
  if (!(gamma > 0) || !(Gamma >= gamma))
    throw std::invalid_argument("SpectrumBounds: need 0 < gamma <= Gamma");
}

KronSumOperator::KronSumOperator(std::vector<int> mode_sizes, std::vector<Term> terms,
                                 SpectrumBounds bounds)
    : mode_sizes_(std::move(mode_sizes)), terms_(std::move(terms)), bounds_(bounds) {
  bounds_.validate();
  if (terms_.empty()) throw std::invalid_argument("KronSumOperator: no terms");
  for (const Term& term : terms_) {
    if (term.size() != mode_sizes_.size())
      throw std::invalid_argument("KronSumOperator: term arity mismatch");
    for (std::size_t i = 0; i < term.size(); ++i) {
      if (!term[i]) continue;
      if (term[i]->rows() != mode_sizes_[i] || term[i]->cols() != mode_sizes_[i])
        throw std::invalid_argument("KronSumOperator: factor shape mismatch");
    }
  }
}

KronSumOperator KronSumOperator::identity(std::vector<int> mode_sizes) {
  Term term(mode_sizes.size());
  return KronSumOperator(std::move(mode_sizes), {std::move(term)},
                         SpectrumBounds{1.0, 1.0});
}

Eigen::MatrixXd laplacian_1d(int n, double h) {
  if (n < 2) throw std::invalid_argument("laplacian_1d: n must be >= 2");
  if (!(h > 0)) throw std::invalid_argument("laplacian_1d: h must be positive");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const double w = 1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    m(i, i) = 2.0 * w;
    if (i > 0) m(i, i - 1) = -w;
    if (i + 1 < n) m(i, i + 1) = -w;
  }
  return m;
}

std::pair<double, double> laplacian_1d_eigen_range(int n, double h) {
  if (n < 2) throw std::invalid_argument("laplacian_1d_eigen_range: n must be >= 2");
  if (!(h > 0)) throw std::invalid_argument("laplacian_1d_eigen_range: h must be positive");
  const double pi = std::numbers::pi;
  auto lambda = [&](int k) { return (2.0 - 2.0 * std::cos(k * pi / (n + 1))) / (h * h); };
  return {lambda(1), lambda(n)};
}

KronSumOperator kron_sum_laplacian(int d, int n, double h) {
  if (d < 2) throw std::invalid_argument("kron_sum_laplacian: d must be >= 2");
  Eigen::MatrixXd lap = laplacian_1d(n, h);
  auto [lo, hi] = laplacian_1d_eigen_range(n, h);
  std::vector<KronSumOperator::Term> terms;
  for (int i = 0; i < d; ++i) {
    KronSumOperator::Term term(d);
    term[i] = lap;
    terms.push_back(std::move(term));
  }
  return KronSumOperator(std::vector<int>(d, n), std::move(terms),
                         SpectrumBounds{d * lo, d * hi});
}

KronSumOperator synthetic_diagonal(int d, int n, double kappa) {
  if (d < 2) throw std::invalid_argument("synthetic_diagonal: d must be >= 2");
  if (n < 2) throw std::invalid_argument("synthetic_diagonal: n must be >= 2");
  if (!(kappa >= 1)) throw std::invalid_argument("synthetic_diagonal: kappa must be >= 1");
  Eigen::VectorXd diag(n);
  for (int i = 0; i < n; ++i)
    diag[i] = (1.0 + (kappa - 1.0) * i / (n - 1)) / d;
  Eigen::MatrixXd m = diag.asDiagonal();
  std::vector<KronSumOperator::Term> terms;
  for (int i = 0; i < d; ++i) {
    KronSumOperator::Term term(d);
    term[i] = m;
    terms.push_back(std::move(term));
  }
  return KronSumOperator(std::vector<int>(d, n), std::move(terms),
                         SpectrumBounds{1.0, kappa});
}

namespace {

void check_operator_shape(const KronSumOperator& a, const HTensor& u) {
  if (a.mode_sizes() != u.mode_sizes())
    throw std::invalid_argument("KronSumOperator: operand mode sizes mismatch");
}

}  // namespace

HTensor apply_exact(const KronSumOperator& a, const HTensor& u) {
  check_operator_shape(a, u);
  std::vector<HTensor> applied;
  applied.reserve(a.terms().size());
  for (const auto& term : a.terms()) {
    std::vector<const Eigen::MatrixXd*> maps(term.size(), nullptr);
    for (std::size_t i = 0; i < term.size(); ++i)
      if (term[i]) maps[i] = &*term[i];
    applied.push_back(u.with_mapped_leaves(maps));
  }
  std::vector<const HTensor*> ptrs;
  for (const auto& t : applied) ptrs.push_back(&t);
  std::vector<double> coeffs(applied.size(), 1.0);
  return linear_combination(ptrs, coeffs);
}

HTensor residual_inexact(const KronSumOperator& a, const HTensor& u, const HTensor& f,
                         double delta) {
  if (delta < 0) throw std::invalid_argument("residual_inexact: delta must be nonnegative");
  check_operator_shape(a, u);
  check_operator_shape(a, f);
  std::vector<HTensor> terms;
  terms.reserve(a.terms().size() + 1);
  for (const auto& term : a.terms()) {
    std::vector<const Eigen::MatrixXd*> maps(term.size(), nullptr);
    for (std::size_t i = 0; i < term.size(); ++i)
      if (term[i]) maps[i] = &*term[i];
    terms.push_back(u.with_mapped_leaves(maps));
  }
  HTensor fm = f;
  if (fm.gauge_edge() != u.gauge_edge()) fm = fm.canonicalized_at(u.gauge_edge());
  terms.push_back(std::move(fm));

  std::vector<const HTensor*> ptrs;
  for (const auto& t : terms) ptrs.push_back(&t);
  std::vector<double> coeffs(terms.size(), 1.0);
  coeffs.back() = -1.0;
  HTensor r = linear_combination(ptrs, coeffs);
  return delta > 0 ? hard_truncate(r, delta) : r;
}

}  // namespace htst
