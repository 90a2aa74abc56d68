#include "htst/reference.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace htst {

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

Eigen::MatrixXd dense_operator_matrix(const KronSumOperator& a, std::size_t cap) {
  std::size_t total = 1;
  for (int n : a.mode_sizes()) {
    if (total > cap / static_cast<std::size_t>(n))
      throw std::length_error("dense_operator_matrix: dimension exceeds capacity");
    total *= static_cast<std::size_t>(n);
  }
  const Eigen::Index n = static_cast<Eigen::Index>(total);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (const auto& term : a.terms()) {
    // mode 0 is the fastest index, so later modes come first in the product
    Eigen::MatrixXd m = term[0] ? *term[0]
                                : Eigen::MatrixXd::Identity(a.mode_sizes()[0],
                                                            a.mode_sizes()[0]);
    for (int i = 1; i < a.order(); ++i) {
      Eigen::MatrixXd f = term[i] ? *term[i]
                                  : Eigen::MatrixXd::Identity(a.mode_sizes()[i],
                                                              a.mode_sizes()[i]);
      m = kron(f, m);
    }
    out += m;
  }
  return out;
}

DenseTensor dense_solve(const KronSumOperator& a, const HTensor& f, std::size_t cap) {
  if (a.mode_sizes() != f.mode_sizes())
    throw std::invalid_argument("dense_solve: mode sizes mismatch");
  Eigen::MatrixXd m = dense_operator_matrix(a, cap);
  DenseTensor fd = f.to_dense(cap);
  Eigen::Map<const Eigen::VectorXd> b(fd.data(), static_cast<Eigen::Index>(fd.size()));
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("dense_solve: factorization failed (singular system?)");
  Eigen::VectorXd x = llt.solve(b);
  DenseTensor out(f.mode_sizes(), cap);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[static_cast<Eigen::Index>(i)];
  return out;
}

ExpSumQuadrature ExpSumQuadrature::build(double gamma, double Gamma, int terms) {
  if (!(gamma > 0) || !(Gamma >= gamma))
    throw std::invalid_argument("ExpSumQuadrature: need 0 < gamma <= Gamma");
  if (terms < 2) throw std::invalid_argument("ExpSumQuadrature: need at least 2 terms");
  // trapezoid on 1/l = int e^{s - l e^s} ds, scaled so l' = l/gamma is in [1, kappa];
  // h balances the discretization error against the lower truncation tail
  const double h = 2.0 * std::numbers::pi / std::sqrt(static_cast<double>(terms));
  ExpSumQuadrature q;
  q.t.resize(terms);
  q.w.resize(terms);
  const double mid = 0.5 * static_cast<double>(terms - 1);
  for (int j = 0; j < terms; ++j) {
    const double s = (static_cast<double>(j) - mid) * h;
    q.t[j] = std::exp(s) / gamma;
    q.w[j] = h * std::exp(s) / gamma;
  }
  return q;
}

double ExpSumQuadrature::eval_inverse(double lambda) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) acc += w[j] * std::exp(-t[j] * lambda);
  return acc;
}

HTensor expsum_inverse(const KronSumOperator& a, const HTensor& f, int terms) {
  const int d = a.order();
  if (a.mode_sizes() != f.mode_sizes())
    throw std::invalid_argument("expsum_inverse: mode sizes mismatch");
  if (static_cast<int>(a.terms().size()) != d)
    throw std::invalid_argument("expsum_inverse: operator is not a pure Kronecker sum");
  const Eigen::MatrixXd* factor = nullptr;
  for (int i = 0; i < d; ++i) {
    const auto& term = a.terms()[i];
    for (int s = 0; s < d; ++s) {
      const bool expect = s == i;
      if (term[s].has_value() != expect)
        throw std::invalid_argument("expsum_inverse: operator is not a pure Kronecker sum");
    }
    if (!factor) {
      factor = &*term[i];
    } else if ((*factor - *term[i]).cwiseAbs().maxCoeff() != 0.0) {
      throw std::invalid_argument("expsum_inverse: factors must be equal");
    }
  }
  for (int r : f.edge_ranks())
    if (r > 1) throw std::invalid_argument("expsum_inverse: f must be rank one");
  if (f.min_rank() == 0) return HTensor::zero(f.tree(), f.mode_sizes());

  // rank-one factors of f: unit leaf columns and the collected scalar weight
  HTensor fc = f.canonicalized_at(f.tree()->schedule().front());
  double weight = fc.gauge()(0, 0);
  std::vector<Eigen::VectorXd> factors(d);
  for (int s = 0; s < fc.tree()->num_sites(); ++s) {
    const auto& st = fc.tree()->site(s);
    if (st.is_leaf)
      factors[st.mode] = fc.leaf_component(s).col(0);
    else
      weight *= fc.interior_component(s)(0, 0, 0);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(*factor);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("expsum_inverse: eigendecomposition failed");
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::VectorXd& lam = eig.eigenvalues();

  ExpSumQuadrature q = ExpSumQuadrature::build(a.bounds().gamma, a.bounds().Gamma, terms);
  std::vector<HTensor> summands;
  summands.reserve(terms);
  for (int j = 0; j < terms; ++j) {
    std::vector<Eigen::VectorXd> tf(d);
    for (int i = 0; i < d; ++i)
      tf[i] = v * ((-q.t[j] * lam.array()).exp() * (v.transpose() * factors[i]).array())
                      .matrix();
    tf[0] *= q.w[j] * weight;
    summands.push_back(HTensor::rank_one(f.tree(), tf));
  }
  std::vector<const HTensor*> ptrs;
  for (const auto& s : summands) ptrs.push_back(&s);
  std::vector<double> coeffs(summands.size(), 1.0);
  return linear_combination(ptrs, coeffs);
}

double error_vs_reference(const HTensor& u, const HTensor& ref) {
  return norm(axpy(-1.0, ref, u));
}

double error_vs_reference(const HTensor& u, const DenseTensor& ref) {
  DenseTensor ud = u.to_dense();
  if (ud.dims() != ref.dims())
    throw std::invalid_argument("error_vs_reference: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < ud.size(); ++i) {
    const double d = ud[i] - ref[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace htst
