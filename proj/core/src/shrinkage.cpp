#include "htst/shrinkage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace htst {

double scalar_soft(double x, double alpha) {
  if (alpha < 0) throw std::invalid_argument("scalar_soft: alpha must be nonnegative");
  double m = std::abs(x) - alpha;
  return m > 0 ? (x < 0 ? -m : m) : 0.0;
}

namespace {

std::vector<double> shrink_values(const std::vector<double>& sigma, double alpha) {
  std::vector<double> out;
  out.reserve(sigma.size());
  for (double s : sigma) {
    double v = s - alpha;
    if (v <= 0) break;  // nonincreasing, rest shrinks to zero
    out.push_back(v);
  }
  return out;
}

}  // namespace

HTensor edge_soft_threshold(const HTensor& u, int edge, double alpha) {
  if (alpha < 0)
    throw std::invalid_argument("edge_soft_threshold: alpha must be nonnegative");
  const int edges[1] = {edge};
  return u.spectrum_sweep(edges, [alpha](int, const std::vector<double>& sigma) {
    return shrink_values(sigma, alpha);
  });
}

HTensor soft_threshold(const HTensor& u, double alpha) {
  if (alpha < 0)
    throw std::invalid_argument("soft_threshold: alpha must be nonnegative");
  return u.spectrum_sweep(u.tree()->schedule(),
                          [alpha](int, const std::vector<double>& sigma) {
                            return shrink_values(sigma, alpha);
                          });
}

int count_above(std::span<const double> sigma, double delta) {
  int r = 0;
  while (r < static_cast<int>(sigma.size()) && sigma[r] > delta) ++r;
  return r;
}

double tail_energy(std::span<const double> sigma, int rank) {
  double acc = 0.0;
  for (std::size_t k = static_cast<std::size_t>(std::max(rank, 0)); k < sigma.size(); ++k)
    acc += sigma[k] * sigma[k];
  return std::sqrt(acc);
}

double shrink_error(std::span<const double> sigma, double alpha) {
  int r = count_above(sigma, alpha);
  double tau = tail_energy(sigma, r);
  return std::sqrt(alpha * alpha * r + tau * tau);
}

ThresholdDiagnostics threshold_diagnostics(const std::vector<EdgeSpectrum>& spectra,
                                           double alpha) {
  if (alpha <= 0)
    throw std::invalid_argument("threshold_diagnostics: alpha must be positive");
  ThresholdDiagnostics out;
  out.alpha = alpha;
  for (const auto& spec : spectra) {
    EdgeDiagnostics e;
    e.edge = spec.edge;
    e.r_alpha = count_above(spec.sigma, alpha);
    e.tau_alpha = tail_energy(spec.sigma, e.r_alpha);
    e.d_alpha = std::sqrt(alpha * alpha * e.r_alpha + e.tau_alpha * e.tau_alpha);
    out.lower = std::max(out.lower, e.d_alpha);
    out.upper += e.d_alpha;
    out.edges.push_back(e);
  }
  return out;
}

ThresholdDiagnostics threshold_diagnostics(const HTensor& u, double alpha) {
  return threshold_diagnostics(hsvd_spectra(u), alpha);
}

// ----------------------------------------------------------------- fitting

namespace {

struct LinearFit {
  double intercept = 0, slope = 0, rms = 0;
};

// least squares y ~ intercept + slope * x
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit f;
  double den = n * sxx - sx * sx;
  f.slope = den != 0 ? (n * sxy - sx * sy) / den : 0.0;
  f.intercept = (sy - f.slope * sx) / n;
  double acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    acc += r * r;
  }
  f.rms = std::sqrt(acc / n);
  return f;
}

}  // namespace

std::optional<DecayModel> fit_decay(const std::vector<EdgeSpectrum>& spectra) {
  const std::vector<double>* best = nullptr;
  for (const auto& s : spectra)
    if (!best || s.sigma.size() > best->size()) best = &s.sigma;
  std::vector<double> sigma;
  if (best)
    for (double v : *best) {
      if (v <= 0) break;
      sigma.push_back(v);
    }
  if (sigma.size() < 3)
    throw std::invalid_argument("fit_decay: need at least 3 nonzero singular values");

  std::vector<double> logk(sigma.size()), logs(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    logk[i] = std::log(static_cast<double>(i + 1));
    logs[i] = std::log(sigma[i]);
  }

  // algebraic: log sigma_k ~ a + slope log k, valid for p = -1/slope in (0,2)
  LinearFit alg = fit_line(logk, logs);
  bool alg_valid = alg.slope < -0.5;

  // exponential: log sigma_k ~ log C - c k^beta over a beta grid
  LinearFit exp_best;
  double beta_best = 0;
  bool exp_found = false;
  for (double beta = 0.1; beta <= 2.0 + 1e-9; beta += 0.05) {
    std::vector<double> kb(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i)
      kb[i] = std::pow(static_cast<double>(i + 1), beta);
    LinearFit f = fit_line(kb, logs);
    if (!exp_found || f.rms < exp_best.rms) {
      exp_best = f;
      beta_best = beta;
      exp_found = true;
    }
  }
  bool exp_valid = exp_found && -exp_best.slope > 1e-3;

  constexpr double kQuality = 0.5;  // rms in log space
  if (alg_valid && alg.rms > kQuality) alg_valid = false;
  if (exp_valid && exp_best.rms > kQuality) exp_valid = false;
  if (!alg_valid && !exp_valid) return std::nullopt;

  DecayModel m;
  if (alg_valid && (!exp_valid || alg.rms <= exp_best.rms)) {
    m.kind = DecayModel::Kind::WeakLp;
    m.p = -1.0 / alg.slope;
    for (std::size_t i = 0; i < sigma.size(); ++i)
      m.wlp_norm = std::max(m.wlp_norm,
                            std::pow(static_cast<double>(i + 1), 1.0 / m.p) * sigma[i]);
  } else {
    m.kind = DecayModel::Kind::Exponential;
    m.beta = beta_best;
    m.c = -exp_best.slope;
    m.C = std::exp(exp_best.intercept);
  }
  return m;
}

}  // namespace htst
