#include "htst/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "htst/shrinkage.hpp"

namespace htst {

std::pair<double, double> contraction_params(const SpectrumBounds& bounds) {
  bounds.validate();
  const double mu = 2.0 / (bounds.gamma + bounds.Gamma);
  const double kappa = bounds.kappa();
  const double rho = (kappa - 1.0) / (kappa + 1.0);
  return {mu, rho};
}

double SolverConfig::tau2_value() const {
  if (tau2) return *tau2;
  return std::min(0.1, 0.4 * (1.0 - rho()));
}

void SolverConfig::validate() const {
  bounds.validate();
  auto in01 = [](double v) { return v > 0 && v < 1; };
  if (!in01(nu)) throw std::invalid_argument("SolverConfig: nu must be in (0,1)");
  if (!in01(theta)) throw std::invalid_argument("SolverConfig: theta must be in (0,1)");
  if (!in01(omega)) throw std::invalid_argument("SolverConfig: omega must be in (0,1)");
  if (!in01(tau1)) throw std::invalid_argument("SolverConfig: tau1 must be in (0,1)");
  const double t2 = tau2_value();
  if (!(t2 > 0 && t2 < 0.5 * (1.0 - rho())))
    throw std::invalid_argument("SolverConfig: tau2 must be in (0, (1-rho)/2)");
  if (!(epsilon > 0)) throw std::invalid_argument("SolverConfig: epsilon must be positive");
  if (max_iter <= 0) throw std::invalid_argument("SolverConfig: max_iter must be positive");
  if (!alpha0 && !(alpha0_factor > 0))
    throw std::invalid_argument("SolverConfig: alpha0_factor must be positive");
}

double SolverConfig::alpha0_value(double f_norm, int num_edges) const {
  const double m = mu();
  const double a0 = alpha0 ? *alpha0 : alpha0_factor * m * f_norm;
  if (a0 < m * f_norm / num_edges)
    throw std::invalid_argument("SolverConfig: alpha0 must be at least mu*||f||/E");
  return a0;
}

Schedule Schedule::algebraic(double p, double c0, double rho_tilde) {
  Schedule s;
  s.kind = Kind::Algebraic;
  s.p = p;
  s.c0 = c0;
  s.rho_tilde = rho_tilde;
  return s;
}

Schedule Schedule::exponential(double c0, double rho_tilde) {
  Schedule s;
  s.kind = Kind::Exponential;
  s.c0 = c0;
  s.rho_tilde = rho_tilde;
  return s;
}

double Schedule::alpha(int k) const {
  const double base = std::pow(rho_tilde, k + 1) * c0;
  return kind == Kind::Algebraic ? std::pow(base, 2.0 / (2.0 - p)) : base;
}

void Schedule::validate(double rho) const {
  if (!(rho_tilde > rho && rho_tilde < 1))
    throw std::invalid_argument("Schedule: rho_tilde must be in (rho, 1)");
  if (!(c0 > 0)) throw std::invalid_argument("Schedule: c0 must be positive");
  if (kind == Kind::Algebraic && !(p > 0 && p < 2))
    throw std::invalid_argument("Schedule: p must be in (0,2)");
}

namespace {

struct WallTimer {
  using clock = std::chrono::steady_clock;
  clock::time_point start = clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(clock::now() - start).count();
  }
};

IterationRecord make_record(int k, double res_norm, double alpha,
                            std::optional<double> delta, const HTensor& u,
                            const HTensor& r, const ErrorProbe* probe, bool timing,
                            const WallTimer& timer) {
  IterationRecord row;
  row.iter = k;
  row.res_norm = res_norm;
  row.alpha = alpha;
  row.delta = delta;
  row.rank_min = u.min_rank();
  row.rank_max = u.max_rank();
  row.res_rank_max = r.max_rank();
  if (probe && *probe) row.err_ref = (*probe)(u);
  if (timing) row.wall_ms = timer.ms();
  return row;
}

}  // namespace

SolveResult apriori_iterate(const KronSumOperator& a, const HTensor& f,
                            const Schedule& schedule, int num_steps,
                            const SolverConfig& config, const ErrorProbe* probe) {
  config.validate();
  auto [mu, rho] = contraction_params(config.bounds);
  schedule.validate(rho);
  if (num_steps < 0) throw std::invalid_argument("apriori_iterate: negative step count");

  WallTimer timer;
  SolveResult res;
  HTensor u = HTensor::zero(f.tree(), f.mode_sizes());
  HTensor r = f.scaled(-1.0);
  for (int k = 0;; ++k) {
    res.trace.rows.push_back(make_record(k, norm(r), schedule.alpha(k), std::nullopt, u,
                                         r, probe, config.record_timing, timer));
    if (k >= num_steps) break;
    u = soft_threshold(axpy(-mu, r, u), schedule.alpha(k));
    r = residual_inexact(a, u, f, 0.0);
  }
  res.u = std::move(u);
  res.converged = true;
  res.iterations = num_steps;
  return res;
}

HTensor fixed_point_u_alpha(const KronSumOperator& a, const HTensor& f, double alpha,
                            double tol, const SolverConfig& config) {
  if (alpha < 0) throw std::invalid_argument("fixed_point_u_alpha: alpha must be >= 0");
  if (!(tol > 0)) throw std::invalid_argument("fixed_point_u_alpha: tol must be positive");
  auto [mu, rho] = contraction_params(config.bounds);
  const double thresh = rho > 0 ? tol * (1.0 - rho) / rho
                                : std::numeric_limits<double>::infinity();
  HTensor u = HTensor::zero(f.tree(), f.mode_sizes());
  for (int iter = 0; iter < config.max_iter; ++iter) {
    HTensor r = residual_inexact(a, u, f, 0.0);
    HTensor unext = soft_threshold(axpy(-mu, r, u), alpha);
    const double diff = norm(axpy(-1.0, u, unext));
    u = std::move(unext);
    if (diff <= thresh) return u;
  }
  throw MaxIterationsError("fixed_point_u_alpha: max_iter exceeded");
}

SolveResult st_solve(const KronSumOperator& a, const HTensor& f,
                     const SolverConfig& config, const ErrorProbe* probe) {
  config.validate();
  auto [mu, rho] = contraction_params(config.bounds);
  const double gamma_eps = config.bounds.gamma * config.epsilon;
  double alpha = config.alpha0_value(norm(f), f.tree()->num_edges());

  WallTimer timer;
  SolveResult res;
  HTensor u = HTensor::zero(f.tree(), f.mode_sizes());
  HTensor r = f.scaled(-1.0);
  int k = 0;
  for (;;) {
    const double resn = norm(r);
    res.trace.rows.push_back(make_record(k, resn, alpha, std::nullopt, u, r, probe,
                                         config.record_timing, timer));
    if (resn <= gamma_eps) {
      res.converged = true;
      break;
    }
    if (k >= config.max_iter) {
      res.failure = "max_iter exceeded";
      break;
    }
    HTensor unext = soft_threshold(axpy(-mu, r, u), alpha);
    HTensor rnext = residual_inexact(a, unext, f, 0.0);
    const double diff = norm(axpy(-1.0, u, unext));
    const double decrease_bound =
        rho > 0 ? (1.0 - rho) * config.nu / (config.bounds.Gamma * rho) * norm(rnext)
                : std::numeric_limits<double>::infinity();
    if (diff <= decrease_bound) alpha = config.theta * alpha;
    u = std::move(unext);
    r = std::move(rnext);
    ++k;
  }
  res.u = std::move(u);
  res.iterations = k;
  return res;
}

std::pair<double, double> algorithm2_constants(const SolverConfig& config) {
  config.validate();
  auto [mu, rho] = contraction_params(config.bounds);
  const double t1 = config.tau1;
  const double t2 = config.tau2_value();
  const double nu = config.nu;
  const double Gamma = config.bounds.Gamma;
  const double B = (1.0 - rho) * (1.0 - t1) * nu /
                   ((1.0 + t2) * (rho + (1.0 + rho) * t2 / (1.0 - t2)) * Gamma);
  const double d1 = (1.0 - t1) * t2 * B / ((1.0 + t1 + Gamma * B) * mu);
  const double d2 = rho * nu * t2 * (1.0 - t1) * (1.0 - t1) /
                    ((rho * (1.0 + t1) * (1.0 + t2) + nu * (1.0 - t1) * (1.0 - rho)) * mu);
  return {B, std::min(d1, d2)};
}

SolveResult ie_solve(const KronSumOperator& a, const HTensor& f,
                     const SolverConfig& config, const ErrorProbe* probe) {
  config.validate();
  auto [mu, rho] = contraction_params(config.bounds);
  auto [B, D] = algorithm2_constants(config);
  const double gamma_eps = config.bounds.gamma * config.epsilon;
  const double t1 = config.tau1;
  const double t2 = config.tau2_value();
  const double omega = config.omega;
  double alpha = config.alpha0_value(norm(f), f.tree()->num_edges());

  constexpr double kDeltaFloor = 1e-300;
  WallTimer timer;
  SolveResult res;
  HTensor u = HTensor::zero(f.tree(), f.mode_sizes());
  HTensor r = f.scaled(-1.0);  // exact, so any delta certificate holds
  double delta = t1 * norm(r);
  int k = 0;
  for (;;) {
    double resn = norm(r);
    res.trace.rows.push_back(
        make_record(k, resn, alpha, delta, u, r, probe, config.record_timing, timer));
    if (resn + delta <= gamma_eps) {
      res.converged = true;
      break;
    }
    if (k >= config.max_iter) {
      res.failure = "max_iter exceeded";
      break;
    }

    HTensor unext = soft_threshold(axpy(-mu, r, u), alpha);
    double diff = norm(axpy(-1.0, u, unext));
    // refine r_k until delta_k is dominated by the step or the residual
    while (delta > t2 / mu * diff && delta > D * resn) {
      delta *= omega;
      if (delta < kDeltaFloor) {
        res.failure = "delta underflow while refining r_k";
        res.u = std::move(u);
        res.iterations = k;
        return res;
      }
      r = residual_inexact(a, u, f, delta);
      resn = norm(r);
      unext = soft_threshold(axpy(-mu, r, u), alpha);
      diff = norm(axpy(-1.0, u, unext));
    }

    // choose delta_{k+1} proportional to the new residual
    double delta_next = delta / omega;
    HTensor rnext;
    double rnext_norm = 0;
    for (;;) {
      delta_next *= omega;
      if (delta_next < kDeltaFloor) {
        res.failure = "delta underflow while refining r_{k+1}";
        res.u = std::move(u);
        res.iterations = k;
        return res;
      }
      rnext = residual_inexact(a, unext, f, delta_next);
      rnext_norm = norm(rnext);
      if (rnext_norm + delta_next <= gamma_eps) {
        res.trace.rows.push_back(make_record(k + 1, rnext_norm, alpha, delta_next, unext,
                                             rnext, probe, config.record_timing, timer));
        res.u = std::move(unext);
        res.converged = true;
        res.iterations = k + 1;
        return res;
      }
      if (delta_next <= t1 * rnext_norm) break;
    }

    if (diff <= B * rnext_norm) {
      alpha = config.theta * alpha;
      delta_next = t1 * rnext_norm;
    }
    u = std::move(unext);
    r = std::move(rnext);
    delta = delta_next;
    ++k;
  }
  res.u = std::move(u);
  res.iterations = k;
  return res;
}

}  // namespace htst
