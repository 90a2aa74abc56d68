#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "htst/operators.hpp"
#include "htst/trace.hpp"

namespace htst {

class MaxIterationsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Richardson step size and contraction factor for spectrum bounds
//! [gamma, Gamma]: mu = 2/(gamma+Gamma), rho = (kappa-1)/(kappa+1).
std::pair<double, double> contraction_params(const SpectrumBounds& bounds);

//! Constants of the thresholded Richardson solvers. Defaults follow the
//! reference choices theta = 3/4, omega = 1/2, nu = 9/10 and
//! alpha_0 = (1/2) mu ||f||; the initial threshold must satisfy
//! alpha_0 >= mu ||f|| / E, which rejects the 1/2 default when E = 1.
struct SolverConfig {
  SpectrumBounds bounds;
  double epsilon = 1e-4;
  double nu = 0.9;
  double theta = 0.75;
  double omega = 0.5;
  double tau1 = 0.1;
  std::optional<double> tau2;          // default min(0.1, 0.4 (1 - rho))
  double alpha0_factor = 0.5;          // alpha_0 = factor * mu * ||f||
  std::optional<double> alpha0;        // explicit initial threshold
  int max_iter = 10000;
  bool record_timing = false;

  double mu() const { return contraction_params(bounds).first; }
  double rho() const { return contraction_params(bounds).second; }
  double tau2_value() const;
  double alpha0_value(double f_norm, int num_edges) const;
  void validate() const;
};

//! Threshold schedule for the a priori iteration.
struct Schedule {
  enum class Kind { Algebraic, Exponential };
  Kind kind = Kind::Exponential;
  double rho_tilde = 0.8;
  double c0 = 1.0;
  double p = 1.0;  // algebraic kind only

  static Schedule algebraic(double p, double c0, double rho_tilde);
  static Schedule exponential(double c0, double rho_tilde);

  double alpha(int k) const;
  void validate(double rho) const;
};

//! Optional per-iterate error measurement recorded into the trace.
using ErrorProbe = std::function<double(const HTensor&)>;

struct SolveResult {
  HTensor u;
  IterationTrace trace;
  bool converged = false;
  int iterations = 0;
  std::string failure;  // set when converged is false
};

//! Fixed number of thresholded Richardson steps with a prescribed
//! threshold schedule.
SolveResult apriori_iterate(const KronSumOperator& a, const HTensor& f,
                            const Schedule& schedule, int num_steps,
                            const SolverConfig& config,
                            const ErrorProbe* probe = nullptr);

//! Iterates u <- S_alpha(u - mu(Au - f)) at fixed alpha until the modified
//! fixed point is resolved to within tol, using the standard a posteriori
//! stopping bound.
HTensor fixed_point_u_alpha(const KronSumOperator& a, const HTensor& f, double alpha,
                            double tol, const SolverConfig& config);

//! Soft-thresholded Richardson iteration with exact residuals and the
//! a posteriori threshold control; stops when ||r_k|| <= gamma epsilon, so
//! the returned iterate satisfies ||u - u*|| <= epsilon.
SolveResult st_solve(const KronSumOperator& a, const HTensor& f,
                     const SolverConfig& config, const ErrorProbe* probe = nullptr);

//! Constants (B, D) of the inexact-residual variant.
std::pair<double, double> algorithm2_constants(const SolverConfig& config);

//! Inexact-residual variant: residual tolerances delta_k are refined until
//! they are proportional to the residual norms, and the stopping test
//! ||r_k|| + delta_k <= gamma epsilon certifies the error bound.
SolveResult ie_solve(const KronSumOperator& a, const HTensor& f,
                     const SolverConfig& config, const ErrorProbe* probe = nullptr);

}  // namespace htst
