#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

namespace htst {

//! One row per iterate, recorded when the stopping test is evaluated.
struct IterationRecord {
  int iter = 0;
  double res_norm = 0;
  double alpha = 0;
  std::optional<double> delta;    // inexact-residual runs only
  std::optional<double> err_ref;  // when a reference probe is attached
  int rank_min = 0;
  int rank_max = 0;
  int res_rank_max = 0;
  std::optional<double> wall_ms;  // when timing is enabled
};

struct IterationTrace {
  std::vector<IterationRecord> rows;
};

//! CSV with the fixed header
//! iter,res_norm,alpha,delta,err_ref,rank_min,rank_max,res_rank_max,wall_ms;
//! optional fields are written empty. Deterministic formatting.
void write_csv(std::ostream& os, const IterationTrace& trace);

}  // namespace htst
