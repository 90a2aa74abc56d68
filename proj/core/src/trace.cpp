#include "htst/trace.hpp"

#include <cstdio>
#include <ostream>

namespace htst {

namespace {

void append_number(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += buf;
}

}  // namespace

void write_csv(std::ostream& os, const IterationTrace& trace) {
  os << "iter,res_norm,alpha,delta,err_ref,rank_min,rank_max,res_rank_max,wall_ms\n";
  for (const auto& row : trace.rows) {
    std::string line = std::to_string(row.iter);
    line += ',';
    append_number(line, row.res_norm);
    line += ',';
    append_number(line, row.alpha);
    line += ',';
    if (row.delta) append_number(line, *row.delta);
    line += ',';
    if (row.err_ref) append_number(line, *row.err_ref);
    line += ',';
    line += std::to_string(row.rank_min);
    line += ',';
    line += std::to_string(row.rank_max);
    line += ',';
    line += std::to_string(row.res_rank_max);
    line += ',';
    if (row.wall_ms) append_number(line, *row.wall_ms);
    line += '\n';
    os << line;
  }
}

}  // namespace htst
