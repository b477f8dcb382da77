#include "rkopt/harness/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace rkopt::harness {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

void write_row(std::ostream& out, const TraceRecord& r) {
  out << r.iteration << ',' << r.grad_evals << ',' << format_double(r.f_gap) << ',';
  if (r.lyapunov) out << format_double(*r.lyapunov);
  out << ',' << format_double(r.step_size) << '\n';
}

}  // namespace

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records) write_row(out, r);
}

void write_compare_header(std::ostream& out) { out << "optimizer," << kTraceHeader << '\n'; }

void write_compare_rows(std::ostream& out, std::string_view optimizer, const Trace& trace) {
  for (const auto& r : trace.records) {
    out << optimizer << ',';
    write_row(out, r);
  }
}

}  // namespace rkopt::harness
