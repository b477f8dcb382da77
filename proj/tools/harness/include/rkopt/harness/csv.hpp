#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "rkopt/optimizers.hpp"

namespace rkopt::harness {

inline constexpr std::string_view kTraceHeader = "iter,grad_evals,f_gap,lyapunov,step_size";

/// 17 significant digits (round-trip exact); "nan"/"inf"/"-inf" for non-finite.
std::string format_double(double value);

void write_trace_csv(std::ostream& out, const Trace& trace);

/// Long format: "optimizer," followed by the trace columns.
void write_compare_header(std::ostream& out);
void write_compare_rows(std::ostream& out, std::string_view optimizer, const Trace& trace);

}  // namespace rkopt::harness
