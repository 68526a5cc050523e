#pragma once

#include <fstream>
#include <optional>
#include <string>

#include "rsipm/ipm.hpp"

namespace rsipm {

// Shortest round-trip decimal representation of v (std::to_chars).
std::string fmt_double(double v);

inline constexpr const char* kMetricsHeader =
    "run_id,outer_k,mu,eta,inner_iters,kappa_precond,kappa_unprecond,"
    "alpha_bar,v_norm,wall_ms";

// Per-outer-iteration CSV writer. Rows are flushed as they are written so the
// file stays parseable after an abnormal termination. Optional kappa fields
// are left empty when not computed. When with_wall is false the wall_ms
// column is written as 0 (reproducible output for byte-comparison runs).
class MetricsWriter {
 public:
  MetricsWriter(const std::string& path, bool with_wall = true);
  void write_row(const std::string& run_id, const OuterRow& row);
  bool ok() const { return static_cast<bool>(out_); }

 private:
  std::ofstream out_;
  bool with_wall_;
};

}  // namespace rsipm
