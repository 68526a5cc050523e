#include "rsipm/metrics.hpp"

#include <charconv>

namespace rsipm {

std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

MetricsWriter::MetricsWriter(const std::string& path, bool with_wall)
    : out_(path, std::ios::binary), with_wall_(with_wall) {
  out_ << kMetricsHeader << '\n';
  out_.flush();
}

void MetricsWriter::write_row(const std::string& run_id, const OuterRow& row) {
  out_ << run_id << ',' << row.k << ',' << fmt_double(row.mu) << ','
       << fmt_double(row.eta) << ',' << row.inner_iters << ',';
  if (row.kappa_precond) out_ << fmt_double(*row.kappa_precond);
  out_ << ',';
  if (row.kappa_unprecond) out_ << fmt_double(*row.kappa_unprecond);
  out_ << ',' << fmt_double(row.alpha_bar) << ',' << fmt_double(row.v_norm)
       << ',' << fmt_double(with_wall_ ? row.wall_ms : 0.0) << '\n';
  out_.flush();
}

}  // namespace rsipm
