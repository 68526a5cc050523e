#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rsipm/ipm.hpp"
#include "rsipm/types.hpp"

namespace rsipm {

// ---- LP file format (JSON, version 1) ----
// {"version":1, "m":…, "n":…, "a":{"rowptr":[…],"colidx":[…],"values":[…]},
//  "b":[…], "c":[…], "meta":{…}?}
// Floats are serialized shortest-round-trip; write(read(f)) is byte-identical
// for canonically ordered files.

LpProblem read_lp(const std::string& path);
void write_lp(const LpProblem& prob, const std::string& path);

// In-memory variants (used by tests and the round-trip guarantee).
LpProblem parse_lp(const std::string& text);
std::string serialize_lp(const LpProblem& prob);

// ---- libsvm-style dataset ----

struct SvmSample {
  int label = 0;  // +1 or -1
  std::vector<std::pair<int, double>> features;  // 0-based, sorted
};

struct SvmDataset {
  std::vector<SvmSample> samples;
  int n = 0;  // max feature index + 1
};

// Lines of "label idx:val idx:val …", 1-based indices, blank lines and
// #-comments skipped. Throws SchemaError (naming the line) on labels other
// than +-1 or malformed pairs.
SvmDataset read_libsvm(const std::string& path);

// l1-regularized SVM as a standard-form LP via the splits w = w+ - w-,
// b' = b+ - b- and slacks xi:
//   min sum(w+) + sum(w-)
//   s.t. y_i (x_i'(w+ - w-) + b+ - b-) - xi_i = 1,  all vars >= 0.
// Columns ordered [w+ (n), w- (n), b+, b-, xi (m)], so A is m x (2n + 2 + m).
LpProblem svm_to_lp(const SvmDataset& data);

// ---- synthetic generator ----

struct SyntheticSpec {
  int m = 0;
  int n = 0;
  double density = 1.0;  // in (0, 1]
  std::uint64_t seed = 0;
};

// Random instance: A has U(0,1) entries kept with probability `density` plus
// U(0,1) added along the main diagonal (so every row is nonempty and A has
// full row rank); b = A xbar with xbar = |N(0,1)| so a strictly positive
// feasible point exists; c ~ N(0,1) with the sign flipped to nonnegative on
// all-zero columns so the problem is bounded. Deterministic given seed.
LpProblem gen_synthetic(const SyntheticSpec& spec);

}  // namespace rsipm
