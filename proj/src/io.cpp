#include "rsipm/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "rsipm/metrics.hpp"
#include "rsipm/rng.hpp"

namespace rsipm {

namespace {

using ordered_json = nlohmann::ordered_json;

const nlohmann::json& require(const nlohmann::json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end())
    throw SchemaError(std::string("lp file: missing field \"") + field + "\"");
  return *it;
}

std::vector<double> number_array(const nlohmann::json& j, const char* field) {
  if (!j.is_array())
    throw SchemaError(std::string("lp file: \"") + field +
                      "\" must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number())
      throw SchemaError(std::string("lp file: \"") + field +
                        "\" must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::int64_t> int_array(const nlohmann::json& j,
                                    const char* field) {
  if (!j.is_array())
    throw SchemaError(std::string("lp file: \"") + field +
                      "\" must be an array");
  std::vector<std::int64_t> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number_integer())
      throw SchemaError(std::string("lp file: \"") + field +
                        "\" must contain only integers");
    out.push_back(e.get<std::int64_t>());
  }
  return out;
}

}  // namespace

LpProblem parse_lp(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("lp file: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("lp file: top level must be an object");

  const auto& jver = require(j, "version");
  if (!jver.is_number_integer() || jver.get<int>() != 1)
    throw SchemaError("lp file: \"version\" must be 1");
  const auto& jm = require(j, "m");
  const auto& jn = require(j, "n");
  if (!jm.is_number_integer() || !jn.is_number_integer())
    throw SchemaError("lp file: \"m\" and \"n\" must be integers");
  const std::int64_t m = jm.get<std::int64_t>();
  const std::int64_t n = jn.get<std::int64_t>();
  if (m < 1 || n < 1)
    throw SchemaError("lp file: \"m\" and \"n\" must be positive");

  const auto& ja = require(j, "a");
  if (!ja.is_object()) throw SchemaError("lp file: \"a\" must be an object");
  const auto rowptr = int_array(require(ja, "rowptr"), "rowptr");
  const auto colidx = int_array(require(ja, "colidx"), "colidx");
  const auto values = number_array(require(ja, "values"), "values");

  if (static_cast<std::int64_t>(rowptr.size()) != m + 1)
    throw SchemaError("lp file: \"rowptr\" must have length m+1");
  if (rowptr.front() != 0)
    throw SchemaError("lp file: \"rowptr\" must start at 0");
  for (std::size_t i = 1; i < rowptr.size(); ++i)
    if (rowptr[i] < rowptr[i - 1])
      throw SchemaError("lp file: \"rowptr\" must be nondecreasing");
  const std::int64_t nnz = rowptr.back();
  if (static_cast<std::int64_t>(colidx.size()) != nnz ||
      static_cast<std::int64_t>(values.size()) != nnz)
    throw SchemaError(
        "lp file: \"colidx\" and \"values\" must have length rowptr[m]");
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t k = rowptr[i]; k < rowptr[i + 1]; ++k) {
      if (colidx[k] < 0 || colidx[k] >= n)
        throw SchemaError("lp file: \"colidx\" entry out of range [0, n)");
      if (k > rowptr[i] && colidx[k] <= colidx[k - 1])
        throw SchemaError(
            "lp file: \"colidx\" must be strictly increasing within each row");
    }
  for (double v : values)
    if (!std::isfinite(v))
      throw SchemaError("lp file: \"values\" must be finite");

  const auto bv = number_array(require(j, "b"), "b");
  const auto cv = number_array(require(j, "c"), "c");
  if (static_cast<std::int64_t>(bv.size()) != m)
    throw SchemaError("lp file: \"b\" must have length m");
  if (static_cast<std::int64_t>(cv.size()) != n)
    throw SchemaError("lp file: \"c\" must have length n");

  LpProblem prob;
  prob.A.resize(m, n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(nnz);
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t k = rowptr[i]; k < rowptr[i + 1]; ++k)
      trips.emplace_back(static_cast<int>(i), static_cast<int>(colidx[k]),
                         values[k]);
  prob.A.setFromTriplets(trips.begin(), trips.end());
  prob.A.makeCompressed();
  prob.b = Eigen::Map<const Vec>(bv.data(), m);
  prob.c = Eigen::Map<const Vec>(cv.data(), n);
  return prob;
}

std::string serialize_lp(const LpProblem& prob) {
  SpMat A = prob.A;
  A.makeCompressed();
  const int m = prob.m();
  ordered_json j;
  j["version"] = 1;
  j["m"] = m;
  j["n"] = prob.n();
  ordered_json ja;
  ja["rowptr"] = std::vector<std::int64_t>(A.outerIndexPtr(),
                                           A.outerIndexPtr() + m + 1);
  ja["colidx"] =
      std::vector<std::int64_t>(A.innerIndexPtr(), A.innerIndexPtr() + A.nonZeros());
  std::vector<double> vals(A.valuePtr(), A.valuePtr() + A.nonZeros());
  for (double v : vals)
    if (!std::isfinite(v))
      throw SchemaError("lp file: cannot serialize non-finite matrix value");
  ja["values"] = vals;
  j["a"] = std::move(ja);
  j["b"] = std::vector<double>(prob.b.data(), prob.b.data() + prob.b.size());
  j["c"] = std::vector<double>(prob.c.data(), prob.c.data() + prob.c.size());
  return j.dump() + "\n";
}

LpProblem read_lp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("lp file: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_lp(ss.str());
}

void write_lp(const LpProblem& prob, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << serialize_lp(prob);
  if (!out) throw std::runtime_error("write failed: " + path);
}

SvmDataset read_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("libsvm file: cannot open " + path);
  SvmDataset data;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank or comment-only line

    const std::string where = "libsvm file line " + std::to_string(line_no);
    SvmSample sample;
    try {
      std::size_t used = 0;
      const int label = std::stoi(tok, &used);
      if (used != tok.size() || (label != 1 && label != -1))
        throw std::invalid_argument(tok);
      sample.label = label;
    } catch (const std::exception&) {
      throw SchemaError(where + ": label must be +1 or -1, got \"" + tok +
                        "\"");
    }
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        throw SchemaError(where + ": malformed feature pair \"" + tok + "\"");
      int idx = 0;
      double val = 0.0;
      try {
        std::size_t used = 0;
        idx = std::stoi(tok.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument(tok);
        const std::string vs = tok.substr(colon + 1);
        val = std::stod(vs, &used);
        if (used != vs.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw SchemaError(where + ": malformed feature pair \"" + tok + "\"");
      }
      if (idx < 1)
        throw SchemaError(where + ": feature index must be >= 1, got " +
                          std::to_string(idx));
      sample.features.emplace_back(idx - 1, val);
      data.n = std::max(data.n, idx);
    }
    std::sort(sample.features.begin(), sample.features.end());
    for (std::size_t k = 1; k < sample.features.size(); ++k)
      if (sample.features[k].first == sample.features[k - 1].first)
        throw SchemaError(where + ": duplicate feature index " +
                          std::to_string(sample.features[k].first + 1));
    data.samples.push_back(std::move(sample));
  }
  return data;
}

LpProblem svm_to_lp(const SvmDataset& data) {
  if (data.samples.empty())
    throw std::invalid_argument("svm_to_lp: empty dataset");
  const int m = static_cast<int>(data.samples.size());
  const int nf = data.n;
  const int N = 2 * nf + 2 + m;

  LpProblem prob;
  prob.A.resize(m, N);
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < m; ++i) {
    const auto& sp = data.samples[i];
    const double y = sp.label;
    for (const auto& [j, xv] : sp.features) {
      trips.emplace_back(i, j, y * xv);            // w+
      trips.emplace_back(i, nf + j, -y * xv);      // w-
    }
    trips.emplace_back(i, 2 * nf, y);       // b+
    trips.emplace_back(i, 2 * nf + 1, -y);  // b-
    trips.emplace_back(i, 2 * nf + 2 + i, -1.0);  // slack
  }
  prob.A.setFromTriplets(trips.begin(), trips.end());
  prob.A.makeCompressed();
  prob.b = Vec::Ones(m);
  prob.c = Vec::Zero(N);
  prob.c.head(2 * nf).setOnes();
  return prob;
}

LpProblem gen_synthetic(const SyntheticSpec& spec) {
  if (spec.m < 1) throw std::invalid_argument("gen_synthetic: m < 1");
  if (spec.n < spec.m)
    throw std::invalid_argument("gen_synthetic: requires m <= n");
  if (!(spec.density > 0.0 && spec.density <= 1.0))
    throw std::invalid_argument("gen_synthetic: density outside (0, 1]");

  Rng rng(spec.seed);
  const int m = spec.m, n = spec.n;
  std::vector<Eigen::Triplet<double>> trips;
  // Draw order (fixed for reproducibility): entries row-major, mask draw then
  // value draw for kept entries; diagonal boosts; xbar; c.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (rng.uniform() < spec.density)
        trips.emplace_back(i, j, rng.uniform());
  for (int i = 0; i < m; ++i) trips.emplace_back(i, i, rng.uniform());

  LpProblem prob;
  prob.A.resize(m, n);
  prob.A.setFromTriplets(trips.begin(), trips.end());
  prob.A.makeCompressed();

  Vec xbar(n);
  for (int j = 0; j < n; ++j) xbar[j] = std::abs(rng.normal());
  prob.b = prob.A * xbar;
  prob.c.resize(n);
  for (int j = 0; j < n; ++j) prob.c[j] = rng.normal();
  // Columns untouched by A cannot influence Ax = b; a negative cost there
  // would make the problem unbounded, so force those costs nonnegative.
  Vec colsum = Vec::Zero(n);
  for (int i = 0; i < m; ++i)
    for (SpMat::InnerIterator it(prob.A, i); it; ++it)
      colsum[it.col()] += std::abs(it.value());
  for (int j = 0; j < n; ++j)
    if (colsum[j] == 0.0) prob.c[j] = std::abs(prob.c[j]);
  return prob;
}

}  // namespace rsipm
