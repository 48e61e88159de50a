#pragma once

// Likelihood-weighted importance sampling and the empirical distributions it
// produces.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "dppl/ast.hpp"
#include "dppl/eval.hpp"

namespace dppl {

struct Sample {
  TermPtr value;
  double log_weight;
};

class EmpiricalDist {
 public:
  // Sorts by value_order (ties keep input order). Throws RuntimeAbort when
  // every weight is zero.
  explicit EmpiricalDist(std::vector<Sample> samples, TypePtr support_type = nullptr);

  const std::vector<Sample>& samples() const { return samples_; }
  // Normalized cumulative weights; the last entry is exactly 1.
  const std::vector<double>& cumulative() const { return cumulative_; }
  // Mean linear-space weight.
  double normalizer() const;
  double log_normalizer() const { return log_normalizer_; }
  const TypePtr& support_type() const { return support_type_; }

  // Smallest stored value v with p <= F(v).
  TermPtr quantile(double p) const;
  // Index of the stored value returned by quantile(p).
  std::size_t quantile_index(double p) const;

 private:
  std::vector<Sample> samples_;
  std::vector<double> cumulative_;
  double log_normalizer_ = 0.0;
  TypePtr support_type_;
};

TermPtr empirical_quantile(const EmpiricalDist& d, double p);

struct RunOutcome {
  TermPtr value;       // unit when the run failed
  double density;      // linear-space weight, 0 on failure
  double log_density;  // -inf on failure
};

// Result and density of one run. Stuck and fuel exhaustion throw
// InternalError: they are implementation faults, not failed runs.
RunOutcome run_with_seed(const TermPtr& t, SeedStream s, Runtime& rt);

// Runs `model ()` for K particles; particle j draws from the generated stream
// (master, j). Results do not depend on the worker count.
EmpiricalDist infer_impl(const TermPtr& model, std::size_t particles, std::uint64_t master, Runtime& rt,
                         bool parallel = true);

// Seed under which a given inferred model is evaluated: a function of the run
// master seed and the model's structure.
std::uint64_t infer_key(std::uint64_t master, const TermPtr& model);

// Memo of inferred distributions, so that every assume from the same
// inferred model samples from the same empirical distribution.
class InferCache {
 public:
  std::shared_ptr<const EmpiricalDist> get(const TermPtr& model, Runtime& rt, bool parallel);

 private:
  std::mutex mu_;
  std::multimap<std::uint64_t, std::pair<TermPtr, std::shared_ptr<const EmpiricalDist>>> entries_;
};

// CSV helpers (RFC 4180, 17 significant digits).
std::string format_real(double r);
void csv_cells(const TermPtr& value, std::vector<std::string>& out);
void write_csv_row(std::ostream& os, const std::vector<std::string>& cells);
// Header log_weight,v1,...,vk then one row per sample.
void write_csv(std::ostream& os, const EmpiricalDist& d);

}  // namespace dppl
