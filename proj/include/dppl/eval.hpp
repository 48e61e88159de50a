#pragma once

// Small-step evaluation: the deterministic relation and the sampling relation
// that threads (log-weight, seed).

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dppl/ast.hpp"
#include "dppl/ode.hpp"

namespace dppl {

class SeedStream {
 public:
  // Heads must lie in [0, 1].
  static SeedStream explicit_seq(std::vector<double> heads);
  // Draw k of run j under master m is to_unit(prf(m, j, k)).
  static SeedStream generated(std::uint64_t master, std::uint64_t run);

  std::optional<double> draw();
  bool is_explicit() const { return explicit_; }
  std::size_t consumed() const { return pos_; }
  // Heads left in an explicit stream.
  std::size_t remaining() const;

  friend bool operator==(const SeedStream& a, const SeedStream& b);

 private:
  bool explicit_ = false;
  std::shared_ptr<const std::vector<double>> heads_;
  std::size_t pos_ = 0;
  std::uint64_t master_ = 0;
  std::uint64_t run_ = 0;
};

struct RunState {
  double log_weight = 0.0;  // -inf encodes weight 0
  SeedStream seed = SeedStream::generated(0, 0);

  friend bool operator==(const RunState& a, const RunState& b);
};

struct Stepped {
  TermPtr term;
  std::string_view rule;
};
struct IsValue {
  TermPtr value;
};
struct Stuck {
  std::string diagnostic;
};
struct SeedExhausted {};

using StepResult = std::variant<Stepped, IsValue, Stuck, SeedExhausted>;

class InferCache;

using TraceSink = std::function<void(std::string_view rule, const TermPtr& term)>;

// Per-run configuration and shared caches.
struct Runtime {
  Runtime();

  OdeConfig ode;
  std::size_t particles = 1000;
  std::uint64_t master_seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
  TraceSink trace;
  std::shared_ptr<InferCache> infer_cache;
};

StepResult step_det(const TermPtr& t, Runtime& rt);
std::pair<StepResult, RunState> step_rnd(const TermPtr& t, RunState st, Runtime& rt);

enum class EvalStatus { Value, SeedExhausted, SeedLeftover, OutOfFuel, Stuck };
const char* to_string(EvalStatus s);

struct EvalResult {
  EvalStatus status = EvalStatus::Value;
  TermPtr value;  // unit unless status == Value
  RunState state;
  std::size_t steps = 0;
  std::string diagnostic;
};

EvalResult eval(const TermPtr& t, RunState st, Runtime& rt, std::optional<std::size_t> fuel = std::nullopt);

// Evaluates a closed deterministic term to a value; throws RuntimeAbort if it
// gets stuck.
TermPtr eval_det(const TermPtr& t, Runtime& rt);

}  // namespace dppl
