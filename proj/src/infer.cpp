#include "dppl/infer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "dppl/errors.hpp"
#include "dppl/random.hpp"

namespace dppl {

EmpiricalDist::EmpiricalDist(std::vector<Sample> samples, TypePtr support_type)
    : samples_(std::move(samples)), support_type_(std::move(support_type)) {
  if (samples_.empty()) throw RuntimeAbort("inference produced no samples");
  std::stable_sort(samples_.begin(), samples_.end(),
                   [](const Sample& a, const Sample& b) { return value_order(a.value, b.value) < 0; });

  double top = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples_) {
    if (std::isnan(s.log_weight)) throw RuntimeAbort("inference produced an undefined weight");
    top = std::max(top, s.log_weight);
  }
  if (top == -std::numeric_limits<double>::infinity()) throw RuntimeAbort("inference produced zero total weight");
  if (top == std::numeric_limits<double>::infinity()) throw RuntimeAbort("inference produced infinite weight");

  cumulative_.resize(samples_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    acc += std::exp(samples_[i].log_weight - top);
    cumulative_[i] = acc;
  }
  for (double& c : cumulative_) c /= acc;
  cumulative_.back() = 1.0;
  log_normalizer_ = top + std::log(acc) - std::log(static_cast<double>(samples_.size()));
}

double EmpiricalDist::normalizer() const { return std::exp(log_normalizer_); }

std::size_t EmpiricalDist::quantile_index(double p) const {
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), p);
  if (it == cumulative_.end()) --it;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

TermPtr EmpiricalDist::quantile(double p) const { return samples_[quantile_index(p)].value; }

TermPtr empirical_quantile(const EmpiricalDist& d, double p) { return d.quantile(p); }

RunOutcome run_with_seed(const TermPtr& t, SeedStream s, Runtime& rt) {
  RunState st;
  st.seed = std::move(s);
  EvalResult r = eval(t, std::move(st), rt);
  switch (r.status) {
    case EvalStatus::Value:
      return {r.value, std::exp(r.state.log_weight), r.state.log_weight};
    case EvalStatus::SeedExhausted:
    case EvalStatus::SeedLeftover:
      return {unit(), 0.0, -std::numeric_limits<double>::infinity()};
    default:
      throw InternalError("evaluation " + std::string(to_string(r.status)) + ": " + r.diagnostic);
  }
}

EmpiricalDist infer_impl(const TermPtr& model, std::size_t particles, std::uint64_t master, Runtime& rt,
                         bool parallel) {
  if (particles == 0) throw RuntimeAbort("particle count must be positive");
  TermPtr call = app(model, unit());
  std::vector<Sample> samples(particles);

  unsigned workers = 1;
  if (parallel) {
    workers = rt.threads ? rt.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, particles));
  }

  auto run_one = [&](Runtime& local, std::size_t j) {
    RunOutcome o = run_with_seed(call, SeedStream::generated(master, j), local);
    samples[j] = {o.value, o.log_density};
  };

  if (workers <= 1) {
    Runtime local = rt;
    local.trace = nullptr;
    for (std::size_t j = 0; j < particles; ++j) run_one(local, j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(particles);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        Runtime local = rt;
        local.trace = nullptr;
        for (std::size_t j; (j = next.fetch_add(1)) < particles;) {
          try {
            run_one(local, j);
          } catch (...) {
            errors[j] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return EmpiricalDist(std::move(samples));
}

std::uint64_t infer_key(std::uint64_t master, const TermPtr& model) {
  return prf(master, value_hash(model), 0x9E3779B97F4A7C15ull);
}

std::shared_ptr<const EmpiricalDist> InferCache::get(const TermPtr& model, Runtime& rt, bool parallel) {
  std::uint64_t h = value_hash(model);
  {
    std::lock_guard lock(mu_);
    auto [lo, hi] = entries_.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      if (term_equal(it->second.first, model)) return it->second.second;
    }
  }
  // Computed outside the lock: models may nest infer. Racing computations
  // produce identical results, so the first insert wins.
  auto d = std::make_shared<const EmpiricalDist>(
      infer_impl(model, rt.particles, infer_key(rt.master_seed, model), rt, parallel));
  std::lock_guard lock(mu_);
  auto [lo, hi] = entries_.equal_range(h);
  for (auto it = lo; it != hi; ++it) {
    if (term_equal(it->second.first, model)) return it->second.second;
  }
  entries_.emplace(h, std::make_pair(model, d));
  return d;
}

std::string format_real(double r) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", r);
  return buf;
}

void csv_cells(const TermPtr& value, std::vector<std::string>& out) {
  if (auto* r = value->as<RealLit>()) {
    out.push_back(format_real(r->value.value()));
  } else if (auto* t = value->as<TupleCon>()) {
    for (const auto& e : t->elems) csv_cells(e, out);
  } else {
    out.push_back(pretty(value));
  }
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\r\n") == std::string::npos) {
      os << c;
      continue;
    }
    os << '"';
    for (char ch : c) {
      if (ch == '"') os << '"';
      os << ch;
    }
    os << '"';
  }
  os << "\r\n";
}

void write_csv(std::ostream& os, const EmpiricalDist& d) {
  std::vector<std::vector<std::string>> rows;
  std::size_t width = 0;
  for (const auto& s : d.samples()) {
    std::vector<std::string> row{format_real(s.log_weight)};
    csv_cells(s.value, row);
    width = std::max(width, row.size());
    rows.push_back(std::move(row));
  }
  std::vector<std::string> header{"log_weight"};
  for (std::size_t i = 1; i < width; ++i) header.push_back("v" + std::to_string(i));
  write_csv_row(os, header);
  for (const auto& row : rows) write_csv_row(os, row);
}

}  // namespace dppl
