// dppl: type-check and run programs of the core calculus.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "dppl/errors.hpp"
#include "dppl/eval.hpp"
#include "dppl/infer.hpp"
#include "dppl/parser.hpp"
#include "dppl/typer.hpp"

namespace {

using namespace dppl;

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t particles = 1000;
  std::string ode_solver = "rk4";
  double ode_step = 1e-3;
  bool allow_random = false;
  bool trace = false;
  std::string out;
  std::string format = "text";
};

bool read_file(const std::string& path, SourceProgram& src) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << path << ": error: cannot read file\n";
    return false;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  src.text = ss.str();
  src.filename = path;
  return true;
}

Diagnostic type_diagnostic(const TypeError& e) {
  Diagnostic d;
  d.message = e.what();
  d.line = e.position().line;
  d.column = e.position().column;
  return d;
}

// Parses and checks; returns the exit code on failure.
int front_end(const std::string& path, bool allow_random, TermPtr& term, TypePtr& type) {
  SourceProgram src;
  if (!read_file(path, src)) return 2;
  try {
    term = parse(src);
  } catch (const ParseError& e) {
    std::cerr << format_diagnostic(e.diagnostic(), src.filename) << '\n';
    return 2;
  }
  try {
    type = check_program(term, allow_random);
  } catch (const TypeError& e) {
    std::cerr << format_diagnostic(type_diagnostic(e), src.filename) << '\n';
    return 1;
  }
  return 0;
}

int cmd_check(const std::string& path, bool allow_random) {
  TermPtr term;
  TypePtr type;
  if (int rc = front_end(path, allow_random, term, type)) return rc;
  std::cout << to_string(type) << '\n';
  return 0;
}

// A tuple whose elements are all tuples prints one row per element.
void write_value_csv(std::ostream& os, const TermPtr& v, std::optional<double> log_weight) {
  std::vector<TermPtr> rows{v};
  if (auto* t = v->as<TupleCon>()) {
    bool nested = !t->elems.empty() &&
                  std::all_of(t->elems.begin(), t->elems.end(), [](const TermPtr& e) { return e->is<TupleCon>(); });
    if (nested) rows = t->elems;
  }
  std::vector<std::vector<std::string>> cells;
  std::size_t width = 0;
  for (const auto& r : rows) {
    std::vector<std::string> row;
    if (log_weight) row.push_back(format_real(*log_weight));
    csv_cells(r, row);
    width = std::max(width, row.size());
    cells.push_back(std::move(row));
  }
  std::vector<std::string> header;
  if (log_weight) header.push_back("log_weight");
  for (std::size_t i = header.size(), k = 1; i < width; ++i, ++k) header.push_back("v" + std::to_string(k));
  write_csv_row(os, header);
  for (const auto& row : cells) write_csv_row(os, row);
}

int cmd_run(const std::string& path, const RunConfig& cfg) {
  TermPtr term;
  TypePtr type;
  if (int rc = front_end(path, cfg.allow_random, term, type)) return rc;

  Runtime rt;
  rt.particles = cfg.particles;
  rt.master_seed = cfg.seed;
  rt.ode.method = cfg.ode_solver == "euler" ? OdeConfig::Method::Euler : OdeConfig::Method::Rk4;
  rt.ode.step = cfg.ode_step;
  if (cfg.trace) {
    rt.trace = [](std::string_view rule, const TermPtr& t) { std::cerr << rule << '\t' << pretty(t) << '\n'; };
  }

  std::ofstream file;
  if (!cfg.out.empty()) {
    file.open(cfg.out, std::ios::binary);
    if (!file) {
      std::cerr << cfg.out << ": error: cannot open output file\n";
      return 2;
    }
  }
  std::ostream& os = cfg.out.empty() ? std::cout : file;

  try {
    RunState st;
    st.seed = SeedStream::generated(cfg.seed, 0);
    EvalResult r = eval(term, st, rt);
    if (r.status != EvalStatus::Value) {
      if (r.status == EvalStatus::Stuck) throw InternalError("evaluation stuck: " + r.diagnostic);
      throw RuntimeAbort(to_string(r.status));
    }
    std::optional<double> lw;
    if (infer_type({}, term).effect == Effect::Rnd) lw = r.state.log_weight;

    if (auto* inf = r.value->as<Infer>()) {
      EmpiricalDist d = infer_impl(inf->model, cfg.particles, infer_key(cfg.seed, inf->model), rt);
      write_csv(os, d);
    } else if (cfg.format == "csv") {
      write_value_csv(os, r.value, lw);
    } else {
      os << pretty(r.value) << '\n';
      if (lw) os << "log_weight " << format_real(*lw) << '\n';
    }
  } catch (const RuntimeAbort& e) {
    std::cerr << path << ": runtime error: " << e.what() << '\n';
    return 3;
  } catch (const InternalError& e) {
    std::cerr << path << ": internal error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Typed differentiable probabilistic programs"};
  app.require_subcommand(1);

  std::string file;
  bool check_random = false;
  auto* check = app.add_subcommand("check", "Type-check a program and print its type");
  check->add_option("file", file, "Program file")->required();
  check->add_flag("--allow-random", check_random, "Accept random top-level programs");

  RunConfig cfg;
  auto* run = app.add_subcommand("run", "Evaluate a program");
  run->add_option("file", file, "Program file")->required();
  run->add_option("--seed", cfg.seed, "Master seed");
  run->add_option("--particles", cfg.particles, "Particles per inference")->check(CLI::PositiveNumber);
  run->add_option("--ode-solver", cfg.ode_solver, "euler or rk4")->check(CLI::IsMember({"euler", "rk4"}));
  run->add_option("--ode-step", cfg.ode_step, "Fixed ODE step size")->check(CLI::PositiveNumber);
  run->add_flag("--allow-random", cfg.allow_random, "Accept random top-level programs");
  run->add_flag("--trace", cfg.trace, "Print every reduction step to stderr");
  run->add_option("--out", cfg.out, "Write output to a file");
  run->add_option("--format", cfg.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (*check) return cmd_check(file, check_random);
  return cmd_run(file, cfg);
}
