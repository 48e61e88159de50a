#pragma once

// Surface syntax to core terms. All sugar (let, sequencing, observe, diff1,
// tuple patterns, unroll, iterate) is expanded here.

#include <stdexcept>
#include <string>
#include <string_view>

#include "dppl/ast.hpp"

namespace dppl {

struct SourceProgram {
  std::string text;
  std::string filename = "<input>";
};

struct Diagnostic {
  std::string severity = "error";
  std::string message;
  int line = 0;    // 1-based
  int column = 0;  // 1-based
};

std::string format_diagnostic(const Diagnostic& d, std::string_view filename);

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(Diagnostic d);
  const Diagnostic& diagnostic() const { return diag_; }

 private:
  Diagnostic diag_;
};

TermPtr parse(const SourceProgram& src);
TermPtr parse(std::string_view text);
TypePtr parse_type(std::string_view text);

// True when the term only uses constructors that the parser's output may
// contain (no runtime-only forms, no unannotated binders outside let
// position).
bool is_core(const TermPtr& t);

}  // namespace dppl
