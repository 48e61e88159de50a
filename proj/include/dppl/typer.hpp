#pragma once

// Algorithmic effect/coeffect type checking. Every subterm's type is
// synthesized, the environment is weakened to the subterm's free variables,
// the type is promoted by the largest admissible modifier, and subsumption is
// checked only where values are consumed.

#include <map>
#include <stdexcept>
#include <string>

#include "dppl/ast.hpp"

namespace dppl {

using TypeEnv = std::map<Symbol, TypePtr>;

struct Judgment {
  TypePtr type;
  Effect effect = Effect::Det;
};

class TypeError : public std::runtime_error {
 public:
  TypeError(std::string rule, std::string message, SourcePos pos = {}, TypePtr expected = nullptr,
            TypePtr found = nullptr);

  const std::string& rule() const { return rule_; }
  const std::string& message() const { return message_; }
  SourcePos position() const { return pos_; }
  const TypePtr& expected() const { return expected_; }
  const TypePtr& found() const { return found_; }

 private:
  std::string rule_;
  std::string message_;
  SourcePos pos_;
  TypePtr expected_;
  TypePtr found_;
};

bool subtype(const TypePtr& sub, const TypePtr& super);
// Least upper / greatest lower bound; TypeError on shape mismatch.
TypePtr join(const TypePtr& a, const TypePtr& b);
TypePtr meet(const TypePtr& a, const TypePtr& b);

Judgment infer_type(const TypeEnv& env, const TermPtr& t);
// Closed program. Random top-level terms are rejected unless allowed.
TypePtr check_program(const TermPtr& t, bool allow_random = false);

}  // namespace dppl
