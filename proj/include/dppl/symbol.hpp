#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace dppl {

// Interned identifier. Comparison is by id; the name is kept for printing.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string_view name);

  std::string_view name() const;
  std::uint32_t id() const { return id_; }

  friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }
  friend auto operator<=>(Symbol a, Symbol b) { return a.id_ <=> b.id_; }

 private:
  std::uint32_t id_ = 0;
};

}  // namespace dppl

template <>
struct std::hash<dppl::Symbol> {
  std::size_t operator()(dppl::Symbol s) const noexcept { return s.id(); }
};
