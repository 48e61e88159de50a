#include "dppl/symbol.hpp"

#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace dppl {
namespace {

struct Table {
  std::shared_mutex mu;
  std::deque<std::string> names{std::string{}};
  std::unordered_map<std::string_view, std::uint32_t> ids{{std::string_view{}, 0}};
};

Table& table() {
  static Table t;
  return t;
}

}  // namespace

Symbol::Symbol(std::string_view name) {
  Table& t = table();
  {
    std::shared_lock lock(t.mu);
    if (auto it = t.ids.find(name); it != t.ids.end()) {
      id_ = it->second;
      return;
    }
  }
  std::unique_lock lock(t.mu);
  if (auto it = t.ids.find(name); it != t.ids.end()) {
    id_ = it->second;
    return;
  }
  t.names.emplace_back(name);
  id_ = static_cast<std::uint32_t>(t.names.size() - 1);
  t.ids.emplace(t.names.back(), id_);
}

std::string_view Symbol::name() const {
  Table& t = table();
  std::shared_lock lock(t.mu);
  return t.names[id_];
}

}  // namespace dppl
