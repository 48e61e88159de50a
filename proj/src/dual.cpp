#include "dppl/dual.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>

#include <boost/math/special_functions/polygamma.hpp>

namespace dppl {

Tag fresh_tag() {
  static std::atomic<Tag> counter{0};
  return counter.fetch_add(1, std::memory_order_relaxed) + 1;
}

Dual Dual::make(Tag tag, Dual primal, Dual tangent) {
  if (tangent.is_plain() && tangent.value_ == 0.0) return primal;
  Dual d(primal.value_);
  d.tag_ = tag;
  if (primal.is_plain() && tangent.is_plain()) {
    d.tangent_ = tangent.value_;
  } else {
    d.node_ = std::make_shared<const Node>(Node{tag, std::move(primal), std::move(tangent)});
  }
  return d;
}

Dual Dual::primal_at(Tag t) const {
  if (tag_ < t) return *this;
  if (tag_ == t) return node_ ? node_->primal : Dual(value_);
  if (!node_) return *this;
  return make(tag_, node_->primal.primal_at(t), node_->tangent.primal_at(t));
}

Dual Dual::tangent_at(Tag t) const {
  if (tag_ < t) return Dual(0.0);
  if (tag_ == t) return node_ ? node_->tangent : Dual(tangent_);
  if (!node_) return Dual(0.0);
  return make(tag_, node_->primal.tangent_at(t), node_->tangent.tangent_at(t));
}

bool Dual::carries(Tag t) const {
  if (tag_ < t) return false;
  if (tag_ == t) return true;
  return node_ && (node_->primal.carries(t) || node_->tangent.carries(t));
}

bool Dual::same_as(const Dual& other) const {
  auto bits = [](double d) { return std::bit_cast<std::uint64_t>(d); };
  if (bits(value_) != bits(other.value_) || tag_ != other.tag_) return false;
  if (tag_ == 0) return true;
  if (!node_ || !other.node_) return !node_ && !other.node_ && bits(tangent_) == bits(other.tangent_);
  return node_->primal.same_as(other.node_->primal) && node_->tangent.same_as(other.node_->tangent);
}

namespace {
Tag top(const Dual& a, const Dual& b) { return std::max(a.tag(), b.tag()); }

// Both operands first-order in the same perturbation (or plain).
bool flat_pair(const Dual& a, const Dual& b) {
  return a.is_flat() && b.is_flat() && (a.tag() == b.tag() || a.is_plain() || b.is_plain());
}
}  // namespace

Dual operator+(const Dual& a, const Dual& b) {
  if (a.is_plain() && b.is_plain()) return a.value() + b.value();
  if (flat_pair(a, b)) return Dual::make(top(a, b), a.value() + b.value(), a.flat_tangent() + b.flat_tangent());
  Tag t = top(a, b);
  return Dual::make(t, a.primal_at(t) + b.primal_at(t), a.tangent_at(t) + b.tangent_at(t));
}

Dual operator-(const Dual& a, const Dual& b) {
  if (a.is_plain() && b.is_plain()) return a.value() - b.value();
  if (flat_pair(a, b)) return Dual::make(top(a, b), a.value() - b.value(), a.flat_tangent() - b.flat_tangent());
  Tag t = top(a, b);
  return Dual::make(t, a.primal_at(t) - b.primal_at(t), a.tangent_at(t) - b.tangent_at(t));
}

Dual operator*(const Dual& a, const Dual& b) {
  if (a.is_plain() && b.is_plain()) return a.value() * b.value();
  if (flat_pair(a, b)) {
    return Dual::make(top(a, b), a.value() * b.value(),
                      a.flat_tangent() * b.value() + a.value() * b.flat_tangent());
  }
  Tag t = top(a, b);
  Dual ap = a.primal_at(t), bp = b.primal_at(t);
  return Dual::make(t, ap * bp, a.tangent_at(t) * bp + ap * b.tangent_at(t));
}

Dual operator/(const Dual& a, const Dual& b) {
  if (b.value() == 0.0) return Dual(0.0);
  if (a.is_plain() && b.is_plain()) return a.value() / b.value();
  Tag t = top(a, b);
  Dual bp = b.primal_at(t);
  Dual q = a.primal_at(t) / bp;
  return Dual::make(t, q, (a.tangent_at(t) - q * b.tangent_at(t)) / bp);
}

Dual operator-(const Dual& a) {
  if (a.is_plain()) return -a.value();
  Tag t = a.tag();
  return Dual::make(t, -a.primal_at(t), -a.tangent_at(t));
}

Dual sin(const Dual& a) {
  if (a.is_plain()) return std::sin(a.value());
  Tag t = a.tag();
  Dual p = a.primal_at(t);
  return Dual::make(t, sin(p), cos(p) * a.tangent_at(t));
}

Dual cos(const Dual& a) {
  if (a.is_plain()) return std::cos(a.value());
  Tag t = a.tag();
  Dual p = a.primal_at(t);
  return Dual::make(t, cos(p), -(sin(p) * a.tangent_at(t)));
}

Dual exp(const Dual& a) {
  if (a.is_plain()) return std::exp(a.value());
  Tag t = a.tag();
  Dual e = exp(a.primal_at(t));
  return Dual::make(t, e, e * a.tangent_at(t));
}

Dual log(const Dual& a) {
  if (a.is_plain()) return std::log(a.value());
  Tag t = a.tag();
  Dual p = a.primal_at(t);
  return Dual::make(t, log(p), a.tangent_at(t) / p);
}

Dual lgamma(const Dual& a) {
  if (a.is_plain()) return std::lgamma(a.value());
  Tag t = a.tag();
  Dual p = a.primal_at(t);
  return Dual::make(t, lgamma(p), polygamma(0, p) * a.tangent_at(t));
}

Dual polygamma(int n, const Dual& a) {
  if (a.is_plain()) return boost::math::polygamma(n, a.value());
  Tag t = a.tag();
  Dual p = a.primal_at(t);
  return Dual::make(t, polygamma(n, p), polygamma(n + 1, p) * a.tangent_at(t));
}

}  // namespace dppl
