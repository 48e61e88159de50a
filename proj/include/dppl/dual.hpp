#pragma once

// Nested forward-mode dual numbers with dynamic perturbation tags.
//
// A Dual is either a plain double or a node (tag, primal, tangent) where
// every tag occurring inside primal and tangent is strictly smaller than the
// node's own tag. Nesting is what keeps perturbations of distinct derivative
// invocations apart. A node whose primal and tangent are both plain is stored
// inline without allocation.

#include <cstdint>
#include <memory>

namespace dppl {

using Tag = std::uint64_t;

// Monotone, thread-safe. Never returns 0.
Tag fresh_tag();

class Dual {
 public:
  Dual(double v = 0.0) : value_(v) {}  // NOLINT(google-explicit-constructor)

  // Drops the node when the tangent is a plain zero.
  static Dual make(Tag tag, Dual primal, Dual tangent);

  double value() const { return value_; }
  bool is_plain() const { return tag_ == 0; }
  Tag tag() const { return tag_; }

  // Component of *this with the perturbation `t` set to zero.
  Dual primal_at(Tag t) const;
  // Coefficient of the perturbation `t`.
  Dual tangent_at(Tag t) const;

  // No nested node: primal and tangent (if any) are plain.
  bool is_flat() const { return !node_; }
  double flat_tangent() const { return tangent_; }

  bool carries(Tag t) const;
  // Exact structural equality (bitwise on doubles).
  bool same_as(const Dual& other) const;

 private:
  struct Node;

  double value_;
  Tag tag_ = 0;
  double tangent_ = 0.0;              // inline tangent when tag_ != 0 and !node_
  std::shared_ptr<const Node> node_;  // nested node, node_->tag == tag_
};

struct Dual::Node {
  Tag tag;
  Dual primal;
  Dual tangent;
};

Dual operator+(const Dual& a, const Dual& b);
Dual operator-(const Dual& a, const Dual& b);
Dual operator*(const Dual& a, const Dual& b);
// Zero (with no perturbations) when the denominator's value is zero.
Dual operator/(const Dual& a, const Dual& b);
Dual operator-(const Dual& a);

Dual sin(const Dual& a);
Dual cos(const Dual& a);
Dual exp(const Dual& a);
Dual log(const Dual& a);
Dual lgamma(const Dual& a);
Dual polygamma(int n, const Dual& a);

}  // namespace dppl
