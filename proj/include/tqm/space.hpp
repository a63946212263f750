#pragma once

#include <span>
#include <string>
#include <vector>

namespace tqm {

struct Subsystem {
  std::string label;
  int dim = 0;
};

// Ordered list of labeled subsystems. The first listed subsystem is the most
// significant index digit: for [a(2), b(3)] the flat index is 3*i_a + i_b.
// Every operator/state in this library carries one of these so that embeddings
// and partial traces agree on digit order.
class CompositeSpace {
 public:
  CompositeSpace() = default;
  explicit CompositeSpace(std::vector<Subsystem> subsystems);

  int total_dim() const { return total_dim_; }
  int count() const { return static_cast<int>(subs_.size()); }
  const Subsystem& at(int i) const { return subs_.at(static_cast<size_t>(i)); }
  const std::vector<Subsystem>& subsystems() const { return subs_; }

  bool has(const std::string& label) const;
  int index_of(const std::string& label) const;  // throws on unknown label
  int dim_of(const std::string& label) const;

  // Number of flat-index steps between consecutive values of subsystem i.
  int stride(int i) const { return strides_.at(static_cast<size_t>(i)); }

  void decompose(int flat, std::span<int> digits) const;
  int compose(std::span<const int> digits) const;

  bool operator==(const CompositeSpace& other) const;

 private:
  std::vector<Subsystem> subs_;
  std::vector<int> strides_;
  int total_dim_ = 1;
};

}  // namespace tqm
