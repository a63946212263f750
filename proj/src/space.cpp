#include "tqm/space.hpp"

#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace tqm {

CompositeSpace::CompositeSpace(std::vector<Subsystem> subsystems)
    : subs_(std::move(subsystems)) {
  if (subs_.empty()) throw std::invalid_argument("CompositeSpace: no subsystems");
  std::unordered_set<std::string> seen;
  long long total = 1;
  for (const auto& s : subs_) {
    if (s.dim < 1) throw std::invalid_argument("CompositeSpace: dimension of '" + s.label + "' must be a positive integer");
    if (!seen.insert(s.label).second) throw std::invalid_argument("CompositeSpace: duplicate label '" + s.label + "'");
    total *= s.dim;
    if (total > std::numeric_limits<int>::max()) throw std::invalid_argument("CompositeSpace: total dimension overflow");
  }
  total_dim_ = static_cast<int>(total);
  strides_.assign(subs_.size(), 1);
  for (int i = count() - 2; i >= 0; --i) {
    strides_[static_cast<size_t>(i)] = strides_[static_cast<size_t>(i) + 1] * subs_[static_cast<size_t>(i) + 1].dim;
  }
}

bool CompositeSpace::has(const std::string& label) const {
  for (const auto& s : subs_) {
    if (s.label == label) return true;
  }
  return false;
}

int CompositeSpace::index_of(const std::string& label) const {
  for (size_t i = 0; i < subs_.size(); ++i) {
    if (subs_[i].label == label) return static_cast<int>(i);
  }
  throw std::invalid_argument("CompositeSpace: unknown label '" + label + "'");
}

int CompositeSpace::dim_of(const std::string& label) const {
  return subs_[static_cast<size_t>(index_of(label))].dim;
}

void CompositeSpace::decompose(int flat, std::span<int> digits) const {
  if (flat < 0 || flat >= total_dim_) throw std::invalid_argument("CompositeSpace: flat index out of range");
  if (static_cast<int>(digits.size()) != count()) throw std::invalid_argument("CompositeSpace: digit span size mismatch");
  for (int i = 0; i < count(); ++i) {
    const int st = strides_[static_cast<size_t>(i)];
    digits[static_cast<size_t>(i)] = flat / st;
    flat %= st;
  }
}

int CompositeSpace::compose(std::span<const int> digits) const {
  if (static_cast<int>(digits.size()) != count()) throw std::invalid_argument("CompositeSpace: digit span size mismatch");
  int flat = 0;
  for (int i = 0; i < count(); ++i) {
    const int d = digits[static_cast<size_t>(i)];
    if (d < 0 || d >= subs_[static_cast<size_t>(i)].dim) throw std::invalid_argument("CompositeSpace: digit out of range");
    flat += d * strides_[static_cast<size_t>(i)];
  }
  return flat;
}

bool CompositeSpace::operator==(const CompositeSpace& other) const {
  if (subs_.size() != other.subs_.size()) return false;
  for (size_t i = 0; i < subs_.size(); ++i) {
    if (subs_[i].label != other.subs_[i].label || subs_[i].dim != other.subs_[i].dim) return false;
  }
  return true;
}

}  // namespace tqm
