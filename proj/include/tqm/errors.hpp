#pragma once

#include <stdexcept>
#include <string>

namespace tqm {

// Physics-level failures get their own types so callers can distinguish
// "your parameters are outside the regime" from plain usage errors
// (which are reported as std::invalid_argument).

struct GapClosedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotTopologicalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainTooWeakError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LeakageExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CavityLeakError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceDriftError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tqm
