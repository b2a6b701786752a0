#pragma once

#include <stdexcept>

namespace mdmin {

// A dense assembly or factorization was requested above the configured
// dimension cap.
struct unsupported_size_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The small step system carries no information (every Gram eigenvalue sits
// at zero), which only happens when the direction matrix is effectively zero.
struct degenerate_system_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mdmin
