#pragma once

#include <stdexcept>

namespace sandpile {

/// A run exceeded its step limit. The models implemented here always
/// terminate, so this only fires when the caller sets the limit too low.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Orbit-graph construction exceeded its vertex limit.
struct VertexLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A proven invariant of the algorithms was violated (bound exceeded,
/// negative rendered height, result mismatch). Indicates a bug.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace sandpile
