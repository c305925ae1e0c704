#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sandpile/configuration.hpp"
#include "sandpile/errors.hpp"

namespace sandpile {

enum class ModelKind { spm, ipm };
enum class ExecutionMode { sequential, parallel };

/// SPM has a single vertical rule: a grain falls from column i to i+1 when
/// h_i - h_{i+1} >= 2. IPM(k) adds a horizontal rule: a grain slides across a
/// plateau of at most k columns when the column past the plateau sits exactly
/// two below the source.
struct Model {
  ModelKind kind = ModelKind::spm;
  std::int64_t plateau_bound = 0;  // max plateau span crossed by a slide (ipm only)

  static Model spm() { return Model{ModelKind::spm, 0}; }

  static Model ipm(std::int64_t k) {
    if (k < 1) throw std::invalid_argument("Model::ipm: plateau bound must be >= 1");
    return Model{ModelKind::ipm, k};
  }
};

enum class MoveKind { vertical, horizontal };

/// One grain transfer. Columns are 0-based. Vertical moves have
/// destination == source + 1; horizontal moves cross a plateau of
/// `plateau` columns, so destination == source + plateau + 1.
struct Move {
  std::int64_t source = 0;
  std::int64_t destination = 0;
  MoveKind kind = MoveKind::vertical;
  std::int64_t plateau = 0;

  friend bool operator==(const Move&, const Move&) = default;
};

namespace detail {

inline Height at(std::span<const Height> h, std::int64_t i) {
  return (i >= 0 && i < std::ssize(h)) ? h[static_cast<std::size_t>(i)] : 0;
}

// The horizontal rule matches at most one plateau span per source column:
// the plateau run below the source is unique, and only its full extent can
// border a column exactly two below the source. Unlike the vertical rule,
// the slide needs an existing destination column: it cannot leave the
// populated region.
inline std::optional<Move> horizontal_move_at(std::span<const Height> h, std::int64_t i,
                                              std::int64_t plateau_bound) {
  const Height top = at(h, i);
  if (top < 2) return std::nullopt;
  std::int64_t run = 0;
  while (run < plateau_bound && at(h, i + run + 1) == top - 1) ++run;
  if (run >= 1 && run <= plateau_bound && i + run + 1 < std::ssize(h) &&
      at(h, i + run + 1) == top - 2) {
    return Move{i, i + run + 1, MoveKind::horizontal, run};
  }
  return std::nullopt;
}

// Leftmost firing position, or nullopt on a fixed point. Destinations at
// index >= wall are forbidden (wall < 0 disables the restriction).
inline std::optional<Move> leftmost_move(std::span<const Height> h, const Model& m,
                                         std::int64_t wall) {
  const std::int64_t l = std::ssize(h);
  for (std::int64_t i = 0; i < l; ++i) {
    if (h[static_cast<std::size_t>(i)] - at(h, i + 1) >= 2 && (wall < 0 || i + 1 < wall)) {
      return Move{i, i + 1, MoveKind::vertical, 0};
    }
    if (m.kind == ModelKind::ipm) {
      if (auto mv = horizontal_move_at(h, i, m.plateau_bound);
          mv && (wall < 0 || mv->destination < wall)) {
        return mv;
      }
    }
  }
  return std::nullopt;
}

inline void fire(std::vector<Height>& h, const Move& mv) {
  h[static_cast<std::size_t>(mv.source)] -= 1;
  if (mv.destination == std::ssize(h)) h.push_back(0);
  h[static_cast<std::size_t>(mv.destination)] += 1;
}

// One synchronous SPM step; returns whether any column emitted.
// `emit` is scratch storage reused across steps.
inline bool parallel_step_inplace(std::vector<Height>& h, std::vector<char>& emit) {
  const std::int64_t l = std::ssize(h);
  emit.assign(static_cast<std::size_t>(l), 0);
  bool any = false;
  for (std::int64_t i = 0; i < l; ++i) {
    if (h[static_cast<std::size_t>(i)] - at(h, i + 1) >= 2) {
      emit[static_cast<std::size_t>(i)] = 1;
      any = true;
    }
  }
  if (!any) return false;
  if (emit[static_cast<std::size_t>(l - 1)]) h.push_back(0);
  for (std::int64_t i = std::ssize(h) - 1; i >= 0; --i) {
    const bool out = i < l && emit[static_cast<std::size_t>(i)];
    const bool in = i > 0 && emit[static_cast<std::size_t>(i - 1)];
    h[static_cast<std::size_t>(i)] += (in ? 1 : 0) - (out ? 1 : 0);
  }
  return true;
}

}  // namespace detail

/// Every position where a rule fires, in increasing source order. A grain may
/// fall past the last populated column (the column beyond the edge reads as
/// zero), growing the configuration by one column.
inline std::vector<Move> applicable_moves(const Configuration& c, const Model& m) {
  std::span<const Height> h = c.heights();
  std::vector<Move> moves;
  for (std::int64_t i = 0; i < std::ssize(h); ++i) {
    if (h[static_cast<std::size_t>(i)] - detail::at(h, i + 1) >= 2) {
      moves.push_back(Move{i, i + 1, MoveKind::vertical, 0});
    }
    if (m.kind == ModelKind::ipm) {
      if (auto mv = detail::horizontal_move_at(h, i, m.plateau_bound)) moves.push_back(*mv);
    }
  }
  return moves;
}

/// Transfers one grain as described by `mv`. Rejects moves that are not
/// currently applicable, since silently applying one would corrupt a run.
inline Configuration apply_move(const Configuration& c, const Move& mv) {
  std::span<const Height> h = c.heights();
  const std::int64_t l = std::ssize(h);
  bool valid = mv.source >= 0 && mv.source < l && mv.destination <= l;
  if (valid) {
    if (mv.kind == MoveKind::vertical) {
      valid = mv.destination == mv.source + 1 &&
              detail::at(h, mv.source) - detail::at(h, mv.source + 1) >= 2;
    } else {
      valid = mv.plateau >= 1 && mv.destination == mv.source + mv.plateau + 1 &&
              mv.destination < l &&
              detail::at(h, mv.source) - detail::at(h, mv.destination) == 2;
      for (std::int64_t j = mv.source + 1; valid && j < mv.destination; ++j) {
        valid = detail::at(h, j) == detail::at(h, mv.source) - 1;
      }
    }
  }
  if (!valid) throw std::logic_error("apply_move: move is not applicable");
  std::vector<Height> next(h.begin(), h.end());
  detail::fire(next, mv);
  return Configuration(std::move(next));
}

/// Applies every firing position of the pre-step snapshot at once (SPM only;
/// simultaneous overlapping slides are not defined for IPM).
inline Configuration step_parallel(const Configuration& c, const Model& m) {
  if (m.kind != ModelKind::spm) {
    throw std::invalid_argument("step_parallel: parallel mode is only defined for SPM");
  }
  std::vector<Height> h = c.heights();
  std::vector<char> emit;
  detail::parallel_step_inplace(h, emit);
  return Configuration(std::move(h));
}

struct RunResult {
  Configuration fixpoint;
  std::int64_t steps = 0;
};

inline constexpr std::int64_t kDefaultStepLimit = std::int64_t{1} << 60;

/// Iterates until no rule applies. Sequential mode fires the leftmost
/// applicable move each step; the fixed point does not depend on that choice,
/// but the deterministic order makes the step count reproducible.
inline RunResult run_to_fixpoint(const Configuration& c, const Model& m, ExecutionMode mode,
                                 std::int64_t step_limit = kDefaultStepLimit) {
  if (step_limit <= 0) throw std::invalid_argument("run_to_fixpoint: step_limit must be > 0");
  if (mode == ExecutionMode::parallel && m.kind != ModelKind::spm) {
    throw std::invalid_argument("run_to_fixpoint: parallel mode is only defined for SPM");
  }
  std::vector<Height> h = c.heights();
  std::int64_t steps = 0;
  if (mode == ExecutionMode::sequential) {
    while (auto mv = detail::leftmost_move(h, m, -1)) {
      detail::fire(h, *mv);
      if (++steps > step_limit) throw DivergenceError("run_to_fixpoint: step limit exceeded");
    }
  } else {
    std::vector<char> emit;
    while (detail::parallel_step_inplace(h, emit)) {
      if (++steps > step_limit) throw DivergenceError("run_to_fixpoint: step limit exceeded");
    }
  }
  return RunResult{Configuration(std::move(h)), steps};
}

/// Sequential run in which moves may not place a grain at column index
/// >= wall_length. Used to cross-check length-restricted orbit graphs, whose
/// sinks are exactly the walled fixed points.
inline RunResult run_to_fixpoint_walled(const Configuration& c, const Model& m,
                                        std::int64_t wall_length,
                                        std::int64_t step_limit = kDefaultStepLimit) {
  if (step_limit <= 0) {
    throw std::invalid_argument("run_to_fixpoint_walled: step_limit must be > 0");
  }
  if (wall_length < c.length()) {
    throw std::invalid_argument("run_to_fixpoint_walled: configuration is longer than the wall");
  }
  std::vector<Height> h = c.heights();
  std::int64_t steps = 0;
  while (auto mv = detail::leftmost_move(h, m, wall_length)) {
    detail::fire(h, *mv);
    if (++steps > step_limit) {
      throw DivergenceError("run_to_fixpoint_walled: step limit exceeded");
    }
  }
  return RunResult{Configuration(std::move(h)), steps};
}

}  // namespace sandpile
