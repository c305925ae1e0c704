#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sandpile/analysis.hpp"
#include "sandpile/configuration.hpp"
#include "sandpile/errors.hpp"
#include "sandpile/intmath.hpp"

namespace sandpile {

/// A window of the configuration, sized so that its content is reachable and
/// therefore settles into a unique staircase fixed point within the window.
///
/// Once computed, peak_height/edge_height/excess describe that staircase:
///   peak_height = floor(n/l + l/2 - 1/2)    leftmost column of the staircase
///   edge_height = ceil(n/l - l/2 + 1/2)     rightmost column
///   excess      = n - l(2*peak + 1 - l)/2   doubled step, 0 <= excess < l
/// The excess may stand in for one virtual negative grain when the staircase
/// runs out below zero; the rendered heights still come out non-negative.
///
/// `transient` counts the sequential moves simulated inside the window so
/// far, and `initial_weight` is the movement weight of the window's original
/// content (both window-relative).
struct Interval {
  std::int64_t start = 0;   // 0-based column of the window in the global configuration
  std::int64_t length = 0;  // replaced by the free fixed-point length for the last window
  std::int64_t grains = 0;
  std::int64_t peak_height = 0;
  std::int64_t edge_height = 0;
  std::int64_t excess = 0;
  std::int64_t transient = 0;
  std::int64_t initial_weight = 0;
  bool is_last = false;
  bool computed = false;
};

/// Splits a configuration into maximal windows with reachable content.
/// A window ends before an increase, or at the second plateau seen since the
/// last cliff (three equal columns count as two plateaus); a cliff resets the
/// plateau count. Grain counts and movement weights are recorded during the
/// scan. The final window is marked is_last: it is not bounded on the right.
inline std::vector<Interval> cut_intervals(const Configuration& c) {
  std::vector<Interval> out;
  const std::int64_t l = c.length();
  if (l == 0) return out;

  auto close = [&](std::int64_t begin, std::int64_t end_exclusive) {
    Interval iv;
    iv.start = begin;
    iv.length = end_exclusive - begin;
    for (std::int64_t j = begin; j < end_exclusive; ++j) {
      iv.grains += c[j];
      iv.initial_weight += (j - begin) * c[j];
    }
    out.push_back(iv);
  };

  std::int64_t start = 0;
  int plateau_pairs = 0;
  for (std::int64_t i = 0; i + 1 < l; ++i) {
    bool cut_here = false;
    if (c[i + 1] > c[i]) {
      cut_here = true;
    } else if (c[i] - c[i + 1] >= 2) {
      plateau_pairs = 0;
    } else if (c[i] == c[i + 1]) {
      if (++plateau_pairs == 2) cut_here = true;
    }
    if (cut_here) {
      close(start, i + 1);
      start = i + 1;
      plateau_pairs = 0;
    }
  }
  close(start, l);
  out.back().is_last = true;
  return out;
}

/// Movement weight of the staircase fixed point described by (l, peak,
/// excess): l(l-1)(3*peak - 2l + 1)/6 + excess(2l - excess - 1)/2.
inline std::int64_t fixpoint_weight(std::int64_t length, std::int64_t peak, std::int64_t excess) {
  if (length == 0) return 0;
  const auto l = static_cast<__int128>(length);
  const __int128 w =
      l * (length - 1) * (3 * peak - 2 * length + 1) / 6 +
      static_cast<__int128>(excess) * (2 * length - excess - 1) / 2;
  return static_cast<std::int64_t>(w);
}

inline std::int64_t fixpoint_weight(const Interval& iv) {
  return fixpoint_weight(iv.length, iv.peak_height, iv.excess);
}

/// Fills in the window's fixed-point description and its transient
/// (fixed-point weight minus the recorded initial weight). The last window
/// first has its length replaced by the free fixed-point length.
inline Interval compute_interval(Interval iv) {
  if (iv.is_last) iv.length = single_pile_fixpoint_length(iv.grains);
  const std::int64_t n = iv.grains;
  const std::int64_t l = iv.length;
  if (l == 0) {
    if (n != 0) throw InternalError("compute_interval: grains in a zero-length window");
    iv.peak_height = iv.edge_height = iv.excess = 0;
    iv.transient = 0;
    iv.computed = true;
    return iv;
  }
  iv.peak_height = floor_div(2 * n + l * l - l, 2 * l);
  iv.edge_height = ceil_div(2 * n - l * l + l, 2 * l);
  iv.excess = n - l * (2 * iv.peak_height + 1 - l) / 2;
  if (iv.excess < 0 || iv.excess >= l) {
    throw InternalError("compute_interval: excess out of range");
  }
  iv.transient = fixpoint_weight(l, iv.peak_height, iv.excess) - iv.initial_weight;
  iv.computed = true;
  return iv;
}

/// The window's fixed point as explicit heights: a staircase from the peak,
/// with the step at the excess height doubled. Rejects negative heights,
/// which cannot occur for windows produced by cut_intervals.
inline std::vector<Height> render_interval(const Interval& iv) {
  if (!iv.computed) throw InternalError("render_interval: stats not computed");
  std::vector<Height> h;
  h.reserve(static_cast<std::size_t>(iv.length));
  if (iv.excess == 0) {
    for (std::int64_t t = 0; t < iv.length; ++t) h.push_back(iv.peak_height - t);
  } else {
    const std::int64_t alpha = iv.length - iv.excess - 1;
    for (std::int64_t t = 0; t <= alpha; ++t) h.push_back(iv.peak_height - t);
    for (std::int64_t t = alpha; t <= iv.length - 2; ++t) h.push_back(iv.peak_height - t);
  }
  std::int64_t sum = 0;
  for (Height v : h) {
    if (v < 0) throw InternalError("render_interval: negative height");
    sum += v;
  }
  if (sum != iv.grains) throw InternalError("render_interval: grain count mismatch");
  return h;
}

/// Whether the border between two computed windows still admits a move.
inline bool can_merge(const Interval& left, const Interval& right) {
  return left.edge_height >= right.peak_height + 2;
}

/// Fuses two adjacent computed windows. The union keeps at most one plateau
/// per side separated by the border cliff, so its content is reachable and
/// the window formulas stay valid with n' = n1+n2 and l' = l1+l2 (the free
/// fixed-point length when the right window is the last one).
///
/// The merged transient accumulates: steps already simulated in both windows,
/// plus the weight the union's fixed point adds over the two rendered parts.
/// Re-basing the right window's grains across the left one costs
/// right.grains * left.length of that weight.
inline Interval merge_intervals(const Interval& left, const Interval& right) {
  if (!left.computed || !right.computed) {
    throw InternalError("merge_intervals: stats not computed");
  }
  if (left.is_last) throw InternalError("merge_intervals: last window cannot sit on the left");
  Interval m;
  m.start = left.start;
  m.grains = left.grains + right.grains;
  m.is_last = right.is_last;
  m.length = right.is_last ? single_pile_fixpoint_length(m.grains) : left.length + right.length;
  m.initial_weight = left.initial_weight + right.initial_weight + right.grains * left.length;
  Interval computed = compute_interval(std::move(m));
  const std::int64_t delta = fixpoint_weight(computed) - fixpoint_weight(left) -
                             fixpoint_weight(right) - right.grains * left.length;
  computed.transient = left.transient + right.transient + delta;
  return computed;
}

/// One left-to-right scan fusing every adjacent pair whose border still
/// admits a move. A freshly merged window is compared against the next one
/// immediately; borders to its left are caught by the caller's next pass.
/// Returns whether any merge happened.
inline bool merge_pass(std::vector<Interval>& intervals) {
  bool merged_any = false;
  std::size_t i = 0;
  while (i + 1 < intervals.size()) {
    if (can_merge(intervals[i], intervals[i + 1])) {
      intervals[i] = merge_intervals(intervals[i], intervals[i + 1]);
      intervals.erase(intervals.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      merged_any = true;
    } else {
      ++i;
    }
  }
  return merged_any;
}

struct FixpointReport {
  Configuration fixpoint;
  std::optional<std::int64_t> transient;  // merge variant only
  std::int64_t iterations = 0;
  std::int64_t merges = 0;
  std::vector<Interval> intervals;
};

namespace detail {

inline Configuration assemble(const std::vector<Interval>& intervals) {
  std::vector<Height> h;
  for (const Interval& iv : intervals) {
    const auto part = render_interval(iv);
    h.insert(h.end(), part.begin(), part.end());
  }
  return Configuration(std::move(h));
}

inline std::int64_t interval_grains(const std::vector<Interval>& intervals) {
  std::int64_t total = 0;
  for (const Interval& iv : intervals) total += iv.grains;
  return total;
}

}  // namespace detail

/// Window hooks for the iterated cut/compute solver: how to split a
/// configuration into maximal reachable windows and how to solve one window.
/// Any model whose orbits form a lattice and whose reachable configurations
/// can be recognized by a scan fits this interface.
struct SpmWindows {
  static std::vector<Interval> cut(const Configuration& c) { return cut_intervals(c); }
  static Interval solve(Interval iv) { return compute_interval(std::move(iv)); }
  static std::vector<Height> render(const Interval& iv) { return render_interval(iv); }
};

/// Cut/compute iterated to a fixed point: re-cut the rendered configuration
/// until a pass changes nothing. The transient is not tracked by this
/// variant. Iterations (including the pass that detects stability) are
/// bounded by l(l + 2f - 1)/2, where f is the free fixed-point length of
/// the total grain count.
template <typename Windows = SpmWindows>
FixpointReport fast_fixpoint_general(const Configuration& c) {
  Configuration current = c.canonical();
  if (current.empty()) return FixpointReport{std::move(current), std::nullopt, 0, 0, {}};
  const std::int64_t l0 = current.length();
  const std::int64_t n = current.grains();
  const std::int64_t bound = l0 * (l0 + 2 * single_pile_fixpoint_length(n) - 1) / 2;

  FixpointReport report;
  while (true) {
    if (report.iterations >= bound) {
      throw InternalError("fast_fixpoint_general: iteration bound exceeded");
    }
    ++report.iterations;
    report.intervals = Windows::cut(current);
    for (Interval& iv : report.intervals) iv = Windows::solve(std::move(iv));
    if (detail::interval_grains(report.intervals) != n) {
      throw InternalError("fast_fixpoint_general: grains not conserved");
    }
    std::vector<Height> heights;
    for (const Interval& iv : report.intervals) {
      const auto part = Windows::render(iv);
      heights.insert(heights.end(), part.begin(), part.end());
    }
    Configuration next = Configuration(std::move(heights)).canonical();
    if (next == current) break;
    current = std::move(next);
  }
  report.fixpoint = std::move(current);
  return report;
}

/// The SPM refinement: one cut, one compute, then merge passes until no
/// border admits a move. Reports the full sequential transient (the sum of
/// the per-window transients) and the number of merges, which cannot exceed
/// the grain count. `iterations` counts merge passes including the final one
/// that detects stability.
inline FixpointReport fast_fixpoint_merge(const Configuration& c) {
  const Configuration start = c.canonical();
  const std::int64_t n = start.grains();

  FixpointReport report;
  report.intervals = cut_intervals(start);
  for (Interval& iv : report.intervals) iv = compute_interval(std::move(iv));
  while (true) {
    ++report.iterations;
    const auto before = static_cast<std::int64_t>(report.intervals.size());
    const bool merged = merge_pass(report.intervals);
    report.merges += before - static_cast<std::int64_t>(report.intervals.size());
    if (report.merges > n) {
      throw InternalError("fast_fixpoint_merge: merge count exceeded the grain bound");
    }
    if (!merged) break;
  }
  if (detail::interval_grains(report.intervals) != n) {
    throw InternalError("fast_fixpoint_merge: grains not conserved");
  }
  report.fixpoint = detail::assemble(report.intervals).canonical();
  std::int64_t transient = 0;
  for (const Interval& iv : report.intervals) transient += iv.transient;
  report.transient = transient;
  return report;
}

}  // namespace sandpile
