#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "sandpile/analysis.hpp"
#include "sandpile/configuration.hpp"
#include "sandpile/errors.hpp"
#include "sandpile/fastfix.hpp"
#include "sandpile/harness.hpp"
#include "sandpile/model.hpp"

namespace sandpile::cli {

// Exit codes: 0 success, 1 usage error, 2 invalid configuration text,
// 3 internal invariant violation or safety limit hit.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitBadConfiguration = 2;
inline constexpr int kExitInternal = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-negative integers separated by whitespace and/or commas. Negative
/// numbers, non-integer tokens and empty tokens between commas are rejected.
/// An all-whitespace string is the empty configuration.
inline Configuration parse_configuration(std::string_view text) {
  std::vector<Height> heights;
  bool last_was_number = false;
  bool pending_comma = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
      ++i;
    } else if (ch == ',') {
      if (!last_was_number) throw ConfigParseError("empty token at a comma");
      last_was_number = false;
      pending_comma = true;
      ++i;
    } else if (ch >= '0' && ch <= '9') {
      std::size_t end = i;
      while (end < text.size() && text[end] >= '0' && text[end] <= '9') ++end;
      Height value = 0;
      const auto res = std::from_chars(text.data() + i, text.data() + end, value);
      if (res.ec != std::errc{}) {
        throw ConfigParseError("column height out of range: '" +
                               std::string(text.substr(i, end - i)) + "'");
      }
      heights.push_back(value);
      last_was_number = true;
      pending_comma = false;
      i = end;
    } else if (ch == '-') {
      throw ConfigParseError("negative column height");
    } else {
      throw ConfigParseError(std::string("non-integer token at '") + ch + "'");
    }
  }
  if (pending_comma) throw ConfigParseError("trailing comma");
  return Configuration(std::move(heights));
}

enum class Subcommand { simulate, fixpoint, orbit, bench, gen };
enum class AlgorithmChoice { naive, fast, merge };
enum class OutputFormat { plain, json, dot, csv };

struct CliInvocation {
  Subcommand subcommand = Subcommand::fixpoint;
  ModelKind model = ModelKind::spm;
  std::int64_t plateau_bound = 1;  // --k, ipm only
  ExecutionMode mode = ExecutionMode::sequential;
  AlgorithmChoice algorithm = AlgorithmChoice::merge;
  std::optional<std::string> input_text;
  std::optional<std::string> input_file;
  OutputFormat format = OutputFormat::plain;
  std::optional<std::string> out_path;
  std::int64_t max_steps = kDefaultStepLimit;
  std::int64_t max_vertices = 1'000'000;
  bool check_lattice = false;
  bool check_reachable = false;
  bool trace = false;
  // gen and bench parameters
  std::string generator = "single";  // single | comb | random
  std::vector<std::int64_t> sizes;   // --n values
  std::int64_t random_length = 50;
  Height random_max_height = 20;
  std::uint64_t seed = 1;
  int random_count = 1;
  std::vector<AlgorithmChoice> bench_algorithms = {AlgorithmChoice::naive,
                                                   AlgorithmChoice::merge};
  int repetitions = 3;
};

namespace detail {

inline Model make_model(const CliInvocation& inv) {
  if (inv.model == ModelKind::spm) return Model::spm();
  if (inv.plateau_bound < 1) throw UsageError("ipm requires --k >= 1");
  return Model::ipm(inv.plateau_bound);
}

inline Configuration load_input(const CliInvocation& inv) {
  if (inv.input_text && inv.input_file) {
    throw UsageError("--input and --file are mutually exclusive");
  }
  if (inv.input_text) return parse_configuration(*inv.input_text);
  if (inv.input_file) {
    std::ifstream in(*inv.input_file);
    if (!in) throw ConfigParseError("cannot open file: " + *inv.input_file);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_configuration(text.str());
  }
  throw UsageError("an input configuration is required (--input or --file)");
}

// Writes through to --out when given, otherwise to the default stream.
struct OutputTarget {
  std::ostream& fallback;
  std::ofstream file;

  explicit OutputTarget(const CliInvocation& inv, std::ostream& out) : fallback(out) {
    if (inv.out_path) {
      file.open(*inv.out_path);
      if (!file) throw UsageError("cannot open output file: " + *inv.out_path);
    }
  }

  std::ostream& stream() { return file.is_open() ? file : fallback; }
};

inline nlohmann::json fixpoint_json(const Configuration& fix,
                                    std::optional<std::int64_t> transient,
                                    std::int64_t iterations, std::int64_t merges) {
  nlohmann::json j;
  j["fixpoint"] = fix.canonical().heights();
  if (transient) {
    j["transient"] = *transient;
  } else {
    j["transient"] = nullptr;
  }
  j["iterations"] = iterations;
  j["merges"] = merges;
  return j;
}

inline void print_fixpoint(std::ostream& os, OutputFormat format, const Configuration& fix,
                           std::optional<std::int64_t> transient, std::int64_t iterations,
                           std::int64_t merges) {
  if (format == OutputFormat::json) {
    os << fixpoint_json(fix, transient, iterations, merges).dump() << '\n';
    return;
  }
  os << "fixpoint: " << to_string(fix.canonical()) << '\n';
  if (transient) {
    os << "transient: " << *transient << '\n';
  } else {
    os << "transient: none\n";
  }
  os << "iterations: " << iterations << '\n';
  os << "merges: " << merges << '\n';
}

inline int run_fixpoint(const CliInvocation& inv, std::ostream& out) {
  if (inv.format != OutputFormat::plain && inv.format != OutputFormat::json) {
    throw UsageError("fixpoint supports --format plain or json");
  }
  if (inv.algorithm != AlgorithmChoice::naive && inv.model != ModelKind::spm) {
    throw UsageError("the fast and merge algorithms are only available for spm");
  }
  const Configuration input = load_input(inv);
  OutputTarget target(inv, out);
  switch (inv.algorithm) {
    case AlgorithmChoice::naive: {
      const Model m = make_model(inv);
      const RunResult r = run_to_fixpoint(input, m, inv.mode, inv.max_steps);
      // Parallel steps are synchronous sweeps, not single rule applications,
      // so they are not reported as a transient.
      const bool seq = inv.mode == ExecutionMode::sequential;
      print_fixpoint(target.stream(), inv.format, r.fixpoint,
                     seq ? std::optional<std::int64_t>(r.steps) : std::nullopt, r.steps, 0);
      break;
    }
    case AlgorithmChoice::fast: {
      const FixpointReport r = fast_fixpoint_general(input);
      print_fixpoint(target.stream(), inv.format, r.fixpoint, r.transient, r.iterations,
                     r.merges);
      break;
    }
    case AlgorithmChoice::merge: {
      const FixpointReport r = fast_fixpoint_merge(input);
      print_fixpoint(target.stream(), inv.format, r.fixpoint, r.transient, r.iterations,
                     r.merges);
      break;
    }
  }
  return kExitOk;
}

inline int run_simulate(const CliInvocation& inv, std::ostream& out) {
  if (inv.format != OutputFormat::plain) throw UsageError("simulate supports --format plain");
  const Model m = make_model(inv);
  const Configuration input = load_input(inv);
  OutputTarget target(inv, out);
  std::ostream& os = target.stream();
  if (inv.trace) {
    Configuration current = input;
    std::int64_t steps = 0;
    os << to_string(current) << '\n';
    while (true) {
      if (inv.mode == ExecutionMode::sequential) {
        const auto moves = applicable_moves(current, m);
        if (moves.empty()) break;
        current = apply_move(current, moves.front());
      } else {
        Configuration next = step_parallel(current, m);
        if (canonically_equal(next, current)) break;
        current = std::move(next);
      }
      if (++steps > inv.max_steps) throw DivergenceError("simulate: step limit exceeded");
      os << to_string(current) << '\n';
    }
    os << "steps: " << steps << '\n';
  } else {
    const RunResult r = run_to_fixpoint(input, m, inv.mode, inv.max_steps);
    os << "final: " << to_string(r.fixpoint.canonical()) << '\n';
    os << "steps: " << r.steps << '\n';
  }
  return kExitOk;
}

inline int run_orbit(const CliInvocation& inv, std::ostream& out) {
  if (inv.format != OutputFormat::dot) throw UsageError("orbit supports --format dot");
  if (inv.max_vertices <= 0) throw UsageError("orbit requires --max-vertices >= 1");
  const Model m = make_model(inv);
  const Configuration input = load_input(inv);
  const OrbitGraph g = build_orbit_graph(input, m, inv.mode, inv.max_vertices);
  OutputTarget target(inv, out);
  write_dot(g, target.stream());
  if (inv.check_lattice) {
    out << "lattice: " << (is_lattice(g) ? "true" : "false") << "; vertices: " << g.vertex_count()
        << '\n';
  }
  if (inv.check_reachable) {
    const Configuration root = input.canonical();
    if (root.length() > 1) {
      throw UsageError("--check-reachable requires a single-pile input");
    }
    const std::int64_t n = root.grains();
    if (n > 40) throw UsageError("--check-reachable enumerates partitions; limited to n <= 40");
    if (m.kind != ModelKind::spm || inv.mode != ExecutionMode::sequential) {
      throw UsageError("--check-reachable requires spm in sequential mode");
    }
    std::unordered_set<std::string> vertex_keys;
    for (const Configuration& v : g.vertices) vertex_keys.insert(to_string(v));
    const auto expected = reachable_configurations(n);
    bool match = expected.size() == g.vertices.size();
    for (const Configuration& c : expected) {
      if (!match) break;
      match = vertex_keys.contains(to_string(c));
    }
    out << "reachable-set match: " << (match ? "true" : "false")
        << "; vertices: " << g.vertex_count() << "; expected: " << expected.size() << '\n';
  }
  return kExitOk;
}

inline Configuration generate(const CliInvocation& inv, std::int64_t n, std::uint64_t seed) {
  if (inv.generator == "single") return make_single_pile(n);
  if (inv.generator == "comb") return make_comb(n);
  if (inv.generator == "random") {
    return make_random(inv.random_length, inv.random_max_height, seed);
  }
  throw UsageError("unknown generator: " + inv.generator + " (single, comb, random)");
}

inline int run_gen(const CliInvocation& inv, std::ostream& out) {
  if (inv.format != OutputFormat::plain) throw UsageError("gen supports --format plain");
  OutputTarget target(inv, out);
  if (inv.generator == "random") {
    for (int i = 0; i < inv.random_count; ++i) {
      target.stream() << to_string(generate(inv, 0, inv.seed + static_cast<std::uint64_t>(i)))
                      << '\n';
    }
    return kExitOk;
  }
  if (inv.sizes.empty()) throw UsageError("gen requires --n");
  for (std::int64_t n : inv.sizes) target.stream() << to_string(generate(inv, n, inv.seed)) << '\n';
  return kExitOk;
}

inline int run_bench(const CliInvocation& inv, std::ostream& out) {
  if (inv.format != OutputFormat::csv) throw UsageError("bench supports --format csv");
  std::vector<BenchInput> inputs;
  if (inv.generator == "random") {
    for (int i = 0; i < inv.random_count; ++i) {
      inputs.push_back(
          BenchInput{"random", generate(inv, 0, inv.seed + static_cast<std::uint64_t>(i))});
    }
  } else {
    if (inv.sizes.empty()) throw UsageError("bench requires --n");
    for (std::int64_t n : inv.sizes) {
      inputs.push_back(BenchInput{inv.generator, generate(inv, n, inv.seed)});
    }
  }
  std::vector<Algorithm> algorithms;
  for (AlgorithmChoice a : inv.bench_algorithms) {
    switch (a) {
      case AlgorithmChoice::naive: algorithms.push_back(Algorithm::naive_seq); break;
      case AlgorithmChoice::fast: algorithms.push_back(Algorithm::fast_general); break;
      case AlgorithmChoice::merge: algorithms.push_back(Algorithm::fast_merge); break;
    }
  }
  const auto records = bench_compare(inputs, algorithms, inv.repetitions, inv.max_steps);
  OutputTarget target(inv, out);
  write_csv(records, target.stream());
  return kExitOk;
}

}  // namespace detail

/// Runs a parsed invocation, writing results to `out` and diagnostics to
/// `err`. Returns the process exit code.
inline int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  try {
    switch (inv.subcommand) {
      case Subcommand::simulate: return detail::run_simulate(inv, out);
      case Subcommand::fixpoint: return detail::run_fixpoint(inv, out);
      case Subcommand::orbit: return detail::run_orbit(inv, out);
      case Subcommand::bench: return detail::run_bench(inv, out);
      case Subcommand::gen: return detail::run_gen(inv, out);
    }
    throw UsageError("unknown subcommand");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigParseError& e) {
    err << "error: invalid configuration: " << e.what() << '\n';
    return kExitBadConfiguration;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace sandpile::cli
