// Command-line front end: simulation, fixed-point computation, orbit-graph
// export and benchmarking for one-dimensional sandpile models.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sandpile/cli.hpp"

namespace {

using sandpile::cli::AlgorithmChoice;
using sandpile::cli::CliInvocation;
using sandpile::cli::OutputFormat;
using sandpile::cli::Subcommand;

void add_model_options(CLI::App* cmd, CliInvocation& inv) {
  const std::map<std::string, sandpile::ModelKind> models{
      {"spm", sandpile::ModelKind::spm}, {"ipm", sandpile::ModelKind::ipm}};
  cmd->add_option("--model", inv.model, "sandpile model")
      ->transform(CLI::CheckedTransformer(models, CLI::ignore_case))
      ->default_str("spm");
  cmd->add_option("--k", inv.plateau_bound, "plateau-slide bound for ipm (>= 1)");
}

void add_mode_option(CLI::App* cmd, CliInvocation& inv) {
  const std::map<std::string, sandpile::ExecutionMode> modes{
      {"seq", sandpile::ExecutionMode::sequential}, {"par", sandpile::ExecutionMode::parallel}};
  cmd->add_option("--mode", inv.mode, "execution mode")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case))
      ->default_str("seq");
}

void add_input_options(CLI::App* cmd, CliInvocation& inv) {
  cmd->add_option("--input", inv.input_text, "configuration as comma/space separated heights");
  cmd->add_option("--file", inv.input_file, "file containing the configuration");
}

void add_output_option(CLI::App* cmd, CliInvocation& inv) {
  cmd->add_option("--out", inv.out_path, "write output to this path instead of stdout");
}

CLI::CheckedTransformer format_transformer() {
  const std::map<std::string, OutputFormat> formats{{"plain", OutputFormat::plain},
                                                    {"json", OutputFormat::json},
                                                    {"dot", OutputFormat::dot},
                                                    {"csv", OutputFormat::csv}};
  return CLI::CheckedTransformer(formats, CLI::ignore_case);
}

CLI::CheckedTransformer algorithm_transformer() {
  const std::map<std::string, AlgorithmChoice> algos{{"naive", AlgorithmChoice::naive},
                                                     {"fast", AlgorithmChoice::fast},
                                                     {"merge", AlgorithmChoice::merge}};
  return CLI::CheckedTransformer(algos, CLI::ignore_case);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixed points and transients of one-dimensional sandpile models"};
  app.require_subcommand(1);

  CliInvocation inv;

  CLI::App* simulate = app.add_subcommand("simulate", "run the model step by step");
  add_model_options(simulate, inv);
  add_mode_option(simulate, inv);
  add_input_options(simulate, inv);
  add_output_option(simulate, inv);
  simulate->add_flag("--trace", inv.trace, "print every configuration along the run");
  simulate->add_option("--max-steps", inv.max_steps, "safety limit on rule applications");

  CLI::App* fixpoint = app.add_subcommand("fixpoint", "compute the fixed point");
  add_model_options(fixpoint, inv);
  add_mode_option(fixpoint, inv);
  add_input_options(fixpoint, inv);
  add_output_option(fixpoint, inv);
  fixpoint->add_option("--algo", inv.algorithm, "naive | fast | merge")
      ->transform(algorithm_transformer())
      ->default_str("merge");
  fixpoint->add_option("--format", inv.format, "plain | json")
      ->transform(format_transformer())
      ->default_str("plain");
  fixpoint->add_option("--max-steps", inv.max_steps, "safety limit for the naive algorithm");

  CLI::App* orbit = app.add_subcommand("orbit", "build the orbit graph and export DOT");
  add_model_options(orbit, inv);
  add_mode_option(orbit, inv);
  add_input_options(orbit, inv);
  add_output_option(orbit, inv);
  orbit->add_option("--max-vertices", inv.max_vertices, "safety limit on orbit size");
  orbit->add_flag("--check-lattice", inv.check_lattice,
                  "verify that the orbit graph is a lattice");
  orbit->add_flag("--check-reachable", inv.check_reachable,
                  "verify the vertex set against the reachability characterization");

  CLI::App* bench = app.add_subcommand("bench", "compare algorithms, emit CSV");
  bench->add_option("--gen", inv.generator, "single | comb | random")->default_str("single");
  bench->add_option("--n", inv.sizes, "grain counts (single/comb), repeatable");
  bench->add_option("--l", inv.random_length, "length for the random generator");
  bench->add_option("--max-height", inv.random_max_height, "height bound for random");
  bench->add_option("--count", inv.random_count, "number of random configurations");
  bench->add_option("--seed", inv.seed, "seed for the random generator");
  bench->add_option("--algos", inv.bench_algorithms, "algorithms to compare")
      ->transform(algorithm_transformer())
      ->default_str("naive merge");
  bench->add_option("--reps", inv.repetitions, "repetitions per measurement (min is kept)");
  bench->add_option("--max-steps", inv.max_steps, "safety limit for the naive algorithm");
  add_output_option(bench, inv);

  CLI::App* gen = app.add_subcommand("gen", "print a generated configuration");
  gen->add_option("--gen", inv.generator, "single | comb | random")->default_str("single");
  gen->add_option("--n", inv.sizes, "grain counts (single/comb), repeatable");
  gen->add_option("--l", inv.random_length, "length for the random generator");
  gen->add_option("--max-height", inv.random_max_height, "height bound for random");
  gen->add_option("--count", inv.random_count, "number of random configurations");
  gen->add_option("--seed", inv.seed, "seed for the random generator");
  add_output_option(gen, inv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return sandpile::cli::kExitUsage;
  }

  if (simulate->parsed()) {
    inv.subcommand = Subcommand::simulate;
  } else if (fixpoint->parsed()) {
    inv.subcommand = Subcommand::fixpoint;
  } else if (orbit->parsed()) {
    inv.subcommand = Subcommand::orbit;
    inv.format = OutputFormat::dot;
  } else if (bench->parsed()) {
    inv.subcommand = Subcommand::bench;
    inv.format = OutputFormat::csv;
  } else {
    inv.subcommand = Subcommand::gen;
  }

  return sandpile::cli::dispatch(inv, std::cout, std::cerr);
}
