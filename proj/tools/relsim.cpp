#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "relsim/commands.hpp"

#ifndef RELSIM_DATA_DIR
#define RELSIM_DATA_DIR "data"
#endif

namespace cli = relsim::cli;

int main(int argc, char** argv) {
  CLI::App app{"relsim: relators, similarity and twisted bisimulation on finite coalgebras"};
  app.require_subcommand(1);

  cli::RunConfig cfg;
  cfg.data_dir = RELSIM_DATA_DIR;
  std::size_t max_size = 0;
  std::string format = "text";

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "random seed, recorded in the output");
    sub->add_option("--max-size", max_size, "carrier size bound")->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json", "dot"}));
    sub->add_option("--relator", cfg.relator, "relator expression, e.g. barr(Pow) or twisted{a,b}");
  };

  auto* similarity = app.add_subcommand("similarity", "greatest simulation between one or two systems");
  similarity->add_option("inputs", cfg.inputs, "system files (.json or LTS text)")->required()->expected(1, 2);
  common(similarity);

  auto* check = app.add_subcommand("check", "check a relation against the simulation condition");
  check->add_option("inputs", cfg.inputs, "system files")->required()->expected(1, 2);
  check->add_option("--witness", cfg.witness, "relation file (.json or text)")->required();
  common(check);

  auto* lattice = app.add_subcommand("lattice", "normal lax extensions of Exp(A)");
  lattice->add_option("--labels", cfg.labels, "comma separated label set")->required();
  common(lattice);

  auto* twisted = app.add_subcommand("twisted", "minimal standard and twisted witnesses for a pair of states");
  twisted->add_option("inputs", cfg.inputs, "LTS files")->required()->expected(1, 2);
  twisted->add_option("--pair", cfg.pair, "seed pair x,y")->required();
  common(twisted);

  auto* oracle = app.add_subcommand("oracle-compare", "similarity against behavioural equivalence on random pairs");
  oracle->add_option("--functor", cfg.functor, "functor expression (Barr relator) when --relator is absent");
  oracle->add_option("--samples", cfg.samples, "number of coalgebra pairs")->check(CLI::PositiveNumber);
  common(oracle);

  auto* properties = app.add_subcommand("properties", "law checks for a relator on small carriers");
  properties->add_option("--functor", cfg.functor, "functor expression (Barr relator) when --relator is absent");
  common(properties);

  auto* examples = app.add_subcommand("examples", "run the fixture suite");
  examples->add_option("--data", cfg.data_dir, "fixture directory");
  examples->add_flag_callback("--json", [&] { format = "json"; }, "same as --format json");
  common(examples);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cli::kUsage;
  }

  if (max_size > 0) cfg.max_size = max_size;
  static const std::map<std::string, cli::Format> formats{
      {"text", cli::Format::Text}, {"json", cli::Format::Json}, {"dot", cli::Format::Dot}};
  cfg.format = formats.at(format);

  const std::map<CLI::App*, cli::CommandResult (*)(const cli::RunConfig&)> dispatch{
      {similarity, &cli::cmd_similarity}, {check, &cli::cmd_check},
      {lattice, &cli::cmd_lattice},       {twisted, &cli::cmd_twisted},
      {oracle, &cli::cmd_oracle_compare}, {properties, &cli::cmd_properties},
      {examples, &cli::cmd_examples},
  };
  for (const auto& [sub, fn] : dispatch) {
    if (!sub->parsed()) continue;
    const cli::CommandResult res = cli::run_guarded([&, fn = fn] { return fn(cfg); });
    std::cout << res.out;
    std::cerr << res.err;
    return res.code;
  }
  return cli::kUsage;
}
