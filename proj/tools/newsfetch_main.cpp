#include <iostream>

#include "CLI11.hpp"
#include "newsfetch/cli.hpp"

namespace cli = newsfetch::cli;

int main(int argc, char** argv) {
  CLI::App app{"WiFi-only news prefetching simulator"};
  app.require_subcommand(1);

  cli::SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run one simulation and write a metrics report");
  simulate->add_option("--trace", sim.trace, "Trace file (JSON lines)")->required();
  simulate->add_option("--config", sim.config, "Config file (JSON)");
  simulate->add_option("--out", sim.out, "Report output path")->required();
  simulate->add_option("--seed", sim.seed, "Overrides the config seed");
  simulate->add_option("--state-out", sim.state_out, "Also dump the learned state here");

  cli::GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a seeded synthetic trace");
  generate->add_option("--params", gen.params, "Generator parameters (JSON)");
  generate->add_option("--out", gen.out, "Trace output path")->required();
  generate->add_option("--seed", gen.seed, "Overrides the params seed");
  generate->add_option("--days", gen.days);
  generate->add_option("--articles-per-day", gen.articles_per_day);
  generate->add_option("--reads-per-day", gen.reads_per_day);

  cli::SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Simulate once per budget point and write CSV");
  sweep->add_option("--trace", sw.trace)->required();
  sweep->add_option("--config", sw.config);
  sweep->add_option("--budgets", sw.budgets, "Comma list, ranges allowed (0..25)")->required();
  sweep->add_option("--out", sw.out, "CSV output path")->required();
  sweep->add_option("--seed", sw.seed);

  cli::ReportArgs rep;
  auto* report = app.add_subcommand("report", "Dump or summarize the learned user model");
  report->add_option("--state", rep.state, "Summarize an existing state dump");
  report->add_option("--trace", rep.trace, "Run this trace and dump the learned state");
  report->add_option("--config", rep.config);
  report->add_option("--out", rep.out);
  report->add_option("--seed", rep.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitInvalid;
  }

  if (*simulate) return cli::cmd_simulate(sim, std::cerr);
  if (*generate) return cli::cmd_generate(gen, std::cerr);
  if (*sweep) return cli::cmd_sweep(sw, std::cerr);
  if (*report) return cli::cmd_report(rep, std::cout, std::cerr);
  return cli::kExitInvalid;
}
