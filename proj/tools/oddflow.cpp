// Command-line front end: oddflow <subcommand> [--config FILE] [--out DIR] ...

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "oddflow/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral simulator for 2D variable-density odd-viscosity flow"};
  app.require_subcommand(1);
  app.footer("Environment: ODDFLOW_THREADS caps worker threads.\n\nCSV columns\n" +
             oddflow::csv_schema_help());

  oddflow::CommandOptions opt;
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::string snapshots;
  double s = 0.0;
  std::string q;

  auto common = [&](CLI::App* sub, bool with_out = true) {
    sub->add_option("--config", config, "JSON configuration file")->check(CLI::ExistingFile);
    if (with_out) sub->add_option("--out", out, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "seed for randomized initial modes");
    sub->add_flag("--quiet", opt.quiet, "suppress progress output");
  };

  common(app.add_subcommand("simulate", "integrate one formulation; writes diag.csv and snap_<k>.oddf"));
  common(app.add_subcommand("compare-formulations",
                            "original vs reduced runs; writes compare.csv and diag_*.csv"));
  common(app.add_subcommand("picard", "iterative construction; writes picard.csv"));
  common(app.add_subcommand("eps-sweep", "regularized runs against the reduced run; writes eps_sweep.csv"));
  auto* twin = app.add_subcommand("twin-stability", "perturbed twin runs; writes stability.csv");
  common(twin);
  twin->add_option("--delta", opt.deltas, "perturbation size(s), overrides stability.deltas");
  auto* lp = app.add_subcommand("lp-analyze", "dyadic block norms of snapshots; writes lp.csv");
  common(lp);
  lp->add_option("--snapshots", snapshots, "directory holding snap_*.oddf")->required();
  lp->add_option("--s", s, "regularity index (overrides lp.s)");
  lp->add_option("--q", q, "time exponent: 1, 2 or inf (overrides lp.q)")
      ->check(CLI::IsMember({"1", "2", "inf"}));
  common(app.add_subcommand("verify", "run the property suite on small grids"), false);
  app.add_subcommand("schema", "print the CSV column schema as JSON");

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  auto given = [&](const char* name) {
    const CLI::Option* o = sub->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  if (given("--config")) opt.config_path = config;
  if (given("--out")) opt.out_dir = out;
  if (given("--seed")) opt.seed = seed;
  if (given("--snapshots")) opt.snapshots_dir = snapshots;
  if (given("--s")) opt.s = s;
  if (given("--q")) opt.q = q;
  return oddflow::dispatch(sub->get_name(), opt);
}
