#include <iostream>

#include <CLI11.hpp>

#include "lmdp_cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace lmdp::cli;
  CLI::App app{"lmdp-npg: natural policy gradient and curriculum experiments on secretary and "
               "online knapsack latent MDPs"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string scheme;
  int workers = 0;

  auto* run = app.add_subcommand("run", "Run the schemes listed in an experiment config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  auto* seed_opt = run->add_option("--seed", seed, "Master seed (overrides the config)");
  auto* out_opt = run->add_option("--out", out_dir, "Output directory (overrides the config)");
  auto* scheme_opt = run->add_option("--scheme", scheme, "Run only this scheme");
  auto* workers_opt = run->add_option("--workers", workers, "Worker threads (default: LMDP_NPG_WORKERS or 1)")
                          ->check(CLI::PositiveNumber);

  std::vector<std::string> csvs;
  std::string svg_path;
  auto* plot = app.add_subcommand("plot", "Plot train log CSVs into a three-panel SVG");
  plot->add_option("csv", csvs, "Train log CSV files")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", svg_path, "Output SVG path")->required();

  AnalyzeOptions analyze_opts;
  auto* analyze = app.add_subcommand("analyze", "Relative condition number reports");
  analyze->add_option("what", analyze_opts.what, "Analysis to run (kappa)")->required();
  analyze->add_option("--env", analyze_opts.env_path, "Environment or experiment config");
  analyze->add_option("--checkpoint", analyze_opts.checkpoint_path, "Policy checkpoint");
  analyze->add_option("--mode", analyze_opts.mode, "closed or empirical")->capture_default_str();
  analyze->add_option("--sampler", analyze_opts.sampler, "threshold, naive or on_policy")->capture_default_str();
  analyze->add_option("--q", analyze_opts.q, "Sampler threshold q")->capture_default_str();
  analyze->add_option("--seed", analyze_opts.seed, "Seed for reference search and Monte Carlo");
  analyze->add_option("--episodes", analyze_opts.episodes, "Monte Carlo episodes for large instances");

  OracleOptions oracle_opts;
  double q = 0.0;
  auto* oracle = app.add_subcommand("oracle", "Exact optimum of an enumerable instance");
  oracle->add_option("--env,--config", oracle_opts.env_path, "Environment or experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  auto* q_opt = oracle->add_option("--q", q, "Sampler threshold for the closed-form kappa table");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    Overrides o;
    if (*seed_opt) o.seed = seed;
    if (*out_opt) o.output_dir = out_dir;
    if (*scheme_opt) o.scheme = scheme;
    if (*workers_opt) o.workers = workers;
    return cmd_run(config_path, o, std::cout, std::cerr);
  }
  if (*plot) return cmd_plot(csvs, svg_path, std::cerr);
  if (*analyze) return cmd_analyze(analyze_opts, std::cout, std::cerr);
  if (*oracle) {
    if (*q_opt) oracle_opts.q = q;
    return cmd_oracle(oracle_opts, std::cout, std::cerr);
  }
  return kExitFailure;
}
