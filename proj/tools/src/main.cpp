// skewtorus command-line tool.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 data error,
// 4 numerical failure.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "dataset.hpp"
#include "skewtorus/errors.hpp"

namespace {

using skewtorus::app::RunConfig;

void add_model_spec(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--model", cfg.family, "base family: uniform, sine, cosine, wc")->capture_default_str();
  cmd->add_option("--mu", cfg.mu, "location, comma separated (radians)");
  cmd->add_option("--kappa", cfg.kappa, "concentrations, comma separated");
  cmd->add_option("--dep,--r", cfg.dep, "dependence: r for d = 2, upper-triangle entries for d >= 3");
  cmd->add_option("--lambda", cfg.lambda, "skewness, comma separated, sum of |lambda| <= 1");
  cmd->add_option("--params", cfg.params, "JSON model record (e.g. from a fit report) instead of the flags above");
  cmd->add_option("--name", cfg.name, "pick the model record with this name from --params");
}

void add_data_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("input,--in", cfg.input, "CSV file of angles")->required();
  cmd->add_option("--unit", cfg.unit, "angle unit of the input: rad or deg")->capture_default_str();
  cmd->add_option("--columns", cfg.columns, "0-based angle columns, e.g. 0,1")->capture_default_str();
  cmd->add_option("--group-by", cfg.group_by, "0-based label column; each label is fitted separately");
  cmd->add_option("--model", cfg.family, "base family: uniform, sine, cosine, wc")->capture_default_str();
  cmd->add_option("--mixture", cfg.components, "number of mixture components K")->capture_default_str();
  cmd->add_option("--starts", cfg.starts, "optimiser starts (k-means partitions for mixtures)")->capture_default_str();
  cmd->add_option("--tol", cfg.tol, "relative log-likelihood tolerance")->capture_default_str();
  cmd->add_flag("--jsonl", cfg.jsonl, "print JSON lines instead of the table");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sine-skewed toroidal distributions: fit, test, sample, grid and moments"};
  app.set_config("--config", "", "key=value file with option defaults");
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "random seed (unsigned 64-bit)")->capture_default_str();
  app.add_option("--out", cfg.out, "output path (written atomically)");

  auto* fit = app.add_subcommand("fit", "fit a model or compare the six bivariate variants");
  add_data_options(fit, cfg);
  fit->add_flag("--skewed", cfg.skewed, "fit the sine-skewed model");
  fit->add_flag("--compare", cfg.compare, "fit S, SS, C, SC, WC and SWC and rank them by AIC and BIC");

  auto* sym = app.add_subcommand("test-symmetry", "likelihood-ratio test of lambda = 0");
  add_data_options(sym, cfg);

  auto* smp = app.add_subcommand("sample", "draw from a model");
  add_model_spec(smp, cfg);
  smp->add_option("--n", cfg.n, "number of draws")->capture_default_str();

  auto* grid = app.add_subcommand("grid", "density on a regular grid plus the mode list");
  add_model_spec(grid, cfg);
  grid->add_option("--resolution", cfg.resolution, "grid points per axis")->capture_default_str();

  auto* mom = app.add_subcommand("moments", "mean direction, concentration, variance, skewness, kurtosis");
  add_model_spec(mom, cfg);
  mom->add_flag("--jsonl", cfg.jsonl, "print a JSON record instead of the table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  namespace st = skewtorus;
  try {
    if (*fit) return st::app::run_fit(cfg, std::cout);
    if (*sym) return st::app::run_test_symmetry(cfg, std::cout);
    if (*smp) return st::app::run_sample(cfg, std::cout);
    if (*grid) return st::app::run_grid(cfg, std::cout);
    if (*mom) return st::app::run_moments(cfg, std::cout);
  } catch (const st::app::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const st::app::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const st::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const st::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
