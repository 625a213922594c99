#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace skewtorus::app {

struct RunConfig {
  std::string command;
  std::string input;
  std::string out;
  std::string family = "sine";
  bool skewed = false;
  int components = 1;
  bool compare = false;
  std::uint64_t seed = 20240601;
  std::string unit = "rad";
  std::string columns = "0,1";
  std::optional<int> group_by;
  int starts = 5;
  double tol = 1e-8;
  bool jsonl = false;

  // model specification for sample / grid / moments
  std::string mu;
  std::string kappa;
  std::string dep;
  std::string lambda;
  std::string params;
  std::string name;

  std::size_t n = 1000;
  int resolution = 200;
};

int run_fit(const RunConfig& cfg, std::ostream& out);
int run_test_symmetry(const RunConfig& cfg, std::ostream& out);
int run_sample(const RunConfig& cfg, std::ostream& out);
int run_grid(const RunConfig& cfg, std::ostream& out);
int run_moments(const RunConfig& cfg, std::ostream& out);

}  // namespace skewtorus::app
