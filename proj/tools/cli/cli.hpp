#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace psdflow::cli {

/// Flat option set shared by every command. Keys of a --config file use the same names.
struct Options {
  std::string command;
  double phi = 0.75;
  double psi = 0.25;
  double lambda = 1e4;
  double mu = 0.0;
  std::string mu_rule = "constant";
  double tmax = 5.0;
  std::string times;
  int n = 100;
  int m = 0;
  int d = 0;
  int trials = 10;
  std::uint64_t seed = 0;
  double dt = 1e-3;
  std::string out;
  std::string format = "csv";
  std::string lambda_grid;
  std::string phi_list;
  std::string integrator = "euler_gd";
  std::string target = "q";
  double tolerance = 0.0;
  int points = 2001;
  double z_re = 0.5;
  double z_im = 0.1;
  std::string route = "automatic";
  bool goe = false;

  // which options were given explicitly
  bool phi_set = false;
  bool psi_set = false;
  bool mu_set = false;
  bool m_set = false;
  bool d_set = false;
};

/// "a:b:k" (k evenly spaced points from a to b) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

/// Runs one command. Returns the process exit code: 0 on success, 2 on invalid input,
/// 3 on a numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace psdflow::cli
