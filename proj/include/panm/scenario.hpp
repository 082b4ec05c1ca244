#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace panm {

/// Key-value scenario file. Required keys: N, P, Ts, s, r, snr_db, lambda,
/// seed. The rest default as shown.
struct Scenario {
  int N = 512;
  int P = 64;
  double Ts = 5e-6;
  int s = 5;
  int r = 5;
  double snr_db = 10.0;
  double lambda = 0.1;
  std::uint64_t seed = 1;

  double impulse_scale = 10.0;
  std::string estimator = "panm";
  int grid_size = 0;              ///< PLM grid, 0 means 4P
  std::optional<double> epsilon;  ///< override for the noise-ball coefficient
  double tol = 1e-6;
  int max_iter = 50000;

  void validate() const;
};

/// Parses `key = value` lines; '#' starts a comment. Throws
/// std::invalid_argument with the offending line on malformed input or a
/// missing required key.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_text(const Scenario& sc);

}  // namespace panm
