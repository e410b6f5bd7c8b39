#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mfvl/kernel.hpp"
#include "mfvl/states.hpp"

namespace mfvl {

struct GridConfig {
  int d = 1;
  int n = 256;
  double L = 8.0;
  /// When positive, n is the smallest power of two >= points_per_inverse_eps / ε.
  double points_per_inverse_eps = 0.0;

  GridSpec grid_for(double eps) const;
};

struct StateConfig {
  /// coherent, fermi-sea or steady.
  std::string kind = "coherent";
  WeightFunction M;
  double delta = 0.0;
  double dq = 0.0;
  double dp = 0.0;
  /// Particle number and ε; one determines the other through ε = N^{-1/d}.
  double N = 0.0;
  double eps = 0.0;
  SteadySpec steady;
};

struct HartreeConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  int log_every = 10;
};

struct VlasovConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double mass = 0.5;
  int log_every = 10;
};

struct DiagnosticsConfig {
  double p = 6.0;
  double delta = 1.0 / 6.0;
  double tolerance = 0.05;
  /// Snapshot spacing for trajectory scans.
  double sample_every = 0.25;
};

struct SweepConfig {
  std::vector<double> eps;
  std::vector<double> t_star{0.25, 0.5, 1.0};
  int bootstrap = 2000;
};

struct RunConfig {
  std::uint64_t seed = 12345;
  int threads = 1;
  std::string out = "out";
};

struct ExperimentConfig {
  GridConfig grid;
  StateConfig state;
  KernelSpec kernel;
  HartreeConfig hartree;
  VlasovConfig vlasov;
  DiagnosticsConfig diagnostics;
  SweepConfig sweep;
  RunConfig run;
  /// Normalized key=value text of every section that was present, for hashing.
  std::map<std::string, std::string> sections;

  /// Checks every field and built-in name and the ε = N^{-1/d} relation
  /// (filling in whichever of N, ε was omitted). Throws ValidationError.
  void validate();
};

/// Parses INI text. Unknown sections or keys are rejected. Numbers accept
/// fractions such as 1/16; lists are comma separated.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text of the whole configuration (sections in fixed order).
std::string canonical_text(const ExperimentConfig& config);

double parse_number(const std::string& text);
std::vector<double> parse_list(const std::string& text);

}  // namespace mfvl
