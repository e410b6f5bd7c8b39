#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfvl/config.hpp"
#include "mfvl/hartree.hpp"
#include "mfvl/states.hpp"
#include "mfvl/transforms.hpp"
#include "mfvl/vlasov.hpp"

namespace mfvl {

/// Conjugate plan for ε on the grid rule of the config.
TransformPlan plan_for(const GridConfig& grid, double eps);

/// [state] kind coherent or fermi-sea at ε on the given grid.
LowRankState make_initial_state(const ExperimentConfig& config, const GridSpec& grid, double eps);

/// Hartree and Vlasov runs (kinetic mass 1/2) from ω and its Wigner
/// transform, sampled at the given times (multiples of both steps).
struct PairedTrajectory {
  TransformPlan plan;
  std::vector<double> times;
  std::vector<LowRankState> hartree;
  std::vector<PhaseSpaceField> vlasov;
  double max_trace_drift = 0.0;
  double max_mass_drift = 0.0;
};

/// Throws NumericalError if a solver check fails (Vlasov mass drift above
/// 1e-8, trace drift inside the Hartree run, or the fermionic bound).
PairedTrajectory paired_trajectory(const LowRankState& initial, const TransformPlan& plan, const KernelSpec& kernel,
                                   double dt_hartree, double dt_vlasov, const std::vector<double>& times);

struct StudySpec {
  double L = 8.0;
  double points_per_inverse_eps = 16.0;
  /// coherent or fermi-sea.
  std::string initial = "coherent";
  WeightFunction M;
  double delta = 0.0;
  KernelSpec kernel = KernelSpec::gaussian(1.0, 1.0, 0.5);
  double dt_hartree = 1e-3;
  double dt_vlasov = 1e-3;
  std::vector<double> eps{1.0 / 8, 1.0 / 16, 1.0 / 32};
  std::vector<double> t_star{0.25, 0.5, 1.0};
  int bootstrap = 2000;
  std::uint64_t seed = 12345;
};

StudySpec study_from_config(const ExperimentConfig& config);

struct StudyRow {
  double eps = 0.0;
  double N = 0.0;
  int n = 0;
  int rank = 0;
  double t = 0.0;
  double distance = 0.0;
  /// distance / N.
  double relative = 0.0;
  double trace_drift = 0.0;
  double mass_drift = 0.0;
};

struct StudyReport {
  std::vector<StudyRow> rows;
  std::vector<double> t_star;
  /// Log-log slope of relative distance vs ε, one per t* (NaN if undefined).
  std::vector<double> slopes;
  /// 95% bootstrap interval of the slope, resampling one t* per ε.
  double ci_low = 0.0;
  double ci_high = 0.0;
  /// Distance nondecreasing in t* within 10% for every ε (reported only).
  bool monotone_in_t = true;
  double seconds = 0.0;

  double slope_at(double t) const;
};

/// Hartree vs Vlasov trace distance at each t* for each ε; ε = N^{-1} (d = 1).
StudyReport convergence_study(const StudySpec& spec);

}  // namespace mfvl
