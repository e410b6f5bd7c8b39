#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "mfvl/kernel.hpp"
#include "mfvl/operators.hpp"
#include "mfvl/transforms.hpp"

namespace mfvl {

/// Radius ladder and centre lattice for the discrete maximal function.
struct MaximalOptions {
  /// Ball radii; empty selects {0} ∪ geometric h, 2h, ... up to L/2.
  std::vector<double> radii;
  /// Candidate centres are grid nodes within r of z on a sub-lattice with
  /// stride chosen so that at most this many offsets per axis are tried.
  /// Zero tries every node (exact over the ladder).
  int max_offsets_per_axis = 0;
};

struct MaximalField {
  Field values;
  std::vector<double> radii;
};

std::vector<double> default_radius_ladder(const GridSpec& grid);

/// ϱ*(z) = sup over ladder radii r and ball centres c with |z - c| <= r of
/// the node average of ϱ over B(c, r) (minimal-image distances). Radius 0
/// is the single node, so ϱ* >= ϱ.
MaximalField maximal_function(const Field& rho, const MaximalOptions& options = {});
/// The same supremum evaluated only at the given node indices.
std::vector<double> maximal_function_at(const Field& rho, const std::vector<std::size_t>& points,
                                        const MaximalOptions& options = {});

/// Node values of the indicator of the closed ball B(z, r).
Eigen::VectorXd ball_indicator(const GridSpec& grid, const std::array<double, 3>& z, double r);

struct LocalizedCommutatorReport {
  double delta = 1.0 / 6.0;
  std::vector<double> radii;
  std::vector<std::size_t> centres;
  /// lhs[iz][ir] = tr|[χ_(r,z), ω]|, rhs[iz][ir] the bound without constant.
  std::vector<std::vector<double>> lhs;
  std::vector<std::vector<double>> rhs;
  /// Per-axis ‖ϱ_{|[x_i, ω]|}‖_1.
  std::vector<double> commutator_l1;
  /// max lhs/rhs over the samples: the empirical constant.
  double max_ratio = 0.0;
  /// Least-squares slope of log lhs vs log r over radii <= fit_radius, per centre.
  std::vector<double> exponents;
  double min_exponent = 0.0;
};

/// tr|[χ_(r,z), ω]| against r^{3/2-3δ} Σ_i ‖ϱ_i‖_1^{1/6+δ} ϱ_i*(z)^{5/6-δ},
/// with ϱ_i the commutator density of [x_i, ω].
LocalizedCommutatorReport localized_commutator_check(const LowRankState& omega, double delta, const std::vector<double>& radii,
                            const std::vector<std::size_t>& centres, double fit_radius,
                            const MaximalOptions& maximal = {});
LocalizedCommutatorReport localized_commutator_check(const DenseOperator& omega, double delta, const std::vector<double>& radii,
                            const std::vector<std::size_t>& centres, double fit_radius,
                            const MaximalOptions& maximal = {});

struct ScAssumptionRow {
  double t = 0.0;
  std::vector<double> l1;
  std::vector<double> lp;
  /// Σ_i (‖ϱ_i‖_1 + ‖ϱ_i‖_p) / (N ε).
  double value = 0.0;
};

struct ScAssumptionReport {
  double p = 6.0;
  std::vector<ScAssumptionRow> rows;
  double sup = 0.0;
  /// (max - min) / min over the sampled values.
  double relative_variation = 0.0;
};

/// Commutator-density norms along a trajectory (p > 5). Snapshot ω̃_t are
/// given as dense kernels (d = 1) or low-rank states.
ScAssumptionReport sc_assumption_scan(const std::vector<DenseOperator>& trajectory, const std::vector<double>& times,
                                      double N, double eps, double p = 6.0);
ScAssumptionReport sc_assumption_scan(const std::vector<LowRankState>& trajectory, const std::vector<double>& times,
                                      double p = 6.0);

/// B(x; y) = [U(x) - U(y) - U'((x+y)/2) (x-y)] ω(x; y) with (x - y) the
/// minimal image and U' at the midpoint by trigonometric interpolation (d = 1).
DenseOperator taylor_remainder_operator(const Field& U, const DenseOperator& omega);
/// Same with U and U' given as functions, evaluated at the plain coordinates.
DenseOperator taylor_remainder_operator(const std::function<double(double)>& U,
                                        const std::function<double(double)>& dU, const DenseOperator& omega);

/// tr|B_t| for ω̃_t = weyl(f_t) and U_t = V * ϱ̃_t. Rejects plans that are
/// not conjugate or do not match f.
double bt_trace_norm(const PhaseSpaceField& f, const TransformPlan& plan, const KernelSpec& kernel);

/// N ε² (1 + Σ_{k=1}^{4} ε^k ‖f‖_{H^{k+2}_4}): the bound on tr|B_t| up to its constant.
double bt_bound(const PhaseSpaceField& f, const TransformPlan& plan);

struct GronwallRow {
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  /// Integrands ε^{-1} tr|[V*(ϱ - ϱ̃), ω̃]| and ε^{-1} tr|B| at this snapshot.
  double field_term = 0.0;
  double remainder_term = 0.0;
  bool holds = true;
};

struct GronwallReport {
  std::vector<GronwallRow> rows;
  double tolerance = 0.05;
  double floor = 0.0;
  bool holds = true;
  std::optional<double> violation_time;
};

/// tr|ω_t - ω̃_t| <= ε^{-1}∫_0^t (tr|[V*(ϱ_s - ϱ̃_s), ω̃_s]| + tr|B_s|) ds, with
/// the time integral by the trapezoid rule over the snapshots. A sample holds
/// if lhs <= rhs (1 + tolerance) + floor; the floor (default 1e-9 N) absorbs
/// round-off of the transform pair where both sides vanish.
GronwallReport gronwall_inequality_check(const std::vector<LowRankState>& hartree,
                                         const std::vector<PhaseSpaceField>& vlasov, const std::vector<double>& times,
                                         const TransformPlan& plan, const KernelSpec& kernel, double tolerance = 0.05,
                                         double floor = -1.0);

/// Throws InequalityViolation naming the first failing time.
void enforce(const GronwallReport& report);

/// Least-squares slope of log y against log x (pairs with y <= 0 are skipped).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mfvl
