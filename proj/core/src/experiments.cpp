#include "mfvl/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "mfvl/diagnostics.hpp"
#include "mfvl/errors.hpp"
#include "mfvl/numerics.hpp"

namespace mfvl {

namespace {

int steps_between(double from, double to, double dt) {
  const double k = (to - from) / dt;
  const long r = std::lround(k);
  if (std::abs(k - static_cast<double>(r)) > 1e-6 || r < 0) {
    std::ostringstream msg;
    msg << "sample time " << to << " is not reachable from " << from << " in steps of " << dt;
    throw ValidationError(msg.str());
  }
  return static_cast<int>(r);
}

}  // namespace

TransformPlan plan_for(const GridConfig& grid, double eps) { return TransformPlan::make(grid.grid_for(eps), eps); }

LowRankState make_initial_state(const ExperimentConfig& config, const GridSpec& grid, double eps) {
  const auto& s = config.state;
  if (s.kind == "fermi-sea") {
    const double N = std::pow(eps, -grid.dim());
    require(std::abs(N - std::round(N)) < 1e-9, "a fermi sea needs an integer N = eps^(-d)");
    FermiSeaResult fs = fermi_sea(grid, static_cast<int>(std::lround(N)));
    if (fs.tie_broken) warn("fermi sea: ties at the Fermi surface broken by lexicographic order");
    return fs.state;
  }
  require(s.kind == "coherent", "[state] kind '" + s.kind + "' does not define an operator initial state");
  CoherentSpec cs;
  cs.M = s.M;
  cs.eps = eps;
  cs.delta = s.delta;
  cs.dq = s.dq;
  cs.dp = s.dp;
  CoherentResult r = coherent_superposition(cs, grid);
  if (r.required_single_weight > 0.0) {
    std::ostringstream msg;
    msg << "single-node weight function: returning the normalized projector; tr = N needs weight "
        << r.required_single_weight;
    warn(msg.str());
  }
  return r.state;
}

PairedTrajectory paired_trajectory(const LowRankState& initial, const TransformPlan& plan, const KernelSpec& kernel,
                                   double dt_hartree, double dt_vlasov, const std::vector<double>& times) {
  require(initial.grid == plan.xgrid, "initial state is not on the plan grid");
  initial.validate();
  PairedTrajectory tr;
  tr.plan = plan;
  HartreeRun hr(initial, kernel, dt_hartree);
  VlasovRun vr(wigner(initial, plan), kernel, dt_vlasov, kHartreeMatchedMass);
  const double m0 = mass(vr.f());
  double t = 0.0;
  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  for (double ts : sorted) {
    hr.advance(steps_between(t, ts, dt_hartree), 0);
    vr.advance(steps_between(t, ts, dt_vlasov), 0);
    t = ts;
    tr.max_trace_drift = std::max(tr.max_trace_drift, std::abs(hr.state().trace() - initial.trace()));
    const double drift = std::abs(mass(vr.f()) - m0) / std::max(std::abs(m0), 1e-300);
    tr.max_mass_drift = std::max(tr.max_mass_drift, drift);
    if (drift > 1e-8) {
      std::ostringstream msg;
      msg << "Vlasov mass drift " << drift << " at t = " << ts;
      throw NumericalError(msg.str());
    }
    hr.state().validate();
    tr.times.push_back(ts);
    tr.hartree.push_back(hr.state());
    tr.vlasov.push_back(vr.f());
  }
  return tr;
}

StudySpec study_from_config(const ExperimentConfig& config) {
  require(config.grid.d == 1, "the convergence study runs at d = 1");
  StudySpec s;
  s.L = config.grid.L;
  if (config.grid.points_per_inverse_eps > 0.0) s.points_per_inverse_eps = config.grid.points_per_inverse_eps;
  s.initial = config.state.kind;
  s.M = config.state.M;
  s.delta = config.state.delta;
  s.kernel = config.kernel;
  s.dt_hartree = config.hartree.dt;
  s.dt_vlasov = config.vlasov.dt;
  if (!config.sweep.eps.empty()) s.eps = config.sweep.eps;
  s.t_star = config.sweep.t_star;
  s.bootstrap = config.sweep.bootstrap;
  s.seed = config.run.seed;
  return s;
}

double StudyReport::slope_at(double t) const {
  for (std::size_t i = 0; i < t_star.size(); ++i) {
    if (std::abs(t_star[i] - t) < 1e-12) return slopes[i];
  }
  throw ValidationError("no slope recorded for that t*");
}

StudyReport convergence_study(const StudySpec& spec) {
  require(spec.eps.size() >= 2, "the convergence study needs at least two eps values");
  require(!spec.t_star.empty(), "the convergence study needs at least one t*");
  require(spec.initial == "coherent" || spec.initial == "fermi-sea", "study initial state must be coherent or fermi-sea");
  const auto start = std::chrono::steady_clock::now();
  StudyReport rep;
  rep.t_star = spec.t_star;
  std::sort(rep.t_star.begin(), rep.t_star.end());

  ExperimentConfig cfg;
  cfg.grid.L = spec.L;
  cfg.grid.points_per_inverse_eps = spec.points_per_inverse_eps;
  cfg.state.kind = spec.initial;
  cfg.state.M = spec.M;
  cfg.state.delta = spec.delta;

  // relative[ie][it]
  std::vector<std::vector<double>> relative(spec.eps.size());
  for (std::size_t ie = 0; ie < spec.eps.size(); ++ie) {
    const double eps = spec.eps[ie];
    const TransformPlan plan = plan_for(cfg.grid, eps);
    const LowRankState omega0 = make_initial_state(cfg, plan.xgrid, eps);
    const PairedTrajectory tr = paired_trajectory(omega0, plan, spec.kernel, spec.dt_hartree, spec.dt_vlasov, rep.t_star);
    for (std::size_t it = 0; it < tr.times.size(); ++it) {
      StudyRow row;
      row.eps = eps;
      row.N = plan.N;
      row.n = plan.xgrid.points();
      row.rank = static_cast<int>(omega0.rank());
      row.t = tr.times[it];
      row.distance = trace_distance(tr.hartree[it], weyl(tr.vlasov[it], plan));
      row.relative = row.distance / plan.N;
      row.trace_drift = tr.max_trace_drift;
      row.mass_drift = tr.max_mass_drift;
      relative[ie].push_back(row.relative);
      rep.rows.push_back(row);
    }
    for (std::size_t it = 1; it < relative[ie].size(); ++it) {
      if (relative[ie][it] < 0.9 * relative[ie][it - 1]) rep.monotone_in_t = false;
    }
  }

  for (std::size_t it = 0; it < rep.t_star.size(); ++it) {
    std::vector<double> y;
    for (const auto& r : relative) y.push_back(r[it]);
    double s = std::numeric_limits<double>::quiet_NaN();
    try {
      s = loglog_slope(spec.eps, y);
    } catch (const ValidationError&) {
    }
    rep.slopes.push_back(s);
  }

  if (spec.bootstrap > 0) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<std::size_t> pick(0, rep.t_star.size() - 1);
    std::vector<double> samples;
    std::vector<double> y(spec.eps.size());
    for (int b = 0; b < spec.bootstrap; ++b) {
      for (std::size_t ie = 0; ie < spec.eps.size(); ++ie) y[ie] = relative[ie][pick(rng)];
      try {
        samples.push_back(loglog_slope(spec.eps, y));
      } catch (const ValidationError&) {
      }
    }
    if (!samples.empty()) {
      std::sort(samples.begin(), samples.end());
      const auto at = [&](double q) {
        const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(samples.size() - 1)));
        return samples[k];
      };
      rep.ci_low = at(0.025);
      rep.ci_high = at(0.975);
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace mfvl
