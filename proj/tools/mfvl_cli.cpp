// mfvl: command line front end for the mean-field solvers and diagnostics.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mfvl/config.hpp"
#include "mfvl/coulomb.hpp"
#include "mfvl/diagnostics.hpp"
#include "mfvl/errors.hpp"
#include "mfvl/experiments.hpp"
#include "mfvl/hartree.hpp"
#include "mfvl/io.hpp"
#include "mfvl/manifest.hpp"
#include "mfvl/numerics.hpp"
#include "mfvl/runtime.hpp"
#include "mfvl/states.hpp"
#include "mfvl/vlasov.hpp"

namespace fs = std::filesystem;
using namespace mfvl;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
};

/// Loads the config (or defaults) and folds the global overrides into the
/// [run] section, so they are part of the config digest.
ExperimentConfig resolve_config(const GlobalOptions& g) {
  ExperimentConfig c = g.config.empty() ? parse_config("") : load_config(g.config);
  if (!g.out && !g.threads && !g.seed) return c;
  std::map<std::string, std::string> run;
  std::istringstream body(c.sections.count("run") ? c.sections.at("run") : "");
  for (std::string line; std::getline(body, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) run[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (g.out) run["out"] = *g.out;
  if (g.threads) run["threads"] = std::to_string(*g.threads);
  if (g.seed) run["seed"] = std::to_string(*g.seed);
  std::string text;
  for (const auto& [name, sec] : c.sections)
    if (name != "run") text += "[" + name + "]\n" + sec;
  text += "[run]\n";
  for (const auto& [k, v] : run) text += k + "=" + v + "\n";
  return parse_config(text);
}

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

struct Context {
  ExperimentConfig config;
  fs::path out;
  RunManifest manifest;
  Stopwatch clock;

  Context(ExperimentConfig c, const std::string& command)
      : config(std::move(c)), out(config.run.out), manifest(config, command) {
    fs::create_directories(out);
    set_thread_count(config.run.threads);
  }
  void stage(const std::string& name) { manifest.add_stage(name, clock.lap()); }
  fs::path output(const std::string& name) {
    manifest.add_output(out / name);
    return out / name;
  }
  void finish() {
    const fs::path p = manifest.write(out);
    std::cout << "manifest: " << p.string() << "\n";
  }
};

double state_eps(const ExperimentConfig& c) {
  require(c.state.eps > 0.0, "[state] needs N or eps");
  return c.state.eps;
}

int steps_for(double t_end, double dt) {
  const double k = t_end / dt;
  require(std::abs(k - std::round(k)) < 1e-9 * std::max(1.0, k), "t_end must be a multiple of dt");
  return static_cast<int>(std::lround(k));
}

std::vector<double> sample_times(double t_end, double every, double dt_a, double dt_b) {
  std::vector<double> t;
  const int count = static_cast<int>(std::floor(t_end / every + 1e-9));
  for (int i = 0; i <= count; ++i) t.push_back(i * every);
  if (t.back() < t_end - 1e-12) t.push_back(t_end);
  for (double x : t) {
    for (double dt : {dt_a, dt_b})
      require(std::abs(x / dt - std::round(x / dt)) < 1e-9, "sample times must be multiples of both time steps");
  }
  return t;
}

int cmd_fdl_verify(const GlobalOptions& g, const std::vector<double>& separations, const std::string& strategy) {
  Context ctx(resolve_config(g), "fdl-verify");
  FdlQuadrature q;
  if (strategy == "tensor-grid") q.z_strategy = ZStrategy::tensor_grid;
  else if (strategy == "monte-carlo") q.z_strategy = ZStrategy::monte_carlo;
  else require(strategy == "closed-form", "z strategy must be closed-form, tensor-grid or monte-carlo");
  q.seed = ctx.config.run.seed;
  CsvWriter csv(ctx.output("fdl.csv"), {"separation", "sharp", "sharp_residual", "sharp_error", "smooth",
                                        "smooth_residual", "smooth_error"});
  double worst_sharp = 0.0, worst_smooth = 0.0;
  for (double s : separations) {
    const Vec3 x{0.0, 0.0, 0.0};
    const Vec3 y{s, 0.0, 0.0};
    const FdlResult a = fdl_sharp(x, y, q);
    const FdlResult b = fdl_smooth(x, y, q);
    const double ea = std::abs(a.value * s - 1.0), eb = std::abs(b.value * s - 1.0);
    worst_sharp = std::max(worst_sharp, ea);
    worst_smooth = std::max(worst_smooth, eb);
    csv.row({s, a.value, a.residual, ea, b.value, b.residual, eb});
  }
  csv.close();
  ctx.stage("fdl");
  ctx.manifest.set("max_relative_error_sharp", worst_sharp);
  ctx.manifest.set("max_relative_error_smooth", worst_smooth);
  std::printf("sharp %.3e smooth %.3e\n", worst_sharp, worst_smooth);
  ctx.finish();
  return 0;
}

int cmd_make_state(const GlobalOptions& g) {
  Context ctx(resolve_config(g), "make-state");
  const auto& c = ctx.config;
  if (c.state.kind == "steady") {
    require(c.grid.d == 1, "steady states are built at d = 1");
    const double eps = state_eps(c);
    const TransformPlan plan = plan_for(c.grid, eps);
    const SteadyResult r = steady_state(c.state.steady, c.kernel, plan.xgrid, plan.vgrid);
    ctx.stage("steady");
    if (!r.converged) throw NumericalError("steady-state iteration did not converge");
    write_dump(ctx.output("steady.bin"), r.f);
    ctx.manifest.set("steady_residual", r.steady_residual);
    ctx.finish();
    return 0;
  }
  const double eps = state_eps(c);
  const GridSpec grid = c.grid.grid_for(eps);
  const LowRankState w = make_initial_state(c, grid, eps);
  ctx.stage("build");
  write_dump(ctx.output("state.bin"), w);
  ctx.manifest.set("trace", w.trace());
  ctx.manifest.set("rank", static_cast<double>(w.rank()));
  ctx.manifest.set("N", w.particles);
  ctx.manifest.set("eps", w.eps);
  ctx.manifest.set("max_occupation", w.occupations.maxCoeff());
  double comm = 0.0;
  for (int a = 0; a < grid.dim(); ++a) comm += commutator_trace_norm(w, a);
  ctx.manifest.set("commutator_trace_norm_over_N_eps", comm / (w.particles * eps));
  if (grid.dim() == 1) {
    const TransformPlan plan = TransformPlan::make(grid, eps);
    write_dump(ctx.output("wigner.bin"), wigner(w, plan));
  }
  ctx.stage("outputs");
  std::printf("rank %ld trace %.12g\n", static_cast<long>(w.rank()), w.trace());
  ctx.finish();
  return 0;
}

int cmd_evolve_hartree(const GlobalOptions& g) {
  Context ctx(resolve_config(g), "evolve-hartree");
  const auto& c = ctx.config;
  const double eps = state_eps(c);
  const LowRankState w = make_initial_state(c, c.grid.grid_for(eps), eps);
  ctx.stage("initial state");
  HartreeRun run(w, c.kernel, c.hartree.dt);
  run.advance(steps_for(c.hartree.t_end, c.hartree.dt), c.hartree.log_every);
  ctx.stage("evolve");
  CsvWriter csv(ctx.output("hartree_log.csv"), {"t", "trace", "kinetic", "potential", "energy",
                                                "orthonormality_defect", "min_occupation", "max_occupation"});
  double drift = 0.0;
  for (const auto& r : run.log()) {
    csv.row({r.t, r.trace, r.kinetic, r.potential, r.energy, r.orthonormality_defect, r.min_occupation,
             r.max_occupation});
    drift = std::max(drift, std::abs(r.energy - run.log().front().energy));
  }
  csv.close();
  write_dump(ctx.output("final_state.bin"), run.state());
  ctx.stage("outputs");
  ctx.manifest.set("energy_drift", drift);
  ctx.finish();
  return 0;
}

int cmd_evolve_vlasov(const GlobalOptions& g) {
  Context ctx(resolve_config(g), "evolve-vlasov");
  const auto& c = ctx.config;
  require(c.grid.d == 1, "the phase-space solver runs at d = 1");
  const double eps = state_eps(c);
  const TransformPlan plan = plan_for(c.grid, eps);
  PhaseSpaceField f0;
  KernelSpec kernel = c.kernel;
  if (c.state.kind == "steady") {
    SteadySpec s = c.state.steady;
    s.kinetic_mass = c.vlasov.mass;
    const SteadyResult r = steady_state(s, c.kernel, plan.xgrid, plan.vgrid);
    if (!r.converged) throw NumericalError("steady-state iteration did not converge");
    f0 = r.f;
    kernel = r.effective_kernel;
  } else {
    f0 = wigner(make_initial_state(c, plan.xgrid, eps), plan);
  }
  ctx.stage("initial state");
  VlasovRun run(f0, kernel, c.vlasov.dt, c.vlasov.mass);
  run.advance(steps_for(c.vlasov.t_end, c.vlasov.dt), c.vlasov.log_every);
  ctx.stage("evolve");
  CsvWriter csv(ctx.output("vlasov_log.csv"), {"t", "mass", "momentum", "kinetic", "potential", "energy", "l2", "sup_f", "sup_df", "sup_d2f"});
  for (const auto& r : run.log())
    csv.row({r.t, r.mass, r.momentum[0], r.kinetic, r.potential, r.energy, r.l2, r.derivative_sup[0],
             r.derivative_sup[1], r.derivative_sup[2]});
  csv.close();
  write_dump(ctx.output("final_f.bin"), run.f());
  ctx.stage("outputs");
  ctx.finish();
  return 0;
}

int cmd_steady_state(const GlobalOptions& g) {
  Context ctx(resolve_config(g), "steady-state");
  const auto& c = ctx.config;
  require(c.grid.d == 1, "steady states are built at d = 1");
  const TransformPlan plan = plan_for(c.grid, state_eps(c));
  SteadySpec s = c.state.steady;
  const SteadyResult r = steady_state(s, c.kernel, plan.xgrid, plan.vgrid);
  ctx.stage("iterate");
  ctx.manifest.set("converged", r.converged);
  ctx.manifest.set("iterations", static_cast<double>(r.iterations));
  ctx.manifest.set("fixed_point_residual", r.fixed_point_residual);
  if (!r.converged) {
    ctx.finish();
    throw NumericalError("steady-state iteration did not converge");
  }
  ctx.manifest.set("steady_residual", r.steady_residual);
  ctx.manifest.set("relative_residual", r.steady_residual / l2_norm(r.f));
  ctx.manifest.set("self_consistency_error", r.self_consistency_error);
  write_dump(ctx.output("steady.bin"), r.f);
  write_dump(ctx.output("potential.bin"), r.potential);
  ctx.stage("outputs");
  std::printf("converged in %d iterations, residual %.3e\n", r.iterations, r.steady_residual);
  ctx.finish();
  return 0;
}

int cmd_diagnose(const GlobalOptions& g, bool localized, bool no_enforce) {
  Context ctx(resolve_config(g), "diagnose");
  const auto& c = ctx.config;
  const double eps = state_eps(c);
  const GridSpec grid = c.grid.grid_for(eps);
  require(localized || grid.dim() == 1, "trajectory diagnostics run at d = 1; use --localized in higher dimension");

  if (localized) {
    // Rank-1 coherent projector at (q0, p0); a full superposition is too
    // large to canonicalize in d = 3.
    std::array<double, 3> q{}, p{};
    for (std::size_t a = 0; a < c.state.M.q0.size(); ++a) q[a] = c.state.M.q0[a];
    for (std::size_t a = 0; a < c.state.M.p0.size(); ++a) p[a] = c.state.M.p0[a];
    const double delta = c.state.delta > 0.0 ? c.state.delta : auto_delta(eps, grid);
    const LowRankState w = coherent_projector(grid, q.data(), p.data(), delta, eps);
    const double h = grid.spacing();
    std::vector<double> radii;
    for (double r = 2.0 * h; r <= 0.25 * grid.length(); r *= 1.25) radii.push_back(r);
    std::array<int, 3> mid{grid.points() / 2, grid.dim() > 1 ? grid.points() / 2 : 0,
                           grid.dim() > 2 ? grid.points() / 2 : 0};
    MaximalOptions mo;
    mo.max_offsets_per_axis = 9;
    const LocalizedCommutatorReport rep = localized_commutator_check(w, c.diagnostics.delta, radii, {grid.ravel(mid)}, 0.5, mo);
    CsvWriter csv(ctx.output("localized.csv"), {"r", "lhs", "rhs"});
    for (std::size_t i = 0; i < radii.size(); ++i) csv.row({radii[i], rep.lhs[0][i], rep.rhs[0][i]});
    csv.close();
    ctx.manifest.set("localized_min_exponent", rep.min_exponent);
    ctx.manifest.set("localized_max_ratio", rep.max_ratio);
    ctx.stage("localized commutator");
    std::printf("localized commutator exponent %.3f, max ratio %.3f\n", rep.min_exponent, rep.max_ratio);
    if (grid.dim() != 1) {
      ctx.finish();
      return 0;
    }
  }

  const LowRankState w = make_initial_state(c, grid, eps);
  ctx.stage("initial state");
  const TransformPlan plan = TransformPlan::make(grid, eps);
  const auto times = sample_times(c.hartree.t_end, c.diagnostics.sample_every, c.hartree.dt, c.vlasov.dt);
  const PairedTrajectory tr = paired_trajectory(w, plan, c.kernel, c.hartree.dt, c.vlasov.dt, times);
  ctx.stage("trajectories");

  const GronwallReport gr =
      gronwall_inequality_check(tr.hartree, tr.vlasov, times, plan, c.kernel, c.diagnostics.tolerance);
  std::vector<DenseOperator> weyl_traj;
  for (const auto& f : tr.vlasov) weyl_traj.push_back(weyl(f, plan));
  const ScAssumptionReport sc = sc_assumption_scan(weyl_traj, times, plan.N, eps, c.diagnostics.p);
  CsvWriter csv(ctx.output("diagnostics.csv"),
                {"t", "trace_distance", "gronwall_rhs", "field_term", "remainder_term", "holds", "sc_value",
                 "bt_trace_norm", "bt_bound"});
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto& row = gr.rows[k];
    csv.row({row.t, row.lhs, row.rhs, row.field_term, row.remainder_term, row.holds ? 1.0 : 0.0, sc.rows[k].value,
             bt_trace_norm(tr.vlasov[k], plan, c.kernel), bt_bound(tr.vlasov[k], plan)});
  }
  csv.close();
  ctx.stage("diagnostics");
  ctx.manifest.set("gronwall_holds", gr.holds);
  ctx.manifest.set("sc_sup", sc.sup);
  ctx.manifest.set("sc_relative_variation", sc.relative_variation);
  ctx.manifest.set("max_trace_drift", tr.max_trace_drift);
  ctx.finish();
  std::printf("gronwall %s, sc sup %.4g\n", gr.holds ? "holds" : "VIOLATED", sc.sup);
  if (!no_enforce) enforce(gr);
  return 0;
}

/// Low-rank d = 3 Coulomb Hartree run of displaced Gaussian orbitals, logged
/// for conservation and the commutator norm. No trace distance is formed.
void coulomb_companion(Context& ctx, int n, double t_end) {
  const GridSpec grid(3, n, 8.0);
  const int K = 8;
  MatrixXc u(static_cast<Eigen::Index>(grid.size()), K);
  for (int k = 0; k < K; ++k) {
    const double c[3] = {(k & 1 ? 0.8 : -0.8), (k & 2 ? 0.8 : -0.8), (k & 4 ? 0.8 : -0.8)};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto x = grid.position(i);
      double r2 = 0.0;
      for (int a = 0; a < 3; ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
      u(static_cast<Eigen::Index>(i), k) = std::polar(std::exp(-r2 / 1.2), 0.3 * x[0]);
    }
  }
  Eigen::HouseholderQR<MatrixXc> qr(u);
  LowRankState w;
  w.grid = grid;
  w.particles = K;
  w.eps = std::pow(static_cast<double>(K), -1.0 / 3.0);
  w.orbitals = qr.householderQ() * MatrixXc::Identity(u.rows(), K) / std::sqrt(grid.cell_volume());
  w.occupations = Eigen::VectorXd::Ones(K);
  const double dt = 1e-2;
  HartreeRun run(w, KernelSpec::coulomb(1.0), dt);
  CsvWriter csv(ctx.output("coulomb_companion.csv"), {"t", "trace", "energy", "commutator_over_N_eps"});
  const int steps = steps_for(t_end, dt);
  for (int s = 0; s <= steps; ++s) {
    if (s > 0) run.step();
    if (s % 10 == 0 || s == steps) {
      double comm = 0.0;
      for (int a = 0; a < 3; ++a) comm += commutator_trace_norm(run.state(), a);
      csv.row({run.time(), run.state().trace(), hartree_energy(run.state(), run.kernel()).total(),
               comm / (w.particles * w.eps)});
    }
  }
  csv.close();
  ctx.stage("coulomb companion");
}

int cmd_compare(const GlobalOptions& g, bool companion, int companion_n) {
  Context ctx(resolve_config(g), "compare");
  const StudySpec spec = study_from_config(ctx.config);
  const StudyReport rep = convergence_study(spec);
  ctx.stage("study");
  CsvWriter csv(ctx.output("study.csv"),
                {"eps", "N", "n", "rank", "t", "distance", "relative", "trace_drift", "mass_drift"});
  for (const auto& r : rep.rows)
    csv.row({r.eps, r.N, static_cast<double>(r.n), static_cast<double>(r.rank), r.t, r.distance, r.relative,
             r.trace_drift, r.mass_drift});
  csv.close();
  CsvWriter slopes(ctx.output("slopes.csv"), {"t_star", "slope"});
  for (std::size_t i = 0; i < rep.t_star.size(); ++i) slopes.row({rep.t_star[i], rep.slopes[i]});
  slopes.close();
  ctx.manifest.set("ci_low", rep.ci_low);
  ctx.manifest.set("ci_high", rep.ci_high);
  ctx.manifest.set("monotone_in_t", rep.monotone_in_t);
  for (std::size_t i = 0; i < rep.t_star.size(); ++i)
    std::printf("t* = %g  slope %.4f\n", rep.t_star[i], rep.slopes[i]);
  std::printf("bootstrap 95%% interval [%.3f, %.3f]\n", rep.ci_low, rep.ci_high);
  if (companion) coulomb_companion(ctx, companion_n, 0.2);
  ctx.finish();
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Mean-field Hartree and Vlasov solvers with semiclassical diagnostics"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option_function<std::string>("--out", [&](const std::string& v) { g.out = v; }, "Output directory");
  app.add_option_function<int>("--threads", [&](const int& v) { g.threads = v; }, "BLAS thread count")
      ->check(CLI::PositiveNumber);
  app.add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { g.seed = v; }, "Random seed");

  std::function<int()> action;

  auto* fdl = app.add_subcommand("fdl-verify", "Check the sphere and Gaussian overlap representations of 1/|x-y|");
  std::vector<double> separations{0.25, 0.5, 1.0, 2.0, 4.0};
  std::string strategy = "closed-form";
  fdl->add_option("--separations", separations, "Separations |x - y|")->delimiter(',');
  fdl->add_option("--z-strategy", strategy, "closed-form, tensor-grid or monte-carlo");
  fdl->callback([&] { action = [&] { return cmd_fdl_verify(g, separations, strategy); }; });

  app.add_subcommand("make-state", "Build the [state] initial datum and dump it")->callback([&] {
    action = [&] { return cmd_make_state(g); };
  });
  app.add_subcommand("evolve-hartree", "Evolve the Hartree equation")->callback([&] {
    action = [&] { return cmd_evolve_hartree(g); };
  });
  app.add_subcommand("evolve-vlasov", "Evolve the Vlasov equation (d = 1)")->callback([&] {
    action = [&] { return cmd_evolve_vlasov(g); };
  });
  app.add_subcommand("steady-state", "Solve for an attractive steady state")->callback([&] {
    action = [&] { return cmd_steady_state(g); };
  });

  auto* diag = app.add_subcommand(
      "diagnose", "Gronwall inequality, commutator scan and remainder norms (d = 1); localized commutator check");
  bool localized = false, no_enforce = false;
  diag->add_flag("--localized", localized, "Run the localized commutator check on the coherent projector at (q0, p0)");
  diag->add_flag("--no-enforce", no_enforce, "Report an inequality violation without failing");
  diag->callback([&] { action = [&] { return cmd_diagnose(g, localized, no_enforce); }; });

  auto* cmp = app.add_subcommand("compare", "Hartree vs Vlasov convergence-rate study over the [sweep] eps values");
  bool companion = true;
  int companion_n = 32;
  cmp->add_flag("--coulomb-companion,!--no-coulomb-companion", companion, "Run the d = 3 Coulomb companion");
  cmp->add_option("--companion-n", companion_n, "Points per axis of the companion grid");
  cmp->callback([&] { action = [&] { return cmd_compare(g, companion, companion_n); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return action();
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const InequalityViolation& e) {
    std::cerr << "inequality violated: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
