#include "mfvl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "mfvl/errors.hpp"
#include "mfvl/fft.hpp"
#include "mfvl/hartree.hpp"
#include "mfvl/numerics.hpp"
#include "mfvl/vlasov.hpp"

namespace mfvl {

namespace {

using Offset = std::array<int, 3>;

/// Lattice offsets m (mod n) with |minimal image of m h| <= r, optionally on
/// a sub-lattice of the given stride. The zero offset is always included.
std::vector<Offset> ball_offsets(const GridSpec& g, double r, int stride) {
  const int n = g.points();
  const double h = g.spacing();
  const int d = g.dim();
  const int reach = std::min(static_cast<int>(std::floor(r / h + 1e-9)), n / 2);
  std::set<Offset> seen;
  std::vector<Offset> out;
  Offset m{0, 0, 0};
  const int lo = -reach;
  const int hi = reach;
  std::array<int, 3> lo_a{lo, d > 1 ? lo : 0, d > 2 ? lo : 0};
  std::array<int, 3> hi_a{hi, d > 1 ? hi : 0, d > 2 ? hi : 0};
  for (m[0] = lo_a[0]; m[0] <= hi_a[0]; ++m[0]) {
    for (m[1] = lo_a[1]; m[1] <= hi_a[1]; ++m[1]) {
      for (m[2] = lo_a[2]; m[2] <= hi_a[2]; ++m[2]) {
        bool on_lattice = true;
        for (int a = 0; a < d; ++a) on_lattice = on_lattice && (m[a] % stride == 0);
        if (!on_lattice) continue;
        double dist2 = 0.0;
        Offset wrapped{0, 0, 0};
        for (int a = 0; a < d; ++a) {
          const double s = minimal_image(m[a] * h, g.length());
          dist2 += s * s;
          wrapped[a] = ((m[a] % n) + n) % n;
        }
        if (dist2 > r * r * (1.0 + 1e-12)) continue;
        if (seen.insert(wrapped).second) out.push_back(wrapped);
      }
    }
  }
  return out;
}

std::size_t shift_index(const GridSpec& g, std::size_t flat, const Offset& m) {
  auto idx = g.unravel(flat);
  for (int a = 0; a < g.dim(); ++a) idx[a] += m[a];
  return g.ravel(idx);
}

/// Ball averages of rho at every centre for one radius (circular convolution).
Field ball_average(const Field& rho, double r) {
  const GridSpec& g = rho.grid;
  const auto offs = ball_offsets(g, r, 1);
  if (offs.size() == 1) return rho;
  ComplexField stencil(g);
  for (const auto& m : offs) stencil[g.ravel(m)] = 1.0;
  ComplexField z = to_complex(rho);
  fft_forward(z.values, g);
  fft_forward(stencil.values, g);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] *= stencil[i];
  fft_backward(z.values, g);
  Field out = real_part(z);
  for (auto& v : out.values) v /= static_cast<double>(offs.size());
  return out;
}

int centre_stride(const GridSpec& g, double r, int max_offsets) {
  if (max_offsets <= 0) return 1;
  const int span = 2 * std::min(static_cast<int>(std::floor(r / g.spacing() + 1e-9)), g.points() / 2) + 1;
  return std::max(1, (span + max_offsets - 1) / max_offsets);
}

double rhs_factor(const std::vector<double>& l1, const std::vector<double>& star, double delta) {
  double s = 0.0;
  for (std::size_t i = 0; i < l1.size(); ++i) {
    s += std::pow(l1[i], 1.0 / 6.0 + delta) * std::pow(std::max(star[i], 0.0), 5.0 / 6.0 - delta);
  }
  return s;
}

template <class CommutatorNorm>
LocalizedCommutatorReport localized_commutator_common(const GridSpec& grid, const std::vector<Field>& densities, double delta,
                             const std::vector<double>& radii, const std::vector<std::size_t>& centres,
                             double fit_radius, const MaximalOptions& maximal, CommutatorNorm&& lhs_at) {
  require(delta > 0.0 && delta < 0.5, "delta must lie in (0, 1/2)");
  require(!radii.empty() && !centres.empty(), "localized commutator check needs radii and centres");
  LocalizedCommutatorReport rep;
  rep.delta = delta;
  rep.radii = radii;
  rep.centres = centres;
  std::vector<std::vector<double>> star;
  for (const auto& rho : densities) {
    rep.commutator_l1.push_back(integral(rho));
    star.push_back(maximal_function_at(rho, centres, maximal));
  }
  rep.min_exponent = std::numeric_limits<double>::infinity();
  for (std::size_t iz = 0; iz < centres.size(); ++iz) {
    const auto z = grid.position(centres[iz]);
    std::vector<double> sz;
    for (const auto& s : star) sz.push_back(s[iz]);
    const double factor = rhs_factor(rep.commutator_l1, sz, delta);
    std::vector<double> lhs_row, rhs_row, fit_r, fit_l;
    for (double r : radii) {
      const double l = lhs_at(ball_indicator(grid, z, r));
      const double b = std::pow(r, 1.5 - 3.0 * delta) * factor;
      lhs_row.push_back(l);
      rhs_row.push_back(b);
      if (b > 0.0) rep.max_ratio = std::max(rep.max_ratio, l / b);
      if (r <= fit_radius && r > 0.0) {
        fit_r.push_back(r);
        fit_l.push_back(l);
      }
    }
    const double e = fit_r.size() >= 2 ? loglog_slope(fit_r, fit_l) : std::numeric_limits<double>::quiet_NaN();
    rep.exponents.push_back(e);
    if (std::isfinite(e)) rep.min_exponent = std::min(rep.min_exponent, e);
    rep.lhs.push_back(std::move(lhs_row));
    rep.rhs.push_back(std::move(rhs_row));
  }
  return rep;
}

DenseOperator multiplication_commutator(const DenseOperator& omega, const Eigen::VectorXd& g) {
  DenseOperator c;
  c.grid = omega.grid;
  c.hermitian = true;
  c.kernel.resize(omega.kernel.rows(), omega.kernel.cols());
  for (Eigen::Index j = 0; j < c.kernel.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.kernel.rows(); ++i) c.kernel(i, j) = cplx(0.0, g[i] - g[j]) * omega.kernel(i, j);
  }
  return c;
}

ScAssumptionReport finish_scan(std::vector<ScAssumptionRow> rows, double p) {
  ScAssumptionReport rep;
  rep.p = p;
  rep.rows = std::move(rows);
  if (rep.rows.empty()) return rep;
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& r : rep.rows) {
    rep.sup = std::max(rep.sup, r.value);
    lo = std::min(lo, r.value);
  }
  rep.relative_variation = lo > 0.0 ? (rep.sup - lo) / lo : 0.0;
  return rep;
}

ScAssumptionRow scan_row(double t, const std::vector<Field>& densities, double N, double eps, double p) {
  ScAssumptionRow row;
  row.t = t;
  for (const auto& rho : densities) {
    row.l1.push_back(lp_norm(rho, 1.0));
    row.lp.push_back(lp_norm(rho, p));
    row.value += row.l1.back() + row.lp.back();
  }
  row.value /= N * eps;
  return row;
}

void require_1d_plan(const PhaseSpaceField& f, const TransformPlan& plan) {
  plan.validate();
  require(plan.xgrid.dim() == 1, "the remainder operator is assembled for d = 1");
  require(f.xgrid == plan.xgrid && f.vgrid == plan.vgrid, "phase-space field does not live on the plan grids");
}

}  // namespace

std::vector<double> default_radius_ladder(const GridSpec& grid) {
  std::vector<double> r{0.0};
  for (double x = grid.spacing(); x <= 0.5 * grid.length() * (1.0 + 1e-12); x *= 2.0) r.push_back(x);
  return r;
}

std::vector<double> maximal_function_at(const Field& rho, const std::vector<std::size_t>& points,
                                        const MaximalOptions& options) {
  const GridSpec& g = rho.grid;
  for (double v : rho.values) require(v >= -1e-12, "maximal function needs a non-negative density");
  const auto radii = options.radii.empty() ? default_radius_ladder(g) : options.radii;
  std::vector<double> out(points.size(), -std::numeric_limits<double>::infinity());
  for (double r : radii) {
    require(r >= 0.0, "radii must be non-negative");
    const Field avg = ball_average(rho, r);
    const auto centres = ball_offsets(g, r, centre_stride(g, r, options.max_offsets_per_axis));
    for (std::size_t k = 0; k < points.size(); ++k) {
      require(points[k] < g.size(), "point index out of range");
      for (const auto& m : centres) out[k] = std::max(out[k], avg[shift_index(g, points[k], m)]);
    }
  }
  return out;
}

MaximalField maximal_function(const Field& rho, const MaximalOptions& options) {
  std::vector<std::size_t> all(rho.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  MaximalField m;
  m.radii = options.radii.empty() ? default_radius_ladder(rho.grid) : options.radii;
  m.values = Field(rho.grid, maximal_function_at(rho, all, options));
  return m;
}

Eigen::VectorXd ball_indicator(const GridSpec& grid, const std::array<double, 3>& z, double r) {
  Eigen::VectorXd chi(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.position(i);
    double d2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double s = minimal_image(x[a] - z[a], grid.length());
      d2 += s * s;
    }
    chi[static_cast<Eigen::Index>(i)] = d2 <= r * r * (1.0 + 1e-12) ? 1.0 : 0.0;
  }
  return chi;
}

LocalizedCommutatorReport localized_commutator_check(const LowRankState& omega, double delta, const std::vector<double>& radii,
                            const std::vector<std::size_t>& centres, double fit_radius,
                            const MaximalOptions& maximal) {
  std::vector<Field> dens;
  for (int a = 0; a < omega.grid.dim(); ++a) dens.push_back(commutator_density(omega, a));
  return localized_commutator_common(omega.grid, dens, delta, radii, centres, fit_radius, maximal, [&](const Eigen::VectorXd& chi) {
    return multiplication_commutator_spectrum(omega, chi).values.cwiseAbs().sum();
  });
}

LocalizedCommutatorReport localized_commutator_check(const DenseOperator& omega, double delta, const std::vector<double>& radii,
                            const std::vector<std::size_t>& centres, double fit_radius,
                            const MaximalOptions& maximal) {
  std::vector<Field> dens;
  for (int a = 0; a < omega.grid.dim(); ++a) dens.push_back(commutator_density(omega, a));
  return localized_commutator_common(omega.grid, dens, delta, radii, centres, fit_radius, maximal, [&](const Eigen::VectorXd& chi) {
    return trace_norm(multiplication_commutator(omega, chi)).value;
  });
}

ScAssumptionReport sc_assumption_scan(const std::vector<DenseOperator>& trajectory, const std::vector<double>& times,
                                      double N, double eps, double p) {
  require(p > 5.0, "the commutator-density exponent must exceed 5");
  require(trajectory.size() == times.size(), "one time per snapshot is required");
  std::vector<ScAssumptionRow> rows;
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    std::vector<Field> dens;
    for (int a = 0; a < trajectory[k].grid.dim(); ++a) dens.push_back(commutator_density(trajectory[k], a));
    rows.push_back(scan_row(times[k], dens, N, eps, p));
  }
  return finish_scan(std::move(rows), p);
}

ScAssumptionReport sc_assumption_scan(const std::vector<LowRankState>& trajectory, const std::vector<double>& times,
                                      double p) {
  require(p > 5.0, "the commutator-density exponent must exceed 5");
  require(trajectory.size() == times.size(), "one time per snapshot is required");
  std::vector<ScAssumptionRow> rows;
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    std::vector<Field> dens;
    for (int a = 0; a < trajectory[k].grid.dim(); ++a) dens.push_back(commutator_density(trajectory[k], a));
    rows.push_back(scan_row(times[k], dens, trajectory[k].particles, trajectory[k].eps, p));
  }
  return finish_scan(std::move(rows), p);
}

DenseOperator taylor_remainder_operator(const Field& U, const DenseOperator& omega) {
  require(U.grid == omega.grid && U.grid.dim() == 1, "remainder operator needs matching d = 1 grids");
  const int n = U.grid.points();
  const double h = U.grid.spacing();
  const double L = U.grid.length();
  const Eigen::MatrixXd mid = midpoint_values(spectral_gradient(U, 0));
  DenseOperator b;
  b.grid = omega.grid;
  b.kernel.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double s = minimal_image((i - j) * h, L);
      b.kernel(i, j) = (U[i] - U[j] - mid(i, j) * s) * omega.kernel(i, j);
    }
  }
  return b;
}

DenseOperator taylor_remainder_operator(const std::function<double(double)>& U,
                                        const std::function<double(double)>& dU, const DenseOperator& omega) {
  require(omega.grid.dim() == 1, "remainder operator is assembled for d = 1");
  const int n = omega.grid.points();
  DenseOperator b;
  b.grid = omega.grid;
  b.kernel.resize(n, n);
  for (int j = 0; j < n; ++j) {
    const double y = omega.grid.node(j);
    for (int i = 0; i < n; ++i) {
      const double x = omega.grid.node(i);
      b.kernel(i, j) = (U(x) - U(y) - dU(0.5 * (x + y)) * (x - y)) * omega.kernel(i, j);
    }
  }
  return b;
}

double bt_trace_norm(const PhaseSpaceField& f, const TransformPlan& plan, const KernelSpec& kernel) {
  require_1d_plan(f, plan);
  const DenseOperator omega = weyl(f, plan);
  DenseOperator b = taylor_remainder_operator(vlasov_potential(f, kernel), omega);
  // B is anti-hermitian; iB is hermitian.
  b.kernel *= cplx(0.0, 1.0);
  b.hermitian = true;
  return trace_norm(b).value;
}

double bt_bound(const PhaseSpaceField& f, const TransformPlan& plan) {
  require_1d_plan(f, plan);
  double s = 1.0;
  for (int k = 1; k <= 4; ++k) s += std::pow(plan.eps, k) * sobolev_norm(f, k + 2, 4);
  return plan.N * plan.eps * plan.eps * s;
}

GronwallReport gronwall_inequality_check(const std::vector<LowRankState>& hartree,
                                         const std::vector<PhaseSpaceField>& vlasov, const std::vector<double>& times,
                                         const TransformPlan& plan, const KernelSpec& kernel, double tolerance,
                                         double floor) {
  require(hartree.size() == vlasov.size() && vlasov.size() == times.size() && !times.empty(),
          "Gronwall check needs matching, non-empty snapshot lists");
  require(tolerance >= 0.0, "tolerance must be non-negative");
  for (std::size_t k = 1; k < times.size(); ++k) require(times[k] > times[k - 1], "snapshot times must increase");
  GronwallReport rep;
  rep.tolerance = tolerance;
  rep.floor = floor >= 0.0 ? floor : 1e-9 * plan.N;
  double integral_so_far = 0.0;
  double previous = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    require_1d_plan(vlasov[k], plan);
    require(hartree[k].grid == plan.xgrid, "Hartree snapshot grid does not match the plan");
    const DenseOperator omega_t = weyl(vlasov[k], plan);
    GronwallRow row;
    row.t = times[k];
    row.lhs = trace_distance(hartree[k], omega_t);

    Field diff = normalized_density(hartree[k]);
    const Field rho_v = spatial_density(vlasov[k]);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= rho_v[i];
    const Field u = spectral_poisson(diff, kernel);
    Eigen::VectorXd uv(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) uv[static_cast<Eigen::Index>(i)] = u[i];
    row.field_term = trace_norm(multiplication_commutator(omega_t, uv)).value / plan.eps;

    DenseOperator b = taylor_remainder_operator(vlasov_potential(vlasov[k], kernel), omega_t);
    b.kernel *= cplx(0.0, 1.0);
    b.hermitian = true;
    row.remainder_term = trace_norm(b).value / plan.eps;

    const double integrand = row.field_term + row.remainder_term;
    if (k > 0) integral_so_far += 0.5 * (times[k] - times[k - 1]) * (integrand + previous);
    previous = integrand;
    row.rhs = integral_so_far;
    row.holds = row.lhs <= row.rhs * (1.0 + tolerance) + rep.floor;
    if (!row.holds && !rep.violation_time) rep.violation_time = row.t;
    rep.holds = rep.holds && row.holds;
    rep.rows.push_back(row);
  }
  return rep;
}

void enforce(const GronwallReport& report) {
  if (report.holds) return;
  std::ostringstream msg;
  msg << "trace-distance inequality violated at t = " << *report.violation_time;
  throw InequalityViolation(msg.str());
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "slope fit needs paired samples");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  require(m >= 2, "slope fit needs at least two positive samples");
  const double den = m * sxx - sx * sx;
  require(den > 0.0, "slope fit needs distinct abscissae");
  return (m * sxy - sx * sy) / den;
}

}  // namespace mfvl
