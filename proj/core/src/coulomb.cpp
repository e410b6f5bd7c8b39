#include "mfvl/coulomb.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mfvl/errors.hpp"
#include "mfvl/fft.hpp"

namespace mfvl {

namespace {

constexpr double kPi = std::numbers::pi;

double distance(const Vec3& a, const Vec3& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

Vec3 midpoint(const Vec3& a, const Vec3& b) { return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])}; }

/// Numerical z-integral of `integrand` over the cube of half-width `half`
/// around `centre`.
template <class F>
double box_integral(const Vec3& centre, double half, const FdlQuadrature& quad, std::uint64_t stream, F&& integrand) {
  const double volume = std::pow(2.0 * half, 3);
  if (quad.z_strategy == ZStrategy::monte_carlo) {
    require(quad.mc_samples > 0, "Monte Carlo z-integration needs samples");
    std::mt19937_64 rng(quad.seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
    std::uniform_real_distribution<double> u(-half, half);
    double s = 0.0;
    for (std::size_t i = 0; i < quad.mc_samples; ++i) {
      Vec3 z{centre[0] + u(rng), centre[1] + u(rng), centre[2] + u(rng)};
      s += integrand(z);
    }
    return volume * s / static_cast<double>(quad.mc_samples);
  }
  require(quad.z_nodes > 0, "tensor-grid z-integration needs nodes");
  const int m = quad.z_nodes;
  const double dz = 2.0 * half / m;
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        Vec3 z{centre[0] - half + (i + 0.5) * dz, centre[1] - half + (j + 0.5) * dz,
               centre[2] - half + (k + 0.5) * dz};
        s += integrand(z);
      }
    }
  }
  return s * dz * dz * dz;
}

struct RRange {
  double lo;
  double hi;
};

RRange radius_range(const FdlQuadrature& quad, double s) {
  require(quad.r_min > 0.0 && quad.r_max > quad.r_min, "FDL quadrature needs 0 < r_min < r_max");
  require(quad.r_count >= 3, "FDL quadrature needs at least three radii");
  const double scale = quad.relative ? s : 1.0;
  return {quad.r_min * scale, quad.r_max * scale};
}

FdlResult integrate(const RQuadrature& rq, const std::function<double(int, double)>& g) {
  const int n = static_cast<int>(rq.nodes.size());
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) values[i] = g(i, rq.nodes[i]);
  FdlResult r;
  for (int i = 0; i < n; ++i) r.value += rq.weights[i] * values[i];
  // Same rule on every other node.
  const int last = (n - 1) % 2 == 0 ? n - 1 : n - 2;
  const double dt = std::log(rq.nodes[1] / rq.nodes[0]);
  double coarse = 0.0;
  for (int i = 0; i <= last; i += 2) {
    const double trap = (i == 0 || i == last) ? 1.0 : 2.0;
    coarse += trap * dt * rq.nodes[i] * values[i];
  }
  const double tail = values[n - 1] * rq.nodes[n - 1];
  r.residual = std::abs(r.value - coarse) + std::abs(tail);
  return r;
}

void check_tolerance(const FdlResult& r, const FdlQuadrature& quad, const char* name) {
  if (r.residual > quad.tolerance * std::abs(r.value)) {
    std::ostringstream msg;
    msg << name << ": quadrature residual " << r.residual << " exceeds tolerance " << quad.tolerance
        << " relative to " << r.value;
    throw NumericalError(msg.str());
  }
}

}  // namespace

double chi(double r, const Vec3& z, const Vec3& x) {
  const double d = distance(x, z);
  return std::exp(-d * d / (r * r));
}

RQuadrature RQuadrature::log_spaced(double r_min, double r_max, int count) {
  require(r_min > 0.0 && r_max > r_min, "log-spaced radii need 0 < r_min < r_max");
  require(count >= 2, "log-spaced radii need at least two nodes");
  RQuadrature q;
  const double t0 = std::log(r_min);
  const double dt = (std::log(r_max) - t0) / (count - 1);
  q.nodes.resize(count);
  q.weights.resize(count);
  for (int i = 0; i < count; ++i) {
    q.nodes[i] = std::exp(t0 + i * dt);
    const double trap = (i == 0 || i == count - 1) ? 0.5 : 1.0;
    q.weights[i] = trap * dt * q.nodes[i];
  }
  return q;
}

double lens_volume(double r, double s) {
  if (s >= 2.0 * r) return 0.0;
  return kPi * (4.0 * r + s) * (2.0 * r - s) * (2.0 * r - s) / 12.0;
}

double sharp_z_integral(double r, const Vec3& x, const Vec3& y, const FdlQuadrature& quad) {
  const double s = distance(x, y);
  if (quad.z_strategy == ZStrategy::closed_form) return lens_volume(r, s);
  if (s >= 2.0 * r) return 0.0;
  const double r2 = r * r;
  auto inside = [&](const Vec3& z) {
    double dx = 0.0;
    double dy = 0.0;
    for (int i = 0; i < 3; ++i) {
      dx += (z[i] - x[i]) * (z[i] - x[i]);
      dy += (z[i] - y[i]) * (z[i] - y[i]);
    }
    return (dx <= r2 && dy <= r2) ? 1.0 : 0.0;
  };
  const std::uint64_t stream = std::hash<double>{}(r);
  return box_integral(midpoint(x, y), std::sqrt(std::max(r2 - 0.25 * s * s, 0.0)), quad, stream, inside);
}

double smooth_z_integral(double r, const Vec3& x, const Vec3& y, const FdlQuadrature& quad) {
  const double s = distance(x, y);
  if (quad.z_strategy == ZStrategy::closed_form) {
    return std::pow(0.5 * kPi * r * r, 1.5) * std::exp(-s * s / (2.0 * r * r));
  }
  auto product = [&](const Vec3& z) { return chi(r, z, x) * chi(r, z, y); };
  const std::uint64_t stream = std::hash<double>{}(r);
  return box_integral(midpoint(x, y), 4.0 * r, quad, stream, product);
}

FdlResult fdl_sharp(const Vec3& x, const Vec3& y, const FdlQuadrature& quad) {
  const double s = distance(x, y);
  require(s > 0.0, "FDL representation needs x != y");
  auto range = radius_range(quad, s);
  // The integrand vanishes for r < s/2; start the grid at the support edge.
  const double lo = std::max(range.lo, 0.5 * s);
  require(lo < range.hi, "r_max lies below the support of the sharp integrand");
  const auto rq = RQuadrature::log_spaced(lo, range.hi, quad.r_count);
  auto r = integrate(rq, [&](int, double rr) { return sharp_z_integral(rr, x, y, quad) / (kPi * std::pow(rr, 5)); });
  check_tolerance(r, quad, "fdl_sharp");
  return r;
}

FdlResult fdl_smooth(const Vec3& x, const Vec3& y, const FdlQuadrature& quad) {
  const double s = distance(x, y);
  require(s > 0.0, "FDL representation needs x != y");
  auto range = radius_range(quad, s);
  const auto rq = RQuadrature::log_spaced(range.lo, range.hi, quad.r_count);
  const double c = 4.0 / (kPi * kPi);
  auto r = integrate(rq, [&](int, double rr) { return c * smooth_z_integral(rr, x, y, quad) / std::pow(rr, 5); });
  check_tolerance(r, quad, "fdl_smooth");
  return r;
}

FdlSplit fdl_convolution_split(const Field& rho_diff, const FdlQuadrature& quad) {
  require(rho_diff.grid.dim() == 3, "the FDL convolution split needs a d = 3 grid");
  require(quad.r_min > 0.0 && quad.r_max > quad.r_min, "FDL quadrature needs 0 < r_min < r_max");
  FdlSplit split;
  split.radii = RQuadrature::log_spaced(quad.r_min, quad.r_max, quad.r_count);
  const GridSpec& g = rho_diff.grid;

  ComplexField spectrum(g);
  for (std::size_t i = 0; i < g.size(); ++i) spectrum[i] = std::abs(rho_diff[i]);
  fft_forward(spectrum.values, g);
  std::vector<double> k2(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.unravel(i);
    for (int a = 0; a < 3; ++a) k2[i] += g.wavenumber(idx[a]) * g.wavenumber(idx[a]);
  }

  for (double r : split.radii.nodes) {
    // ∫ e^{-|x|^2/r^2} e^{-ik.x} dx = (π r^2)^{3/2} e^{-k^2 r^2/4}
    const double amp = std::pow(kPi * r * r, 1.5);
    ComplexField z = spectrum;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] *= amp * std::exp(-0.25 * k2[i] * r * r);
    fft_backward(z.values, g);
    Field a = real_part(z);
    for (auto& v : a.values) v = std::max(v, 0.0);
    split.totals.push_back(amp * spectrum[0].real() * g.cell_volume());
    split.a_r.push_back(std::move(a));
  }
  return split;
}

double fdl_dominant_term(const FdlSplit& split, const std::function<double(int, std::size_t)>& commutator_norm) {
  const double c = 4.0 / (kPi * kPi);
  double total = 0.0;
  for (std::size_t ir = 0; ir < split.a_r.size(); ++ir) {
    const Field& a = split.a_r[ir];
    const double r = split.radii.nodes[ir];
    double inner = 0.0;
    for (std::size_t iz = 0; iz < a.size(); ++iz) {
      if (a[iz] != 0.0) inner += a[iz] * commutator_norm(static_cast<int>(ir), iz);
    }
    total += split.radii.weights[ir] * inner * a.grid.cell_volume() / std::pow(r, 5);
  }
  return c * total;
}

double dominant_small_r_exponent(double delta, double q) {
  require(q > 0.0, "q must be positive");
  return -3.5 - 3.0 * delta + 3.0 / q;
}

double dominant_integrability_threshold(double delta) { return 6.0 / (5.0 + 6.0 * delta); }

}  // namespace mfvl
