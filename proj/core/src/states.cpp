#include "mfvl/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "mfvl/errors.hpp"
#include "mfvl/numerics.hpp"
#include "mfvl/vlasov.hpp"

namespace mfvl {

namespace {

constexpr double kPi = std::numbers::pi;
// exp(-37) ~ 1e-16: product G(u)G(u') is negligible once u² + u'² > 74 δ².
constexpr double kBandRadius = 8.6;
constexpr double kClipLimit = 1e-3;
constexpr std::size_t kMaxNodes = 5'000'000;

double component(const std::vector<double>& v, int a) { return a < static_cast<int>(v.size()) ? v[a] : 0.0; }

struct Canonical {
  Eigen::VectorXd values;
  MatrixXc vectors;
};

/// Rescales to trace N, clips into [0, 1] and water-fills the uncapped
/// eigenvalues so the trace stays N. Returns the clipped mass.
double finalize_occupations(Eigen::VectorXd& lambda, double N) {
  const double raw = lambda.sum();
  require(raw > 0.0, "coherent superposition has no positive mass");
  lambda *= N / raw;
  double clipped = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda(k) < 0.0) {
      clipped += -lambda(k);
      lambda(k) = 0.0;
    } else if (lambda(k) > 1.0) {
      clipped += lambda(k) - 1.0;
      lambda(k) = 1.0;
    }
  }
  for (int iter = 0; iter < 64; ++iter) {
    double capped = 0.0;
    double free = 0.0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) (lambda(k) >= 1.0 ? capped : free) += lambda(k);
    if (std::abs(capped + free - N) <= 1e-14 * N || free <= 0.0) break;
    const double scale = (N - capped) / free;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      if (lambda(k) < 1.0) lambda(k) = std::min(1.0, lambda(k) * scale);
    }
  }
  return clipped;
}

LowRankState canonical_state(const Canonical& c, const GridSpec& grid, double eps, double N, double* clipped) {
  const double vmax = c.values.size() ? std::max(c.values.maxCoeff(), 0.0) : 0.0;
  std::vector<Eigen::Index> keep;
  double negative = 0.0;
  for (Eigen::Index k = c.values.size() - 1; k >= 0; --k) {
    if (c.values(k) > 1e-13 * vmax) keep.push_back(k);
    else if (c.values(k) < 0.0) negative += -c.values(k);
  }
  Eigen::VectorXd lambda(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) lambda(static_cast<Eigen::Index>(k)) = c.values(keep[k]);
  const double scale = N / lambda.sum();
  *clipped = finalize_occupations(lambda, N) + negative * scale;

  LowRankState s;
  s.grid = grid;
  s.eps = eps;
  s.particles = N;
  s.occupations = lambda;
  s.orbitals.resize(c.vectors.rows(), lambda.size());
  const double inv = 1.0 / std::sqrt(grid.cell_volume());
  for (std::size_t k = 0; k < keep.size(); ++k) s.orbitals.col(static_cast<Eigen::Index>(k)) = c.vectors.col(keep[k]) * inv;
  return s;
}

double gaussian_factor(double u, double delta) {
  return std::exp(-u * u / (2.0 * delta * delta)) / std::pow(kPi * delta * delta, 0.25);
}

/// d = 1: the kernel Σ_j c_j f_j(x) conj f_j(y), assembled per distinct q on
/// the band where G(x - q) G(y - q) is non-negligible.
Canonical banded_superposition_1d(const std::vector<CoherentNode>& nodes, const GridSpec& grid, double eps,
                                  double delta) {
  const int n = grid.points();
  const double h = grid.spacing();
  const double L = grid.length();
  MatrixXc kernel = MatrixXc::Zero(n, n);
  const double cut = kBandRadius * delta;

  std::size_t start = 0;
  while (start < nodes.size()) {
    std::size_t stop = start;
    const double q = nodes[start].q[0];
    while (stop < nodes.size() && nodes[stop].q[0] == q) ++stop;

    const long i0 = static_cast<long>(std::ceil((q - cut + 0.5 * L) / h));
    const long i1 = static_cast<long>(std::floor((q + cut + 0.5 * L) / h));
    const int band = static_cast<int>(std::min<long>(i1 - i0 + 1, n));
    std::vector<double> g(band);
    std::vector<int> idx(band);
    for (int m = 0; m < band; ++m) {
      const long iu = i0 + m;
      g[m] = gaussian_factor(-0.5 * L + static_cast<double>(iu) * h - q, delta);
      idx[m] = static_cast<int>(((iu % n) + n) % n);
    }
    std::vector<cplx> k(2 * band - 1, cplx(0.0, 0.0));
    for (std::size_t j = start; j < stop; ++j) {
      const double c = nodes[j].weight / eps;
      const double theta = nodes[j].p[0] * h / eps;
      for (int s = -(band - 1); s < band; ++s) k[s + band - 1] += std::polar(c, theta * s);
    }
    for (int a = 0; a < band; ++a) {
      for (int b = 0; b < band; ++b) kernel(idx[a], idx[b]) += k[a - b + band - 1] * (g[a] * g[b]);
    }
    start = stop;
  }
  HermitianEigen e = hermitian_eigen(grid.cell_volume() * kernel);
  return {e.values, e.vectors};
}

Canonical gram_superposition(const std::vector<CoherentNode>& nodes, const GridSpec& grid, double eps, double delta) {
  require(nodes.size() <= 4096, "the Gram route supports at most 4096 coherent nodes");
  const auto J = static_cast<Eigen::Index>(nodes.size());
  MatrixXc f(static_cast<Eigen::Index>(grid.size()), J);
  MatrixXc c = MatrixXc::Zero(J, J);
  const double root = std::sqrt(grid.cell_volume());
  for (Eigen::Index j = 0; j < J; ++j) {
    const auto& nd = nodes[static_cast<std::size_t>(j)];
    ComplexField fj = coherent_state(grid, nd.q.data(), nd.p.data(), delta, eps);
    for (std::size_t i = 0; i < fj.size(); ++i) f(static_cast<Eigen::Index>(i), j) = root * fj[i];
    c(j, j) = nd.weight;
  }
  LowRankSpectrum spec = low_rank_spectrum(f, c);
  // Ascending order, to match the dense route.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(spec.values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return spec.values(a) < spec.values(b); });
  Canonical out{Eigen::VectorXd(spec.values.size()), MatrixXc(spec.vectors.rows(), spec.vectors.cols())};
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.values(static_cast<Eigen::Index>(k)) = spec.values(order[k]);
    out.vectors.col(static_cast<Eigen::Index>(k)) = spec.vectors.col(order[k]);
  }
  return out;
}

}  // namespace

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::gaussian: return "gaussian";
    case ShapeKind::bump: return "bump";
    case ShapeKind::polynomial_cutoff: return "polynomial-cutoff";
  }
  return "unknown";
}

ShapeKind parse_shape_kind(const std::string& name) {
  if (name == "gaussian") return ShapeKind::gaussian;
  if (name == "bump") return ShapeKind::bump;
  if (name == "polynomial-cutoff") return ShapeKind::polynomial_cutoff;
  throw ValidationError("unknown profile '" + name + "' (expected gaussian, bump or polynomial-cutoff)");
}

double shape_value(ShapeKind kind, double u) {
  switch (kind) {
    case ShapeKind::gaussian: return std::exp(-0.5 * u);
    case ShapeKind::bump: return u < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u)) : 0.0;
    case ShapeKind::polynomial_cutoff: return u < 1.0 ? std::pow(1.0 - u, 4) : 0.0;
  }
  return 0.0;
}

double shape_derivative(ShapeKind kind, double u) {
  switch (kind) {
    case ShapeKind::gaussian: return -0.5 * std::exp(-0.5 * u);
    case ShapeKind::bump: return u < 1.0 ? -shape_value(kind, u) / ((1.0 - u) * (1.0 - u)) : 0.0;
    case ShapeKind::polynomial_cutoff: return u < 1.0 ? -4.0 * std::pow(1.0 - u, 3) : 0.0;
  }
  return 0.0;
}

double shape_support(ShapeKind kind) { return kind == ShapeKind::gaussian ? 74.0 : 1.0; }

double WeightFunction::unnormalized(const double* q, const double* p) const {
  double u = 0.0;
  for (std::size_t a = 0; a < std::max(q0.size(), p0.size()); ++a) {
    const double dq = q[a] - component(q0, static_cast<int>(a));
    const double dp = p[a] - component(p0, static_cast<int>(a));
    u += dq * dq / (q_radius * q_radius) + dp * dp / (p_radius * p_radius);
  }
  return shape_value(shape, u);
}

ComplexField coherent_state(const GridSpec& grid, const double* q, const double* p, double delta, double eps) {
  require(delta > 0.0 && eps > 0.0, "coherent states need delta > 0 and eps > 0");
  const int d = grid.dim();
  ComplexField f(grid);
  const double pre = std::pow(eps, -0.5 * d);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = grid.position(i);
    double phase = 0.0;
    double g = pre;
    for (int a = 0; a < d; ++a) {
      const double u = minimal_image(x[a] - q[a], grid.length());
      phase += p[a] * (q[a] + u) / eps;
      g *= gaussian_factor(u, delta);
    }
    f[i] = std::polar(g, phase);
  }
  return f;
}

LowRankState coherent_projector(const GridSpec& grid, const double* q, const double* p, double delta, double eps) {
  ComplexField f = coherent_state(grid, q, p, delta, eps);
  double norm2 = 0.0;
  for (const auto& z : f.values) norm2 += std::norm(z);
  norm2 *= grid.cell_volume();
  LowRankState s;
  s.grid = grid;
  s.eps = eps;
  s.particles = 1.0;
  s.orbitals = Eigen::Map<const MatrixXc>(f.values.data(), static_cast<Eigen::Index>(f.size()), 1) / std::sqrt(norm2);
  s.occupations = Eigen::VectorXd::Ones(1);
  return s;
}

std::vector<CoherentNode> coherent_nodes(const CoherentSpec& spec, int d, double* amplitude) {
  const auto& M = spec.M;
  require(d >= 1 && d <= 3, "dimension must be 1, 2 or 3");
  require(spec.eps > 0.0, "eps must be positive");
  require(M.q_radius > 0.0 && M.p_radius > 0.0, "weight radii must be positive");
  const double delta = spec.delta > 0.0 ? spec.delta : std::sqrt(spec.eps);
  const double dq = spec.dq > 0.0 ? spec.dq : 0.5 * delta;
  const double dp = spec.dp > 0.0 ? spec.dp : 2.0 * kPi * spec.eps / (10.0 * delta);
  const double reach = std::sqrt(shape_support(M.shape));
  const int mq = static_cast<int>(std::ceil(reach * M.q_radius / dq));
  const int mp = static_cast<int>(std::ceil(reach * M.p_radius / dp));
  const double per_axis = static_cast<double>(2 * mq + 1) * (2 * mp + 1);
  require(std::pow(per_axis, d) <= static_cast<double>(kMaxNodes), "coherent node set too large; coarsen dq or dp");

  std::vector<CoherentNode> nodes;
  const std::size_t count = static_cast<std::size_t>(std::pow(per_axis, d));
  const double cell = std::pow(dq * dp, d);
  double total = 0.0;
  for (std::size_t flat = 0; flat < count; ++flat) {
    CoherentNode nd;
    std::size_t rest = flat;
    for (int a = 0; a < d; ++a) {
      const int iq = static_cast<int>(rest % (2 * mq + 1)) - mq;
      rest /= (2 * mq + 1);
      const int ip = static_cast<int>(rest % (2 * mp + 1)) - mp;
      rest /= (2 * mp + 1);
      nd.q[a] = component(M.q0, a) + iq * dq;
      nd.p[a] = component(M.p0, a) + ip * dp;
    }
    WeightFunction Md = M;
    Md.q0.resize(d, 0.0);
    Md.p0.resize(d, 0.0);
    nd.weight = cell * Md.unnormalized(nd.q.data(), nd.p.data());
    if (nd.weight > 0.0) {
      total += nd.weight;
      nodes.push_back(nd);
    }
  }
  require(total > 0.0, "weight function vanishes on every node");
  for (auto& nd : nodes) nd.weight /= total;
  if (amplitude) *amplitude = 1.0 / total;
  return nodes;
}

double weight_grad_p_l1(const WeightFunction& M, double amplitude, int resolution) {
  require(resolution >= 2, "resolution must be at least 2");
  const double reach = std::sqrt(shape_support(M.shape));
  const double hq = 2.0 * reach * M.q_radius / resolution;
  const double hp = 2.0 * reach * M.p_radius / resolution;
  double sum = 0.0;
  for (int i = 0; i < resolution; ++i) {
    const double dq = -reach * M.q_radius + (i + 0.5) * hq;
    for (int j = 0; j < resolution; ++j) {
      const double dp = -reach * M.p_radius + (j + 0.5) * hp;
      const double u = dq * dq / (M.q_radius * M.q_radius) + dp * dp / (M.p_radius * M.p_radius);
      sum += std::abs(shape_derivative(M.shape, u) * 2.0 * dp / (M.p_radius * M.p_radius));
    }
  }
  return amplitude * sum * hq * hp;
}

CoherentResult coherent_superposition(const std::vector<CoherentNode>& nodes_in, const GridSpec& grid, double eps,
                                      double delta) {
  require(eps > 0.0, "eps must be positive");
  require(delta > 0.0, "delta must be positive");
  const int d = grid.dim();
  const double h = grid.spacing();
  const double hv = 2.0 * kPi * eps / grid.length();
  {
    std::ostringstream msg;
    msg << "coherent width not resolved: need delta >= 3h (" << 3.0 * h << ") and eps/(2 delta) >= 3 h_v ("
        << 3.0 * hv << "), got delta = " << delta;
    require(delta >= 3.0 * h && eps / (2.0 * delta) >= 3.0 * hv, msg.str());
  }
  const double p_limit = kPi * eps / h - 4.0 * eps / delta;
  std::vector<CoherentNode> nodes;
  for (const auto& nd : nodes_in) {
    require(nd.weight >= 0.0 && std::isfinite(nd.weight), "coherent node weights must be finite and non-negative");
    if (nd.weight == 0.0) continue;
    for (int a = 0; a < d; ++a) {
      require(std::abs(nd.p[a]) <= p_limit, "coherent node momentum is not resolved by the grid");
    }
    nodes.push_back(nd);
  }
  require(!nodes.empty(), "coherent superposition needs at least one weighted node");
  // Canonical order makes the result independent of node labelling.
  std::sort(nodes.begin(), nodes.end(), [](const CoherentNode& a, const CoherentNode& b) {
    if (a.q != b.q) return a.q < b.q;
    if (a.p != b.p) return a.p < b.p;
    return a.weight < b.weight;
  });

  const double N = std::pow(eps, -d);
  CoherentResult r;
  r.nodes = nodes.size();
  if (nodes.size() == 1) {
    r.state = coherent_projector(grid, nodes[0].q.data(), nodes[0].p.data(), delta, eps);
    r.required_single_weight = N;
    r.raw_trace = nodes[0].weight * N;
    return r;
  }
  Canonical c = d == 1 ? banded_superposition_1d(nodes, grid, eps, delta) : gram_superposition(nodes, grid, eps, delta);
  r.raw_trace = c.values.sum();
  r.state = canonical_state(c, grid, eps, N, &r.clipped_mass);
  if (r.clipped_mass > kClipLimit * N) {
    std::ostringstream msg;
    msg << "clipped eigenvalue mass " << r.clipped_mass << " exceeds " << kClipLimit << " N; the quadrature is too "
        << "coarse or M violates the fermionic bound";
    throw NumericalError(msg.str());
  }
  return r;
}

double auto_delta(double eps, const GridSpec& grid) {
  require(eps > 0.0, "eps must be positive");
  const double lo = 3.0 * grid.spacing();
  const double hi = grid.length() / (12.0 * kPi);
  if (lo > hi) {
    std::ostringstream msg;
    msg << "no resolvable coherent width on this grid: 3h = " << lo << " exceeds L/(12 pi) = " << hi
        << " (use at least 114 points per axis)";
    throw ValidationError(msg.str());
  }
  return std::clamp(std::sqrt(eps), lo, hi);
}

CoherentResult coherent_superposition(const CoherentSpec& spec_in, const GridSpec& grid) {
  CoherentSpec spec = spec_in;
  if (spec.delta <= 0.0) spec.delta = auto_delta(spec.eps, grid);
  double amplitude = 0.0;
  auto nodes = coherent_nodes(spec, grid.dim(), &amplitude);
  CoherentResult r = coherent_superposition(nodes, grid, spec.eps, spec.delta);
  r.amplitude = amplitude;
  if (grid.dim() == 1) r.grad_p_l1 = weight_grad_p_l1(spec.M, amplitude);
  return r;
}

FermiSeaResult fermi_sea(const GridSpec& grid, int N) {
  const std::size_t modes = grid.size();
  require(N >= 1 && static_cast<std::size_t>(N) <= modes, "fermi sea needs 1 <= N <= n^d");
  const int d = grid.dim();
  struct Mode {
    long norm2;
    std::array<int, 3> j;
  };
  std::vector<Mode> all(modes);
  for (std::size_t i = 0; i < modes; ++i) {
    const auto idx = grid.unravel(i);
    Mode m{0, {0, 0, 0}};
    for (int a = 0; a < d; ++a) {
      m.j[a] = grid.frequency(idx[a]);
      m.norm2 += static_cast<long>(m.j[a]) * m.j[a];
    }
    all[i] = m;
  }
  std::sort(all.begin(), all.end(), [](const Mode& a, const Mode& b) {
    return a.norm2 != b.norm2 ? a.norm2 < b.norm2 : a.j < b.j;
  });
  FermiSeaResult r;
  r.tie_broken = static_cast<std::size_t>(N) < modes && all[N - 1].norm2 == all[N].norm2;
  const double eps = std::pow(static_cast<double>(N), -1.0 / d);
  const double k0 = 2.0 * kPi / grid.length();
  r.fermi_radius = eps * k0 * std::sqrt(static_cast<double>(all[N - 1].norm2));

  LowRankState& s = r.state;
  s.grid = grid;
  s.eps = eps;
  s.particles = N;
  s.occupations = Eigen::VectorXd::Ones(N);
  s.orbitals.resize(static_cast<Eigen::Index>(modes), N);
  const double amp = std::pow(grid.length(), -0.5 * d);
  for (int k = 0; k < N; ++k) {
    for (std::size_t i = 0; i < modes; ++i) {
      const auto idx = grid.unravel(i);
      // Integer phase arithmetic keeps the plane waves exactly periodic.
      long turns = 0;
      for (int a = 0; a < d; ++a) turns += static_cast<long>(all[k].j[a]) * idx[a];
      const int n = grid.points();
      double phase = 2.0 * kPi * static_cast<double>(((turns % n) + n) % n) / n;
      for (int a = 0; a < d; ++a) phase += all[k].j[a] * k0 * grid.node(0);
      s.orbitals(static_cast<Eigen::Index>(i), k) = std::polar(amp, phase);
    }
  }
  return r;
}

double steady_profile(const SteadySpec& spec, double energy) {
  return spec.amplitude * shape_value(spec.phi, energy / spec.energy_scale);
}

SteadyResult steady_state(const SteadySpec& spec, const KernelSpec& kernel, const GridSpec& xgrid,
                          const GridSpec& vgrid) {
  require(kernel.gamma == -1.0, "steady states are constructed for the attractive case gamma = -1");
  require(spec.damping > 0.0 && spec.damping <= 1.0, "damping must lie in (0, 1]");
  require(spec.energy_scale > 0.0, "energy scale must be positive");
  require(spec.g_width > 0.0, "regularizing Gaussian width must be positive");
  require(spec.tolerance > 0.0 && spec.max_iterations >= 1, "bad fixed-point tolerance or iteration limit");
  require(spec.kinetic_mass > 0.0, "kinetic mass must be positive");
  require(xgrid.dim() == vgrid.dim(), "x and v grids must share the dimension");
  require(!spec.normalize || spec.target_mass > 0.0, "target mass must be positive");
  kernel.validate(xgrid.dim());

  SteadyResult r;
  r.effective_kernel = mollified(kernel, spec.g_width);
  const int d = xgrid.dim();
  std::vector<double> kinetic(vgrid.size());
  for (std::size_t iv = 0; iv < vgrid.size(); ++iv) {
    const auto v = vgrid.position(iv);
    double v2 = 0.0;
    for (int a = 0; a < d; ++a) v2 += v[a] * v[a];
    kinetic[iv] = v2 / (2.0 * spec.kinetic_mass);
  }
  auto profile = [&](const Field& psi) {
    PhaseSpaceField f(xgrid, vgrid);
    for (std::size_t ix = 0; ix < xgrid.size(); ++ix) {
      for (std::size_t iv = 0; iv < vgrid.size(); ++iv) f.at(ix, iv) = steady_profile(spec, kinetic[iv] + psi[ix]);
    }
    return f;
  };
  double scale = 1.0;
  auto build = [&](const Field& psi) {
    PhaseSpaceField f = profile(psi);
    if (spec.normalize) {
      const double m = mass(f);
      scale = m > 0.0 ? spec.target_mass / m : 0.0;
      for (auto& x : f.values) x *= scale;
    }
    return f;
  };

  Field psi(xgrid);
  if (spec.normalize && spec.seed_width > 0.0) {
    Field rho0(xgrid);
    for (std::size_t i = 0; i < rho0.size(); ++i) {
      const auto x = xgrid.position(i);
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) r2 += x[a] * x[a];
      rho0[i] = std::exp(-r2 / (2.0 * spec.seed_width * spec.seed_width));
    }
    const double m0 = integral(rho0);
    for (auto& x : rho0.values) x *= spec.target_mass / m0;
    psi = spectral_poisson(rho0, r.effective_kernel);
  }

  PhaseSpaceField f;
  Field psi_new;
  for (int it = 1; it <= spec.max_iterations; ++it) {
    f = build(psi);
    psi_new = spectral_poisson(spatial_density(f), r.effective_kernel);
    double diff = 0.0;
    double size = 1.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      diff = std::max(diff, std::abs(psi_new[i] - psi[i]));
      size = std::max(size, std::abs(psi_new[i]));
    }
    r.iterations = it;
    r.fixed_point_residual = diff;
    if (diff <= spec.tolerance * size) {
      r.converged = true;
      break;
    }
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = (1.0 - spec.damping) * psi[i] + spec.damping * psi_new[i];
  }
  r.potential = psi_new;
  if (!r.converged) return r;

  const double m = mass(f);
  PhaseSpaceField check = profile(psi_new);
  const double m_check = scale * mass(check);
  r.self_consistency_error = std::abs(m_check - m) / std::max(m, 1e-300);
  if (m == 0.0) r.self_consistency_error = std::abs(m_check);
  r.steady_residual = steady_state_residual(f, r.effective_kernel, spec.kinetic_mass);
  r.f = std::move(f);
  return r;
}

}  // namespace mfvl
