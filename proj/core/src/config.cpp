#include "mfvl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mfvl/errors.hpp"
#include "mfvl/io.hpp"

namespace mfvl {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"grid", {"d", "n", "L", "points_per_inverse_eps"}},
      {"state",
       {"kind", "profile", "q0", "p0", "q_radius", "p_radius", "delta", "dq", "dp", "N", "eps", "phi", "energy_scale",
        "g_width", "damping", "tolerance", "max_iterations", "target_mass", "seed_width", "kinetic_mass"}},
      {"kernel", {"kind", "gamma", "strength", "width", "mollifier", "r_min", "r_max", "r_count"}},
      {"hartree", {"dt", "t_end", "log_every"}},
      {"vlasov", {"dt", "t_end", "mass", "log_every"}},
      {"diagnostics", {"p", "delta", "tolerance", "sample_every"}},
      {"sweep", {"eps", "N", "t_star", "bootstrap"}},
      {"run", {"seed", "threads", "out"}},
  };
  return s;
}

int to_int(const std::string& key, const std::string& v) {
  const double x = parse_number(v);
  if (x != std::floor(x) || std::abs(x) > 2e9) throw ValidationError("key '" + key + "' must be an integer");
  return static_cast<int>(x);
}

bool is_power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  const auto slash = t.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const std::string a = trim(t.substr(0, slash));
      const std::string b = trim(t.substr(slash + 1));
      const double num = std::stod(a, &used);
      if (used != a.size()) throw std::invalid_argument(t);
      const double den = std::stod(b, &used);
      if (used != b.size() || den == 0.0) throw std::invalid_argument(t);
      return num / den;
    }
    const double x = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return x;
  } catch (const std::exception&) {
    throw ValidationError("'" + text + "' is not a number");
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_number(item));
  }
  return out;
}

GridSpec GridConfig::grid_for(double eps) const {
  int points = n;
  if (points_per_inverse_eps > 0.0) {
    require(eps > 0.0, "eps must be positive");
    const double want = points_per_inverse_eps / eps;
    points = 2;
    while (points < want * (1.0 - 1e-12)) points *= 2;
  }
  return GridSpec(d, points, L);
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw ValidationError("unknown config section [" + section + "]");
    std::map<std::string, std::string> kv;
    for (const auto& [key, node] : body) {
      if (!it->second.count(key)) throw ValidationError("unknown key '" + key + "' in [" + section + "]");
      kv[key] = trim(node.get_value<std::string>());
    }
    std::string canon;
    for (const auto& [k, v] : kv) canon += k + "=" + v + "\n";
    c.sections[section] = canon;

    for (const auto& [k, v] : kv) {
      if (section == "grid") {
        if (k == "d") c.grid.d = to_int(k, v);
        else if (k == "n") c.grid.n = to_int(k, v);
        else if (k == "L") c.grid.L = parse_number(v);
        else c.grid.points_per_inverse_eps = parse_number(v);
      } else if (section == "state") {
        auto& s = c.state;
        if (k == "kind") s.kind = v;
        else if (k == "profile") s.M.shape = parse_shape_kind(v);
        else if (k == "q0") s.M.q0 = parse_list(v);
        else if (k == "p0") s.M.p0 = parse_list(v);
        else if (k == "q_radius") s.M.q_radius = parse_number(v);
        else if (k == "p_radius") s.M.p_radius = parse_number(v);
        else if (k == "delta") s.delta = parse_number(v);
        else if (k == "dq") s.dq = parse_number(v);
        else if (k == "dp") s.dp = parse_number(v);
        else if (k == "N") s.N = parse_number(v);
        else if (k == "eps") s.eps = parse_number(v);
        else if (k == "phi") s.steady.phi = parse_shape_kind(v);
        else if (k == "energy_scale") s.steady.energy_scale = parse_number(v);
        else if (k == "g_width") s.steady.g_width = parse_number(v);
        else if (k == "damping") s.steady.damping = parse_number(v);
        else if (k == "tolerance") s.steady.tolerance = parse_number(v);
        else if (k == "max_iterations") s.steady.max_iterations = to_int(k, v);
        else if (k == "target_mass") s.steady.target_mass = parse_number(v);
        else if (k == "seed_width") s.steady.seed_width = parse_number(v);
        else s.steady.kinetic_mass = parse_number(v);
      } else if (section == "kernel") {
        auto& kn = c.kernel;
        if (k == "kind") kn.kind = parse_kernel_kind(v);
        else if (k == "gamma") kn.gamma = parse_number(v);
        else if (k == "strength") kn.strength = parse_number(v);
        else if (k == "width") kn.width = parse_number(v);
        else if (k == "mollifier") kn.mollifier = parse_number(v);
        else if (k == "r_min") kn.r_min = parse_number(v);
        else if (k == "r_max") kn.r_max = parse_number(v);
        else kn.r_count = to_int(k, v);
      } else if (section == "hartree") {
        if (k == "dt") c.hartree.dt = parse_number(v);
        else if (k == "t_end") c.hartree.t_end = parse_number(v);
        else c.hartree.log_every = to_int(k, v);
      } else if (section == "vlasov") {
        if (k == "dt") c.vlasov.dt = parse_number(v);
        else if (k == "t_end") c.vlasov.t_end = parse_number(v);
        else if (k == "mass") c.vlasov.mass = parse_number(v);
        else c.vlasov.log_every = to_int(k, v);
      } else if (section == "diagnostics") {
        if (k == "p") c.diagnostics.p = parse_number(v);
        else if (k == "delta") c.diagnostics.delta = parse_number(v);
        else if (k == "tolerance") c.diagnostics.tolerance = parse_number(v);
        else c.diagnostics.sample_every = parse_number(v);
      } else if (section == "sweep") {
        if (k == "eps") c.sweep.eps = parse_list(v);
        else if (k == "t_star") c.sweep.t_star = parse_list(v);
        else if (k == "bootstrap") c.sweep.bootstrap = to_int(k, v);
        else {
          // N values are stored as ε after validation fixes d.
          for (double N : parse_list(v)) c.sweep.eps.push_back(-N);
        }
      } else {
        if (k == "seed") {
          const double x = parse_number(v);
          if (x < 0 || x != std::floor(x)) throw ValidationError("seed must be a non-negative integer");
          c.run.seed = static_cast<std::uint64_t>(x);
        } else if (k == "threads") c.run.threads = to_int(k, v);
        else c.run.out = v;
      }
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void ExperimentConfig::validate() {
  const int d = grid.d;
  require(d >= 1 && d <= 3, "[grid] d must be 1, 2 or 3");
  require(grid.L > 0.0, "[grid] L must be positive");
  require(grid.points_per_inverse_eps > 0.0 || is_power_of_two(grid.n), "[grid] n must be a power of two >= 2");
  require(state.kind == "coherent" || state.kind == "fermi-sea" || state.kind == "steady",
          "[state] kind must be coherent, fermi-sea or steady");

  if (state.N > 0.0 && state.eps > 0.0) {
    const double expect = std::pow(state.N, -1.0 / d);
    if (std::abs(expect - state.eps) > 1e-12 * expect) {
      std::ostringstream msg;
      msg << "[state] N = " << state.N << " and eps = " << state.eps << " violate eps = N^(-1/d)";
      throw ValidationError(msg.str());
    }
  } else if (state.N > 0.0) {
    state.eps = std::pow(state.N, -1.0 / d);
  } else if (state.eps > 0.0) {
    state.N = std::pow(state.eps, -d);
  }
  require(state.N >= 0.0 && state.eps >= 0.0, "[state] N and eps must be positive");
  if (state.kind == "fermi-sea" && state.N > 0.0) {
    require(std::abs(state.N - std::round(state.N)) < 1e-9, "[state] a fermi sea needs an integer N");
  }
  require(state.M.q_radius > 0.0 && state.M.p_radius > 0.0, "[state] radii must be positive");
  require(state.delta >= 0.0 && state.dq >= 0.0 && state.dp >= 0.0, "[state] widths must be non-negative");
  require(static_cast<int>(state.M.q0.size()) <= d && static_cast<int>(state.M.p0.size()) <= d,
          "[state] q0 and p0 have more components than d");
  const auto& st = state.steady;
  require(st.damping > 0.0 && st.damping <= 1.0, "[state] damping must lie in (0, 1]");
  require(st.energy_scale > 0.0 && st.g_width > 0.0 && st.tolerance > 0.0, "[state] steady parameters must be positive");
  require(st.max_iterations >= 1, "[state] max_iterations must be at least 1");

  kernel.validate(d);
  require(hartree.dt > 0.0 && hartree.t_end >= 0.0 && hartree.log_every >= 1, "[hartree] needs dt > 0, t_end >= 0");
  require(vlasov.dt > 0.0 && vlasov.t_end >= 0.0 && vlasov.log_every >= 1 && vlasov.mass > 0.0,
          "[vlasov] needs dt > 0, t_end >= 0, mass > 0");
  require(diagnostics.p > 5.0, "[diagnostics] p must exceed 5");
  require(diagnostics.delta > 0.0 && diagnostics.delta < 0.5, "[diagnostics] delta must lie in (0, 1/2)");
  require(diagnostics.tolerance >= 0.0 && diagnostics.sample_every > 0.0, "[diagnostics] bad tolerance or spacing");

  for (auto& e : sweep.eps) {
    if (e < 0.0) e = std::pow(-e, -1.0 / d);
    require(e > 0.0, "[sweep] eps values must be positive");
  }
  for (double t : sweep.t_star) require(t >= 0.0, "[sweep] t_star values must be non-negative");
  require(sweep.bootstrap >= 0, "[sweep] bootstrap must be non-negative");
  require(run.threads >= 1, "[run] threads must be at least 1");
}

std::string canonical_text(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [name, body] : config.sections) out += "[" + name + "]\n" + body;
  return out;
}

}  // namespace mfvl
