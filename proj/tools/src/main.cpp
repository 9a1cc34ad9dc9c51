// pvsurf: config-driven command line for the plasma-vacuum surface-wave
// toolkit. Subcommands map one-to-one onto library pipelines; every run
// writes a JSON manifest (deterministic: fixed 17-significant-digit floats,
// fixed key order, no timestamps) plus columnar data files where bulk output
// is produced.
//
// Exit codes: 0 success, 1 configuration/validation failure, 2 numerical
// abort (blow-up or NaN during time integration).
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <pvsurf/amplitude.hpp>
#include <pvsurf/dispersion.hpp>
#include <pvsurf/kernel.hpp>
#include <pvsurf/params.hpp>
#include <pvsurf/parallel.hpp>
#include <pvsurf/profiles.hpp>
#include <pvsurf/residual.hpp>

namespace {

using nlohmann::json;
using pvsurf::Vec2;
using pvsurf::Vec3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --------------------------------------------------------------------------
// Deterministic JSON emitter. Objects are multi-line (insertion order),
// arrays inline; doubles always use %.17g; NaN/inf become strings so the
// manifest stays valid JSON.
class JsonWriter {
 public:
  JsonWriter& begin_object() {
    value_prefix();
    buf += '{';
    ctx.push_back({true, false});
    return *this;
  }
  JsonWriter& end_object() {
    const bool empty = ctx.back().first;
    ctx.pop_back();
    if (!empty) {
      buf += '\n';
      indent();
    }
    buf += '}';
    return *this;
  }
  JsonWriter& begin_array() {
    value_prefix();
    buf += '[';
    ctx.push_back({true, true});
    return *this;
  }
  JsonWriter& end_array() {
    ctx.pop_back();
    buf += ']';
    return *this;
  }
  JsonWriter& key(const std::string& k) {
    if (!ctx.back().first) buf += ',';
    ctx.back().first = false;
    buf += '\n';
    indent();
    escaped(k);
    buf += ": ";
    pending = true;
    return *this;
  }
  JsonWriter& num(double v) {
    value_prefix();
    buf += format_double(v);
    return *this;
  }
  JsonWriter& num(long long v) {
    value_prefix();
    buf += std::to_string(v);
    return *this;
  }
  JsonWriter& num(int v) { return num((long long)v); }
  JsonWriter& str(const std::string& v) {
    value_prefix();
    escaped(v);
    return *this;
  }
  JsonWriter& boolean(bool b) {
    value_prefix();
    buf += b ? "true" : "false";
    return *this;
  }
  std::string take() {
    buf += '\n';
    return std::move(buf);
  }

  static std::string format_double(double v) {
    if (std::isnan(v)) return "\"nan\"";
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
  }

 private:
  struct Ctx {
    bool first;
    bool is_array;
  };
  std::string buf;
  std::vector<Ctx> ctx;
  bool pending = false;

  void indent() { buf.append(2 * ctx.size(), ' '); }
  void value_prefix() {
    if (pending) {
      pending = false;
      return;
    }
    if (!ctx.empty() && ctx.back().is_array) {
      if (!ctx.back().first) buf += ", ";
      ctx.back().first = false;
    }
  }
  void escaped(const std::string& sv) {
    buf += '"';
    for (char c : sv) {
      switch (c) {
        case '"': buf += "\\\""; break;
        case '\\': buf += "\\\\"; break;
        case '\n': buf += "\\n"; break;
        case '\t': buf += "\\t"; break;
        case '\r': buf += "\\r"; break;
        default:
          if ((unsigned char)c < 0x20) {
            char b[8];
            std::snprintf(b, sizeof b, "\\u%04x", c);
            buf += b;
          } else {
            buf += c;
          }
      }
    }
    buf += '"';
  }
};

// --------------------------------------------------------------------------
// Config access with field-attributed errors.
const json& need(const json& obj, const char* block, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError(std::string("missing config field: ") + block + "." + key);
  return *it;
}

template <class T>
T as(const json& j, const char* block, const char* key) {
  try {
    return j.get<T>();
  } catch (const std::exception&) {
    throw ConfigError(std::string("bad value for config field: ") + block + "." + key);
  }
}

template <class T>
T field(const json& obj, const char* block, const char* key) {
  return as<T>(need(obj, block, key), block, key);
}

template <class T>
T field_or(const json* obj, const char* block, const char* key, T def) {
  if (!obj) return def;
  const auto it = obj->find(key);
  if (it == obj->end()) return def;
  return as<T>(*it, block, key);
}

const json* block_of(const json& root, const char* name) {
  const auto it = root.find(name);
  return it == root.end() ? nullptr : &*it;
}

Vec3 tangential_vec(const json& j, const char* block, const char* key) {
  const auto v = as<std::vector<double>>(j, block, key);
  if (v.size() != 2 && v.size() != 3)
    throw ConfigError(std::string("config field ") + block + "." + key +
                      " must have 2 or 3 components");
  return {v[0], v[1], v.size() == 3 ? v[2] : 0.0};
}

// Parsed + default-resolved run configuration (echoed into every manifest).
struct RunConfig {
  pvsurf::ReferenceState state;
  int p = 1, q = 0, l = 1;
  std::optional<double> tau_seed;
  std::string tau_pick = "upper";
  int J = 1, K = 4;
  pvsurf::SolverConfig solver;
  unsigned seed = 1;
  std::vector<pvsurf::ModeSeed> modes;
  pvsurf::WkbGrid grid;
  std::vector<int> sweep_l;
  double Y3_max = 6.0;
  int n_Y3 = 9;
  int n_theta = 16;
  int ny = 4;
  std::string directory = "pvsurf_out";
  int snapshot_every = 10;
};

RunConfig parse_config(const json& root) {
  RunConfig c;
  const json* state = block_of(root, "state");
  if (!state) throw ConfigError("missing config block: state");
  c.state.u0 = tangential_vec(need(*state, "state", "u0"), "state", "u0");
  c.state.B0 = tangential_vec(need(*state, "state", "B0"), "state", "B0");
  c.state.H0 = tangential_vec(need(*state, "state", "H0"), "state", "H0");
  c.state.E3_0 = field<double>(*state, "state", "E3_0");
  c.state.nu = field<double>(*state, "state", "nu");

  const json* freq = block_of(root, "frequency");
  c.p = field_or(freq, "frequency", "p", 1);
  c.q = field_or(freq, "frequency", "q", 0);
  c.l = field_or(freq, "frequency", "l", 1);
  if (freq && freq->contains("tau_seed"))
    c.tau_seed = field<double>(*freq, "frequency", "tau_seed");
  c.tau_pick = field_or<std::string>(freq, "frequency", "tau_pick", "upper");
  if (c.tau_pick != "lower" && c.tau_pick != "upper")
    throw ConfigError("bad value for config field: frequency.tau_pick "
                      "(expected \"lower\" or \"upper\")");

  const json* solver = block_of(root, "solver");
  c.J = field_or(solver, "solver", "J", 1);
  c.K = field_or(solver, "solver", "K", 4);
  c.solver.dt = field_or(solver, "solver", "dt", c.solver.dt);
  c.solver.t_end = field_or(solver, "solver", "t_end", c.solver.t_end);
  c.solver.dealias = field_or(solver, "solver", "dealias", c.solver.dealias);
  c.solver.k_const = field_or(solver, "solver", "K_const", c.solver.k_const);
  c.solver.blowup_h4_factor =
      field_or(solver, "solver", "blowup_h4_factor", c.solver.blowup_h4_factor);
  const std::string mode =
      field_or<std::string>(solver, "solver", "kernel_mode", "direct");
  if (mode == "direct")
    c.solver.kernel_mode = pvsurf::KernelMode::direct;
  else if (mode == "exp_integral")
    c.solver.kernel_mode = pvsurf::KernelMode::exp_integral;
  else
    throw ConfigError("bad value for config field: solver.kernel_mode "
                      "(expected \"direct\" or \"exp_integral\")");
  c.solver.kernel_nodes = field_or(solver, "solver", "kernel_nodes", c.solver.kernel_nodes);
  c.seed = (unsigned)field_or(solver, "solver", "seed", 1);

  const json* front = block_of(root, "front");
  if (front && front->contains("modes")) {
    const json& modes = need(*front, "front", "modes");
    if (!modes.is_array()) throw ConfigError("bad value for config field: front.modes");
    for (const json& m : modes) {
      const auto row = as<std::vector<double>>(m, "front", "modes");
      if (row.size() != 5)
        throw ConfigError("bad value for config field: front.modes "
                          "(each mode is [j1, j2, k, re, im])");
      c.modes.push_back({int(std::lround(row[0])), int(std::lround(row[1])),
                         int(std::lround(row[2])), row[3], row[4]});
    }
  }

  const json* grids = block_of(root, "grids");
  c.grid.nx1 = field_or(grids, "grids", "nx1", c.grid.nx1);
  c.grid.nx2 = field_or(grids, "grids", "nx2", c.grid.nx2);
  c.grid.n3_per_side = field_or(grids, "grids", "n3_per_side", c.grid.n3_per_side);
  c.grid.x3_max = field_or(grids, "grids", "x3_max", c.grid.x3_max);
  c.grid.layer_Y3_max = field_or(grids, "grids", "layer_Y3_max", c.grid.layer_Y3_max);
  c.grid.c_band = field_or(grids, "grids", "c_band", c.grid.c_band);
  c.sweep_l = field_or(grids, "grids", "sweep_l", std::vector<int>{});
  c.Y3_max = field_or(grids, "grids", "Y3_max", c.Y3_max);
  c.n_Y3 = field_or(grids, "grids", "n_Y3", c.n_Y3);
  c.n_theta = field_or(grids, "grids", "n_theta", c.n_theta);
  c.ny = field_or(grids, "grids", "ny", c.ny);

  const json* output = block_of(root, "output");
  c.directory = field_or<std::string>(output, "output", "directory", c.directory);
  c.snapshot_every = field_or(output, "output", "snapshot_every", c.snapshot_every);
  if (c.snapshot_every < 1) throw ConfigError("output.snapshot_every must be >= 1");
  return c;
}

// The echo covers the fully resolved configuration (defaults included) so a
// manifest alone reproduces the run. Runtime placement (--output, --threads)
// is deliberately not part of the physics and is not echoed.
void write_config_echo(JsonWriter& w, const RunConfig& c) {
  w.key("config").begin_object();
  w.key("state").begin_object();
  w.key("u0").begin_array();
  for (double v : c.state.u0) w.num(v);
  w.end_array();
  w.key("B0").begin_array();
  for (double v : c.state.B0) w.num(v);
  w.end_array();
  w.key("H0").begin_array();
  for (double v : c.state.H0) w.num(v);
  w.end_array();
  w.key("E3_0").num(c.state.E3_0);
  w.key("nu").num(c.state.nu);
  w.end_object();
  w.key("frequency").begin_object();
  w.key("p").num(c.p);
  w.key("q").num(c.q);
  w.key("l").num(c.l);
  if (c.tau_seed) w.key("tau_seed").num(*c.tau_seed);
  w.key("tau_pick").str(c.tau_pick);
  w.end_object();
  w.key("solver").begin_object();
  w.key("J").num(c.J);
  w.key("K").num(c.K);
  w.key("dt").num(c.solver.dt);
  w.key("t_end").num(c.solver.t_end);
  w.key("dealias").boolean(c.solver.dealias);
  w.key("K_const").num(c.solver.k_const);
  w.key("blowup_h4_factor").num(c.solver.blowup_h4_factor);
  w.key("kernel_mode")
      .str(c.solver.kernel_mode == pvsurf::KernelMode::direct ? "direct" : "exp_integral");
  w.key("kernel_nodes").num(c.solver.kernel_nodes);
  w.key("seed").num((long long)c.seed);
  w.end_object();
  w.key("front").begin_object();
  w.key("modes").begin_array();
  for (const auto& m : c.modes) {
    w.begin_array().num(m.j1).num(m.j2).num(m.k).num(m.re).num(m.im).end_array();
  }
  w.end_array();
  w.end_object();
  w.key("grids").begin_object();
  w.key("nx1").num(c.grid.nx1);
  w.key("nx2").num(c.grid.nx2);
  w.key("n3_per_side").num(c.grid.n3_per_side);
  w.key("x3_max").num(c.grid.x3_max);
  w.key("layer_Y3_max").num(c.grid.layer_Y3_max);
  w.key("c_band").num(c.grid.c_band);
  w.key("sweep_l").begin_array();
  for (int l : c.sweep_l) w.num(l);
  w.end_array();
  w.key("Y3_max").num(c.Y3_max);
  w.key("n_Y3").num(c.n_Y3);
  w.key("n_theta").num(c.n_theta);
  w.key("ny").num(c.ny);
  w.end_object();
  w.key("output").begin_object();
  w.key("directory").str(c.directory);
  w.key("snapshot_every").num(c.snapshot_every);
  w.end_object();
  w.end_object();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  out << content;
}

std::filesystem::path prepare_dir(const RunConfig& c, const std::string& override_dir) {
  const std::filesystem::path dir = override_dir.empty() ? c.directory : override_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

Vec2 xi_direction(const RunConfig& c) {
  const double n = std::hypot(double(c.p), double(c.q));
  if (n == 0.0) throw ConfigError("frequency.p and frequency.q must not both be zero");
  return {c.p / n, c.q / n};
}

// Polished admissible time frequency: both roots are computed, then either
// the requested branch or the root nearest tau_seed is returned.
double resolve_tau(const RunConfig& c) {
  const pvsurf::RootReport roots = pvsurf::find_real_roots(c.state, xi_direction(c));
  if (c.tau_seed) {
    return std::abs(roots.roots[0] - *c.tau_seed) <= std::abs(roots.roots[1] - *c.tau_seed)
               ? roots.roots[0]
               : roots.roots[1];
  }
  return c.tau_pick == "lower" ? roots.roots[0] : roots.roots[1];
}

pvsurf::Background make_run_background(const RunConfig& c, double tau) {
  return pvsurf::make_background(c.state, pvsurf::make_frequency(c.p, c.q, c.l, tau));
}

std::string snapshot_name(long index) {
  char b[32];
  std::snprintf(b, sizeof b, "front_%06ld.txt", index);
  return b;
}

void write_front_snapshot(const std::filesystem::path& path,
                          const pvsurf::FrontSpectrum& f) {
  std::string out = "# j1 j2 k re im\n";
  for (int j1 = -f.J; j1 <= f.J; ++j1)
    for (int j2 = -f.J; j2 <= f.J; ++j2)
      for (int k = -f.K; k <= f.K; ++k) {
        const std::complex<double> v = f.coeffs[f.index(j1, j2, k)];
        char line[128];
        std::snprintf(line, sizeof line, "%d %d %d %.17g %.17g\n", j1, j2, k, v.real(),
                      v.imag());
        out += line;
      }
  write_file(path, out);
}

// ------------------------------------------------------------- subcommands
int run_stability(const RunConfig& c, const std::string& out_dir) {
  const pvsurf::StabilityReport h1 = pvsurf::check_stability_H1(c.state);
  const pvsurf::StabilityStarReport h1s = pvsurf::check_stability_H1star(c.state);
  JsonWriter w;
  w.begin_object();
  w.key("command").str("stability");
  write_config_echo(w, c);
  w.key("results").begin_object();
  w.key("h1").begin_object();
  w.key("stable").boolean(h1.stable);
  w.key("margin").num(h1.margin);
  w.key("rhs").num(h1.rhs);
  w.end_object();
  w.key("h1_star").begin_object();
  w.key("stable").boolean(h1s.stable);
  w.key("margin").num(h1s.margin);
  w.key("min_value").num(h1s.min_value);
  w.key("argmin_xi").begin_array().num(h1s.argmin_xi[0]).num(h1s.argmin_xi[1]).end_array();
  w.end_object();
  w.end_object();
  w.end_object();
  write_file(prepare_dir(c, out_dir) / "stability.json", w.take());
  std::printf("stable=%s margin=%.17g rhs=%.17g\n", h1.stable ? "true" : "false", h1.margin,
              h1.rhs);
  return 0;
}

int run_roots(const RunConfig& c, const std::string& out_dir) {
  const Vec2 xi = xi_direction(c);
  const pvsurf::RootReport r = pvsurf::find_real_roots(c.state, xi);
  const double scale = pvsurf::coefficient_scale(c.state, xi);
  JsonWriter w;
  w.begin_object();
  w.key("command").str("roots");
  write_config_echo(w, c);
  w.key("results").begin_object();
  w.key("xi").begin_array().num(xi[0]).num(xi[1]).end_array();
  w.key("roots").begin_array().num(r.roots[0]).num(r.roots[1]).end_array();
  w.key("residuals").begin_array().num(r.residuals[0]).num(r.residuals[1]).end_array();
  w.key("derivatives")
      .begin_array()
      .num(r.derivative_values[0])
      .num(r.derivative_values[1])
      .end_array();
  w.key("scale").num(scale);
  w.end_object();
  w.end_object();
  write_file(prepare_dir(c, out_dir) / "roots.json", w.take());
  std::printf("roots: %.17g %.17g\n", r.roots[0], r.roots[1]);
  return 0;
}

int run_kernel_check(const RunConfig& c, const std::string& out_dir) {
  bool exact_ok = true;
  for (long k1 = -40; k1 <= 40 && exact_ok; ++k1)
    for (long k2 = -40; k2 <= 40 && exact_ok; ++k2) {
      if (k1 == 0 || k2 == 0 || k1 + k2 == 0) continue;
      const double v = pvsurf::kernel_lambda(k1, k2);
      exact_ok = exact_ok && v == pvsurf::kernel_lambda(k2, k1) &&
                 v == pvsurf::kernel_lambda(-k1, -k2) &&
                 v == pvsurf::kernel_lambda_piecewise(k1, k2) &&
                 pvsurf::kernel_lambda(2 * k1, 2 * k2) == 4.0 * v;
    }

  const int K = c.K;
  std::mt19937 rng(c.seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  std::vector<std::complex<double>> a(std::size_t(2 * K + 1));
  for (int k = 1; k <= K; ++k) {
    a[std::size_t(k + K)] = {dist(rng), dist(rng)};
    a[std::size_t(-k + K)] = std::conj(a[std::size_t(k + K)]);
  }
  const auto direct =
      pvsurf::quadratic_sum_all(a, {K, pvsurf::KernelMode::direct, c.solver.kernel_nodes});
  const auto quad = pvsurf::quadratic_sum_all(
      a, {K, pvsurf::KernelMode::exp_integral, c.solver.kernel_nodes});
  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < direct.size(); ++i) {
    scale = std::max(scale, std::abs(direct[i]));
    diff = std::max(diff, std::abs(direct[i] - quad[i]));
  }
  const double rel = diff / std::max(1.0, scale);
  const bool ok = exact_ok && rel < 1e-10;

  JsonWriter w;
  w.begin_object();
  w.key("command").str("kernel-check");
  write_config_echo(w, c);
  w.key("results").begin_object();
  w.key("exact_identities").boolean(exact_ok);
  w.key("quadrature_rel_diff").num(rel);
  w.key("K").num(K);
  w.key("nodes").num(c.solver.kernel_nodes);
  w.key("ok").boolean(ok);
  w.end_object();
  w.end_object();
  write_file(prepare_dir(c, out_dir) / "kernel_check.json", w.take());
  std::printf("kernel check: %s (quadrature rel diff %.3e)\n", ok ? "ok" : "FAILED", rel);
  return ok ? 0 : 1;
}

int run_solve(const RunConfig& c, const std::string& out_dir) {
  const pvsurf::StabilityReport h1 = pvsurf::check_stability_H1(c.state);
  if (!h1.stable) {
    std::fprintf(stderr,
                 "solve refused: reference state violates the stability condition "
                 "(|E0|^2 margin %.17g, admissible bound %.17g)\n",
                 h1.margin, h1.rhs);
    return 1;
  }
  const double tau = resolve_tau(c);
  const pvsurf::Background bg = make_run_background(c, tau);
  const pvsurf::FrontSpectrum f0 = pvsurf::make_front(c.J, c.K, c.modes);
  const double t_exist =
      pvsurf::existence_time_estimate(f0, c.solver.k_const);

  const std::filesystem::path dir = prepare_dir(c, out_dir);
  std::vector<std::pair<long, double>> written;  // snapshot index, time
  long step = 0;
  const auto on_step = [&](const pvsurf::FrontSpectrum& s) {
    if (step % c.snapshot_every == 0) {
      const long idx = step / c.snapshot_every;
      write_front_snapshot(dir / snapshot_name(idx), s);
      written.push_back({idx, s.time});
    }
    ++step;
  };
  const pvsurf::SolveResult res = pvsurf::integrate(bg.coeffs, f0, c.solver, on_step);

  JsonWriter w;
  w.begin_object();
  w.key("command").str("solve");
  write_config_echo(w, c);
  w.key("results").begin_object();
  w.key("tau").num(tau);
  w.key("status").str(res.status == pvsurf::SolveStatus::ok
                          ? "ok"
                          : (res.status == pvsurf::SolveStatus::blowup ? "blowup" : "nan"));
  w.key("steps").num((long long)res.steps);
  w.key("time").num(res.front.time);
  w.key("h4_initial").num(res.h4_initial);
  w.key("h4_final").num(res.h4_final);
  w.key("existence_time_estimate").num(t_exist);
  w.key("snapshots").begin_array();
  for (const auto& [idx, t] : written) {
    w.begin_object();
    w.key("file").str(snapshot_name(idx));
    w.key("time").num(t);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  w.end_object();
  write_file(dir / "solve.json", w.take());
  std::printf("solve: status=%s steps=%ld h4 %.17g -> %.17g\n",
              res.status == pvsurf::SolveStatus::ok ? "ok" : "aborted", res.steps,
              res.h4_initial, res.h4_final);
  return res.status == pvsurf::SolveStatus::ok ? 0 : 2;
}

int run_reconstruct(const RunConfig& c, const std::string& out_dir) {
  const double tau = resolve_tau(c);
  const pvsurf::Background bg = make_run_background(c, tau);
  const pvsurf::FrontSpectrum f = pvsurf::make_front(c.J, c.K, c.modes);

  pvsurf::ProfileGrid grid;
  for (int i = 0; i < c.ny; ++i) {
    grid.y1.push_back(2.0 * M_PI * i / c.ny);
    grid.y2.push_back(2.0 * M_PI * i / c.ny);
  }
  grid.y3 = {0.0};
  for (int i = 0; i < c.n_Y3; ++i) {
    const double y = c.Y3_max * i / double(std::max(1, c.n_Y3 - 1));
    grid.Y3_plasma.push_back(y);
    grid.Y3_vacuum.push_back(-y);
  }
  for (int i = 0; i < c.n_theta; ++i) grid.theta.push_back(2.0 * M_PI * i / c.n_theta);

  const pvsurf::LeadingFields fields = pvsurf::reconstruct_leading(bg, f, grid);
  double sup_u = 0.0, sup_v = 0.0, max_imag = 0.0;
  for (const auto& v : fields.U1) {
    sup_u = std::max(sup_u, std::abs(v.real()));
    max_imag = std::max(max_imag, std::abs(v.imag()));
  }
  for (const auto& v : fields.V1) {
    sup_v = std::max(sup_v, std::abs(v.real()));
    max_imag = std::max(max_imag, std::abs(v.imag()));
  }

  const std::filesystem::path dir = prepare_dir(c, out_dir);
  const auto dump = [&](const char* name, const std::vector<std::complex<double>>& data,
                        const std::vector<double>& Y3, int ncomp) {
    std::string out = "# y1 y2 y3 Y3 theta components...\n";
    std::size_t at = 0;
    for (double y1 : grid.y1)
      for (double y2 : grid.y2)
        for (double y3 : grid.y3)
          for (double Y : Y3)
            for (double th : grid.theta) {
              char head[160];
              std::snprintf(head, sizeof head, "%.17g %.17g %.17g %.17g %.17g", y1, y2, y3,
                            Y, th);
              out += head;
              for (int comp = 0; comp < ncomp; ++comp) {
                char cell[48];
                std::snprintf(cell, sizeof cell, " %.17g", data[at + comp].real());
                out += cell;
              }
              at += std::size_t(ncomp);
              out += '\n';
            }
    write_file(dir / name, out);
  };
  dump("profiles_plasma.txt", fields.U1, grid.Y3_plasma, 7);
  dump("profiles_vacuum.txt", fields.V1, grid.Y3_vacuum, 6);

  JsonWriter w;
  w.begin_object();
  w.key("command").str("reconstruct");
  write_config_echo(w, c);
  w.key("results").begin_object();
  w.key("tau").num(tau);
  w.key("sup_plasma").num(sup_u);
  w.key("sup_vacuum").num(sup_v);
  w.key("max_imag").num(max_imag);
  w.key("points_plasma").num((long long)(fields.U1.size() / 7));
  w.key("points_vacuum").num((long long)(fields.V1.size() / 6));
  w.end_object();
  w.end_object();
  write_file(dir / "reconstruct.json", w.take());
  std::printf("reconstruct: sup plasma %.17g, sup vacuum %.17g\n", sup_u, sup_v);
  return 0;
}

void write_norms(JsonWriter& w, const char* name, const pvsurf::ResidualNorms& n) {
  w.key(name).begin_object();
  w.key("sup").num(n.sup);
  w.key("l2").num(n.l2);
  w.end_object();
}

int run_residual_sweep(const RunConfig& c, const std::string& out_dir) {
  if (c.sweep_l.size() < 2)
    throw ConfigError("grids.sweep_l needs at least two scale factors");
  const double tau = resolve_tau(c);
  const pvsurf::Background bg = make_run_background(c, tau);
  const pvsurf::FrontSpectrum f = pvsurf::make_front(c.J, c.K, c.modes);
  const pvsurf::FrontSpectrum fdot = pvsurf::amplitude_rhs(bg.coeffs, f, c.solver);
  const pvsurf::SweepReport rep = pvsurf::epsilon_sweep(bg, f, fdot, c.sweep_l, c.grid);

  static const char* plasma_names[4] = {"momentum", "induction", "div_u", "div_B"};
  static const char* vacuum_names[4] = {"faraday", "ampere", "div_H", "div_E"};
  static const char* jump_names[5] = {"kinematic", "pressure", "B_normal", "H_normal",
                                      "tangential_E"};

  JsonWriter w;
  w.begin_object();
  w.key("command").str("residual-sweep");
  write_config_echo(w, c);
  w.key("results").begin_object();
  w.key("tau").num(tau);
  w.key("runs").begin_array();
  for (std::size_t i = 0; i < rep.eps.size(); ++i) {
    w.begin_object();
    w.key("l").num(c.sweep_l[i]);
    w.key("eps").num(rep.eps[i]);
    w.key("interior").begin_object();
    for (int g = 0; g < 4; ++g) write_norms(w, plasma_names[g], rep.interior[i].plasma[g]);
    for (int g = 0; g < 4; ++g) write_norms(w, vacuum_names[g], rep.interior[i].vacuum[g]);
    w.key("included_points").num((long long)rep.interior[i].included_points);
    w.key("excluded_points").num((long long)rep.interior[i].excluded_points);
    w.end_object();
    w.key("boundary").begin_object();
    for (int g = 0; g < 5; ++g) write_norms(w, jump_names[g], rep.boundary[i].conditions[g]);
    w.key("third_row_consistency").num(rep.boundary[i].third_row_consistency);
    w.end_object();
    w.end_object();
  }
  w.end_array();
  w.key("interior_slope").num(rep.interior_slope);
  w.key("boundary_slope").num(rep.boundary_slope);
  w.key("degenerate").boolean(rep.degenerate);
  w.key("fp_floor_warning").boolean(rep.fp_floor_warning);
  w.end_object();
  w.end_object();

  const std::filesystem::path dir = prepare_dir(c, out_dir);
  std::string data =
      "# eps momentum induction div_u div_B faraday ampere div_H div_E "
      "kinematic pressure B_normal H_normal tangential_E\n";
  for (std::size_t i = 0; i < rep.eps.size(); ++i) {
    char head[40];
    std::snprintf(head, sizeof head, "%.17g", rep.eps[i]);
    data += head;
    for (int g = 0; g < 4; ++g) {
      char cell[48];
      std::snprintf(cell, sizeof cell, " %.17g", rep.interior[i].plasma[g].sup);
      data += cell;
    }
    for (int g = 0; g < 4; ++g) {
      char cell[48];
      std::snprintf(cell, sizeof cell, " %.17g", rep.interior[i].vacuum[g].sup);
      data += cell;
    }
    for (int g = 0; g < 5; ++g) {
      char cell[48];
      std::snprintf(cell, sizeof cell, " %.17g", rep.boundary[i].conditions[g].sup);
      data += cell;
    }
    data += '\n';
  }
  write_file(dir / "sweep_data.txt", data);
  write_file(dir / "residual_sweep.json", w.take());
  std::printf("residual sweep: interior slope %.17g, boundary slope %.17g\n",
              rep.interior_slope, rep.boundary_slope);
  return 0;
}

int run_rectification(const RunConfig& c, const std::string& out_dir) {
  const double tau = resolve_tau(c);
  const pvsurf::Background bg = make_run_background(c, tau);
  const pvsurf::FrontSpectrum f0 = pvsurf::make_front(c.J, c.K, c.modes);

  std::vector<pvsurf::FrontSpectrum> snapshots;
  long step = 0;
  const auto on_step = [&](const pvsurf::FrontSpectrum& s) {
    if (step % c.snapshot_every == 0) snapshots.push_back(s);
    ++step;
  };
  const pvsurf::SolveResult res = pvsurf::integrate(bg.coeffs, f0, c.solver, on_step);
  if (res.status != pvsurf::SolveStatus::ok) {
    std::fprintf(stderr, "rectification: time integration aborted (%s)\n",
                 res.status == pvsurf::SolveStatus::blowup ? "blow-up" : "NaN");
    return 2;
  }
  if (snapshots.size() < 3)
    throw ConfigError(
        "rectification needs >= 3 snapshots: increase solver.t_end or lower "
        "output.snapshot_every");

  const pvsurf::RectificationReport rep = pvsurf::rectification_indicator(snapshots, bg);
  const double rel = rep.sup / std::max(rep.derivative_scale, 1e-300);

  const std::filesystem::path dir = prepare_dir(c, out_dir);
  std::string data = "# time then n_grid*n_grid indicator values, row-major\n";
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    char head[40];
    std::snprintf(head, sizeof head, "%.17g", rep.times[i]);
    data += head;
    for (double v : rep.indicator[i]) {
      char cell[48];
      std::snprintf(cell, sizeof cell, " %.17g", v);
      data += cell;
    }
    data += '\n';
  }
  write_file(dir / "rectification_data.txt", data);

  JsonWriter w;
  w.begin_object();
  w.key("command").str("rectification");
  write_config_echo(w, c);
  w.key("results").begin_object();
  w.key("tau").num(tau);
  w.key("snapshots").num((long long)snapshots.size());
  w.key("n_grid").num(rep.n_grid);
  w.key("coefficients")
      .begin_array()
      .num(rep.coeffs[0])
      .num(rep.coeffs[1])
      .num(rep.coeffs[2])
      .end_array();
  w.key("sup").num(rep.sup);
  w.key("derivative_scale").num(rep.derivative_scale);
  w.key("relative").num(rel);
  w.end_object();
  w.end_object();
  write_file(dir / "rectification.json", w.take());
  std::printf("rectification: sup %.17g, relative %.17g\n", rep.sup, rel);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral toolkit for plasma-vacuum surface waves"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (0 = hardware default)");

  struct Sub {
    CLI::App* cmd;
    std::string config;
    std::string output;
    int (*fn)(const RunConfig&, const std::string&);
  };
  std::vector<Sub> subs;
  subs.reserve(8);  // CLI11 keeps pointers into the slots: no reallocation allowed
  const auto add = [&](const char* name, const char* help,
                       int (*fn)(const RunConfig&, const std::string&)) {
    CLI::App* s = app.add_subcommand(name, help);
    subs.push_back({s, "", "", fn});
    Sub& slot = subs.back();
    s->add_option("config", slot.config, "JSON run configuration")->required();
    s->add_option("--output", slot.output, "override output.directory");
  };
  add("stability", "evaluate both interface stability conditions", run_stability);
  add("roots", "locate the two admissible time frequencies", run_roots);
  add("kernel-check", "verify interaction-kernel identities and quadrature", run_kernel_check);
  add("solve", "integrate the front amplitude equation", run_solve);
  add("reconstruct", "sample the leading surface-wave profiles", run_reconstruct);
  add("residual-sweep", "measure approximate-solution residual scaling", run_residual_sweep);
  add("rectification", "probe the mean-mode source along a front evolution",
      run_rectification);

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) pvsurf::set_threads(threads);

  for (const Sub& s : subs) {
    if (!s.cmd->parsed()) continue;
    try {
      json root;
      {
        std::ifstream in(s.config);
        if (!in) {
          std::fprintf(stderr, "cannot open config file: %s\n", s.config.c_str());
          return 1;
        }
        try {
          root = json::parse(in);
        } catch (const json::parse_error& e) {
          std::fprintf(stderr, "config parse error: %s\n", e.what());
          return 1;
        }
      }
      const RunConfig cfg = parse_config(root);
      return s.fn(cfg, s.output);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
    }
  }
  return 1;
}
