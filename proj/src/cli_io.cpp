#include "fcnls/cli_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "fcnls/errors.hpp"
#include "fcnls/experiments.hpp"
#include "fcnls/functionals.hpp"

namespace fcnls {

namespace {

std::string num17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string num6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& code, int line, const std::string& what) {
  throw Error(code, "line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& v, int line, const std::string& key) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty())
    fail("type_mismatch", line, key + " expects a number, got '" + v + "'");
  return x;
}

long long parse_int(const std::string& v, int line, const std::string& key) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty())
    fail("type_mismatch", line, key + " expects an integer, got '" + v + "'");
  return x;
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail("type_mismatch", line, key + " expects true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& v, int line, const std::string& key) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const std::size_t comma = v.find(',', start);
    const std::string item = trim(v.substr(start, comma - start));
    if (!item.empty()) out.push_back(parse_double(item, line, key));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) fail("type_mismatch", line, key + " expects a comma list of numbers");
  return out;
}

/// Maps a model validation code to the config key it concerns.
std::string offending_key(const std::string& code) {
  if (code == "N_lt_2") return "model.N";
  if (code == "s_out_of_range") return "model.s";
  if (code == "p_not_gt_1") return "model.p";
  if (code == "eps_invalid") return "model.eps";
  if (code == "b_nonnegative" || code == "N_plus_b_minus_s_nonpositive" ||
      code == "two_s_two_b_alpha_nonpositive")
    return "model.b";
  return "model.alpha";
}

void atomic_write(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw Error("io_failure", "cannot open " + tmp + " for writing");
  const std::size_t n = bytes.empty() ? 0 : std::fwrite(bytes.data(), 1, bytes.size(), f);
  const bool flushed = std::fclose(f) == 0;
  if (n != bytes.size() || !flushed) {
    std::remove(tmp.c_str());
    throw Error("io_failure", "short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error("io_failure", "cannot rename " + tmp + " to " + path);
  }
}

template <typename T>
void put_raw(std::string& out, const T& v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get_raw(const std::string& in, std::size_t& pos) {
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

constexpr char kMagic[6] = {'F', 'C', 'N', 'L', 'S', '1'};

std::string status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "Completed";
    case RunStatus::BlowUpDetected: return "BlowUpDetected";
    default: return "StepUnderflow";
  }
}

/// Quotes a CSV cell: wraps in double quotes when it contains a comma,
/// quote or newline, doubling inner quotes.
std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, int> model_lines;
  using Handler = std::function<void(const std::string&, int, const std::string&)>;
  const std::map<std::string, Handler> table = {
      {"model.N", [&](const std::string& v, int l, const std::string& k) {
         cfg.params.N = static_cast<int>(parse_int(v, l, k));
       }},
      {"model.s", [&](const std::string& v, int l, const std::string& k) {
         cfg.params.s = parse_double(v, l, k);
       }},
      {"model.b", [&](const std::string& v, int l, const std::string& k) {
         cfg.params.b = parse_double(v, l, k);
       }},
      {"model.alpha", [&](const std::string& v, int l, const std::string& k) {
         cfg.params.alpha = parse_double(v, l, k);
       }},
      {"model.p", [&](const std::string& v, int l, const std::string& k) {
         cfg.params.p = parse_double(v, l, k);
       }},
      {"model.eps", [&](const std::string& v, int l, const std::string& k) {
         cfg.params.eps = static_cast<int>(parse_int(v, l, k));
       }},
      {"grid.dim", [&](const std::string& v, int l, const std::string& k) {
         cfg.grid.dim = static_cast<int>(parse_int(v, l, k));
       }},
      {"grid.M", [&](const std::string& v, int l, const std::string& k) {
         cfg.grid.M = static_cast<int>(parse_int(v, l, k));
       }},
      {"grid.L", [&](const std::string& v, int l, const std::string& k) {
         cfg.grid.L = parse_double(v, l, k);
       }},
      {"grid.offset", [&](const std::string& v, int l, const std::string& k) {
         cfg.grid.offset = parse_bool(v, l, k);
       }},
      {"ground.tol", [&](const std::string& v, int l, const std::string& k) {
         cfg.ground.tol = parse_double(v, l, k);
       }},
      {"ground.max_iter", [&](const std::string& v, int l, const std::string& k) {
         cfg.ground.max_iter = static_cast<int>(parse_int(v, l, k));
       }},
      {"ground.shell_tol", [&](const std::string& v, int l, const std::string& k) {
         cfg.ground.shell_tol = parse_double(v, l, k);
       }},
      {"evolve.dt0", [&](const std::string& v, int l, const std::string& k) {
         cfg.evolve.dt0 = parse_double(v, l, k);
       }},
      {"evolve.t_end", [&](const std::string& v, int l, const std::string& k) {
         cfg.evolve.t_end = parse_double(v, l, k);
       }},
      {"evolve.dt_min", [&](const std::string& v, int l, const std::string& k) {
         cfg.evolve.dt_min = parse_double(v, l, k);
       }},
      {"evolve.grad_factor", [&](const std::string& v, int l, const std::string& k) {
         cfg.evolve.blowup_grad_factor = parse_double(v, l, k);
       }},
      {"evolve.linf_factor", [&](const std::string& v, int l, const std::string& k) {
         cfg.evolve.blowup_linf_factor = parse_double(v, l, k);
       }},
      {"evolve.record_every", [&](const std::string& v, int l, const std::string& k) {
         cfg.evolve.record_every = static_cast<int>(parse_int(v, l, k));
       }},
      {"evolve.virial_r", [&](const std::string& v, int l, const std::string& k) {
         cfg.evolve.virial_R = parse_double(v, l, k);
       }},
      {"evolve.dealias", [&](const std::string& v, int l, const std::string& k) {
         cfg.evolve.dealias = parse_bool(v, l, k);
       }},
      {"virial.r", [&](const std::string& v, int l, const std::string& k) {
         cfg.virial_radius = parse_double(v, l, k);
       }},
      {"virial.eps_hat", [&](const std::string& v, int l, const std::string& k) {
         cfg.virial_eps_hat = parse_double(v, l, k);
       }},
      {"sweep.scales", [&](const std::string& v, int l, const std::string& k) {
         cfg.sweep_scales = parse_list(v, l, k);
       }},
      {"sweep.samples", [&](const std::string& v, int l, const std::string& k) {
         cfg.sweep_samples = static_cast<int>(parse_int(v, l, k));
       }},
      {"sweep.seed", [&](const std::string& v, int l, const std::string& k) {
         cfg.sweep_seed = static_cast<std::uint64_t>(parse_int(v, l, k));
       }},
      {"init.kind", [&](const std::string& v, int l, const std::string& k) {
         if (v != "gaussian" && v != "soliton")
           fail("type_mismatch", l, k + " expects gaussian or soliton, got '" + v + "'");
         cfg.init.kind = v;
       }},
      {"init.amp", [&](const std::string& v, int l, const std::string& k) {
         cfg.init.amp = parse_double(v, l, k);
       }},
      {"init.width", [&](const std::string& v, int l, const std::string& k) {
         cfg.init.width = parse_double(v, l, k);
       }},
      {"init.scale", [&](const std::string& v, int l, const std::string& k) {
         cfg.init.scale = parse_double(v, l, k);
       }},
      {"output.dir", [&](const std::string& v, int l, const std::string& k) {
         if (v.empty()) fail("type_mismatch", l, k + " expects a path");
         cfg.output_dir = v;
       }},
  };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail("bad_syntax", line_no, "expected 'section.key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = table.find(key);
    if (it == table.end()) fail("unknown_key", line_no, "unknown key '" + key + "'");
    it->second(value, line_no, key);
    if (key.rfind("model.", 0) == 0) model_lines[key] = line_no;
  }

  static const char* required[] = {"model.N", "model.s",     "model.b",
                                   "model.alpha", "model.p", "model.eps"};
  std::string missing;
  for (const char* key : required)
    if (!model_lines.count(key)) missing += (missing.empty() ? "" : ", ") + std::string(key);
  if (!missing.empty())
    throw Error("missing_params", "required keys not set: " + missing);

  try {
    validate(cfg.params);
  } catch (const Error& e) {
    const std::string key = offending_key(e.code());
    fail(e.code(), model_lines.at(key), key + ": " + e.what());
  }
  validate_grid(cfg.grid);
  return cfg;
}

std::string emit_config(const RunConfig& c) {
  std::string out;
  const auto kv = [&](const char* key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  };
  kv("model.N", std::to_string(c.params.N));
  kv("model.s", num17(c.params.s));
  kv("model.b", num17(c.params.b));
  kv("model.alpha", num17(c.params.alpha));
  kv("model.p", num17(c.params.p));
  kv("model.eps", std::to_string(c.params.eps));
  kv("grid.dim", std::to_string(c.grid.dim));
  kv("grid.M", std::to_string(c.grid.M));
  kv("grid.L", num17(c.grid.L));
  kv("grid.offset", c.grid.offset ? "true" : "false");
  kv("ground.tol", num17(c.ground.tol));
  kv("ground.max_iter", std::to_string(c.ground.max_iter));
  kv("ground.shell_tol", num17(c.ground.shell_tol));
  kv("evolve.dt0", num17(c.evolve.dt0));
  kv("evolve.t_end", num17(c.evolve.t_end));
  kv("evolve.dt_min", num17(c.evolve.dt_min));
  kv("evolve.grad_factor", num17(c.evolve.blowup_grad_factor));
  kv("evolve.linf_factor", num17(c.evolve.blowup_linf_factor));
  kv("evolve.record_every", std::to_string(c.evolve.record_every));
  kv("evolve.virial_r", num17(c.evolve.virial_R));
  kv("evolve.dealias", c.evolve.dealias ? "true" : "false");
  kv("virial.r", num17(c.virial_radius));
  kv("virial.eps_hat", num17(c.virial_eps_hat));
  std::string scales;
  for (double s : c.sweep_scales) scales += (scales.empty() ? "" : ", ") + num17(s);
  kv("sweep.scales", scales);
  kv("sweep.samples", std::to_string(c.sweep_samples));
  kv("sweep.seed", std::to_string(c.sweep_seed));
  kv("init.kind", c.init.kind);
  kv("init.amp", num17(c.init.amp));
  kv("init.width", num17(c.init.width));
  kv("init.scale", num17(c.init.scale));
  kv("output.dir", c.output_dir);
  return out;
}

void snapshot_write(const Field& u, const std::string& path) {
  const Grid& g = u.grid();
  std::string bytes;
  bytes.reserve(23 + 16 * u.size());
  bytes.append(kMagic, sizeof kMagic);
  put_raw<std::uint32_t>(bytes, static_cast<std::uint32_t>(g.dim));
  put_raw<std::uint32_t>(bytes, static_cast<std::uint32_t>(g.M));
  put_raw<double>(bytes, g.L);
  put_raw<std::uint8_t>(bytes, g.offset ? 1 : 0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    put_raw<double>(bytes, u[i].real());
    put_raw<double>(bytes, u[i].imag());
  }
  atomic_write(path, bytes);
}

Field snapshot_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io_failure", "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw Error("bad_magic", path + " is not a field snapshot");
  constexpr std::size_t header = sizeof kMagic + 4 + 4 + 8 + 1;
  if (bytes.size() < header)
    throw Error("truncated", "expected " + std::to_string(header) + " header bytes, got " +
                                 std::to_string(bytes.size()));
  std::size_t pos = sizeof kMagic;
  const auto dim = get_raw<std::uint32_t>(bytes, pos);
  const auto M = get_raw<std::uint32_t>(bytes, pos);
  const double L = get_raw<double>(bytes, pos);
  const auto offset = get_raw<std::uint8_t>(bytes, pos);
  if (dim < 2 || dim > 3)
    throw Error("bad_dimension", "snapshot dimension " + std::to_string(dim));

  Field u(Grid{static_cast<int>(dim), static_cast<int>(M), L, offset != 0});
  const std::size_t expected = header + 16 * u.size();
  if (bytes.size() != expected)
    throw Error("truncated", "expected " + std::to_string(expected) + " bytes, got " +
                                 std::to_string(bytes.size()));
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double re = get_raw<double>(bytes, pos);
    const double im = get_raw<double>(bytes, pos);
    u[i] = cplx(re, im);
  }
  return u;
}

void write_time_series(const std::vector<TimeSeriesRow>& rows, const std::string& path) {
  std::string out = "t,mass,energy,grad_s,linf,m_psi,dt\n";
  for (const auto& r : rows) {
    out += num17(r.t) + "," + num17(r.mass) + "," + num17(r.energy) + "," +
           num17(r.grad_s) + "," + num17(r.linf) + "," + num17(r.m_psi) + "," +
           num17(r.dt) + "\n";
  }
  atomic_write(path, out);
}

void write_variance_rows(const std::vector<VarianceRow>& rows, const std::string& path) {
  std::string out = "t,m_psi,dm_dt,bound_rhs\n";
  for (const auto& r : rows)
    out += num17(r.t) + "," + num17(r.m_psi) + "," + num17(r.dm_dt) + "," +
           num17(r.bound_rhs) + "\n";
  atomic_write(path, out);
}

namespace {

struct CliArgs {
  std::string command;
  std::string config_path;
  std::string out_dir;
  bool quiet = false;
};

int usage(std::ostream& os) {
  os << "usage: fcnls <command> --config PATH [--out DIR] [--quiet]\n"
        "commands:\n"
        "  check      validate parameters, print derived exponents and regime flags\n"
        "  ground     solve the ground state, write snapshot and metadata\n"
        "  gn         print the sharp-constant closed form, measured value and gap\n"
        "  evolve     integrate the initial datum, write time series and final field\n"
        "  virial     integrate and write the localized-variance report\n"
        "  dichotomy  sweep scales of the ground state, write the verdict report\n"
        "  sweep      random-field inequality sweep, write the max ratio\n"
        "exit codes: 0 ok, 2 usage or validation error, 3 dichotomy mismatch,\n"
        "            4 numerical failure\n"
        "config keys and defaults (model.* required):\n";
  RunConfig defaults;
  defaults.params = ProblemParams{};
  os << emit_config(defaults);
  return 2;
}

Field initial_datum(const RunConfig& cfg, std::ostream& log, bool quiet) {
  if (cfg.init.kind == "soliton") {
    if (!quiet) log << "solving ground state on M = " << cfg.grid.M << "\n";
    const GroundState gs = solve_ground_state(cfg.params, cfg.grid, nullptr, cfg.ground);
    Field u0 = gs.phi;
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] *= cfg.init.scale;
    return u0;
  }
  Field u0(cfg.grid);
  std::vector<int> idx(cfg.grid.dim, 0);
  for (std::size_t flat = 0; flat < u0.size(); ++flat) {
    double r2 = 0.0;
    for (int a = 0; a < cfg.grid.dim; ++a) {
      const double x = cfg.grid.coord(idx[a]);
      r2 += x * x;
    }
    u0[flat] = cfg.init.amp * std::exp(-r2 / (2.0 * cfg.init.width * cfg.init.width));
    for (int a = cfg.grid.dim - 1; a >= 0; --a) {
      if (++idx[a] < cfg.grid.M) break;
      idx[a] = 0;
    }
  }
  return u0;
}

int cmd_check(const RunConfig& cfg) {
  const DerivedExponents d = derive(cfg.params);
  const RegimeFlags f = regime(cfg.params);
  const auto flag = [](bool v) { return v ? "true" : "false"; };
  std::cout << "s_c = " << num6(d.s_c) << "\n"
            << "B = " << num6(d.B) << "\n"
            << "A = " << num6(d.A) << "\n"
            << "p_star = " << num6(d.p_star) << "\n"
            << "p_upper = " << num6(d.p_upper) << "\n"
            << "p_tilde = " << num6(d.p_tilde) << "\n"
            << "p_bar = " << num6(d.p_bar) << "\n"
            << "riesz_const = " << num6(d.riesz_const) << "\n"
            << "blowup_power_cap = " << num6(d.blowup_power_cap) << "\n"
            << "admissible = " << flag(f.admissible) << "\n"
            << "intercritical = " << flag(f.intercritical) << "\n"
            << "lwp_window = " << flag(f.lwp_window) << "\n"
            << "blowup_window = " << flag(f.blowup_window) << "\n"
            << "defocusing_global = " << flag(f.defocusing_global) << "\n";
  return 0;
}

int cmd_ground(const RunConfig& cfg, const std::string& out, bool quiet) {
  const GroundState gs = solve_ground_state(cfg.params, cfg.grid, nullptr, cfg.ground);
  snapshot_write(gs.phi, out + "/ground.fcnls");
  std::string meta;
  meta += "N = " + std::to_string(cfg.params.N) + "\n";
  meta += "s = " + num17(cfg.params.s) + "\n";
  meta += "b = " + num17(cfg.params.b) + "\n";
  meta += "alpha = " + num17(cfg.params.alpha) + "\n";
  meta += "p = " + num17(cfg.params.p) + "\n";
  meta += "eps = " + std::to_string(cfg.params.eps) + "\n";
  meta += "residual = " + num17(gs.residual) + "\n";
  meta += "iterations = " + std::to_string(gs.iterations) + "\n";
  meta += "mass = " + num17(gs.mass_phi) + "\n";
  meta += "grad_s_sq = " + num17(gs.grad_s_sq_phi) + "\n";
  meta += "nonlocal = " + num17(gs.nonlocal_phi) + "\n";
  meta += "c_gn_formula = " + num17(gs.c_gn_formula) + "\n";
  meta += "c_gn_quotient = " + num17(gs.c_gn_quotient) + "\n";
  atomic_write(out + "/ground_meta.txt", meta);
  if (!quiet)
    std::cerr << "ground state: residual " << num6(gs.residual) << " after "
              << gs.iterations << " iterations\n";
  return 0;
}

int cmd_gn(const RunConfig& cfg) {
  const GroundState gs = solve_ground_state(cfg.params, cfg.grid, nullptr, cfg.ground);
  const double gap =
      std::abs(gs.c_gn_quotient - gs.c_gn_formula) / std::abs(gs.c_gn_formula);
  std::cout << "c_formula = " << num17(gs.c_gn_formula) << "\n"
            << "c_quotient = " << num17(gs.c_gn_quotient) << "\n"
            << "rel_gap = " << num17(gap) << "\n";
  return 0;
}

int cmd_evolve(const RunConfig& cfg, const std::string& out, bool quiet) {
  const Field u0 = initial_datum(cfg, std::cerr, quiet);
  const RunOutcome r = evolve(u0, cfg.params, cfg.evolve);
  write_time_series(r.series, out + "/series.csv");
  snapshot_write(r.final, out + "/final.fcnls");
  if (!quiet)
    std::cerr << "evolve: " << status_name(r.status) << " at t = " << num6(r.t_stop)
              << ", " << r.series.size() << " rows\n";
  return r.status == RunStatus::StepUnderflow ? 4 : 0;
}

int cmd_virial(const RunConfig& cfg, const std::string& out, bool quiet) {
  const Field u0 = initial_datum(cfg, std::cerr, quiet);
  std::vector<double> times;
  std::vector<Field> fields;
  const RunOutcome r = evolve(u0, cfg.params, cfg.evolve,
                              [&](double t, const Field& u) {
                                times.push_back(t);
                                fields.push_back(u);
                              });
  const VirialWeight w = build_weight(cfg.grid, cfg.virial_radius);
  VirialOptions opts;
  opts.eps_hat = cfg.virial_eps_hat;
  const auto rows = variance_report(times, fields, w, cfg.params, opts);
  write_variance_rows(rows, out + "/variance.csv");
  if (!quiet)
    std::cerr << "virial: " << rows.size() << " rows, run " << status_name(r.status)
              << " at t = " << num6(r.t_stop) << "\n";
  return r.status == RunStatus::StepUnderflow ? 4 : 0;
}

int cmd_dichotomy(const RunConfig& cfg, const std::string& out, bool quiet) {
  const GroundState gs = solve_ground_state(cfg.params, cfg.grid, nullptr, cfg.ground);
  const DichotomyReport rep = dichotomy_sweep(gs, cfg.params, cfg.sweep_scales, cfg.evolve);
  std::string csv = "lambda,me,g,predicted,reason,observed,max_grad_s,t_last,flag,note\n";
  for (const auto& row : rep.rows) {
    csv += num17(row.lambda) + ",";
    csv += (row.predicted.me ? num17(*row.predicted.me) : std::string()) + ",";
    csv += (row.predicted.g ? num17(*row.predicted.g) : std::string()) + ",";
    csv += to_string(row.predicted.label) + ",";
    csv += csv_cell(row.predicted.reason) + ",";
    csv += (row.observed ? status_name(*row.observed) : std::string()) + ",";
    csv += num17(row.max_grad_s) + ",";
    csv += num17(row.t_last) + ",";
    csv += row.mismatch ? "MISMATCH" : (row.observed ? "ok" : "error");
    csv += "," + csv_cell(row.note) + "\n";
  }
  atomic_write(out + "/dichotomy.csv", csv);
  if (!quiet)
    std::cerr << "dichotomy: " << rep.rows.size() << " rows, " << rep.confirmations
              << " confirmations, " << rep.mismatches << " mismatches\n";
  return rep.mismatches > 0 ? 3 : 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out, bool quiet) {
  const GroundState gs = solve_ground_state(cfg.params, cfg.grid, nullptr, cfg.ground);
  const double worst = gn_sweep(gs, cfg.params, cfg.sweep_samples, cfg.sweep_seed);
  std::string csv = "samples,seed,max_ratio\n";
  csv += std::to_string(cfg.sweep_samples) + "," + std::to_string(cfg.sweep_seed) + "," +
         num17(worst) + "\n";
  atomic_write(out + "/gn_sweep.csv", csv);
  if (!quiet) std::cerr << "sweep: max ratio " << num17(worst) << "\n";
  return worst <= 1.0 + 1e-4 ? 0 : 4;
}

}  // namespace

int run_main(const std::vector<std::string>& args) {
  CliArgs cli;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--quiet") {
      cli.quiet = true;
    } else if (a == "--config" || a == "--out") {
      if (i + 1 >= args.size()) {
        std::cerr << "error: " << a << " needs a value\n";
        return 2;
      }
      (a == "--config" ? cli.config_path : cli.out_dir) = args[++i];
    } else if (a == "--help" || a == "-h") {
      usage(std::cout);
      return 0;
    } else if (!a.empty() && a[0] == '-') {
      std::cerr << "error: unknown flag " << a << "\n";
      return usage(std::cerr);
    } else if (cli.command.empty()) {
      cli.command = a;
    } else {
      std::cerr << "error: unexpected argument " << a << "\n";
      return usage(std::cerr);
    }
  }
  static const std::set<std::string> known = {"check", "ground", "gn",    "evolve",
                                              "virial", "dichotomy", "sweep"};
  if (!known.count(cli.command)) {
    if (!cli.command.empty()) std::cerr << "error: unknown command " << cli.command << "\n";
    return usage(std::cerr);
  }
  if (cli.config_path.empty()) {
    std::cerr << "error: --config is required\n";
    return usage(std::cerr);
  }

  std::ifstream in(cli.config_path);
  if (!in) {
    std::cerr << "error: cannot read " << cli.config_path << "\n";
    return 2;
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  RunConfig cfg;
  try {
    cfg = parse_config(text);
  } catch (const Error& e) {
    std::cerr << "config error [" << e.code() << "]: " << e.what() << "\n";
    return 2;
  }
  const std::string out = cli.out_dir.empty() ? cfg.output_dir : cli.out_dir;

  try {
    if (cli.command != "check" && cli.command != "gn")
      std::filesystem::create_directories(out);
    if (cli.command == "check") return cmd_check(cfg);
    if (cli.command == "ground") return cmd_ground(cfg, out, cli.quiet);
    if (cli.command == "gn") return cmd_gn(cfg);
    if (cli.command == "evolve") return cmd_evolve(cfg, out, cli.quiet);
    if (cli.command == "virial") return cmd_virial(cfg, out, cli.quiet);
    if (cli.command == "dichotomy") return cmd_dichotomy(cfg, out, cli.quiet);
    return cmd_sweep(cfg, out, cli.quiet);
  } catch (const Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace fcnls
