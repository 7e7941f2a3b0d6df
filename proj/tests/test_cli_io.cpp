#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fcnls/cli_io.hpp"
#include "fcnls/errors.hpp"

namespace fs = std::filesystem;

namespace {

using fcnls::cplx;
using fcnls::Error;
using fcnls::Field;
using fcnls::Grid;
using fcnls::RunConfig;

const char* kModelBlock =
    "model.N = 2\n"
    "model.s = 0.8\n"
    "model.b = -0.1\n"
    "model.alpha = 1\n"
    "model.p = 3\n"
    "model.eps = -1\n";

std::string code_of(const std::function<void()>& f, std::string* msg = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (msg) *msg = e.what();
    return e.code();
  }
  return "";
}

fs::path fresh_dir(const char* tag) {
  const fs::path p = fs::temp_directory_path() / (std::string("fcnls_cli_") + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CaptureStream {
  explicit CaptureStream(std::ostream& os) : os_(os), old_(os.rdbuf(buf_.rdbuf())) {}
  ~CaptureStream() { os_.rdbuf(old_); }
  std::string text() const { return buf_.str(); }

 private:
  std::ostream& os_;
  std::stringstream buf_;
  std::streambuf* old_;
};

}  // namespace

TEST_CASE("config parsing applies defaults and pins down typos") {
  const RunConfig minimal = fcnls::parse_config(kModelBlock);
  RunConfig expected;
  expected.params = {2, 0.8, -0.1, 1.0, 3.0, -1};
  CHECK(minimal == expected);

  // comments, blanks and list values
  const RunConfig full = fcnls::parse_config(
      std::string(kModelBlock) +
      "# a comment line\n"
      "\n"
      "grid.M = 64   # trailing comment\n"
      "grid.L = 10\n"
      "evolve.dt0 = 0.001\n"
      "evolve.dealias = true\n"
      "sweep.scales = 0.5, 0.9,1.3\n"
      "init.kind = soliton\n"
      "output.dir = runs/a\n");
  CHECK(full.grid.M == 64);
  CHECK(full.grid.L == 10.0);
  CHECK(full.evolve.dt0 == 0.001);
  CHECK(full.evolve.dealias);
  CHECK(full.sweep_scales == std::vector<double>{0.5, 0.9, 1.3});
  CHECK(full.init.kind == "soliton");
  CHECK(full.output_dir == "runs/a");

  // canonical emission reparses to an equal config
  CHECK(fcnls::parse_config(fcnls::emit_config(full)) == full);
  CHECK(fcnls::parse_config(fcnls::emit_config(minimal)) == minimal);

  std::string msg;
  CHECK(code_of([&] { fcnls::parse_config(std::string(kModelBlock) + "grid.n = 4\n"); },
                &msg) == "unknown_key");
  CHECK(msg.find("line 7") != std::string::npos);

  CHECK(code_of([&] { fcnls::parse_config("model.s = fast\n"); }, &msg) == "type_mismatch");
  CHECK(msg.find("line 1") != std::string::npos);

  CHECK(code_of([&] { fcnls::parse_config(std::string(kModelBlock) + "just words\n"); }) ==
        "bad_syntax");

  // inadmissible model values carry the line that set them
  CHECK(code_of([&] {
          fcnls::parse_config(
              "model.N = 2\nmodel.s = 0.8\nmodel.alpha = 1\nmodel.p = 3\n"
              "model.eps = -1\nmodel.b = 0.1\n");
        },
                &msg) == "b_nonnegative");
  CHECK(msg.find("line 6") != std::string::npos);

  CHECK(code_of([&] { fcnls::parse_config("model.N = 2\nmodel.s = 0.8\n"); }, &msg) ==
        "missing_params");
  CHECK(msg.find("model.b") != std::string::npos);
  CHECK(msg.find("model.eps") != std::string::npos);

  CHECK(code_of([&] { fcnls::parse_config(std::string(kModelBlock) + "grid.M = 100\n"); }) ==
        "grid_M_invalid");
}

TEST_CASE("snapshots round trip bit for bit and reject damage") {
  const fs::path dir = fresh_dir("snap");
  const Grid g{2, 16, 5.0, true};
  Field u(g);
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = cplx(std::sin(0.7 * i) / 3.0, std::cos(1.1 * i) * 1e-7);

  const std::string path = (dir / "field.fcnls").string();
  fcnls::snapshot_write(u, path);
  const Field back = fcnls::snapshot_read(path);
  REQUIRE(back.grid() == g);
  bool identical = true;
  for (std::size_t i = 0; i < u.size(); ++i)
    identical = identical && back[i].real() == u[i].real() && back[i].imag() == u[i].imag();
  CHECK(identical);

  // corrupt the magic
  std::string bytes = read_file(path);
  std::string damaged = bytes;
  damaged[0] = 'X';
  write_file(dir / "magic.fcnls", damaged);
  CHECK(code_of([&] { fcnls::snapshot_read((dir / "magic.fcnls").string()); }) ==
        "bad_magic");

  // truncate mid-payload: the message reports expected and actual sizes
  std::string msg;
  write_file(dir / "short.fcnls", bytes.substr(0, bytes.size() / 2));
  CHECK(code_of([&] { fcnls::snapshot_read((dir / "short.fcnls").string()); }, &msg) ==
        "truncated");
  CHECK(msg.find(std::to_string(bytes.size())) != std::string::npos);

  // patch the dimension word
  std::string odd = bytes;
  odd[6] = 5;
  write_file(dir / "dim.fcnls", odd);
  CHECK(code_of([&] { fcnls::snapshot_read((dir / "dim.fcnls").string()); }) ==
        "bad_dimension");

  // failed writes leave nothing behind
  const std::string missing = (dir / "no_such" / "f.fcnls").string();
  CHECK(code_of([&] { fcnls::snapshot_write(u, missing); }) == "io_failure");
  CHECK(!fs::exists(missing));
}

TEST_CASE("csv writers emit stable headers at full precision") {
  const fs::path dir = fresh_dir("csv");

  std::vector<fcnls::TimeSeriesRow> rows(2);
  rows[0] = {0.0, 1.0 / 3.0, -2.5, 1.25, 0.5, std::nan(""), 1e-3};
  rows[1] = {1e-3, 1.0 / 3.0, -2.5 + 1e-15, 1.25, 0.5, std::nan(""), 1e-3};
  const std::string ts_path = (dir / "series.csv").string();
  fcnls::write_time_series(rows, ts_path);
  const std::string ts = read_file(ts_path);
  CHECK(ts.rfind("t,mass,energy,grad_s,linf,m_psi,dt\n", 0) == 0);
  CHECK(ts.find("0.33333333333333331") != std::string::npos);  // %.17g survives
  CHECK(ts.find("nan") != std::string::npos);
  CHECK(std::count(ts.begin(), ts.end(), '\n') == 3);

  std::vector<fcnls::VarianceRow> vr(1);
  vr[0] = {0.25, -0.125, -1.0 / 7.0, 42.0};
  const std::string vr_path = (dir / "variance.csv").string();
  fcnls::write_variance_rows(vr, vr_path);
  const std::string vs = read_file(vr_path);
  CHECK(vs.rfind("t,m_psi,dm_dt,bound_rhs\n", 0) == 0);
  CHECK(vs.find("-0.14285714285714285") != std::string::npos);
}

TEST_CASE("the command line driver orchestrates every subcommand") {
  const fs::path dir = fresh_dir("cli");
  const fs::path out = dir / "out";
  const std::string small =
      std::string(kModelBlock) +
      "grid.M = 32\n"
      "grid.L = 12\n"
      "ground.tol = 1e-9\n"
      "evolve.dt0 = 0.01\n"
      "evolve.t_end = 0.1\n"
      "init.amp = 0.5\n"
      "init.width = 1\n"
      "sweep.samples = 25\n"
      "output.dir = " + out.string() + "\n";
  const fs::path cfg_path = dir / "run.cfg";
  write_file(cfg_path, small);
  const std::string cfg = cfg_path.string();

  // usage and validation exits
  {
    CaptureStream err(std::cerr);
    CaptureStream quiet_out(std::cout);
    CHECK(fcnls::run_main({}) == 2);
    CHECK(fcnls::run_main({"frobnicate", "--config", cfg}) == 2);
    CHECK(fcnls::run_main({"check"}) == 2);
    CHECK(fcnls::run_main({"check", "--config", (dir / "absent.cfg").string()}) == 2);
    CHECK(fcnls::run_main({"--help"}) == 0);
    CHECK(quiet_out.text().find("usage:") != std::string::npos);
  }
  {
    write_file(dir / "bad.cfg", std::string(kModelBlock) + "model.b = 0.1\n");
    CaptureStream err(std::cerr);
    CHECK(fcnls::run_main({"check", "--config", (dir / "bad.cfg").string()}) == 2);
    CHECK(err.text().find("b_nonnegative") != std::string::npos);
  }

  {
    CaptureStream capture(std::cout);
    CHECK(fcnls::run_main({"check", "--config", cfg}) == 0);
    const std::string text = capture.text();
    CHECK(text.find("s_c = 0.4") != std::string::npos);
    CHECK(text.find("B = 4") != std::string::npos);
    CHECK(text.find("p_upper = 7") != std::string::npos);
    CHECK(text.find("blowup_window = true") != std::string::npos);
    CHECK(text.find("lwp_window = false") != std::string::npos);
  }

  {
    CaptureStream err(std::cerr);
    CHECK(fcnls::run_main({"ground", "--config", cfg, "--quiet"}) == 0);
    CHECK(err.text().empty());
  }
  const Field phi = fcnls::snapshot_read((out / "ground.fcnls").string());
  CHECK(phi.grid().M == 32);
  const std::string meta = read_file(out / "ground_meta.txt");
  CHECK(meta.find("residual = ") != std::string::npos);
  CHECK(meta.find("c_gn_quotient = ") != std::string::npos);

  {
    CaptureStream capture(std::cout);
    CHECK(fcnls::run_main({"gn", "--config", cfg, "--quiet"}) == 0);
    CHECK(capture.text().find("rel_gap = ") != std::string::npos);
  }

  // evolve: deterministic series, readable final state
  CHECK(fcnls::run_main({"evolve", "--config", cfg, "--quiet"}) == 0);
  const std::string series_a = read_file(out / "series.csv");
  CHECK(series_a.rfind("t,mass,energy,grad_s,linf,m_psi,dt\n", 0) == 0);
  CHECK(std::count(series_a.begin(), series_a.end(), '\n') == 12);  // header + 11 rows
  CHECK(series_a.find("nan") != std::string::npos);  // virial column disabled
  CHECK(fcnls::snapshot_read((out / "final.fcnls").string()).grid().M == 32);
  CHECK(fcnls::run_main({"evolve", "--config", cfg, "--quiet"}) == 0);
  CHECK(read_file(out / "series.csv") == series_a);

  // virial: localized variance rows from the same recipe
  write_file(dir / "vir.cfg", small + "evolve.virial_r = 3\nvirial.r = 3\n");
  CHECK(fcnls::run_main({"virial", "--config", (dir / "vir.cfg").string(), "--quiet"}) == 0);
  const std::string variance = read_file(out / "variance.csv");
  CHECK(variance.rfind("t,m_psi,dm_dt,bound_rhs\n", 0) == 0);
  CHECK(std::count(variance.begin(), variance.end(), '\n') == 12);

  // dichotomy: confirmation run exits 0, forced underflow exits 3.  M = 32
  // is too coarse for the indicator geometry (the quadrature defect pushes
  // ME(0.9 phi) just above 1), so this one runs on the finer grid.
  write_file(dir / "dich.cfg", small + "grid.M = 64\nsweep.scales = 0.9\n"
                                       "evolve.dt0 = 0.001\nevolve.t_end = 0.2\n");
  CHECK(fcnls::run_main({"dichotomy", "--config", (dir / "dich.cfg").string(), "--quiet"}) ==
        0);
  const std::string dich = read_file(out / "dichotomy.csv");
  CHECK(dich.rfind("lambda,me,g,predicted,reason,observed,max_grad_s,t_last,flag,note\n",
                   0) == 0);
  CHECK(dich.find("Global") != std::string::npos);
  CHECK(dich.find("Completed") != std::string::npos);
  CHECK(dich.find("MISMATCH") == std::string::npos);

  write_file(dir / "stall.cfg",
             small + "sweep.scales = 1.3\nevolve.dt0 = 0.01\nevolve.dt_min = 0.009\n");
  CHECK(fcnls::run_main({"dichotomy", "--config", (dir / "stall.cfg").string(),
                         "--quiet"}) == 3);
  CHECK(read_file(out / "dichotomy.csv").find("MISMATCH") != std::string::npos);

  // random-field sweep
  CHECK(fcnls::run_main({"sweep", "--config", cfg, "--quiet"}) == 0);
  const std::string sweep = read_file(out / "gn_sweep.csv");
  CHECK(sweep.rfind("samples,seed,max_ratio\n", 0) == 0);
  CHECK(sweep.find("25,7,") != std::string::npos);
}
