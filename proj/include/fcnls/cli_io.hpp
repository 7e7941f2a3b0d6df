#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fcnls/evolution.hpp"
#include "fcnls/groundstate.hpp"
#include "fcnls/model.hpp"
#include "fcnls/spectral.hpp"
#include "fcnls/virial.hpp"

namespace fcnls {

/// Initial datum recipe for the evolve and virial commands.
struct InitSpec {
  std::string kind = "gaussian";  ///< "gaussian" or "soliton"
  double amp = 1.0;               ///< gaussian amplitude
  double width = 1.0;             ///< gaussian width
  double scale = 1.0;             ///< soliton multiplier lambda

  bool operator==(const InitSpec&) const = default;
};

/// Everything a run needs, parsed from a line-oriented config.  Every field
/// has a default except the six model.* keys, which are required.
struct RunConfig {
  ProblemParams params;
  Grid grid{2, 256, 12.0, true};
  GroundStateOptions ground;
  EvolutionConfig evolve;
  double virial_radius = 3.0;
  double virial_eps_hat = 0.01;
  std::vector<double> sweep_scales{0.5, 0.8, 0.9, 1.3, 1.5};
  int sweep_samples = 200;
  std::uint64_t sweep_seed = 7;
  InitSpec init;
  std::string output_dir = ".";

  bool operator==(const RunConfig&) const = default;
};

/// Parses `section.key = value` lines ('#' starts a comment).  Sections:
/// model, grid, ground, evolve, virial, sweep, init, output.  Unknown keys,
/// unparseable values, missing model.* keys and inadmissible model
/// parameters are errors naming the offending line: unknown_key,
/// type_mismatch, missing_params, or the model validation code.
RunConfig parse_config(const std::string& text);

/// Canonical text form; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// Binary field snapshot: magic "FCNLS1", u32 dim, u32 M, f64 L, u8 offset,
/// then M^dim little-endian (re, im) f64 pairs, row-major.  Writes go to a
/// temporary file renamed into place, so no partial file survives a failure.
/// Errors: io_failure on write; bad_magic, truncated (with expected and
/// actual byte counts), bad_dimension on read.
void snapshot_write(const Field& u, const std::string& path);
Field snapshot_read(const std::string& path);

/// CSV emission (%.17g, atomic rename).  Headers:
///   time series:     t,mass,energy,grad_s,linf,m_psi,dt
///   variance report: t,m_psi,dm_dt,bound_rhs
void write_time_series(const std::vector<TimeSeriesRow>& rows, const std::string& path);
void write_variance_rows(const std::vector<VarianceRow>& rows, const std::string& path);

/// Command-line driver.  Subcommands: check, ground, gn, evolve, virial,
/// dichotomy, sweep.  Flags: --config PATH (required), --out DIR (overrides
/// output.dir), --quiet.  Messages go to stderr, data to files under the
/// output directory.  Exit codes: 0 success, 2 usage or validation error,
/// 3 dichotomy mismatch, 4 numerical failure.
int run_main(const std::vector<std::string>& args);

}  // namespace fcnls
