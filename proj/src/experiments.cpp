#include "fcnls/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <random>
#include <thread>

#include "fcnls/errors.hpp"
#include "fcnls/functionals.hpp"

namespace fcnls {

namespace {

constexpr double kBoundaryTol = 1e-9;
constexpr double kRadialTol = 1e-6;

std::string with_radial_note(std::string reason, const Field& u0) {
  if (reflection_asymmetry(u0) > kRadialTol)
    reason += "; theory not covering (non-radial data)";
  return reason;
}

unsigned worker_count(std::size_t rows) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FCNLS_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(rows, 1)));
}

}  // namespace

std::string to_string(Label label) {
  switch (label) {
    case Label::Global: return "Global";
    case Label::BlowUp: return "BlowUp";
    default: return "Undetermined";
  }
}

Verdict classify(const Field& u0, const GroundState& gs, const ProblemParams& params) {
  const RegimeFlags flags = regime(params);
  if (flags.defocusing_global)
    return {Label::Global, {}, {}, "defocusing or mass-subcritical: global by conservation"};

  const FunctionalBundle fb = bundle(u0, params);
  if (fb.energy < 0.0) {
    if (flags.blowup_window)
      return {Label::BlowUp, {}, {}, with_radial_note("negative energy", u0)};
    return {Label::Undetermined, {}, {},
            "negative energy but blow-up window hypotheses fail"};
  }

  const Indicators ind = indicators(u0, gs, params);
  if (std::abs(ind.me - 1.0) <= kBoundaryTol)
    return {Label::Undetermined, ind.me, ind.g, "ME at the untreated boundary"};
  if (ind.me > 1.0)
    return {Label::Undetermined, ind.me, ind.g, "ME>=1 outside theorem hypotheses"};
  if (std::abs(ind.g - 1.0) <= kBoundaryTol)
    return {Label::Undetermined, ind.me, ind.g, "G at the untreated boundary"};
  if (ind.g < 1.0) return {Label::Global, ind.me, ind.g, "ME<1 and G<1"};
  if (flags.blowup_window)
    return {Label::BlowUp, ind.me, ind.g, with_radial_note("ME<1 and G>1", u0)};
  return {Label::Undetermined, ind.me, ind.g,
          "ME<1 and G>1 but blow-up window hypotheses fail"};
}

DichotomyReport dichotomy_sweep(const GroundState& gs, const ProblemParams& params,
                                const std::vector<double>& scales,
                                const EvolutionConfig& cfg) {
  if (params.eps != -1)
    throw Error("not_focusing", "the dichotomy sweep rides the focusing ground state");
  validate(params);

  std::vector<double> sorted = scales;
  std::sort(sorted.begin(), sorted.end());

  DichotomyReport report;
  report.rows.resize(sorted.size());

  const auto run_row = [&](std::size_t i) {
    DichotomyRow& row = report.rows[i];
    row.lambda = sorted[i];
    Field u0 = gs.phi;
    for (std::size_t k = 0; k < u0.size(); ++k) u0[k] *= row.lambda;

    try {
      row.predicted = classify(u0, gs, params);
    } catch (const Error& e) {
      row.note = std::string(e.code()) + ": " + e.what();
      return;
    }
    RunOutcome outcome;
    try {
      outcome = evolve(u0, params, cfg);
    } catch (const Error& e) {
      row.note = std::string(e.code()) + ": " + e.what();
      return;
    }
    row.observed = outcome.status;
    row.t_last = outcome.t_stop;
    for (const auto& r : outcome.series) row.max_grad_s = std::max(row.max_grad_s, r.grad_s);
    if (row.predicted.label == Label::Global)
      row.mismatch = outcome.status != RunStatus::Completed;
    else if (row.predicted.label == Label::BlowUp)
      row.mismatch = outcome.status != RunStatus::BlowUpDetected;
  };

  std::atomic<std::size_t> next{0};
  const unsigned workers = worker_count(sorted.size());
  const auto drain = [&] {
    for (std::size_t i = next.fetch_add(1); i < sorted.size(); i = next.fetch_add(1))
      run_row(i);
  };
  if (workers <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
  }

  for (const auto& row : report.rows) {
    if (row.mismatch) ++report.mismatches;
    else if (row.observed &&
             (row.predicted.label == Label::Global || row.predicted.label == Label::BlowUp))
      ++report.confirmations;
  }
  return report;
}

double gn_sweep(const GroundState& gs, const ProblemParams& params, int n_samples,
                std::uint64_t seed) {
  validate(params);
  if (n_samples <= 0) return 0.0;
  const Grid g = gs.phi.grid();
  const double c_sharp = gs.c_gn_quotient;
  if (!(c_sharp > 0.0))
    throw Error("zero_ground_state", "sharp constant unavailable from the ground state");

  std::mt19937_64 rng(seed);
  const auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
  const auto in_range = [&](double lo, double hi) { return lo + (hi - lo) * uniform(); };

  double worst = 0.0;
  Field u(g);
  for (int sample = 0; sample < n_samples; ++sample) {
    // Gaussian envelope: width in [0.6, 2.2], center within |c_i| <= 1.5
    const double width = in_range(0.6, 2.2);
    std::vector<double> center(g.dim);
    for (auto& c : center) c = in_range(-1.5, 1.5);
    // three harmonics with lattice frequencies of order <= 3 and complex
    // amplitudes; the constant one is kept away from zero
    struct Harmonic {
      cplx amp;
      std::vector<double> k;
    };
    std::vector<Harmonic> modes(3);
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const double mag = (m == 0) ? in_range(0.5, 1.0) : in_range(0.0, 0.8);
      modes[m].amp = std::polar(mag, in_range(0.0, 2.0 * M_PI));
      modes[m].k.resize(g.dim);
      for (auto& kc : modes[m].k) {
        const int order = static_cast<int>(in_range(0.0, 1.0) * 7.0) - 3;  // -3..3
        kc = (m == 0) ? 0.0 : M_PI * order / g.L;
      }
    }

    std::vector<int> idx(g.dim, 0);
    for (std::size_t flat = 0; flat < u.size(); ++flat) {
      double r2 = 0.0;
      cplx mod(0.0, 0.0);
      for (const auto& h : modes) {
        double phase = 0.0;
        for (int a = 0; a < g.dim; ++a) phase += h.k[a] * g.coord(idx[a]);
        mod += h.amp * std::polar(1.0, phase);
      }
      for (int a = 0; a < g.dim; ++a) {
        const double d = g.coord(idx[a]) - center[a];
        r2 += d * d;
      }
      u[flat] = mod * std::exp(-r2 / (2.0 * width * width));
      for (int a = g.dim - 1; a >= 0; --a) {
        if (++idx[a] < g.M) break;
        idx[a] = 0;
      }
    }

    const double ratio = 1.0 / (c_sharp * gn_quotient(u, params));
    worst = std::max(worst, ratio);
  }
  return worst;
}

}  // namespace fcnls
