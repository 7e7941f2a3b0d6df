#include "fcnls/model.hpp"

#include <cmath>
#include <string>

namespace fcnls {

namespace {

std::string num(double v) { return std::to_string(v); }

}  // namespace

void validate(const ProblemParams& q) {
  if (q.N < 2) throw Error("N_lt_2", "dimension N = " + std::to_string(q.N) + ", need N >= 2");
  if (!(q.s > 0.0 && q.s < 1.0)) throw Error("s_out_of_range", "s = " + num(q.s) + ", need 0 < s < 1");
  if (!(q.p > 1.0)) throw Error("p_not_gt_1", "p = " + num(q.p) + ", need p > 1");
  if (q.eps != 1 && q.eps != -1) throw Error("eps_invalid", "eps = " + std::to_string(q.eps) + ", need +1 or -1");

  // The six quantities that must be strictly positive, in order.
  if (!(-q.b > 0.0)) throw Error("b_nonnegative", "b = " + num(q.b) + ", need b < 0");
  if (!(q.alpha > 0.0)) throw Error("alpha_nonpositive", "alpha = " + num(q.alpha));
  if (!(q.N - q.alpha > 0.0)) throw Error("alpha_ge_N", "alpha = " + num(q.alpha) + " with N = " + std::to_string(q.N));
  if (!(q.N + q.b - q.s > 0.0)) throw Error("N_plus_b_minus_s_nonpositive", "N + b - s = " + num(q.N + q.b - q.s));
  if (!(2.0 * q.s + 2.0 * q.b + q.alpha > 0.0))
    throw Error("two_s_two_b_alpha_nonpositive", "2s + 2b + alpha = " + num(2.0 * q.s + 2.0 * q.b + q.alpha));
  if (!(q.N + q.alpha + 2.0 * q.b - 2.0 * q.s > 0.0))
    throw Error("N_alpha_2b_minus_2s_nonpositive",
                "N + alpha + 2b - 2s = " + num(q.N + q.alpha + 2.0 * q.b - 2.0 * q.s));
}

bool admissible(const ProblemParams& q) {
  try {
    validate(q);
  } catch (const Error&) {
    return false;
  }
  return true;
}

double riesz_normalization(int N, double alpha) {
  if (!(alpha > 0.0 && alpha < N)) throw Error("alpha_out_of_range", "need 0 < alpha < N");
  return std::tgamma(0.5 * (N - alpha)) /
         (std::tgamma(0.5 * alpha) * std::pow(M_PI, 0.5 * N) * std::pow(2.0, alpha));
}

DerivedExponents derive(const ProblemParams& q) {
  validate(q);
  const double N = q.N;
  DerivedExponents d{};
  d.s_c = 0.5 * N - (2.0 * q.s + 2.0 * q.b + q.alpha) / (2.0 * (q.p - 1.0));
  d.B = (N * q.p - N - q.alpha - 2.0 * q.b) / q.s;
  d.A = 2.0 * q.p - d.B;
  d.p_star = 1.0 + (q.alpha + 2.0 * q.s + 2.0 * q.b) / N;
  d.p_upper = 1.0 + (2.0 * q.s + 2.0 * q.b + q.alpha) / (N - 2.0 * q.s);
  d.p_tilde = 1.0 + (2.0 * q.b + q.alpha) / N;
  d.p_bar = 1.0 + (2.0 * q.b + q.alpha) / (N - 2.0 * q.s);
  d.riesz_const = riesz_normalization(q.N, q.alpha);
  d.blowup_power_cap = 1.0 + q.alpha / N + 2.0 * q.s;
  return d;
}

RegimeFlags regime(const ProblemParams& q) {
  const DerivedExponents d = derive(q);
  RegimeFlags f{};
  f.admissible = true;
  f.intercritical = d.s_c > 0.0 && d.s_c < q.s;
  const double p_low = std::max(2.0, d.p_bar);
  f.lwp_window = q.p > p_low && q.p < d.p_upper && q.N < 4.0 * q.s + q.alpha + 2.0 * q.b &&
                 q.s >= static_cast<double>(q.N) / (2.0 * q.N - 1.0);
  f.blowup_window = f.intercritical && q.p < d.blowup_power_cap && q.s > 0.5;
  f.defocusing_global = q.eps == 1 || q.p < d.p_star;
  return f;
}

}  // namespace fcnls
