#ifndef SEQDECON_ESTIMATORS_HPP
#define SEQDECON_ESTIMATORS_HPP

#include <optional>
#include <string>

#include "seqdecon/accumulator.hpp"

namespace seqdecon {

/// Raw per-component risk statistic (|B_j|^2 - eps^2/Delta_j) / |B_j|^2.
/// Zero where B_j or Delta_j vanishes; may be negative elsewhere.
Vec psi_hat(const BStatistic& b, double epsilon);

/// Empirical risk objective: sum_j (lambda_j - psi_hat_j)^2 |B_j|^2.
/// Unbiased for the true risk up to the lambda-independent constant
/// eps^2 * sum_j psi_hat_j / Delta_j.
double risk_estimate(const Vec& lambda, const BStatistic& b, double epsilon);

/// The lambda-independent constant dropped from risk_estimate.
double risk_estimate_constant(const BStatistic& b, double epsilon);

/// Per-component soft threshold (1 - eps^2/(Delta_j |B_j|^2))_+ ; the exact
/// minimizer of the empirical risk over [0,1]^p.
Vec weights_soft(const BStatistic& b, double epsilon);

/// Inflated soft threshold (1 - omega2 * eps^2/(Delta_j |B_j|^2))_+.
Vec weights_main(const BStatistic& b, double epsilon, double omega2);

/// Tikhonov-Phillips filter Delta_j / (Delta_j + gamma).
Vec weights_tp(const Vec& delta, double gamma);

/// Landweber filter 1 - (1 - tau Delta_j)^gamma, clamped to [0,1].
/// If `clamped` is non-null it is set when clamping was active.
Vec weights_li(const Vec& delta, int gamma, double tau, bool* clamped = nullptr);

/// Minimizer of the empirical risk over the monotone class
/// {1 >= lambda_1 >= ... >= lambda_p >= 0}: weighted pool-adjacent-violators
/// on psi_hat with weights |B_j|^2, then clamp.
Vec weights_monotone(const BStatistic& b, double epsilon);

enum class Family { Main, SoftOracle, TikhonovPhillips, Landweber, Monotone };

struct EstimatorSpec {
  Family family = Family::Main;
  std::optional<double> gamma;   // TP penalty or Landweber iterations
  std::optional<double> tau;     // Landweber relaxation
  std::optional<double> omega2;  // override the Main-family threshold
};

struct Diagnostics {
  double imag_residual = 0.0;
  double gamma_n = 0.0;          // max eps^2/Delta_j over identified j
  double omega_sq = 0.0;         // literal (p-2)(1 + maxDelta/minDelta)
  double omega_sq_used = 0.0;    // threshold actually applied (Main family)
  Eigen::Index zeroed_components = 0;
  bool all_zero_delta = false;
  bool li_clamped = false;
  double tuned_gamma = 0.0;
  double tuned_tau = 0.0;
};

struct EstimateResult {
  Vec theta_hat;
  Vec lambda;
  Diagnostics diag;
};

/// Full pipeline: B statistic -> family weights -> beta_hat = lambda .* B
/// -> signal space. Tunes gamma/tau by minimizing the empirical risk over
/// documented grids when not supplied. The Main-family threshold is
/// min(omega_sq, 2 ln p): the literal inflation degenerates whenever the
/// Delta spread is large, and the universal-threshold cap keeps the
/// estimator usable there (null components still pass at rate ~1/p^2).
EstimateResult estimate(const SufStat& state, const EstimatorSpec& spec,
                        double epsilon);

/// Grid-tuned Tikhonov-Phillips penalty: 50 log-spaced values spanning
/// [1e-6, 1e6] * median(identified Delta).
double tune_tp_gamma(const BStatistic& b, double epsilon);

/// Grid-tuned Landweber parameters: tau = 1/max Delta, gamma in 1..200.
std::pair<int, double> tune_li(const BStatistic& b, double epsilon);

std::string family_name(Family f);

}  // namespace seqdecon

#endif
