#ifndef SEQDECON_BASELINES_HPP
#define SEQDECON_BASELINES_HPP

#include <vector>

#include "seqdecon/spectral.hpp"

namespace seqdecon {

/// Running means of the rotated observations and of the spectral
/// multipliers; the state behind the averaged-model baseline.
class AveragedStat {
 public:
  explicit AveragedStat(const SpectralBasis& basis);

  void update(const CVec& d, const CVec& x);

  const SpectralBasis& basis() const { return basis_; }
  std::int64_t count() const { return n_; }
  const CVec& xbar() const { return xbar_; }
  const CVec& dbar() const { return dbar_; }

 private:
  SpectralBasis basis_;
  std::int64_t n_ = 0;
  CVec xbar_;
  CVec dbar_;

  friend class StateDoc;
};

/// Averaged-model statistic: dbar_j^* xbar_j / |dbar_j|^2, zero where the
/// averaged multiplier cancels to zero.
CVec b_bar(const AveragedStat& state);

/// Spectral ridge filter |dbar_j|^2 / (|dbar_j|^2 + tau).
Vec ridge_weights(const AveragedStat& state, double tau);

/// Ridge signal estimate at penalty tau (filter applied to b_bar).
std::pair<Vec, double> ridge_estimate(const AveragedStat& state, double tau);

/// Generalized cross validation over a 100-point log grid spanning
/// [1e-8, 1e8] * median(|dbar|^2); grid points where the trace denominator
/// degenerates (< 1e-12) are excluded. Returns the grid minimizer.
double gcv_select_tau(const AveragedStat& state);

/// Exact risk sum_j (lambda_j - 1)^2 |beta_j|^2 + eps^2 lambda_j^2 / Delta_j.
/// Components with Delta_j = 0 are estimated as zero by convention and
/// contribute |beta_j|^2 regardless of lambda_j.
double true_risk(const Vec& lambda, const CVec& beta, const Vec& delta,
                 double epsilon);

/// Analytic risk-minimizing weights |beta_j|^2 / (|beta_j|^2 + eps^2/Delta_j).
Vec oracle_weights(const CVec& beta, const Vec& delta, double epsilon);

struct OracleRiskReport {
  double r1 = 0.0;  // oracle risk of the per-observation combined model
  double r2 = 0.0;  // oracle risk of the averaged model
  Vec per_component_r1;
  Vec per_component_r2;
};

/// Oracle linear risks of the combined statistic versus the averaged model
/// for a known signal and operator sequence. r1 <= r2 always, with equality
/// exactly when all operators coincide.
OracleRiskReport oracle_risks(const CVec& beta, const std::vector<CVec>& d_list,
                              double epsilon);

}  // namespace seqdecon

#endif
