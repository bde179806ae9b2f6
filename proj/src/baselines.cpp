#include "seqdecon/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace seqdecon {

AveragedStat::AveragedStat(const SpectralBasis& basis)
    : basis_(basis),
      xbar_(CVec::Zero(basis.size())),
      dbar_(CVec::Zero(basis.size())) {}

void AveragedStat::update(const CVec& d, const CVec& x) {
  const Eigen::Index p = basis_.size();
  if (d.size() != p || x.size() != p)
    throw std::invalid_argument("AveragedStat::update: dimension mismatch");
  ++n_;
  // Running means: identical inputs leave the state exactly unchanged.
  const double inv = 1.0 / static_cast<double>(n_);
  xbar_ += (x - xbar_) * inv;
  dbar_ += (d - dbar_) * inv;
}

CVec b_bar(const AveragedStat& state) {
  CVec out = CVec::Zero(state.basis().size());
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    const double d2 = std::norm(state.dbar()[j]);
    if (d2 > 0.0) out[j] = std::conj(state.dbar()[j]) * state.xbar()[j] / d2;
  }
  return out;
}

Vec ridge_weights(const AveragedStat& state, double tau) {
  if (tau < 0.0) throw std::invalid_argument("ridge_weights: tau < 0");
  Vec out = Vec::Zero(state.basis().size());
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    const double d2 = std::norm(state.dbar()[j]);
    if (d2 > 0.0) out[j] = d2 / (d2 + tau);
  }
  return out;
}

std::pair<Vec, double> ridge_estimate(const AveragedStat& state, double tau) {
  const Vec s = ridge_weights(state, tau);
  const CVec bb = b_bar(state);
  CVec beta_hat(bb.size());
  for (Eigen::Index j = 0; j < bb.size(); ++j) beta_hat[j] = s[j] * bb[j];
  return from_spectral(state.basis(), beta_hat);
}

double gcv_select_tau(const AveragedStat& state) {
  if (state.count() < 1) throw std::domain_error("gcv_select_tau: empty state");
  const Eigen::Index p = state.basis().size();
  Vec d2(p);
  for (Eigen::Index j = 0; j < p; ++j) d2[j] = std::norm(state.dbar()[j]);

  std::vector<double> sorted(d2.data(), d2.data() + p);
  std::sort(sorted.begin(), sorted.end());
  double scale = p % 2 == 1 ? sorted[p / 2]
                            : 0.5 * (sorted[p / 2 - 1] + sorted[p / 2]);
  if (!(scale > 0.0)) scale = sorted.back();
  if (!(scale > 0.0))
    throw std::domain_error("gcv_select_tau: averaged operator is zero");

  const int kPoints = 100;
  double best = std::numeric_limits<double>::infinity();
  double best_tau = scale;
  bool found = false;
  for (int i = 0; i < kPoints; ++i) {
    const double t = static_cast<double>(i) / (kPoints - 1);
    const double tau = scale * std::pow(10.0, -8.0 + 16.0 * t);
    double num = 0.0, den = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double one_minus_s = tau / (d2[j] + tau);
      num += one_minus_s * one_minus_s * std::norm(state.xbar()[j]);
      den += one_minus_s;
    }
    num /= static_cast<double>(p);
    den /= static_cast<double>(p);
    if (den < 1e-12) continue;
    const double g = num / (den * den);
    if (g < best) {
      best = g;
      best_tau = tau;
      found = true;
    }
  }
  if (!found) throw std::domain_error("gcv_select_tau: degenerate GCV curve");
  return best_tau;
}

double true_risk(const Vec& lambda, const CVec& beta, const Vec& delta,
                 double epsilon) {
  const Eigen::Index p = beta.size();
  if (lambda.size() != p || delta.size() != p)
    throw std::invalid_argument("true_risk: dimension mismatch");
  double total = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double b2 = std::norm(beta[j]);
    if (delta[j] > 0.0) {
      const double bias = (lambda[j] - 1.0) * (lambda[j] - 1.0) * b2;
      const double var = epsilon * epsilon * lambda[j] * lambda[j] / delta[j];
      total += bias + var;
    } else {
      // Unidentified component: estimated as zero whatever lambda says.
      total += b2;
    }
  }
  return total;
}

Vec oracle_weights(const CVec& beta, const Vec& delta, double epsilon) {
  const Eigen::Index p = beta.size();
  if (delta.size() != p) throw std::invalid_argument("oracle_weights: dims");
  Vec out = Vec::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (delta[j] <= 0.0) continue;
    const double b2 = std::norm(beta[j]);
    const double v = epsilon * epsilon / delta[j];
    out[j] = (b2 + v) > 0.0 ? b2 / (b2 + v) : 0.0;
    if (v == 0.0 && b2 > 0.0) out[j] = 1.0;
  }
  return out;
}

namespace {

// Oracle risk of one linear component with noise variance v.
double component_oracle_risk(double beta_sq, double v) {
  if (beta_sq == 0.0) return 0.0;
  if (!std::isfinite(v)) return beta_sq;
  if (v == 0.0) return 0.0;
  return beta_sq * v / (beta_sq + v);
}

}  // namespace

OracleRiskReport oracle_risks(const CVec& beta, const std::vector<CVec>& d_list,
                              double epsilon) {
  if (d_list.empty()) throw std::invalid_argument("oracle_risks: empty d_list");
  const Eigen::Index p = beta.size();
  for (const auto& d : d_list)
    if (d.size() != p) throw std::invalid_argument("oracle_risks: dims");
  const double n = static_cast<double>(d_list.size());

  Vec delta = Vec::Zero(p);
  CVec dmean = CVec::Zero(p);
  std::int64_t cnt = 0;
  for (const auto& d : d_list) {
    delta += d.cwiseAbs2();
    ++cnt;
    dmean += (d - dmean) / static_cast<double>(cnt);
  }

  OracleRiskReport rep;
  rep.per_component_r1 = Vec::Zero(p);
  rep.per_component_r2 = Vec::Zero(p);
  const double e2 = epsilon * epsilon;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double b2 = std::norm(beta[j]);
    const double v1 = delta[j] > 0.0 ? e2 / delta[j]
                                     : std::numeric_limits<double>::infinity();
    const double dbar2 = std::norm(dmean[j]);
    const double v2 = dbar2 > 0.0 ? e2 / (n * dbar2)
                                  : std::numeric_limits<double>::infinity();
    rep.per_component_r1[j] = component_oracle_risk(b2, v1);
    rep.per_component_r2[j] = component_oracle_risk(b2, v2);
    rep.r1 += rep.per_component_r1[j];
    rep.r2 += rep.per_component_r2[j];
  }
  return rep;
}

}  // namespace seqdecon
