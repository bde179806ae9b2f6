#include "seqdecon/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace seqdecon {

namespace {

double sq_abs(const std::complex<double>& z) { return std::norm(z); }

double median_positive(const Vec& v) {
  std::vector<double> pos;
  pos.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (v[j] > 0.0) pos.push_back(v[j]);
  if (pos.empty()) throw std::domain_error("no identified components");
  std::sort(pos.begin(), pos.end());
  const std::size_t m = pos.size();
  return m % 2 == 1 ? pos[m / 2] : 0.5 * (pos[m / 2 - 1] + pos[m / 2]);
}

}  // namespace

Vec psi_hat(const BStatistic& b, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("psi_hat: epsilon < 0");
  Vec out = Vec::Zero(b.b.size());
  for (Eigen::Index j = 0; j < b.b.size(); ++j) {
    const double b2 = sq_abs(b.b[j]);
    if (b2 == 0.0 || b.delta[j] <= 0.0) continue;
    out[j] = (b2 - epsilon * epsilon / b.delta[j]) / b2;
  }
  return out;
}

double risk_estimate(const Vec& lambda, const BStatistic& b, double epsilon) {
  if (lambda.size() != b.b.size())
    throw std::invalid_argument("risk_estimate: dimension mismatch");
  const Vec psi = psi_hat(b, epsilon);
  double total = 0.0;
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    const double d = lambda[j] - psi[j];
    total += d * d * sq_abs(b.b[j]);
  }
  return total;
}

double risk_estimate_constant(const BStatistic& b, double epsilon) {
  const Vec psi = psi_hat(b, epsilon);
  double total = 0.0;
  for (Eigen::Index j = 0; j < psi.size(); ++j)
    if (b.delta[j] > 0.0) total += epsilon * epsilon * psi[j] / b.delta[j];
  return total;
}

Vec weights_soft(const BStatistic& b, double epsilon) {
  Vec out = psi_hat(b, epsilon);
  for (Eigen::Index j = 0; j < out.size(); ++j)
    out[j] = std::clamp(out[j], 0.0, 1.0);
  return out;
}

Vec weights_main(const BStatistic& b, double epsilon, double omega2) {
  if (omega2 < 0.0) throw std::invalid_argument("weights_main: omega2 < 0");
  Vec out = Vec::Zero(b.b.size());
  for (Eigen::Index j = 0; j < b.b.size(); ++j) {
    const double b2 = sq_abs(b.b[j]);
    if (b2 == 0.0 || b.delta[j] <= 0.0) continue;
    out[j] = std::clamp(1.0 - omega2 * epsilon * epsilon / (b.delta[j] * b2),
                        0.0, 1.0);
  }
  return out;
}

Vec weights_tp(const Vec& delta, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("weights_tp: gamma < 0");
  Vec out = Vec::Zero(delta.size());
  for (Eigen::Index j = 0; j < delta.size(); ++j)
    if (delta[j] > 0.0) out[j] = delta[j] / (delta[j] + gamma);
  return out;
}

Vec weights_li(const Vec& delta, int gamma, double tau, bool* clamped) {
  if (gamma < 1) throw std::invalid_argument("weights_li: gamma must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("weights_li: tau must be > 0");
  if (clamped) *clamped = false;
  Vec out = Vec::Zero(delta.size());
  for (Eigen::Index j = 0; j < delta.size(); ++j) {
    const double raw = 1.0 - std::pow(1.0 - tau * delta[j], gamma);
    const double v = std::clamp(raw, 0.0, 1.0);
    if (clamped && v != raw) *clamped = true;
    out[j] = v;
  }
  return out;
}

Vec weights_monotone(const BStatistic& b, double epsilon) {
  const Eigen::Index p = b.b.size();
  const Vec psi = psi_hat(b, epsilon);
  Vec w(p);
  for (Eigen::Index j = 0; j < p; ++j) w[j] = sq_abs(b.b[j]);

  // Weighted PAV for a nonincreasing fit: pool adjacent blocks whenever the
  // left block value falls below the right one.
  std::vector<double> val, wt;
  std::vector<Eigen::Index> len;
  val.reserve(p); wt.reserve(p); len.reserve(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double v = psi[j], ww = w[j];
    Eigen::Index l = 1;
    while (!val.empty() && val.back() < v) {
      const double tw = wt.back() + ww;
      v = tw > 0.0 ? (wt.back() * val.back() + ww * v) / tw : 0.0;
      ww = tw;
      l += len.back();
      val.pop_back(); wt.pop_back(); len.pop_back();
    }
    val.push_back(v); wt.push_back(ww); len.push_back(l);
  }
  Vec out(p);
  Eigen::Index j = 0;
  for (std::size_t k = 0; k < val.size(); ++k)
    for (Eigen::Index i = 0; i < len[k]; ++i) out[j++] = std::clamp(val[k], 0.0, 1.0);
  return out;
}

double tune_tp_gamma(const BStatistic& b, double epsilon) {
  const double med = median_positive(b.delta);
  double best_obj = std::numeric_limits<double>::infinity();
  double best_gamma = med;
  const int kPoints = 50;
  for (int i = 0; i < kPoints; ++i) {
    const double t = static_cast<double>(i) / (kPoints - 1);
    const double gamma = med * std::pow(10.0, -6.0 + 12.0 * t);
    const double obj = risk_estimate(weights_tp(b.delta, gamma), b, epsilon);
    if (obj < best_obj) {
      best_obj = obj;
      best_gamma = gamma;
    }
  }
  return best_gamma;
}

std::pair<int, double> tune_li(const BStatistic& b, double epsilon) {
  const double dmax = b.delta.maxCoeff();
  if (!(dmax > 0.0)) throw std::domain_error("tune_li: no identified components");
  const double tau = 1.0 / dmax;
  double best_obj = std::numeric_limits<double>::infinity();
  int best_gamma = 1;
  for (int gamma = 1; gamma <= 200; ++gamma) {
    const double obj = risk_estimate(weights_li(b.delta, gamma, tau), b, epsilon);
    if (obj < best_obj) {
      best_obj = obj;
      best_gamma = gamma;
    }
  }
  return {best_gamma, tau};
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Main: return "main";
    case Family::SoftOracle: return "soft";
    case Family::TikhonovPhillips: return "tp";
    case Family::Landweber: return "li";
    case Family::Monotone: return "mono";
  }
  return "?";
}

EstimateResult estimate(const SufStat& state, const EstimatorSpec& spec,
                        double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("estimate: epsilon < 0");
  const Eigen::Index p = state.basis().size();
  EstimateResult res;
  res.diag = Diagnostics{};

  const BStatistic b = b_statistic(state);
  const bool any_identified = (b.delta.array() > 0.0).any();
  if (!any_identified) {
    res.diag.all_zero_delta = true;
    res.lambda = Vec::Zero(p);
    res.theta_hat = Vec::Zero(p);
    res.diag.zeroed_components = p;
    return res;
  }

  res.diag.omega_sq = omega_sq(state);
  // Threshold actually used by the Main family: the literal inflation
  // degenerates when the Delta spread is huge, so it is capped at the
  // universal-threshold level 2 ln p.
  res.diag.omega_sq_used =
      std::min(res.diag.omega_sq, 2.0 * std::log(static_cast<double>(p)));

  switch (spec.family) {
    case Family::Main: {
      const double om = spec.omega2 ? *spec.omega2 : res.diag.omega_sq_used;
      res.diag.omega_sq_used = om;
      res.lambda = weights_main(b, epsilon, om);
      break;
    }
    case Family::SoftOracle:
      res.lambda = weights_soft(b, epsilon);
      break;
    case Family::TikhonovPhillips: {
      const double gamma = spec.gamma ? *spec.gamma : tune_tp_gamma(b, epsilon);
      res.diag.tuned_gamma = gamma;
      res.lambda = weights_tp(b.delta, gamma);
      break;
    }
    case Family::Landweber: {
      int gamma;
      double tau;
      if (spec.gamma && spec.tau) {
        gamma = static_cast<int>(*spec.gamma);
        tau = *spec.tau;
      } else {
        std::tie(gamma, tau) = tune_li(b, epsilon);
      }
      res.diag.tuned_gamma = gamma;
      res.diag.tuned_tau = tau;
      res.lambda = weights_li(b.delta, gamma, tau, &res.diag.li_clamped);
      break;
    }
    case Family::Monotone:
      res.lambda = weights_monotone(b, epsilon);
      break;
  }

  CVec beta_hat(p);
  for (Eigen::Index j = 0; j < p; ++j) beta_hat[j] = res.lambda[j] * b.b[j];
  auto [theta, resid] = from_spectral(state.basis(), beta_hat);
  res.theta_hat = std::move(theta);
  res.diag.imag_residual = resid;
  res.diag.zeroed_components =
      (res.lambda.array() == 0.0).count();
  double g = 0.0;
  for (Eigen::Index j = 0; j < p; ++j)
    if (b.delta[j] > 0.0) g = std::max(g, epsilon * epsilon / b.delta[j]);
  res.diag.gamma_n = g;
  return res;
}

}  // namespace seqdecon
