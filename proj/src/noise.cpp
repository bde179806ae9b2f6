#include "seqdecon/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace seqdecon {

double epsilon_tail(const CVec& x, Eigen::Index p_prime) {
  const Eigen::Index p = x.size();
  if (p_prime < 1 || p_prime >= p)
    throw std::invalid_argument("epsilon_tail: p_prime out of range");
  double total = 0.0;
  for (Eigen::Index q = p_prime; q < p; ++q) total += std::norm(x[q]);
  return total / static_cast<double>(p - p_prime);
}

ConsistentVariance::ConsistentVariance(Eigen::Index p)
    : sum_y_(Vec::Zero(p)) {
  if (p < 1) throw std::invalid_argument("ConsistentVariance: p < 1");
}

void ConsistentVariance::update(const Vec& y) {
  if (y.size() != sum_y_.size())
    throw std::invalid_argument("ConsistentVariance::update: dims");
  if (!y.allFinite())
    throw std::invalid_argument("ConsistentVariance::update: non-finite");
  sum_y_ += y;
  total_sq_ += y.squaredNorm();
  ++n_;
}

VarianceEstimate ConsistentVariance::estimate() const {
  if (n_ < 2)
    throw std::domain_error("ConsistentVariance: need at least 2 observations");
  const double p = static_cast<double>(sum_y_.size());
  const double nn = static_cast<double>(n_);
  const double raw = (total_sq_ - sum_y_.squaredNorm() / nn) / (p * nn);
  return {std::max(raw, 0.0), raw < 0.0};
}

ConsistentVariance merge(const ConsistentVariance& a, const ConsistentVariance& b) {
  if (a.sum_y_.size() != b.sum_y_.size())
    throw std::invalid_argument("merge(ConsistentVariance): dims");
  ConsistentVariance out(a.sum_y_.size());
  out.n_ = a.n_ + b.n_;
  out.sum_y_ = a.sum_y_ + b.sum_y_;
  out.total_sq_ = a.total_sq_ + b.total_sq_;
  return out;
}

bool TailVariance::update(const CVec& d, const CVec& x) {
  if (d.size() != x.size())
    throw std::invalid_argument("TailVariance::update: dims");
  ++seen_;
  const Eigen::Index p = d.size();
  double dmax = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) dmax = std::max(dmax, std::norm(d[j]));
  if (dmax <= 0.0) return false;
  const double thresh = 1e-3 * dmax;
  double tail_power = 0.0;
  Eigen::Index below = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (std::norm(d[j]) < thresh) {
      ++below;
      tail_power += std::norm(x[j]);
    }
  }
  if (2 * below <= p) return false;  // not a low-quality observation
  sum_ += tail_power / static_cast<double>(below);
  ++flagged_;
  return true;
}

VarianceEstimate TailVariance::estimate() const {
  if (flagged_ < 1)
    throw std::domain_error("TailVariance: no flagged observations");
  return {sum_ / static_cast<double>(flagged_), false};
}

TailVariance merge(const TailVariance& a, const TailVariance& b) {
  TailVariance out;
  out.seen_ = a.seen_ + b.seen_;
  out.flagged_ = a.flagged_ + b.flagged_;
  out.sum_ = a.sum_ + b.sum_;
  return out;
}

}  // namespace seqdecon
