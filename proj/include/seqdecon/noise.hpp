#ifndef SEQDECON_NOISE_HPP
#define SEQDECON_NOISE_HPP

#include <cstdint>

#include "seqdecon/spectral.hpp"

namespace seqdecon {

/// Mean power of the spectral tail x[p_prime..p-1]; p - p_prime components.
double epsilon_tail(const CVec& x, Eigen::Index p_prime);

struct VarianceEstimate {
  double value = 0.0;
  bool clamped = false;  // raw statistic was negative
};

/// Spread-based variance estimator over a dedicated subsequence:
/// (1/(p n')) sum_i sum_j (Y_ij^2 - Ybar_j^2), computed streamingly from
/// sum Y and sum ||Y||^2. Consistent when the forward operator is held
/// fixed over the subsequence; an upper bound otherwise.
class ConsistentVariance {
 public:
  explicit ConsistentVariance(Eigen::Index p);

  void update(const Vec& y);
  VarianceEstimate estimate() const;  // requires count >= 2
  std::int64_t count() const { return n_; }
  Eigen::Index dim() const { return sum_y_.size(); }

 private:
  std::int64_t n_ = 0;
  Vec sum_y_;
  double total_sq_ = 0.0;

  friend ConsistentVariance merge(const ConsistentVariance&,
                                  const ConsistentVariance&);
  friend class StateDoc;
};

ConsistentVariance merge(const ConsistentVariance& a, const ConsistentVariance& b);

/// Tail-power variance estimator fed by low-quality observations.
///
/// Flagging rule: an observation is low quality when more than half of its
/// components have |D_j|^2 below 1e-3 * max_j |D_j|^2; its tail estimate is
/// the mean |X_j|^2 over exactly those components (the sorted-|D|^2 tail).
/// Positively biased whenever the tail multipliers are not exactly zero.
class TailVariance {
 public:
  TailVariance() = default;

  /// Returns true when the observation was flagged and absorbed.
  bool update(const CVec& d, const CVec& x);

  VarianceEstimate estimate() const;  // requires flagged_count >= 1
  std::int64_t flagged_count() const { return flagged_; }
  std::int64_t seen_count() const { return seen_; }

 private:
  std::int64_t seen_ = 0;
  std::int64_t flagged_ = 0;
  double sum_ = 0.0;

  friend TailVariance merge(const TailVariance&, const TailVariance&);
  friend class StateDoc;
};

TailVariance merge(const TailVariance& a, const TailVariance& b);

}  // namespace seqdecon

#endif
