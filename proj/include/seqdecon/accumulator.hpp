#ifndef SEQDECON_ACCUMULATOR_HPP
#define SEQDECON_ACCUMULATOR_HPP

#include <cstdint>
#include <string>

#include "seqdecon/spectral.hpp"

namespace seqdecon {

/**
 * Streaming sufficient statistic. After any number of observations the
 * state is three O(p) pieces: the count, the running sum of D_i^* X_i and
 * the running sum of |D_i|^2 (the per-component information Delta). No
 * raw observation is retained.
 *
 * Value semantics: one writer per instance; independent instances built in
 * parallel can be combined with merge().
 */
class SufStat {
 public:
  explicit SufStat(const SpectralBasis& basis);

  /// Absorb one observation given its spectral multipliers and the rotated
  /// observation x = to_spectral(y). O(p), rejects non-finite input.
  void update(const CVec& d, const CVec& x);

  const SpectralBasis& basis() const { return basis_; }
  std::int64_t count() const { return n_; }
  const CVec& numerator() const { return num_; }
  const Vec& delta() const { return delta_; }

 private:
  SpectralBasis basis_;
  std::int64_t n_ = 0;
  CVec num_;
  Vec delta_;

  friend SufStat merge(const SufStat& a, const SufStat& b);
  friend SufStat suffstat_from_json(const std::string& text);
  friend class StateDoc;
};

SufStat merge(const SufStat& a, const SufStat& b);

/// The combined statistic B_n with its per-component information.
/// Components with delta_j = 0 are unidentified and take b_j = 0.
struct BStatistic {
  CVec b;
  Vec delta;
  std::int64_t n = 0;
};

BStatistic b_statistic(const SufStat& state);

/// Heteroscedastic James-Stein threshold inflation,
/// (p-2)_+ * (1 + max_j Delta_j / min_j Delta_j), with the ratio taken over
/// the identified components {j : Delta_j > 0}. Throws if none identified.
double omega_sq(const SufStat& state);

/// Worst-case component noise level max_j epsilon^2 / Delta_j. Requires
/// every component identified.
double gamma_n(const SufStat& state, double epsilon);

/// Versioned JSON snapshot of the state; numbers round-trip bit-exactly
/// for finite doubles.
std::string suffstat_to_json(const SufStat& state);
SufStat suffstat_from_json(const std::string& text);

}  // namespace seqdecon

#endif
