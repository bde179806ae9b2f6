#ifndef SEQDECON_STATE_DOC_HPP
#define SEQDECON_STATE_DOC_HPP

#include <optional>
#include <string>

#include "seqdecon/accumulator.hpp"
#include "seqdecon/baselines.hpp"
#include "seqdecon/noise.hpp"

namespace seqdecon {

/**
 * Persisted estimation state: the sufficient statistic plus the averaged
 * baseline and variance accumulators, serialized as one versioned JSON
 * document. The sufficient-statistic keys (version, layout, p or h/w, n,
 * num_re, num_im, delta) live at the top level; the companions are nested.
 * All numbers use shortest round-trip decimals, so reload is bit-faithful.
 */
class StateDoc {
 public:
  explicit StateDoc(const SpectralBasis& basis);

  /// Absorb one observation (spectral multipliers + rotated observation +
  /// raw signal-space observation for the variance accumulator).
  void ingest(const CVec& d, const CVec& x, const Vec& y);

  const SufStat& suffstat() const { return suff_; }
  const AveragedStat& averaged() const { return avg_; }
  const ConsistentVariance& consistent_variance() const { return var_con_; }
  const TailVariance& tail_variance() const { return var_tail_; }

  std::string to_json() const;
  static StateDoc from_json(const std::string& text);

  /// Atomic write: temp file in the target directory, then rename.
  void save(const std::string& path) const;
  static StateDoc load(const std::string& path);

 private:
  SufStat suff_;
  AveragedStat avg_;
  ConsistentVariance var_con_;
  TailVariance var_tail_;
};

}  // namespace seqdecon

#endif
