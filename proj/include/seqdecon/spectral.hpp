#ifndef SEQDECON_SPECTRAL_HPP
#define SEQDECON_SPECTRAL_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace seqdecon {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/**
 * Descriptor of the unitary diagonalizing transform: the 1-D or 2-D
 * discrete Fourier basis over a p-point grid.
 *
 * Scaling convention (used consistently everywhere):
 *   - to_spectral applies the forward DFT scaled by 1/sqrt(p), so the
 *     transform is unitary (Parseval holds exactly).
 *   - from_spectral applies the adjoint (inverse DFT scaled by sqrt(p)).
 *   - diagonalize returns the *unnormalized* forward DFT of the kernel
 *     taps, so the eigenvalues are the circular-convolution transfer
 *     function: spectral(K y) = D .* spectral(y).
 */
class SpectralBasis {
 public:
  enum class Layout { OneD, TwoD };

  static SpectralBasis one_d(Eigen::Index p);
  static SpectralBasis two_d(Eigen::Index h, Eigen::Index w);

  Layout layout() const { return layout_; }
  Eigen::Index size() const { return h_ * w_; }
  Eigen::Index height() const { return h_; }
  Eigen::Index width() const { return w_; }

  bool operator==(const SpectralBasis& o) const {
    return layout_ == o.layout_ && h_ == o.h_ && w_ == o.w_;
  }
  bool operator!=(const SpectralBasis& o) const { return !(*this == o); }

 private:
  SpectralBasis(Layout l, Eigen::Index h, Eigen::Index w)
      : layout_(l), h_(h), w_(w) {}
  Layout layout_;
  Eigen::Index h_;  // 1 for OneD
  Eigen::Index w_;
};

/// First column of the circulant forward operator (row-major first column of
/// the block-circulant operator for 2-D layouts).
struct Kernel {
  Vec taps;
};

/// Rotate a vector into spectral (sequence-space) coordinates. Unitary.
CVec to_spectral(const SpectralBasis& basis, const Vec& y);
CVec to_spectral(const SpectralBasis& basis, const CVec& y);

/// Inverse rotation. Returns the real part together with the largest
/// absolute imaginary component as a diagnostic; for conjugate-symmetric
/// input the residual is at rounding level.
std::pair<Vec, double> from_spectral(const SpectralBasis& basis, const CVec& b);

/// Full complex inverse rotation (no realification).
CVec from_spectral_complex(const SpectralBasis& basis, const CVec& b);

/// Spectral multipliers of the circulant operator defined by `kernel`.
CVec diagonalize(const SpectralBasis& basis, const Kernel& kernel);

struct SharedDiagResult {
  bool ok = false;
  double max_residual = 0.0;
};

/// Check that a family of small dense matrices is a commuting family of
/// normal matrices admitting one common unitary diagonalizer. The common
/// eigenvector matrix is extracted from a random linear combination;
/// degenerate combinations are retried up to 3 times. Test-scale only
/// (order <= 32).
SharedDiagResult validate_shared_diagonalization(const std::vector<CMat>& mats);

/// Dense circulant (or block-circulant) matrix realization of a kernel.
/// O(p^2) storage; intended for verification at small p.
Eigen::MatrixXd dense_operator(const SpectralBasis& basis, const Kernel& kernel);

}  // namespace seqdecon

#endif
