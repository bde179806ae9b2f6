#include "seqdecon/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <stdexcept>

#include "seqdecon/rng.hpp"

namespace seqdecon {

namespace {

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

CVec fft_forward(const CVec& in) {
  if (in.size() <= 1) return in;
  CVec out(in.size());
  fft_engine().fwd(out, in);
  return out;
}

CVec fft_inverse(const CVec& in) {
  if (in.size() <= 1) return in;
  CVec out(in.size());
  fft_engine().inv(out, in);
  return out;
}

// Unnormalized forward 2-D DFT of a row-major h x w array.
CVec fft2_forward(const CVec& in, Eigen::Index h, Eigen::Index w) {
  CVec work = in;
  CVec row(w), col(h);
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) row[c] = work[r * w + c];
    CVec tr = fft_forward(row);
    for (Eigen::Index c = 0; c < w; ++c) work[r * w + c] = tr[c];
  }
  for (Eigen::Index c = 0; c < w; ++c) {
    for (Eigen::Index r = 0; r < h; ++r) col[r] = work[r * w + c];
    CVec tc = fft_forward(col);
    for (Eigen::Index r = 0; r < h; ++r) work[r * w + c] = tc[r];
  }
  return work;
}

CVec fft2_inverse(const CVec& in, Eigen::Index h, Eigen::Index w) {
  CVec work = in;
  CVec row(w), col(h);
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) row[c] = work[r * w + c];
    CVec tr = fft_inverse(row);
    for (Eigen::Index c = 0; c < w; ++c) work[r * w + c] = tr[c];
  }
  for (Eigen::Index c = 0; c < w; ++c) {
    for (Eigen::Index r = 0; r < h; ++r) col[r] = work[r * w + c];
    CVec tc = fft_inverse(col);
    for (Eigen::Index r = 0; r < h; ++r) work[r * w + c] = tc[r];
  }
  return work;
}

void check_size(const SpectralBasis& basis, Eigen::Index n, const char* what) {
  if (n != basis.size())
    throw std::invalid_argument(std::string(what) + ": length " +
                                std::to_string(n) + " does not match basis p=" +
                                std::to_string(basis.size()));
}

}  // namespace

SpectralBasis SpectralBasis::one_d(Eigen::Index p) {
  if (p < 1) throw std::invalid_argument("SpectralBasis: p must be >= 1");
  return SpectralBasis(Layout::OneD, 1, p);
}

SpectralBasis SpectralBasis::two_d(Eigen::Index h, Eigen::Index w) {
  if (h < 1 || w < 1)
    throw std::invalid_argument("SpectralBasis: h and w must be >= 1");
  return SpectralBasis(Layout::TwoD, h, w);
}

CVec to_spectral(const SpectralBasis& basis, const CVec& y) {
  check_size(basis, y.size(), "to_spectral");
  const double scale = 1.0 / std::sqrt(static_cast<double>(basis.size()));
  if (basis.layout() == SpectralBasis::Layout::OneD)
    return fft_forward(y) * scale;
  return fft2_forward(y, basis.height(), basis.width()) * scale;
}

CVec to_spectral(const SpectralBasis& basis, const Vec& y) {
  return to_spectral(basis, CVec(y.cast<std::complex<double>>()));
}

CVec from_spectral_complex(const SpectralBasis& basis, const CVec& b) {
  check_size(basis, b.size(), "from_spectral");
  const double scale = std::sqrt(static_cast<double>(basis.size()));
  if (basis.layout() == SpectralBasis::Layout::OneD)
    return fft_inverse(b) * scale;
  return fft2_inverse(b, basis.height(), basis.width()) * scale;
}

std::pair<Vec, double> from_spectral(const SpectralBasis& basis, const CVec& b) {
  CVec z = from_spectral_complex(basis, b);
  Vec out(z.size());
  double resid = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    out[j] = z[j].real();
    resid = std::max(resid, std::abs(z[j].imag()));
  }
  return {out, resid};
}

CVec diagonalize(const SpectralBasis& basis, const Kernel& kernel) {
  check_size(basis, kernel.taps.size(), "diagonalize");
  if (!kernel.taps.allFinite())
    throw std::invalid_argument("diagonalize: kernel taps must be finite");
  CVec taps = kernel.taps.cast<std::complex<double>>();
  if (basis.layout() == SpectralBasis::Layout::OneD) return fft_forward(taps);
  return fft2_forward(taps, basis.height(), basis.width());
}

Eigen::MatrixXd dense_operator(const SpectralBasis& basis, const Kernel& kernel) {
  check_size(basis, kernel.taps.size(), "dense_operator");
  const Eigen::Index p = basis.size();
  Eigen::MatrixXd K(p, p);
  if (basis.layout() == SpectralBasis::Layout::OneD) {
    for (Eigen::Index r = 0; r < p; ++r)
      for (Eigen::Index c = 0; c < p; ++c)
        K(r, c) = kernel.taps[((r - c) % p + p) % p];
    return K;
  }
  const Eigen::Index h = basis.height(), w = basis.width();
  for (Eigen::Index r1 = 0; r1 < h; ++r1)
    for (Eigen::Index c1 = 0; c1 < w; ++c1)
      for (Eigen::Index r2 = 0; r2 < h; ++r2)
        for (Eigen::Index c2 = 0; c2 < w; ++c2) {
          const Eigen::Index dr = ((r1 - r2) % h + h) % h;
          const Eigen::Index dc = ((c1 - c2) % w + w) % w;
          K(r1 * w + c1, r2 * w + c2) = kernel.taps[dr * w + dc];
        }
  return K;
}

SharedDiagResult validate_shared_diagonalization(const std::vector<CMat>& mats) {
  if (mats.empty())
    throw std::invalid_argument("validate_shared_diagonalization: empty family");
  const Eigen::Index m = mats.front().rows();
  if (m > 32)
    throw std::invalid_argument(
        "validate_shared_diagonalization: test scale only (order <= 32)");
  for (const auto& M : mats) {
    if (M.rows() != M.cols())
      throw std::invalid_argument("validate_shared_diagonalization: non-square");
    if (M.rows() != m)
      throw std::invalid_argument(
          "validate_shared_diagonalization: mismatched orders");
  }

  SharedDiagResult res;
  // Normality and pairwise commutation, relative Frobenius scale.
  for (const auto& M : mats) {
    const double scale = std::max(1.0, M.squaredNorm());
    const double r = (M.adjoint() * M - M * M.adjoint()).norm() / scale;
    res.max_residual = std::max(res.max_residual, r);
    if (r > 1e-8) return res;
  }
  for (std::size_t i = 0; i < mats.size(); ++i)
    for (std::size_t j = i + 1; j < mats.size(); ++j) {
      const double scale =
          std::max(1.0, mats[i].norm() * mats[j].norm());
      const double r = (mats[i] * mats[j] - mats[j] * mats[i]).norm() / scale;
      res.max_residual = std::max(res.max_residual, r);
      if (r > 1e-8) return res;
    }

  // Common eigenvectors from a random linear combination; a degenerate
  // combination (repeated eigenvalues) is retried with fresh coefficients.
  Rng rng(0x5ec7a1d1a6ull);
  double best = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 3; ++attempt) {
    CMat S = CMat::Zero(m, m);
    for (const auto& M : mats)
      S += std::complex<double>(rng.uniform() * 2 - 1, rng.uniform() * 2 - 1) * M;
    Eigen::ComplexEigenSolver<CMat> es(S, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success) continue;
    const CMat V = es.eigenvectors();
    if ((V.adjoint() * V - CMat::Identity(m, m)).norm() > 1e-6 * m) continue;
    double worst = 0.0;
    for (const auto& M : mats) {
      const CMat T = V.adjoint() * M * V;
      const double scale = std::max(1.0, M.norm());
      const double off = (T - CMat(T.diagonal().asDiagonal())).norm() / scale;
      worst = std::max(worst, off);
    }
    best = std::min(best, worst);
    if (worst <= 1e-6) {
      res.ok = true;
      res.max_residual = std::max(res.max_residual, worst);
      return res;
    }
  }
  res.max_residual = std::max(res.max_residual, best);
  return res;
}

}  // namespace seqdecon
