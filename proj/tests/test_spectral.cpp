#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <seqdecon/rng.hpp>
#include <seqdecon/spectral.hpp>

#include "oracles.hpp"

using namespace seqdecon;

namespace {

Vec random_vec(Rng& rng, Eigen::Index p) {
  Vec v(p);
  for (Eigen::Index k = 0; k < p; ++k) v[k] = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("diagonalize: identity kernel has unit multipliers") {
  const auto basis = SpectralBasis::one_d(4);
  Kernel k;
  k.taps = Vec::Zero(4);
  k.taps[0] = 1.0;
  const CVec d = diagonalize(basis, k);
  for (int j = 0; j < 4; ++j) {
    CHECK(d[j].real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d[j].imag() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("diagonalize: averaging kernel keeps only the constant mode") {
  const auto basis = SpectralBasis::one_d(4);
  Kernel k;
  k.taps = Vec::Constant(4, 0.25);
  const CVec d = diagonalize(basis, k);
  CHECK(std::abs(d[0] - std::complex<double>(1, 0)) < 1e-12);
  for (int j = 1; j < 4; ++j) CHECK(std::abs(d[j]) < 1e-12);
}

TEST_CASE("diagonalize: shift kernel against dense eigendecomposition") {
  const auto basis = SpectralBasis::one_d(4);
  Kernel k;
  k.taps = Vec::Zero(4);
  k.taps[1] = 1.0;
  const CVec d = diagonalize(basis, k);
  // D_j = exp(-2 pi i j / 4); frozen from the dense 4x4 shift circulant,
  // whose eigenvalues are the 4th roots of unity.
  const std::complex<double> expected[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(d[j] - expected[j]) < 1e-12);
    CHECK(std::abs(d[j]) == doctest::Approx(1.0));
  }
  // independent route: dense matrix eigenvalues match the multiplier set
  const Eigen::MatrixXd K = dense_operator(basis, k);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(K.cast<std::complex<double>>());
  for (int j = 0; j < 4; ++j) {
    double best = 1e9;
    for (int l = 0; l < 4; ++l)
      best = std::min(best, std::abs(es.eigenvalues()[l] - d[j]));
    CHECK(best < 1e-8);
  }
}

TEST_CASE("to_spectral: constant vector concentrates on the DC component") {
  const auto basis = SpectralBasis::one_d(8);
  const CVec s = to_spectral(basis, Vec(Vec::Constant(8, 3.0)));
  CHECK(std::abs(s[0] - std::complex<double>(3.0 * std::sqrt(8.0), 0)) < 1e-10);
  for (int j = 1; j < 8; ++j) CHECK(std::abs(s[j]) < 1e-10);
}

TEST_CASE("to_spectral: unitarity and roundtrip") {
  Rng rng(11);
  for (Eigen::Index p : {1, 2, 5, 16, 37, 64}) {
    const auto basis = SpectralBasis::one_d(p);
    const Vec y = random_vec(rng, p);
    const CVec s = to_spectral(basis, y);
    CHECK(s.norm() == doctest::Approx(y.norm()).epsilon(1e-10));
    const auto [back, resid] = from_spectral(basis, s);
    CHECK((back - y).norm() < 1e-12 * std::max(1.0, y.norm()));
    CHECK(resid < 1e-12 * std::max(1.0, y.norm()));
  }
}

TEST_CASE("from_spectral: DC coefficient maps to a constant vector") {
  const auto basis = SpectralBasis::one_d(16);
  CVec b = CVec::Zero(16);
  b[0] = 4.0;  // c * sqrt(p) with c = 1
  const auto [y, resid] = from_spectral(basis, b);
  for (int k = 0; k < 16; ++k) CHECK(y[k] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(resid < 1e-12);
}

TEST_CASE("from_spectral: conjugate-symmetric input has tiny imaginary part") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index p = 4 + static_cast<Eigen::Index>(rng.next_u64() % 60);
    const auto basis = SpectralBasis::one_d(p);
    const CVec b = to_spectral(basis, random_vec(rng, p));
    const auto [y, resid] = from_spectral(basis, b);
    CHECK(resid <= 1e-9 * std::max(1.0, b.norm()));
    (void)y;
  }
}

TEST_CASE("agreement with the naive DFT oracle") {
  Rng rng(13);
  for (Eigen::Index p : {3, 8, 17, 32}) {
    const auto basis = SpectralBasis::one_d(p);
    const Vec y = random_vec(rng, p);
    const CVec fast = to_spectral(basis, y);
    const CVec slow = oracle::naive_dft(y) / std::sqrt(static_cast<double>(p));
    CHECK((fast - slow).norm() < 1e-10 * std::max(1.0, slow.norm()));
  }
}

TEST_CASE("dense circulant equals the spectral path") {
  Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng.next_u64() % 63);
    const auto basis = SpectralBasis::one_d(p);
    Kernel k;
    k.taps = random_vec(rng, p);
    const Vec y = random_vec(rng, p);
    const CVec d = diagonalize(basis, k);
    const auto [through_spectral, resid] =
        from_spectral(basis, CVec(d.cwiseProduct(to_spectral(basis, y))));
    const Vec direct = oracle::circular_convolve(k.taps, y);
    CHECK((through_spectral - direct).norm() <
          1e-8 * std::max(1.0, direct.norm()));
    (void)resid;
  }
}

TEST_CASE("dense operator reconstruction K = Psi D Psi*") {
  Rng rng(15);
  for (Eigen::Index p : {4, 7, 12}) {
    const auto basis = SpectralBasis::one_d(p);
    Kernel k;
    k.taps = random_vec(rng, p);
    const Eigen::MatrixXd K = dense_operator(basis, k);
    const CVec d = diagonalize(basis, k);
    for (Eigen::Index c = 0; c < p; ++c) {
      CVec e = CVec::Zero(p);
      e[c] = 1.0;
      const CVec col =
          from_spectral_complex(basis, CVec(d.cwiseProduct(to_spectral(basis, e))));
      for (Eigen::Index r = 0; r < p; ++r)
        CHECK(std::abs(col[r] - K(r, c)) < 1e-8);
    }
  }
}

TEST_CASE("2d: separable kernel eigenvalues are outer products of 1d ones") {
  Rng rng(16);
  const Eigen::Index h = 4, w = 8;
  const Vec kr = random_vec(rng, h);
  const Vec kc = random_vec(rng, w);
  Kernel k2;
  k2.taps = Vec(h * w);
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < w; ++c) k2.taps[r * w + c] = kr[r] * kc[c];
  const CVec d2 = diagonalize(SpectralBasis::two_d(h, w), k2);
  const CVec dr = diagonalize(SpectralBasis::one_d(h), Kernel{kr});
  const CVec dc = diagonalize(SpectralBasis::one_d(w), Kernel{kc});
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < w; ++c)
      CHECK(std::abs(d2[r * w + c] - dr[r] * dc[c]) < 1e-10);
}

TEST_CASE("2d: block-circulant dense operator equals the spectral path") {
  Rng rng(17);
  for (auto [h, w] : {std::pair<Eigen::Index, Eigen::Index>{4, 6}, {8, 8}, {3, 5}}) {
    const auto basis = SpectralBasis::two_d(h, w);
    Kernel k;
    k.taps = random_vec(rng, h * w);
    const Vec y = random_vec(rng, h * w);
    const Eigen::MatrixXd K = dense_operator(basis, k);
    const Vec direct = K * y;
    const CVec d = diagonalize(basis, k);
    const auto [via_spec, resid] =
        from_spectral(basis, CVec(d.cwiseProduct(to_spectral(basis, y))));
    CHECK((via_spec - direct).norm() < 1e-8 * std::max(1.0, direct.norm()));
    // naive 2-D DFT agrees with the fast path
    const CVec slow = oracle::naive_dft2(k.taps.cast<std::complex<double>>(), h, w);
    CHECK((d - slow).norm() < 1e-8 * std::max(1.0, slow.norm()));
    (void)resid;
  }
}

TEST_CASE("2d basis unitarity") {
  Rng rng(18);
  const auto basis = SpectralBasis::two_d(8, 4);
  const Vec y = random_vec(rng, 32);
  CHECK(to_spectral(basis, y).norm() == doctest::Approx(y.norm()).epsilon(1e-10));
}

TEST_CASE("dimension mismatches are rejected") {
  const auto basis = SpectralBasis::one_d(4);
  CHECK_THROWS_AS(to_spectral(basis, Vec(Vec::Zero(5))), std::invalid_argument);
  CHECK_THROWS_AS(from_spectral(basis, CVec(CVec::Zero(3))), std::invalid_argument);
  CHECK_THROWS_AS(diagonalize(basis, Kernel{Vec::Zero(6)}), std::invalid_argument);
  CHECK_THROWS_AS(SpectralBasis::one_d(0), std::invalid_argument);
  CHECK_THROWS_AS(SpectralBasis::two_d(0, 3), std::invalid_argument);
}

TEST_CASE("validate_shared_diagonalization") {
  Rng rng(19);
  const Eigen::Index p = 6;
  const auto basis = SpectralBasis::one_d(p);
  const auto circulant = [&](const Vec& taps) {
    return CMat(dense_operator(basis, Kernel{taps}).cast<std::complex<double>>());
  };

  SUBCASE("two random circulants commute and share eigenvectors") {
    const auto r = validate_shared_diagonalization(
        {circulant(random_vec(rng, p)), circulant(random_vec(rng, p))});
    CHECK(r.ok);
    CHECK(r.max_residual < 1e-6);
  }
  SUBCASE("a circulant and its transpose") {
    const CMat A = circulant(random_vec(rng, p));
    const auto r = validate_shared_diagonalization({A, A.transpose()});
    CHECK(r.ok);
  }
  SUBCASE("a circulant and a non-normal matrix fail") {
    CMat bad = CMat::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < p; ++j)
        bad(i, j) = std::complex<double>(rng.normal(), rng.normal());
    const auto r = validate_shared_diagonalization(
        {circulant(random_vec(rng, p)), bad});
    CHECK_FALSE(r.ok);
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(validate_shared_diagonalization({}), std::invalid_argument);
    CHECK_THROWS_AS(
        validate_shared_diagonalization({CMat::Zero(2, 3)}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        validate_shared_diagonalization({CMat::Zero(2, 2), CMat::Zero(3, 3)}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        validate_shared_diagonalization({CMat::Identity(40, 40)}),
        std::invalid_argument);
  }
}
