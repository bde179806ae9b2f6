#ifndef SEQDECON_SIMLAB_HPP
#define SEQDECON_SIMLAB_HPP

#include <map>
#include <string>
#include <vector>

#include "seqdecon/estimators.hpp"
#include "seqdecon/rng.hpp"

namespace seqdecon {

enum class SignalKind { Smooth, Peaked, Custom };

/// Two Gaussian bumps (centers -0.3 / +0.3 on [-1,1), sigma 0.1, amplitudes
/// 1.0 / 0.8) band-limited in sequence space: the spectrum is tapered by
/// exp(-(f/(p/8))^2) in physical frequency f = min(j, p-j) and hard-zeroed
/// for f > p/4. p must be even, >= 8.
Vec gen_theta_smooth(Eigen::Index p);

/// Three triangular spikes at -0.5 / 0.0 / 0.45 with heights 1.0 / 0.7 /
/// 0.15 and half-widths 3 / 3 / 2 grid cells; the smallest disappears under
/// a single blurred noisy observation.
Vec gen_theta_peaked(Eigen::Index p);

/// Blur kernel model: equally weighted mixture of three Gaussians at
/// sub-cell offsets (-0.75, 0, 0.5), widths 0.5 + Exp(1) draws, all in grid
/// cells; rotated so the circular mass centroid sits at index 0 and
/// normalized to unit l1 mass.
Kernel sample_kernel(Rng& rng, Eigen::Index p);

/// Random spectral multipliers with |D_j|^2 = U^(1/rho) (CDF tau^rho on
/// (0,1]) and independent uniform phases.
CVec sample_random_eigenvalues(Rng& rng, double rho, Eigen::Index p);

/// One observation in signal space: y = K theta + eps * w, with w i.i.d.
/// standard normal in signal space.
Vec simulate_observation_y(Rng& rng, const Vec& theta, const Kernel& kernel,
                           double epsilon);

/// One observation in spectral space given the multipliers directly:
/// x = D .* spectral(theta) + eps * spectral(w). The noise is generated in
/// signal space and rotated, so its spectral law is the degenerate complex
/// normal of the model.
CVec simulate_observation_x(Rng& rng, const Vec& theta, const CVec& d,
                            double epsilon);

/// Normalized relative risk sqrt(mean ||theta_hat - theta||^2 / ||theta||^2).
double rr(const std::vector<Vec>& theta_hats, const Vec& theta);

struct ExperimentConfig {
  Eigen::Index p = 256;
  double snr = 1.0;
  std::vector<int> n_grid;
  int reps = 100;
  std::uint64_t seed = 0;
  std::vector<SignalKind> signals = {SignalKind::Smooth, SignalKind::Peaked};
  Vec custom_signal;  // used by SignalKind::Custom; length must equal p
  std::vector<EstimatorSpec> estimators = {EstimatorSpec{}};
  bool ridge_baseline = true;
  int threads = 1;
  bool capture_first_rep = false;  // keep rep-0 estimates for plotting
};

struct RRCell {
  int n = 0;
  std::string estimator;
  std::string signal;
  double rr = 0.0;
  double se = 0.0;
  int reps = 0;
  std::uint64_t seed = 0;
};

struct RRTable {
  std::vector<RRCell> cells;
  // rep-0 estimates keyed by (signal, n, estimator); filled on request
  std::map<std::string, Vec> first_rep_estimates;
  std::map<std::string, Vec> signals;
};

/// Run the full study: per replication, draw the kernel stream, simulate
/// observations, and score every estimator at each checkpoint. Replications
/// use derived substreams and reduce by index, so results are identical for
/// any thread count.
RRTable run_experiment(const ExperimentConfig& config);

std::string rr_table_csv(const RRTable& table);

std::string signal_name(SignalKind kind);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace seqdecon

#endif
