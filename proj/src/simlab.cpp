#include "seqdecon/simlab.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "seqdecon/baselines.hpp"

namespace seqdecon {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

Vec gen_theta_smooth(Eigen::Index p) {
  if (p < 8) throw std::invalid_argument("gen_theta_smooth: p must be >= 8");
  if (p % 2 != 0) throw std::invalid_argument("gen_theta_smooth: p must be even");
  const SpectralBasis basis = SpectralBasis::one_d(p);
  Vec g(p);
  const double sigma = 0.1;
  for (Eigen::Index k = 0; k < p; ++k) {
    const double x = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(p);
    g[k] = 1.0 * std::exp(-(x + 0.3) * (x + 0.3) / (2 * sigma * sigma)) +
           0.8 * std::exp(-(x - 0.3) * (x - 0.3) / (2 * sigma * sigma));
  }
  CVec s = to_spectral(basis, g);
  const double width = static_cast<double>(p) / 8.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double f = static_cast<double>(std::min(j, p - j));
    if (f > static_cast<double>(p) / 4.0) {
      s[j] = 0.0;  // band limit: sequence-space index > p/2
    } else {
      s[j] *= std::exp(-(f / width) * (f / width));
    }
  }
  return from_spectral(basis, s).first;
}

Vec gen_theta_peaked(Eigen::Index p) {
  if (p < 8) throw std::invalid_argument("gen_theta_peaked: p must be >= 8");
  Vec theta = Vec::Zero(p);
  struct Peak { double pos, height; Eigen::Index halfwidth; };
  const Peak peaks[] = {{-0.5, 1.0, 3}, {0.0, 0.7, 3}, {0.45, 0.15, 2}};
  for (const Peak& pk : peaks) {
    const Eigen::Index c = static_cast<Eigen::Index>(
        std::llround((pk.pos + 1.0) / 2.0 * static_cast<double>(p)));
    for (Eigen::Index k = -pk.halfwidth; k <= pk.halfwidth; ++k) {
      const double t = 1.0 - std::abs(static_cast<double>(k)) /
                                 static_cast<double>(pk.halfwidth);
      theta[((c + k) % p + p) % p] += pk.height * t;
    }
  }
  return theta;
}

Kernel sample_kernel(Rng& rng, Eigen::Index p) {
  if (p < 4) throw std::invalid_argument("sample_kernel: p must be >= 4");
  // Mixture parameters in grid-cell units; the mixture is evaluated on the
  // signed circular index distance so the kernel is a compact point-spread
  // profile around index 0.
  const double means[3] = {-0.75, 0.0, 0.5};
  double sig[3];
  for (int q = 0; q < 3; ++q) sig[q] = 0.5 + rng.exponential();

  Vec m(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const double d = k < p / 2 ? static_cast<double>(k)
                               : static_cast<double>(k - p);
    double v = 0.0;
    for (int q = 0; q < 3; ++q) {
      const double z = (d - means[q]) / sig[q];
      v += std::exp(-0.5 * z * z) / (sig[q] * std::sqrt(2 * kPi));
    }
    m[k] = v / 3.0;
  }

  // Circular mass centroid -> index 0 (phase of the first Fourier moment;
  // a plain index mean is meaningless for mass straddling the boundary).
  double cre = 0.0, cim = 0.0;
  for (Eigen::Index k = 0; k < p; ++k) {
    const double ang = 2 * kPi * static_cast<double>(k) / static_cast<double>(p);
    cre += m[k] * std::cos(ang);
    cim += m[k] * std::sin(ang);
  }
  const double phi = std::atan2(cim, cre);
  Eigen::Index shift = static_cast<Eigen::Index>(
      std::llround(phi / (2 * kPi) * static_cast<double>(p)));
  shift = ((shift % p) + p) % p;

  Kernel kernel;
  kernel.taps = Vec(p);
  for (Eigen::Index k = 0; k < p; ++k)
    kernel.taps[k] = m[(k + shift) % p];
  kernel.taps /= kernel.taps.lpNorm<1>();
  return kernel;
}

CVec sample_random_eigenvalues(Rng& rng, double rho, Eigen::Index p) {
  if (!(rho > 0.0))
    throw std::invalid_argument("sample_random_eigenvalues: rho must be > 0");
  CVec d(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mag_sq = std::pow(rng.uniform(), 1.0 / rho);
    const double phase = 2 * kPi * rng.uniform();
    d[j] = std::sqrt(mag_sq) * std::complex<double>(std::cos(phase),
                                                    std::sin(phase));
  }
  return d;
}

Vec simulate_observation_y(Rng& rng, const Vec& theta, const Kernel& kernel,
                           double epsilon) {
  const SpectralBasis basis = SpectralBasis::one_d(theta.size());
  const CVec d = diagonalize(basis, kernel);
  const CVec clean = d.cwiseProduct(to_spectral(basis, theta));
  Vec y = from_spectral(basis, clean).first;
  for (Eigen::Index k = 0; k < y.size(); ++k) y[k] += epsilon * rng.normal();
  return y;
}

CVec simulate_observation_x(Rng& rng, const Vec& theta, const CVec& d,
                            double epsilon) {
  const SpectralBasis basis = SpectralBasis::one_d(theta.size());
  if (d.size() != theta.size())
    throw std::invalid_argument("simulate_observation_x: dims");
  Vec w(theta.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = rng.normal();
  return d.cwiseProduct(to_spectral(basis, theta)) +
         epsilon * to_spectral(basis, w);
}

double rr(const std::vector<Vec>& theta_hats, const Vec& theta) {
  if (theta_hats.empty()) throw std::invalid_argument("rr: no samples");
  const double nt2 = theta.squaredNorm();
  if (!(nt2 > 0.0)) throw std::invalid_argument("rr: zero signal");
  double mean_err = 0.0;
  for (const Vec& th : theta_hats) {
    if (th.size() != theta.size()) throw std::invalid_argument("rr: dims");
    mean_err += (th - theta).squaredNorm();
  }
  mean_err /= static_cast<double>(theta_hats.size());
  return std::sqrt(mean_err / nt2);
}

std::string signal_name(SignalKind kind) {
  switch (kind) {
    case SignalKind::Smooth: return "smooth";
    case SignalKind::Peaked: return "peaked";
    case SignalKind::Custom: return "custom";
  }
  return "?";
}

namespace {

struct EstimatorEntry {
  std::string name;
  bool ridge = false;
  EstimatorSpec spec;
};

std::vector<EstimatorEntry> estimator_list(const ExperimentConfig& cfg) {
  std::vector<EstimatorEntry> out;
  for (const auto& spec : cfg.estimators)
    out.push_back({family_name(spec.family), false, spec});
  if (cfg.ridge_baseline) out.push_back({"ridge-avg", true, {}});
  return out;
}

// One replication: stream max_n observations, score every estimator at each
// checkpoint. Returns err[checkpoint][estimator] plus (optionally) the
// estimates themselves.
struct RepResult {
  std::vector<std::vector<double>> sq_err;
  std::vector<std::vector<Vec>> estimates;
};

RepResult run_rep(const ExperimentConfig& cfg, const Vec& theta, double epsilon,
                  std::uint64_t rep_seed,
                  const std::vector<EstimatorEntry>& ests, bool capture) {
  const SpectralBasis basis = SpectralBasis::one_d(cfg.p);
  Rng rng(rep_seed);
  SufStat suff(basis);
  AveragedStat avg(basis);
  const int max_n = *std::max_element(cfg.n_grid.begin(), cfg.n_grid.end());

  RepResult out;
  out.sq_err.assign(cfg.n_grid.size(), std::vector<double>(ests.size(), 0.0));
  if (capture)
    out.estimates.assign(cfg.n_grid.size(), std::vector<Vec>(ests.size()));

  std::size_t next_cp = 0;
  std::vector<int> grid = cfg.n_grid;
  for (int i = 1; i <= max_n; ++i) {
    const Kernel kernel = sample_kernel(rng, cfg.p);
    const CVec d = diagonalize(basis, kernel);
    const CVec x = simulate_observation_x(rng, theta, d, epsilon);
    suff.update(d, x);
    avg.update(d, x);
    while (next_cp < grid.size() && grid[next_cp] == i) {
      for (std::size_t e = 0; e < ests.size(); ++e) {
        Vec th_hat;
        if (ests[e].ridge) {
          const double tau = gcv_select_tau(avg);
          th_hat = ridge_estimate(avg, tau).first;
        } else {
          th_hat = estimate(suff, ests[e].spec, epsilon).theta_hat;
        }
        out.sq_err[next_cp][e] = (th_hat - theta).squaredNorm();
        if (capture) out.estimates[next_cp][e] = std::move(th_hat);
      }
      ++next_cp;
    }
  }
  return out;
}

}  // namespace

RRTable run_experiment(const ExperimentConfig& cfg) {
  if (cfg.reps < 1) throw std::invalid_argument("run_experiment: reps < 1");
  if (cfg.n_grid.empty()) throw std::invalid_argument("run_experiment: empty n grid");
  std::vector<int> grid = cfg.n_grid;
  if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() < 1)
    throw std::invalid_argument("run_experiment: n grid must be sorted, >= 1");

  const std::vector<EstimatorEntry> ests = estimator_list(cfg);
  RRTable table;

  for (std::size_t s = 0; s < cfg.signals.size(); ++s) {
    const SignalKind kind = cfg.signals[s];
    Vec theta;
    switch (kind) {
      case SignalKind::Smooth: theta = gen_theta_smooth(cfg.p); break;
      case SignalKind::Peaked: theta = gen_theta_peaked(cfg.p); break;
      case SignalKind::Custom:
        if (cfg.custom_signal.size() != cfg.p || !(cfg.custom_signal.norm() > 0))
          throw std::invalid_argument(
              "run_experiment: custom signal must be nonzero with length p");
        theta = cfg.custom_signal;
        break;
    }
    const double epsilon =
        theta.lpNorm<1>() / (static_cast<double>(cfg.p) * cfg.snr);
    const std::uint64_t signal_seed = Rng::derive(cfg.seed, s);
    table.signals[signal_name(kind)] = theta;

    std::vector<RepResult> reps(static_cast<std::size_t>(cfg.reps));
    auto worker = [&](int rep) {
      const bool capture = cfg.capture_first_rep && rep == 0;
      reps[static_cast<std::size_t>(rep)] =
          run_rep(cfg, theta, epsilon,
                  Rng::derive(signal_seed, static_cast<std::uint64_t>(rep)),
                  ests, capture);
    };
    const int threads = std::max(1, cfg.threads);
    if (threads == 1) {
      for (int rep = 0; rep < cfg.reps; ++rep) worker(rep);
    } else {
      std::atomic<int> next{0};
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
          for (int rep = next.fetch_add(1); rep < cfg.reps;
               rep = next.fetch_add(1))
            worker(rep);
        });
      for (auto& th : pool) th.join();
    }

    const double nt2 = theta.squaredNorm();
    for (std::size_t cp = 0; cp < grid.size(); ++cp) {
      for (std::size_t e = 0; e < ests.size(); ++e) {
        // Reduce strictly by replication index.
        double mean = 0.0;
        for (int rep = 0; rep < cfg.reps; ++rep)
          mean += reps[static_cast<std::size_t>(rep)].sq_err[cp][e];
        mean /= static_cast<double>(cfg.reps);
        double var = 0.0;
        for (int rep = 0; rep < cfg.reps; ++rep) {
          const double d =
              reps[static_cast<std::size_t>(rep)].sq_err[cp][e] - mean;
          var += d * d;
        }
        var = cfg.reps > 1 ? var / static_cast<double>(cfg.reps - 1) : 0.0;

        RRCell cell;
        cell.n = grid[cp];
        cell.estimator = ests[e].name;
        cell.signal = signal_name(kind);
        cell.rr = std::sqrt(mean / nt2);
        // Delta method for sqrt(mean/nt2).
        const double se_mean = std::sqrt(var / static_cast<double>(cfg.reps));
        cell.se = mean > 0.0 ? se_mean / (2.0 * std::sqrt(mean * nt2)) : 0.0;
        cell.reps = cfg.reps;
        cell.seed = cfg.seed;
        table.cells.push_back(std::move(cell));
      }
      if (cfg.capture_first_rep) {
        for (std::size_t e = 0; e < ests.size(); ++e) {
          const std::string key = signal_name(kind) + "_n" +
                                  std::to_string(grid[cp]) + "_" + ests[e].name;
          table.first_rep_estimates[key] = reps[0].estimates[cp][e];
        }
      }
    }
  }
  return table;
}

std::string rr_table_csv(const RRTable& table) {
  std::ostringstream out;
  out << "n,estimator,signal,rr,se,reps,seed\n";
  for (const RRCell& c : table.cells) {
    out << c.n << ',' << c.estimator << ',' << c.signal << ','
        << format_double(c.rr) << ',' << format_double(c.se) << ',' << c.reps
        << ',' << c.seed << '\n';
  }
  return out.str();
}

}  // namespace seqdecon
