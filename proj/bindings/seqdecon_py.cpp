#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <seqdecon/baselines.hpp>
#include <seqdecon/estimators.hpp>
#include <seqdecon/noise.hpp>
#include <seqdecon/simlab.hpp>
#include <seqdecon/state_doc.hpp>

namespace py = pybind11;
using namespace seqdecon;

namespace {

EstimatorSpec spec_from(const std::string& family, py::object gamma,
                        py::object tau, py::object omega2) {
  EstimatorSpec spec;
  if (family == "main") spec.family = Family::Main;
  else if (family == "soft") spec.family = Family::SoftOracle;
  else if (family == "tp") spec.family = Family::TikhonovPhillips;
  else if (family == "li") spec.family = Family::Landweber;
  else if (family == "mono") spec.family = Family::Monotone;
  else throw std::invalid_argument("unknown estimator family: " + family);
  if (!gamma.is_none()) spec.gamma = gamma.cast<double>();
  if (!tau.is_none()) spec.tau = tau.cast<double>();
  if (!omega2.is_none()) spec.omega2 = omega2.cast<double>();
  return spec;
}

py::dict diag_dict(const Diagnostics& d) {
  py::dict out;
  out["imag_residual"] = d.imag_residual;
  out["gamma_n"] = d.gamma_n;
  out["omega_sq"] = d.omega_sq;
  out["omega_sq_used"] = d.omega_sq_used;
  out["zeroed_components"] = static_cast<std::int64_t>(d.zeroed_components);
  out["all_zero_delta"] = d.all_zero_delta;
  out["li_clamped"] = d.li_clamped;
  out["tuned_gamma"] = d.tuned_gamma;
  out["tuned_tau"] = d.tuned_tau;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "streaming spectral deconvolution core";

  py::class_<SpectralBasis>(m, "SpectralBasis")
      .def_static("one_d", &SpectralBasis::one_d, py::arg("p"))
      .def_static("two_d", &SpectralBasis::two_d, py::arg("h"), py::arg("w"))
      .def_property_readonly("p", &SpectralBasis::size)
      .def_property_readonly("h", &SpectralBasis::height)
      .def_property_readonly("w", &SpectralBasis::width)
      .def("__eq__", [](const SpectralBasis& a, const SpectralBasis& b) {
        return a == b;
      });

  m.def("to_spectral",
        py::overload_cast<const SpectralBasis&, const Vec&>(&to_spectral),
        py::arg("basis"), py::arg("y"));
  m.def("to_spectral_complex",
        py::overload_cast<const SpectralBasis&, const CVec&>(&to_spectral),
        py::arg("basis"), py::arg("y"));
  m.def("from_spectral", &from_spectral, py::arg("basis"), py::arg("b"),
        "returns (real part, max abs imaginary residual)");
  m.def(
      "diagonalize",
      [](const SpectralBasis& basis, const Vec& taps) {
        return diagonalize(basis, Kernel{taps});
      },
      py::arg("basis"), py::arg("taps"));
  m.def(
      "validate_shared_diagonalization",
      [](const std::vector<CMat>& mats) {
        const auto r = validate_shared_diagonalization(mats);
        return py::make_tuple(r.ok, r.max_residual);
      },
      py::arg("matrices"));
  m.def(
      "dense_operator",
      [](const SpectralBasis& basis, const Vec& taps) {
        return dense_operator(basis, Kernel{taps});
      },
      py::arg("basis"), py::arg("taps"));

  py::class_<SufStat>(m, "SufStat")
      .def(py::init<const SpectralBasis&>(), py::arg("basis"))
      .def("update", &SufStat::update, py::arg("d"), py::arg("x"))
      .def_property_readonly("n", &SufStat::count)
      .def_property_readonly("numerator", &SufStat::numerator)
      .def_property_readonly("delta", &SufStat::delta)
      .def_property_readonly("basis", &SufStat::basis)
      .def("to_json", &suffstat_to_json)
      .def_static("from_json", &suffstat_from_json, py::arg("text"));
  m.def("merge", py::overload_cast<const SufStat&, const SufStat&>(&merge),
        py::arg("a"), py::arg("b"));
  m.def(
      "b_statistic",
      [](const SufStat& s) {
        const BStatistic b = b_statistic(s);
        return py::make_tuple(b.b, b.delta, b.n);
      },
      py::arg("state"), "returns (b, delta, n)");
  m.def("omega_sq", &omega_sq, py::arg("state"));
  m.def("gamma_n", &gamma_n, py::arg("state"), py::arg("epsilon"));

  m.def(
      "psi_hat",
      [](const CVec& b, const Vec& delta, double eps) {
        return psi_hat(BStatistic{b, delta, 0}, eps);
      },
      py::arg("b"), py::arg("delta"), py::arg("epsilon"));
  m.def(
      "risk_estimate",
      [](const Vec& lam, const CVec& b, const Vec& delta, double eps) {
        return risk_estimate(lam, BStatistic{b, delta, 0}, eps);
      },
      py::arg("lam"), py::arg("b"), py::arg("delta"), py::arg("epsilon"));
  m.def(
      "weights_soft",
      [](const CVec& b, const Vec& delta, double eps) {
        return weights_soft(BStatistic{b, delta, 0}, eps);
      },
      py::arg("b"), py::arg("delta"), py::arg("epsilon"));
  m.def(
      "weights_main",
      [](const CVec& b, const Vec& delta, double eps, double omega2) {
        return weights_main(BStatistic{b, delta, 0}, eps, omega2);
      },
      py::arg("b"), py::arg("delta"), py::arg("epsilon"), py::arg("omega2"));
  m.def("weights_tp", &weights_tp, py::arg("delta"), py::arg("gamma"));
  m.def(
      "weights_li",
      [](const Vec& delta, int gamma, double tau) {
        bool clamped = false;
        Vec w = weights_li(delta, gamma, tau, &clamped);
        return py::make_tuple(w, clamped);
      },
      py::arg("delta"), py::arg("gamma"), py::arg("tau"));
  m.def(
      "weights_monotone",
      [](const CVec& b, const Vec& delta, double eps) {
        return weights_monotone(BStatistic{b, delta, 0}, eps);
      },
      py::arg("b"), py::arg("delta"), py::arg("epsilon"));

  m.def(
      "estimate",
      [](const SufStat& s, const std::string& family, double eps,
         py::object gamma, py::object tau, py::object omega2) {
        const auto res = estimate(s, spec_from(family, gamma, tau, omega2), eps);
        return py::make_tuple(res.theta_hat, res.lambda, diag_dict(res.diag));
      },
      py::arg("state"), py::arg("family"), py::arg("epsilon"),
      py::arg("gamma") = py::none(), py::arg("tau") = py::none(),
      py::arg("omega2") = py::none(),
      "returns (theta_hat, lambda, diagnostics)");

  py::class_<AveragedStat>(m, "AveragedStat")
      .def(py::init<const SpectralBasis&>(), py::arg("basis"))
      .def("update", &AveragedStat::update, py::arg("d"), py::arg("x"))
      .def_property_readonly("n", &AveragedStat::count)
      .def_property_readonly("xbar", &AveragedStat::xbar)
      .def_property_readonly("dbar", &AveragedStat::dbar);
  m.def("b_bar", &b_bar, py::arg("state"));
  m.def("ridge_weights", &ridge_weights, py::arg("state"), py::arg("tau"));
  m.def("ridge_estimate", &ridge_estimate, py::arg("state"), py::arg("tau"),
        "returns (theta_hat, imag residual)");
  m.def("gcv_select_tau", &gcv_select_tau, py::arg("state"));
  m.def("true_risk", &true_risk, py::arg("lam"), py::arg("beta"),
        py::arg("delta"), py::arg("epsilon"));
  m.def("oracle_weights", &oracle_weights, py::arg("beta"), py::arg("delta"),
        py::arg("epsilon"));
  m.def(
      "oracle_risks",
      [](const CVec& beta, const std::vector<CVec>& ds, double eps) {
        const auto r = oracle_risks(beta, ds, eps);
        return py::make_tuple(r.r1, r.r2, r.per_component_r1,
                              r.per_component_r2);
      },
      py::arg("beta"), py::arg("d_list"), py::arg("epsilon"),
      "returns (r1, r2, per-component r1, per-component r2)");

  m.def("epsilon_tail", &epsilon_tail, py::arg("x"), py::arg("p_prime"));
  py::class_<ConsistentVariance>(m, "ConsistentVariance")
      .def(py::init<Eigen::Index>(), py::arg("p"))
      .def("update", &ConsistentVariance::update, py::arg("y"))
      .def_property_readonly("n", &ConsistentVariance::count)
      .def("estimate", [](const ConsistentVariance& v) {
        const auto e = v.estimate();
        return py::make_tuple(e.value, e.clamped);
      });
  py::class_<TailVariance>(m, "TailVariance")
      .def(py::init<>())
      .def("update", &TailVariance::update, py::arg("d"), py::arg("x"))
      .def_property_readonly("flagged", &TailVariance::flagged_count)
      .def_property_readonly("seen", &TailVariance::seen_count)
      .def("estimate", [](const TailVariance& v) {
        const auto e = v.estimate();
        return py::make_tuple(e.value, e.clamped);
      });

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform", &Rng::uniform)
      .def("normal", &Rng::normal)
      .def("exponential", &Rng::exponential)
      .def_static("derive", &Rng::derive, py::arg("master"), py::arg("index"));

  m.def("gen_theta_smooth", &gen_theta_smooth, py::arg("p"));
  m.def("gen_theta_peaked", &gen_theta_peaked, py::arg("p"));
  m.def(
      "sample_kernel",
      [](Rng& rng, Eigen::Index p) { return sample_kernel(rng, p).taps; },
      py::arg("rng"), py::arg("p"));
  m.def("sample_random_eigenvalues", &sample_random_eigenvalues, py::arg("rng"),
        py::arg("rho"), py::arg("p"));
  m.def(
      "simulate_observation_y",
      [](Rng& rng, const Vec& theta, const Vec& taps, double eps) {
        return simulate_observation_y(rng, theta, Kernel{taps}, eps);
      },
      py::arg("rng"), py::arg("theta"), py::arg("taps"), py::arg("epsilon"));
  m.def("simulate_observation_x", &simulate_observation_x, py::arg("rng"),
        py::arg("theta"), py::arg("d"), py::arg("epsilon"));
  m.def("rr", &rr, py::arg("theta_hats"), py::arg("theta"));

  m.def(
      "run_experiment",
      [](Eigen::Index p, double snr, const std::vector<int>& n_grid, int reps,
         std::uint64_t seed, const std::vector<std::string>& signals,
         const std::vector<std::string>& estimators, int threads) {
        ExperimentConfig cfg;
        cfg.p = p;
        cfg.snr = snr;
        cfg.n_grid = n_grid;
        cfg.reps = reps;
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.signals.clear();
        for (const auto& s : signals) {
          if (s == "smooth") cfg.signals.push_back(SignalKind::Smooth);
          else if (s == "peaked") cfg.signals.push_back(SignalKind::Peaked);
          else throw std::invalid_argument("unknown signal: " + s);
        }
        cfg.estimators.clear();
        cfg.ridge_baseline = false;
        for (const auto& e : estimators) {
          if (e == "ridge-avg") { cfg.ridge_baseline = true; continue; }
          cfg.estimators.push_back(spec_from(e, py::none(), py::none(), py::none()));
        }
        const RRTable table = run_experiment(cfg);
        py::list cells;
        for (const auto& c : table.cells) {
          py::dict row;
          row["n"] = c.n;
          row["estimator"] = c.estimator;
          row["signal"] = c.signal;
          row["rr"] = c.rr;
          row["se"] = c.se;
          row["reps"] = c.reps;
          row["seed"] = c.seed;
          cells.append(row);
        }
        return cells;
      },
      py::arg("p") = 256, py::arg("snr") = 1.0,
      py::arg("n_grid") = std::vector<int>{50, 100, 200, 300},
      py::arg("reps") = 100, py::arg("seed") = 1,
      py::arg("signals") = std::vector<std::string>{"smooth", "peaked"},
      py::arg("estimators") = std::vector<std::string>{"main", "ridge-avg"},
      py::arg("threads") = 1);

  py::class_<StateDoc>(m, "StateDoc")
      .def(py::init<const SpectralBasis&>(), py::arg("basis"))
      .def("ingest", &StateDoc::ingest, py::arg("d"), py::arg("x"), py::arg("y"))
      .def("to_json", &StateDoc::to_json)
      .def_static("from_json", &StateDoc::from_json, py::arg("text"))
      .def("save", &StateDoc::save, py::arg("path"))
      .def_static("load", &StateDoc::load, py::arg("path"))
      .def_property_readonly("suffstat", &StateDoc::suffstat);
}
