// Command-line front end: persistent streaming estimation plus the
// simulation study.
//
// Exit codes: 0 success, 1 usage/environment error, 2 malformed input,
// 3 degenerate state (nothing identified yet / estimator prerequisites
// missing).

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <seqdecon/estimators.hpp>
#include <seqdecon/simlab.hpp>
#include <seqdecon/state_doc.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace seqdecon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitMalformed = 2;
constexpr int kExitDegenerate = 3;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
  throw CliError{code, message};
}

// ---- advisory lock --------------------------------------------------------

class FileLock {
 public:
  explicit FileLock(const std::string& path) : path_(path + ".lock") {
    fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) fail(kExitUsage, "cannot open lock file " + path_);
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      fd_ = -1;
      fail(kExitUsage, "state file is locked by another process: " + path_);
    }
  }
  ~FileLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  std::string path_;
  int fd_ = -1;
};

// ---- observation input ----------------------------------------------------

struct Observation {
  CVec d;
  Vec y;
};

Vec json_to_vec(const json& arr, Eigen::Index p, const std::string& what,
                std::size_t line_no) {
  if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != p)
    fail(kExitMalformed, "line " + std::to_string(line_no) + ": " + what +
                             " must be an array of length " + std::to_string(p));
  Vec out(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const json& v = arr[static_cast<std::size_t>(j)];
    if (!v.is_number())
      fail(kExitMalformed,
           "line " + std::to_string(line_no) + ": non-numeric entry in " + what);
    out[j] = v.get<double>();
    if (!std::isfinite(out[j]))
      fail(kExitMalformed,
           "line " + std::to_string(line_no) + ": non-finite entry in " + what);
  }
  return out;
}

std::vector<Observation> parse_ndjson(std::istream& in,
                                      const SpectralBasis& basis) {
  std::vector<Observation> out;
  std::string line;
  std::size_t line_no = 0;
  const Eigen::Index p = basis.size();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const std::exception& e) {
      fail(kExitMalformed,
           "line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    if (!rec.is_object())
      fail(kExitMalformed, "line " + std::to_string(line_no) + ": not an object");
    if (!rec.contains("y"))
      fail(kExitMalformed, "line " + std::to_string(line_no) + ": missing y");
    Observation obs;
    obs.y = json_to_vec(rec["y"], p, "y", line_no);
    const bool has_kernel = rec.contains("kernel");
    const bool has_d = rec.contains("d_re") || rec.contains("d_im");
    if (has_kernel == has_d)
      fail(kExitMalformed, "line " + std::to_string(line_no) +
                               ": record needs either kernel or d_re/d_im");
    if (has_kernel) {
      Kernel k{json_to_vec(rec["kernel"], p, "kernel", line_no)};
      obs.d = diagonalize(basis, k);
    } else {
      if (!rec.contains("d_re") || !rec.contains("d_im"))
        fail(kExitMalformed,
             "line " + std::to_string(line_no) + ": need both d_re and d_im");
      const Vec re = json_to_vec(rec["d_re"], p, "d_re", line_no);
      const Vec im = json_to_vec(rec["d_im"], p, "d_im", line_no);
      obs.d = CVec(p);
      for (Eigen::Index j = 0; j < p; ++j) obs.d[j] = {re[j], im[j]};
    }
    out.push_back(std::move(obs));
  }
  return out;
}

// Raw frame format: per record, little-endian u32 tag (= 1), u32 p,
// p doubles of kernel taps, p doubles of y.
std::vector<Observation> parse_binary(std::istream& in,
                                      const SpectralBasis& basis) {
  std::vector<Observation> out;
  const Eigen::Index p = basis.size();
  std::size_t frame = 0;
  for (;;) {
    std::uint32_t tag = 0;
    in.read(reinterpret_cast<char*>(&tag), 4);
    if (in.gcount() == 0 && in.eof()) break;
    ++frame;
    if (in.gcount() != 4)
      fail(kExitMalformed, "frame " + std::to_string(frame) + ": truncated tag");
    if (tag != 1u)
      fail(kExitMalformed,
           "frame " + std::to_string(frame) + ": unknown tag " + std::to_string(tag));
    std::uint32_t fp = 0;
    in.read(reinterpret_cast<char*>(&fp), 4);
    if (in.gcount() != 4 || static_cast<Eigen::Index>(fp) != p)
      fail(kExitMalformed,
           "frame " + std::to_string(frame) + ": bad length field");
    Vec taps(p), y(p);
    in.read(reinterpret_cast<char*>(taps.data()), 8 * p);
    if (in.gcount() != 8 * p)
      fail(kExitMalformed, "frame " + std::to_string(frame) + ": truncated kernel");
    in.read(reinterpret_cast<char*>(y.data()), 8 * p);
    if (in.gcount() != 8 * p)
      fail(kExitMalformed, "frame " + std::to_string(frame) + ": truncated y");
    if (!taps.allFinite() || !y.allFinite())
      fail(kExitMalformed, "frame " + std::to_string(frame) + ": non-finite data");
    Observation obs;
    obs.d = diagonalize(basis, Kernel{taps});
    obs.y = std::move(y);
    out.push_back(std::move(obs));
  }
  return out;
}

// ---- report ---------------------------------------------------------------

json diagnostics_json(const Diagnostics& d) {
  json out;
  out["imag_residual"] = d.imag_residual;
  out["gamma_n"] = d.gamma_n;
  out["omega_sq"] = d.omega_sq;
  out["omega_sq_used"] = d.omega_sq_used;
  out["zeroed_components"] = static_cast<std::int64_t>(d.zeroed_components);
  out["li_clamped"] = d.li_clamped;
  return out;
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(kExitUsage, "cannot open output file " + path);
  f << content;
}

std::string report_csv(const Vec& theta) {
  std::ostringstream out;
  out << "index,theta_hat\n";
  for (Eigen::Index j = 0; j < theta.size(); ++j)
    out << j << ',' << format_double(theta[j]) << '\n';
  return out.str();
}

// ---- svg ------------------------------------------------------------------

void write_svg(const std::string& path, const Vec& signal, const Vec& estimate) {
  const int w = 640, h = 320, margin = 10;
  double lo = std::min(signal.minCoeff(), estimate.minCoeff());
  double hi = std::max(signal.maxCoeff(), estimate.maxCoeff());
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const auto pts = [&](const Vec& v) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      const double x = margin + (w - 2.0 * margin) * static_cast<double>(k) /
                                    static_cast<double>(v.size() - 1);
      const double y = h - margin - (h - 2.0 * margin) * (v[k] - lo) / (hi - lo);
      s << x << ',' << y << ' ';
    }
    return s.str();
  };
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(kExitUsage, "cannot open svg file " + path);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
    << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<polyline fill=\"none\" stroke=\"#444444\" stroke-width=\"1\" points=\""
    << pts(signal) << "\"/>\n"
    << "<polyline fill=\"none\" stroke=\"#cc2222\" stroke-width=\"1\" points=\""
    << pts(estimate) << "\"/>\n"
    << "</svg>\n";
}

// ---- subcommands ----------------------------------------------------------

struct InitArgs {
  int p = 0;
  std::string shape;
  std::string state;
  bool force = false;
};

int cmd_init(const InitArgs& a) {
  if ((a.p > 0) == !a.shape.empty())
    fail(kExitUsage, "init: give exactly one of --p or --shape");
  SpectralBasis basis = SpectralBasis::one_d(1);
  if (a.p > 0) {
    basis = SpectralBasis::one_d(a.p);
  } else {
    const auto x = a.shape.find('x');
    if (x == std::string::npos)
      fail(kExitUsage, "init: --shape must look like HxW");
    try {
      basis = SpectralBasis::two_d(std::stol(a.shape.substr(0, x)),
                                   std::stol(a.shape.substr(x + 1)));
    } catch (const std::exception&) {
      fail(kExitUsage, "init: cannot parse --shape " + a.shape);
    }
  }
  if (fs::exists(a.state) && !a.force)
    fail(kExitUsage, "init: " + a.state + " exists (use --force to overwrite)");
  StateDoc doc{basis};
  doc.save(a.state);
  std::cout << "initialized state p=" << basis.size() << " at " << a.state
            << "\n";
  return kExitOk;
}

struct IngestArgs {
  std::string state;
  std::string input = "-";
  bool binary = false;
};

int cmd_ingest(const IngestArgs& a) {
  if (!fs::exists(a.state)) fail(kExitUsage, "ingest: no state file " + a.state);
  FileLock lock(a.state);
  StateDoc doc = [&] {
    try {
      return StateDoc::load(a.state);
    } catch (const std::exception& e) {
      fail(kExitMalformed, std::string("ingest: cannot parse state: ") + e.what());
    }
  }();

  std::ifstream file;
  std::istream* in = &std::cin;
  if (a.input != "-") {
    file.open(a.input, std::ios::binary);
    if (!file) fail(kExitUsage, "ingest: cannot open input " + a.input);
    in = &file;
  }

  // Parse and validate everything before touching the state: a malformed
  // record aborts the whole invocation.
  const std::vector<Observation> obs =
      a.binary ? parse_binary(*in, doc.suffstat().basis())
               : parse_ndjson(*in, doc.suffstat().basis());

  const auto& basis = doc.suffstat().basis();
  for (const Observation& o : obs) doc.ingest(o.d, to_spectral(basis, o.y), o.y);
  doc.save(a.state);
  std::cout << "processed " << obs.size() << " observations (n="
            << doc.suffstat().count() << ")\n";
  return kExitOk;
}

struct EstimateArgs {
  std::string state;
  std::string estimator = "main";
  std::optional<double> epsilon;
  std::string epsilon_mode;
  std::optional<double> gamma;
  std::optional<double> tau;
  std::optional<double> omega2;
  std::string out = "-";
  std::string format = "json";
};

int cmd_estimate(const EstimateArgs& a) {
  StateDoc doc = [&] {
    try {
      return StateDoc::load(a.state);
    } catch (const std::exception& e) {
      fail(kExitUsage, std::string("estimate: cannot load state: ") + e.what());
    }
  }();
  if (doc.suffstat().count() < 1)
    fail(kExitDegenerate, "estimate: state holds no observations");

  const bool is_ridge = a.estimator == "ridge-avg";
  double epsilon = 0.0;
  std::string epsilon_source = "none";
  if (a.epsilon) {
    epsilon = *a.epsilon;
    epsilon_source = "given";
    if (epsilon < 0) fail(kExitUsage, "estimate: --epsilon must be >= 0");
  } else if (a.epsilon_mode == "consistent") {
    if (doc.consistent_variance().count() < 2)
      fail(kExitDegenerate,
           "estimate: consistent variance needs at least 2 observations");
    epsilon = std::sqrt(doc.consistent_variance().estimate().value);
    epsilon_source = "consistent";
  } else if (a.epsilon_mode == "tail") {
    if (doc.tail_variance().flagged_count() < 1)
      fail(kExitDegenerate,
           "estimate: no low-quality observations flagged for the tail estimator");
    epsilon = std::sqrt(doc.tail_variance().estimate().value);
    epsilon_source = "tail";
  } else if (!is_ridge) {
    fail(kExitUsage, "estimate: need --epsilon or --epsilon-mode");
  }

  json report;
  report["n"] = doc.suffstat().count();
  if (epsilon_source == "none")
    report["epsilon"] = nullptr;
  else
    report["epsilon"] = epsilon;
  report["epsilon_source"] = epsilon_source;

  Vec theta_hat;
  if (is_ridge) {
    const AveragedStat& avg = doc.averaged();
    double tau;
    try {
      tau = a.tau ? *a.tau : gcv_select_tau(avg);
    } catch (const std::domain_error& e) {
      fail(kExitDegenerate, std::string("estimate: ") + e.what());
    }
    auto [th, resid] = ridge_estimate(avg, tau);
    theta_hat = std::move(th);
    json est;
    est["family"] = "ridge-avg";
    est["tau"] = tau;
    report["estimator"] = est;
    json diag;
    diag["imag_residual"] = resid;
    diag["zeroed_components"] = static_cast<std::int64_t>(
        (ridge_weights(avg, tau).array() == 0.0).count());
    report["diagnostics"] = diag;
  } else {
    EstimatorSpec spec;
    if (a.estimator == "main") spec.family = Family::Main;
    else if (a.estimator == "soft") spec.family = Family::SoftOracle;
    else if (a.estimator == "tp") spec.family = Family::TikhonovPhillips;
    else if (a.estimator == "li") spec.family = Family::Landweber;
    else if (a.estimator == "mono") spec.family = Family::Monotone;
    else fail(kExitUsage, "estimate: unknown estimator " + a.estimator);
    spec.gamma = a.gamma;
    spec.tau = a.tau;
    spec.omega2 = a.omega2;
    if (spec.family == Family::Landweber && spec.gamma.has_value() != spec.tau.has_value())
      fail(kExitUsage, "estimate: li needs both --gamma and --tau (or neither)");

    const EstimateResult res = estimate(doc.suffstat(), spec, epsilon);
    if (res.diag.all_zero_delta)
      fail(kExitDegenerate, "estimate: no component identified yet (all delta zero)");
    theta_hat = res.theta_hat;
    json est;
    est["family"] = a.estimator;
    if (spec.family == Family::TikhonovPhillips)
      est["gamma"] = spec.gamma ? *spec.gamma : res.diag.tuned_gamma;
    if (spec.family == Family::Landweber) {
      est["gamma"] = spec.gamma ? *spec.gamma : res.diag.tuned_gamma;
      est["tau"] = spec.tau ? *spec.tau : res.diag.tuned_tau;
    }
    report["estimator"] = est;
    report["diagnostics"] = diagnostics_json(res.diag);
  }

  if (a.format == "json") {
    std::vector<double> th(theta_hat.data(), theta_hat.data() + theta_hat.size());
    report["theta_hat"] = th;
    write_output(a.out, report.dump(2) + "\n");
  } else if (a.format == "csv") {
    write_output(a.out, report_csv(theta_hat));
  } else {
    fail(kExitUsage, "estimate: unknown format " + a.format);
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string signal = "smooth";
  std::string n_list = "50,100,200,300";
  int reps = 100;
  std::uint64_t seed = 1;
  int p = 256;
  double snr = 1.0;
  std::string out = "-";
  std::string svg_dir;
  std::string estimators = "main,ridge-avg";
  int threads = 1;
};

int cmd_simulate(const SimulateArgs& a) {
  ExperimentConfig cfg;
  cfg.p = a.p;
  cfg.snr = a.snr;
  cfg.reps = a.reps;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.capture_first_rep = !a.svg_dir.empty();

  if (a.signal == "smooth") cfg.signals = {SignalKind::Smooth};
  else if (a.signal == "peaked") cfg.signals = {SignalKind::Peaked};
  else if (a.signal == "both")
    cfg.signals = {SignalKind::Smooth, SignalKind::Peaked};
  else fail(kExitUsage, "simulate: unknown signal " + a.signal);

  cfg.n_grid.clear();
  {
    std::stringstream ss(a.n_list);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) cfg.n_grid.push_back(std::stoi(tok));
  }
  if (cfg.n_grid.empty()) fail(kExitUsage, "simulate: empty --n grid");

  cfg.estimators.clear();
  cfg.ridge_baseline = false;
  {
    std::stringstream ss(a.estimators);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      if (tok == "ridge-avg") { cfg.ridge_baseline = true; continue; }
      EstimatorSpec spec;
      if (tok == "main") spec.family = Family::Main;
      else if (tok == "soft") spec.family = Family::SoftOracle;
      else if (tok == "tp") spec.family = Family::TikhonovPhillips;
      else if (tok == "li") spec.family = Family::Landweber;
      else if (tok == "mono") spec.family = Family::Monotone;
      else fail(kExitUsage, "simulate: unknown estimator " + tok);
      cfg.estimators.push_back(spec);
    }
  }

  RRTable table;
  try {
    table = run_experiment(cfg);
  } catch (const std::invalid_argument& e) {
    fail(kExitUsage, std::string("simulate: ") + e.what());
  }
  write_output(a.out, rr_table_csv(table));

  if (!a.svg_dir.empty()) {
    fs::create_directories(a.svg_dir);
    for (const auto& [key, est] : table.first_rep_estimates) {
      const std::string sig = key.substr(0, key.find('_'));
      write_svg((fs::path(a.svg_dir) / (key + ".svg")).string(),
                table.signals.at(sig), est);
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streaming spectral deconvolution from sequences of blurred, "
               "noisy observations"};
  app.require_subcommand(1);

  InitArgs init_args;
  auto* init = app.add_subcommand("init", "create an empty state file");
  init->add_option("--p", init_args.p, "signal length (1-D layout)");
  init->add_option("--shape", init_args.shape, "HxW (2-D layout)");
  init->add_option("--state", init_args.state, "state file path")->required();
  init->add_flag("--force", init_args.force, "overwrite an existing state file");

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "absorb observations into the state");
  ingest->add_option("--state", ingest_args.state, "state file path")->required();
  ingest->add_option("--input", ingest_args.input,
                     "NDJSON file ('-' for stdin); records are "
                     "{\"kernel\":[...],\"y\":[...]} or "
                     "{\"d_re\":[...],\"d_im\":[...],\"y\":[...]}");
  ingest->add_flag("--binary", ingest_args.binary,
                   "raw frames: u32 tag=1, u32 p, p f64 kernel, p f64 y "
                   "(little endian)");

  EstimateArgs est_args;
  auto* est = app.add_subcommand("estimate", "produce a signal estimate");
  est->add_option("--state", est_args.state, "state file path")->required();
  est->add_option("--estimator", est_args.estimator,
                  "main|soft|tp|li|mono|ridge-avg");
  est->add_option("--epsilon", est_args.epsilon, "known noise level");
  est->add_option("--epsilon-mode", est_args.epsilon_mode,
                  "consistent|tail (estimate the noise level from the state)");
  est->add_option("--gamma", est_args.gamma, "TP penalty / LI iterations");
  est->add_option("--tau", est_args.tau, "LI relaxation / ridge penalty");
  est->add_option("--omega2", est_args.omega2,
                  "override the main-family threshold");
  est->add_option("--out", est_args.out, "output file ('-' for stdout)");
  est->add_option("--format", est_args.format, "json|csv");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "run the simulation study");
  sim->add_option("--signal", sim_args.signal, "smooth|peaked|both");
  sim->add_option("--n", sim_args.n_list, "comma-separated checkpoints");
  sim->add_option("--reps", sim_args.reps, "replications");
  sim->add_option("--seed", sim_args.seed, "master seed");
  sim->add_option("--p", sim_args.p, "signal length");
  sim->add_option("--snr", sim_args.snr, "signal-to-noise ratio");
  sim->add_option("--out", sim_args.out, "CSV output ('-' for stdout)");
  sim->add_option("--svg", sim_args.svg_dir,
                  "directory for signal-vs-estimate plots of the first "
                  "replication");
  sim->add_option("--estimators", sim_args.estimators,
                  "comma-separated subset of main,soft,tp,li,mono,ridge-avg");
  sim->add_option("--threads", sim_args.threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (init->parsed()) return cmd_init(init_args);
    if (ingest->parsed()) return cmd_ingest(ingest_args);
    if (est->parsed()) return cmd_estimate(est_args);
    if (sim->parsed()) return cmd_simulate(sim_args);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
