#include "seqdecon/accumulator.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace seqdecon {

namespace {

bool all_finite(const CVec& v) {
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (!std::isfinite(v[j].real()) || !std::isfinite(v[j].imag())) return false;
  return true;
}

}  // namespace

SufStat::SufStat(const SpectralBasis& basis)
    : basis_(basis),
      num_(CVec::Zero(basis.size())),
      delta_(Vec::Zero(basis.size())) {}

void SufStat::update(const CVec& d, const CVec& x) {
  const Eigen::Index p = basis_.size();
  if (d.size() != p || x.size() != p)
    throw std::invalid_argument("SufStat::update: dimension mismatch");
  if (!all_finite(d) || !all_finite(x))
    throw std::invalid_argument("SufStat::update: non-finite input");
  num_ += d.conjugate().cwiseProduct(x);
  delta_ += d.cwiseAbs2();
  ++n_;
}

SufStat merge(const SufStat& a, const SufStat& b) {
  if (a.basis_ != b.basis_)
    throw std::invalid_argument("merge: basis mismatch");
  SufStat out(a.basis_);
  out.n_ = a.n_ + b.n_;
  out.num_ = a.num_ + b.num_;
  out.delta_ = a.delta_ + b.delta_;
  return out;
}

BStatistic b_statistic(const SufStat& state) {
  BStatistic out;
  out.n = state.count();
  out.delta = state.delta();
  out.b = CVec::Zero(state.basis().size());
  for (Eigen::Index j = 0; j < out.b.size(); ++j)
    if (out.delta[j] > 0.0) out.b[j] = state.numerator()[j] / out.delta[j];
  return out;
}

double omega_sq(const SufStat& state) {
  const Vec& delta = state.delta();
  double mx = 0.0, mn = std::numeric_limits<double>::infinity();
  bool any = false;
  for (Eigen::Index j = 0; j < delta.size(); ++j) {
    if (delta[j] > 0.0) {
      any = true;
      mx = std::max(mx, delta[j]);
      mn = std::min(mn, delta[j]);
    }
  }
  if (!any) throw std::domain_error("omega_sq: no identified components");
  const double p = static_cast<double>(delta.size());
  if (p <= 2.0) return 0.0;
  return (p - 2.0) * (1.0 + mx / mn);
}

double gamma_n(const SufStat& state, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("gamma_n: epsilon < 0");
  const Vec& delta = state.delta();
  double g = 0.0;
  for (Eigen::Index j = 0; j < delta.size(); ++j) {
    if (delta[j] <= 0.0)
      throw std::domain_error("gamma_n: rate undefined before identification");
    g = std::max(g, epsilon * epsilon / delta[j]);
  }
  return g;
}

std::string suffstat_to_json(const SufStat& state) {
  nlohmann::json doc;
  doc["version"] = 1;
  const SpectralBasis& b = state.basis();
  if (b.layout() == SpectralBasis::Layout::OneD) {
    doc["layout"] = "1d";
    doc["p"] = b.size();
  } else {
    doc["layout"] = "2d";
    doc["h"] = b.height();
    doc["w"] = b.width();
  }
  doc["n"] = state.count();
  std::vector<double> re(state.basis().size()), im(re.size()),
      de(re.size());
  for (Eigen::Index j = 0; j < state.basis().size(); ++j) {
    re[j] = state.numerator()[j].real();
    im[j] = state.numerator()[j].imag();
    de[j] = state.delta()[j];
  }
  doc["num_re"] = re;
  doc["num_im"] = im;
  doc["delta"] = de;
  return doc.dump();
}

SufStat suffstat_from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  if (!doc.contains("version") || doc["version"].get<int>() != 1)
    throw std::invalid_argument("suffstat_from_json: unsupported version");
  const std::string layout = doc.at("layout").get<std::string>();
  SpectralBasis basis =
      layout == "2d"
          ? SpectralBasis::two_d(doc.at("h").get<Eigen::Index>(),
                                 doc.at("w").get<Eigen::Index>())
          : SpectralBasis::one_d(doc.at("p").get<Eigen::Index>());
  SufStat state(basis);
  state.n_ = doc.at("n").get<std::int64_t>();
  const auto re = doc.at("num_re").get<std::vector<double>>();
  const auto im = doc.at("num_im").get<std::vector<double>>();
  const auto de = doc.at("delta").get<std::vector<double>>();
  const std::size_t p = static_cast<std::size_t>(basis.size());
  if (re.size() != p || im.size() != p || de.size() != p)
    throw std::invalid_argument("suffstat_from_json: array length mismatch");
  for (std::size_t j = 0; j < p; ++j) {
    state.num_[static_cast<Eigen::Index>(j)] = {re[j], im[j]};
    state.delta_[static_cast<Eigen::Index>(j)] = de[j];
  }
  return state;
}

}  // namespace seqdecon
