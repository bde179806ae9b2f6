#include "seqdecon/state_doc.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace seqdecon {

using nlohmann::json;

StateDoc::StateDoc(const SpectralBasis& basis)
    : suff_(basis), avg_(basis), var_con_(basis.size()) {}

void StateDoc::ingest(const CVec& d, const CVec& x, const Vec& y) {
  suff_.update(d, x);
  avg_.update(d, x);
  var_con_.update(y);
  var_tail_.update(d, x);
}

namespace {

std::vector<double> reals(const CVec& v) {
  std::vector<double> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index j = 0; j < v.size(); ++j)
    out[static_cast<std::size_t>(j)] = v[j].real();
  return out;
}

std::vector<double> imags(const CVec& v) {
  std::vector<double> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index j = 0; j < v.size(); ++j)
    out[static_cast<std::size_t>(j)] = v[j].imag();
  return out;
}

CVec complex_from(const std::vector<double>& re, const std::vector<double>& im) {
  if (re.size() != im.size())
    throw std::invalid_argument("state: re/im length mismatch");
  CVec out(static_cast<Eigen::Index>(re.size()));
  for (std::size_t j = 0; j < re.size(); ++j)
    out[static_cast<Eigen::Index>(j)] = {re[j], im[j]};
  return out;
}

}  // namespace

std::string StateDoc::to_json() const {
  json doc = json::parse(suffstat_to_json(suff_));
  doc["avg"] = {
      {"n", avg_.count()},
      {"xbar_re", reals(avg_.xbar())},
      {"xbar_im", imags(avg_.xbar())},
      {"dbar_re", reals(avg_.dbar())},
      {"dbar_im", imags(avg_.dbar())},
  };
  std::vector<double> sum_y(static_cast<std::size_t>(var_con_.dim()));
  {
    json vc;
    vc["n"] = var_con_.count();
    const Vec& s = var_con_.sum_y_;
    for (Eigen::Index j = 0; j < s.size(); ++j)
      sum_y[static_cast<std::size_t>(j)] = s[j];
    vc["sum_y"] = sum_y;
    vc["total_sq"] = var_con_.total_sq_;
    doc["var_consistent"] = vc;
  }
  doc["var_tail"] = {
      {"seen", var_tail_.seen_},
      {"flagged", var_tail_.flagged_},
      {"sum", var_tail_.sum_},
  };
  return doc.dump(2);
}

StateDoc StateDoc::from_json(const std::string& text) {
  const json doc = json::parse(text);
  SufStat suff = suffstat_from_json(text);
  StateDoc out(suff.basis());
  out.suff_ = suff;

  const json& avg = doc.at("avg");
  out.avg_.n_ = avg.at("n").get<std::int64_t>();
  out.avg_.xbar_ = complex_from(avg.at("xbar_re").get<std::vector<double>>(),
                                avg.at("xbar_im").get<std::vector<double>>());
  out.avg_.dbar_ = complex_from(avg.at("dbar_re").get<std::vector<double>>(),
                                avg.at("dbar_im").get<std::vector<double>>());
  if (out.avg_.xbar_.size() != suff.basis().size() ||
      out.avg_.dbar_.size() != suff.basis().size())
    throw std::invalid_argument("state: avg length mismatch");

  const json& vc = doc.at("var_consistent");
  out.var_con_.n_ = vc.at("n").get<std::int64_t>();
  const auto sum_y = vc.at("sum_y").get<std::vector<double>>();
  if (sum_y.size() != static_cast<std::size_t>(suff.basis().size()))
    throw std::invalid_argument("state: var_consistent length mismatch");
  for (std::size_t j = 0; j < sum_y.size(); ++j)
    out.var_con_.sum_y_[static_cast<Eigen::Index>(j)] = sum_y[j];
  out.var_con_.total_sq_ = vc.at("total_sq").get<double>();

  const json& vt = doc.at("var_tail");
  out.var_tail_.seen_ = vt.at("seen").get<std::int64_t>();
  out.var_tail_.flagged_ = vt.at("flagged").get<std::int64_t>();
  out.var_tail_.sum_ = vt.at("sum").get<double>();
  return out;
}

void StateDoc::save(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp + " for writing");
    f << to_json() << '\n';
    if (!f.good()) throw std::runtime_error("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot replace " + path);
  }
}

StateDoc StateDoc::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open state file " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return from_json(buf.str());
}

}  // namespace seqdecon
