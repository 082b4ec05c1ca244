#include "panm/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace panm {

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string measurement_csv(const PilotGrid& grid, const CVector& y) {
  std::ostringstream os;
  os << "l,re_y,im_y\n";
  for (int i = 0; i < grid.P; ++i)
    os << grid.J[i] << "," << fmt9(y(i).real()) << "," << fmt9(y(i).imag()) << "\n";
  return os.str();
}

std::string dual_csv(const PilotGrid& grid, const CVector& q) {
  std::ostringstream os;
  os << "k,re_q,im_q\n";
  for (int i = 0; i < grid.P; ++i)
    os << grid.J[i] << "," << fmt9(q(i).real()) << "," << fmt9(q(i).imag()) << "\n";
  return os.str();
}

std::string estimate_csv(const EstimateResult& est) {
  std::ostringstream os;
  os << "fhat,tau_s,re_alpha,im_alpha\n";
  for (size_t k = 0; k < est.fhat.size(); ++k)
    os << fmt9(est.fhat[k]) << "," << fmt9(est.tauhat[k]) << ","
       << fmt9(est.alphahat(k).real()) << "," << fmt9(est.alphahat(k).imag()) << "\n";
  return os.str();
}

std::string impulse_csv(const EstimateResult& est) {
  std::ostringstream os;
  os << "l,re_beta,im_beta\n";
  for (size_t k = 0; k < est.omegahat.size(); ++k)
    os << est.omegahat[k] << "," << fmt9(est.betahat(k).real()) << ","
       << fmt9(est.betahat(k).imag()) << "\n";
  return os.str();
}

std::string phase_csv(const PhaseGrid& grid) {
  std::ostringstream os;
  os << "s,r,successes,trials\n";
  for (size_t si = 0; si < grid.s_values.size(); ++si)
    for (size_t ri = 0; ri < grid.r_values.size(); ++ri)
      os << grid.s_values[si] << "," << grid.r_values[ri] << ","
         << grid.successes(static_cast<int>(si), static_cast<int>(ri)) << "," << grid.trials
         << "\n";
  return os.str();
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  os << "estimator,snr_db,mean_mse,stderr,trials\n";
  for (const SweepPoint& p : points)
    os << to_string(p.estimator) << "," << fmt9(p.snr_db) << "," << fmt9(p.mean_mse) << ","
       << fmt9(p.stderr_mse) << "," << p.trials << "\n";
  return os.str();
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  return parts;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

}  // namespace

DualCsv read_dual_csv(const std::string& path) {
  auto in = open_or_throw(path);
  std::string line;
  std::getline(in, line);  // header
  DualCsv out;
  std::vector<Complex> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 3) throw std::runtime_error("bad dual CSV row: " + line);
    out.k.push_back(std::stoi(parts[0]));
    vals.emplace_back(std::stod(parts[1]), std::stod(parts[2]));
  }
  out.q.resize(static_cast<int>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) out.q(static_cast<int>(i)) = vals[i];
  return out;
}

PhaseGrid read_phase_csv(const std::string& path) {
  auto in = open_or_throw(path);
  std::string line;
  std::getline(in, line);
  struct Cell { int s, r, succ, trials; };
  std::vector<Cell> cells;
  std::set<int> svals, rvals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 4) throw std::runtime_error("bad phase CSV row: " + line);
    Cell c{std::stoi(parts[0]), std::stoi(parts[1]), std::stoi(parts[2]), std::stoi(parts[3])};
    cells.push_back(c);
    svals.insert(c.s);
    rvals.insert(c.r);
  }
  PhaseGrid grid;
  grid.s_values.assign(svals.begin(), svals.end());
  grid.r_values.assign(rvals.begin(), rvals.end());
  grid.trials = cells.empty() ? 0 : cells.front().trials;
  grid.successes = Eigen::MatrixXi::Zero(static_cast<int>(svals.size()),
                                         static_cast<int>(rvals.size()));
  std::map<int, int> sidx, ridx;
  for (size_t i = 0; i < grid.s_values.size(); ++i) sidx[grid.s_values[i]] = static_cast<int>(i);
  for (size_t i = 0; i < grid.r_values.size(); ++i) ridx[grid.r_values[i]] = static_cast<int>(i);
  for (const Cell& c : cells) grid.successes(sidx[c.s], ridx[c.r]) = c.succ;
  return grid;
}

std::vector<SweepPoint> read_sweep_csv(const std::string& path) {
  auto in = open_or_throw(path);
  std::string line;
  std::getline(in, line);
  std::vector<SweepPoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 5) throw std::runtime_error("bad sweep CSV row: " + line);
    points.push_back({estimator_from_string(parts[0]), std::stod(parts[1]), std::stod(parts[2]),
                      std::stod(parts[3]), std::stoi(parts[4])});
  }
  return points;
}

}  // namespace panm
