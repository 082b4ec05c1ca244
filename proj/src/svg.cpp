#include "panm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace panm {

namespace {

constexpr int kW = 900;
constexpr int kH = 320;
constexpr int kMargin = 50;

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

void header(std::ostringstream& os, const std::string& meta, int w = kW, int h = kH) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  os << "<desc>config: " << escape_xml(meta) << "</desc>\n";
  os << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
}

void axes(std::ostringstream& os, const std::string& xlabel, const std::string& ylabel,
          int w = kW, int h = kH) {
  os << "<line x1=\"" << kMargin << "\" y1=\"" << h - kMargin << "\" x2=\"" << w - kMargin
     << "\" y2=\"" << h - kMargin << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
     << h - kMargin << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 12
     << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n";
  os << "<text x=\"14\" y=\"" << h / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
     << "transform=\"rotate(-90 14 " << h / 2 << ")\">" << ylabel << "</text>\n";
}

double xmap(double t, int w = kW) { return kMargin + t * (w - 2 * kMargin); }
double ymap(double t, int h = kH) { return h - kMargin - t * (h - 2 * kMargin); }

}  // namespace

std::string svg_dual_polynomial(const std::vector<double>& magnitudes,
                                const std::vector<double>& truth_freqs,
                                const std::vector<double>& est_freqs,
                                const std::string& meta) {
  std::ostringstream os;
  header(os, meta);
  axes(os, "normalized frequency f", "|Q(f)|");
  double ymax = 1.05;
  for (double m : magnitudes) ymax = std::max(ymax, m);

  for (double f : truth_freqs)
    os << "<line x1=\"" << xmap(f) << "\" y1=\"" << ymap(0) << "\" x2=\"" << xmap(f)
       << "\" y2=\"" << ymap(1.0 / ymax) << "\" stroke=\"green\" stroke-width=\"2\"/>\n";
  for (double f : est_freqs)
    os << "<line x1=\"" << xmap(f) << "\" y1=\"" << ymap(0) << "\" x2=\"" << xmap(f)
       << "\" y2=\"" << ymap(1.0 / ymax)
       << "\" stroke=\"red\" stroke-width=\"1.5\" stroke-dasharray=\"5,3\"/>\n";

  os << "<polyline fill=\"none\" stroke=\"blue\" stroke-width=\"1\" points=\"";
  const size_t n = magnitudes.size();
  const size_t step = std::max<size_t>(1, n / 4096);
  for (size_t i = 0; i < n; i += step)
    os << xmap(static_cast<double>(i) / n) << "," << ymap(magnitudes[i] / ymax) << " ";
  os << "\"/>\n";
  // unit level
  os << "<line x1=\"" << xmap(0) << "\" y1=\"" << ymap(1.0 / ymax) << "\" x2=\"" << xmap(1)
     << "\" y2=\"" << ymap(1.0 / ymax)
     << "\" stroke=\"gray\" stroke-width=\"0.5\" stroke-dasharray=\"2,2\"/>\n";
  os << "<text x=\"" << kW - kMargin << "\" y=\"20\" text-anchor=\"end\" font-size=\"12\">"
     << "blue: dual polynomial, green: truth, red: recovered</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string svg_dual_magnitude(const PilotGrid& grid, const CVector& q, double lambda,
                               const std::vector<int>& impulses, const std::string& meta) {
  std::ostringstream os;
  header(os, meta);
  axes(os, "pilot index l", "|q(l)|");
  double ymax = lambda * 1.2;
  for (int i = 0; i < q.size(); ++i) ymax = std::max(ymax, std::abs(q(i)));

  auto xofl = [&](int l) {
    const double t = static_cast<double>(l - grid.J.front()) /
                     std::max(1, grid.J.back() - grid.J.front());
    return xmap(t);
  };
  for (int i = 0; i < grid.P; ++i) {
    const double mag = std::abs(q(i));
    os << "<line x1=\"" << xofl(grid.J[i]) << "\" y1=\"" << ymap(0) << "\" x2=\""
       << xofl(grid.J[i]) << "\" y2=\"" << ymap(mag / ymax)
       << "\" stroke=\"blue\" stroke-width=\"1.5\"/>\n";
  }
  os << "<line x1=\"" << xmap(0) << "\" y1=\"" << ymap(lambda / ymax) << "\" x2=\"" << xmap(1)
     << "\" y2=\"" << ymap(lambda / ymax)
     << "\" stroke=\"gray\" stroke-dasharray=\"4,2\"/>\n";
  for (int l : impulses) {
    const int pos = grid.position_of(l);
    if (pos < 0) continue;
    os << "<circle cx=\"" << xofl(l) << "\" cy=\"" << ymap(std::abs(q(pos)) / ymax)
       << "\" r=\"4\" fill=\"none\" stroke=\"red\" stroke-width=\"1.5\"/>\n";
  }
  os << "<text x=\"" << kW - kMargin << "\" y=\"20\" text-anchor=\"end\" font-size=\"12\">"
     << "stems: |q|, dashed: lambda, red: detected impulses</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string svg_phase_heatmap(const PhaseGrid& grid, const std::string& meta) {
  const int ns = static_cast<int>(grid.s_values.size());
  const int nr = static_cast<int>(grid.r_values.size());
  std::ostringstream os;
  header(os, meta, 640, 640);
  axes(os, "impulse count r", "tap count s", 640, 640);
  const double cw = (640.0 - 2 * kMargin) / std::max(1, nr);
  const double chh = (640.0 - 2 * kMargin) / std::max(1, ns);
  for (int si = 0; si < ns; ++si)
    for (int ri = 0; ri < nr; ++ri) {
      const double rate = grid.trials > 0
                              ? static_cast<double>(grid.successes(si, ri)) / grid.trials
                              : 0.0;
      const int level = static_cast<int>(std::lround(rate * 255.0));
      // s grows upward from the bottom of the plot
      const double x = kMargin + ri * cw;
      const double y = 640.0 - kMargin - (si + 1) * chh;
      os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << chh
         << "\" fill=\"rgb(" << level << "," << level << "," << level << ")\"/>\n";
    }
  for (int ri = 0; ri < nr; ++ri)
    os << "<text x=\"" << kMargin + (ri + 0.5) * cw << "\" y=\"" << 640 - kMargin + 16
       << "\" text-anchor=\"middle\" font-size=\"10\">" << grid.r_values[ri] << "</text>\n";
  for (int si = 0; si < ns; ++si)
    os << "<text x=\"" << kMargin - 8 << "\" y=\"" << 640.0 - kMargin - (si + 0.5) * chh + 4
       << "\" text-anchor=\"end\" font-size=\"10\">" << grid.s_values[si] << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string svg_mse_sweep(const std::vector<SweepPoint>& points, const std::string& meta) {
  std::ostringstream os;
  header(os, meta);
  axes(os, "SNR [dB]", "mean MSE (log10)");
  if (points.empty()) {
    os << "</svg>\n";
    return os.str();
  }
  double xmin = points.front().snr_db, xmax = xmin;
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const SweepPoint& p : points) {
    xmin = std::min(xmin, p.snr_db);
    xmax = std::max(xmax, p.snr_db);
    if (p.mean_mse > 0) {
      const double l = std::log10(p.mean_mse);
      if (first) { lo = hi = l; first = false; }
      lo = std::min(lo, l);
      hi = std::max(hi, l);
    }
  }
  lo -= 0.3;
  hi += 0.3;
  auto fx = [&](double snr) { return xmap(xmax > xmin ? (snr - xmin) / (xmax - xmin) : 0.5); };
  auto fy = [&](double mse) {
    const double l = std::log10(std::max(mse, 1e-300));
    return ymap((l - lo) / std::max(hi - lo, 1e-9));
  };

  std::map<std::string, std::vector<const SweepPoint*>> series;
  for (const SweepPoint& p : points) series[to_string(p.estimator)].push_back(&p);
  const char* colors[] = {"blue", "red", "green", "orange"};
  int ci = 0;
  int legend_y = 24;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end(),
              [](const SweepPoint* a, const SweepPoint* b) { return a->snr_db < b->snr_db; });
    const char* color = colors[ci % 4];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const SweepPoint* p : pts) os << fx(p->snr_db) << "," << fy(p->mean_mse) << " ";
    os << "\"/>\n";
    for (const SweepPoint* p : pts)
      os << "<circle cx=\"" << fx(p->snr_db) << "\" cy=\"" << fy(p->mean_mse)
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << kW - kMargin << "\" y=\"" << legend_y
       << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">" << name
       << "</text>\n";
    legend_y += 16;
    ++ci;
  }
  // x ticks at each swept SNR
  for (const SweepPoint& p : points)
    os << "<text x=\"" << fx(p.snr_db) << "\" y=\"" << kH - kMargin + 16
       << "\" text-anchor=\"middle\" font-size=\"10\">" << p.snr_db << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace panm
