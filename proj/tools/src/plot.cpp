#include "nlqm/cli/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace nlqm::cli {

namespace {

constexpr double kWidth = 720.0;
constexpr double kPanelHeight = 170.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 28.0;
constexpr double kMarginBottom = 22.0;

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void panel(std::ostream& out, double y0, const std::string& title, const std::vector<double>& t,
           const std::vector<double>& y) {
  double lo = *std::min_element(y.begin(), y.end());
  double hi = *std::max_element(y.begin(), y.end());
  // Flat series get a symmetric band so the line sits mid-panel.
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    const double pad = std::max(1e-6, 0.05 * std::abs(hi));
    lo -= pad;
    hi += pad;
  }
  const double t0 = t.front();
  const double t1 = t.back();
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kPanelHeight - kMarginTop - kMarginBottom;
  auto px = [&](double tv) { return kMarginLeft + (tv - t0) / (t1 - t0) * plot_w; };
  auto py = [&](double yv) { return y0 + kMarginTop + (hi - yv) / (hi - lo) * plot_h; };

  out << "  <text x=\"" << fixed(kMarginLeft) << "\" y=\"" << fixed(y0 + 18.0)
      << "\" font-size=\"13\">" << title << "</text>\n";
  out << "  <rect x=\"" << fixed(kMarginLeft) << "\" y=\"" << fixed(y0 + kMarginTop)
      << "\" width=\"" << fixed(plot_w) << "\" height=\"" << fixed(plot_h)
      << "\" fill=\"none\" stroke=\"#999\"/>\n";
  out << "  <text x=\"" << fixed(kMarginLeft - 4.0) << "\" y=\"" << fixed(py(hi) + 4.0)
      << "\" font-size=\"10\" text-anchor=\"end\">" << label(hi) << "</text>\n";
  out << "  <text x=\"" << fixed(kMarginLeft - 4.0) << "\" y=\"" << fixed(py(lo))
      << "\" font-size=\"10\" text-anchor=\"end\">" << label(lo) << "</text>\n";
  out << "  <text x=\"" << fixed(kMarginLeft) << "\" y=\"" << fixed(py(lo) + 14.0)
      << "\" font-size=\"10\">" << label(t0) << "</text>\n";
  out << "  <text x=\"" << fixed(kMarginLeft + plot_w) << "\" y=\"" << fixed(py(lo) + 14.0)
      << "\" font-size=\"10\" text-anchor=\"end\">t = " << label(t1) << "</text>\n";
  out << "  <polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < t.size(); ++i)
    out << (i ? " " : "") << fixed(px(t[i])) << "," << fixed(py(y[i]));
  out << "\"/>\n";
}

}  // namespace

void write_svg_plots(std::ostream& out, const Table& observables) {
  const auto t = observables.column("t");
  const auto re = observables.column("Re_gamma");
  const auto im = observables.column("Im_gamma");
  std::vector<double> abs_gamma(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) abs_gamma[i] = std::hypot(re[i], im[i]);

  const double height = 4.0 * kPanelHeight;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(kWidth, 0)
      << "\" height=\"" << fixed(height, 0) << "\" viewBox=\"0 0 " << fixed(kWidth, 0) << " "
      << fixed(height, 0) << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  panel(out, 0.0 * kPanelHeight, "|gamma|", t, abs_gamma);
  panel(out, 1.0 * kPanelHeight, "tau", t, observables.column("tau"));
  panel(out, 2.0 * kPanelHeight, "N", t, observables.column("N"));
  panel(out, 3.0 * kPanelHeight, "purity", t, observables.column("purity"));
  out << "</svg>\n";
}

}  // namespace nlqm::cli
