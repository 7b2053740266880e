#include "lrsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lrsim/io.hpp"

namespace lrsim {

namespace {

constexpr double kWidth = 640.0, kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string loglog_svg(const std::string& title, const std::vector<SvgSeries>& series, double slope,
                       double intercept, const std::string& x_label, const std::string& y_label) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const SvgSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      const double e = s.err.empty() ? 0.0 : s.err[i];
      x0 = std::min(x0, std::log10(s.x[i]));
      x1 = std::max(x1, std::log10(s.x[i]));
      y0 = std::min(y0, std::log10(std::max(s.y[i] - e, s.y[i] * 0.1)));
      y1 = std::max(y1, std::log10(s.y[i] + e));
    }
  }
  if (!std::isfinite(x0)) { x0 = 0; x1 = 1; y0 = 0; y1 = 1; }
  if (x1 - x0 < 1e-9) { x0 -= 0.5; x1 += 0.5; }
  if (y1 - y0 < 1e-9) { y0 -= 0.5; y1 += 0.5; }
  const double padx = 0.05 * (x1 - x0), pady = 0.08 * (y1 - y0);
  x0 -= padx; x1 += padx; y0 -= pady; y1 += pady;

  auto px = [&](double lx) { return kLeft + (lx - x0) / (x1 - x0) * (kWidth - kLeft - kRight); };
  auto py = [&](double ly) { return kHeight - kBottom - (ly - y0) / (y1 - y0) * (kHeight - kTop - kBottom); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<!-- data\n";
  for (const SvgSeries& s : series) {
    os << "series " << escape(s.label) << "\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      os << format_double(s.x[i]) << ' ' << format_double(s.y[i]);
      if (!s.err.empty()) os << ' ' << format_double(s.err[i]);
      os << '\n';
    }
  }
  os << "fit slope=" << format_double(slope) << " intercept=" << format_double(intercept) << "\n-->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
     << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int e = static_cast<int>(std::ceil(x0)); e <= static_cast<int>(std::floor(x1)); ++e) {
    os << "<text x=\"" << px(e) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">1e" << e
       << "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(y0)); e <= static_cast<int>(std::floor(y1)); ++e) {
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(e) + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << escape(x_label)
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << kHeight / 2 << ")\">" << escape(y_label) << "</text>\n";

  if (std::isfinite(slope) && std::isfinite(intercept)) {
    const double ln10 = std::log(10.0);
    auto fit_ly = [&](double lx) { return (intercept + slope * lx * ln10) / ln10; };
    os << "<line x1=\"" << px(x0) << "\" y1=\"" << py(fit_ly(x0)) << "\" x2=\"" << px(x1) << "\" y2=\""
       << py(fit_ly(x1)) << "\" stroke=\"gray\" stroke-dasharray=\"5,4\"/>\n";
  }

  double legend_y = kTop + 16;
  for (const SvgSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      const double cx = px(std::log10(s.x[i])), cy = py(std::log10(s.y[i]));
      if (!s.err.empty() && s.err[i] > 0.0) {
        const double lo = std::max(s.y[i] - s.err[i], s.y[i] * 0.1);
        os << "<line x1=\"" << cx << "\" y1=\"" << py(std::log10(lo)) << "\" x2=\"" << cx << "\" y2=\""
           << py(std::log10(s.y[i] + s.err[i])) << "\" stroke=\"" << s.color << "\"/>\n";
      }
      os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"4\" fill=\"" << s.color << "\"/>\n";
    }
    os << "<circle cx=\"" << kWidth - kRight - 150 << "\" cy=\"" << legend_y - 4 << "\" r=\"4\" fill=\"" << s.color
       << "\"/><text x=\"" << kWidth - kRight - 140 << "\" y=\"" << legend_y << "\">" << escape(s.label)
       << "</text>\n";
    legend_y += 16;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace lrsim
