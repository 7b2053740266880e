#pragma once

#include <string>
#include <vector>

namespace lrsim {

struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // symmetric error bars; may be empty
};

/// Log-log scatter plot with optional error bars and a reference line
/// y = exp(intercept) x^slope. The plotted numbers are repeated in an XML
/// comment so the file doubles as a data record.
std::string loglog_svg(const std::string& title, const std::vector<SvgSeries>& series, double slope,
                       double intercept, const std::string& x_label, const std::string& y_label);

}  // namespace lrsim
