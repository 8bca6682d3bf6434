#pragma once

#include <string>
#include <utility>
#include <vector>

namespace rlcg::svg {

// All charts use a fixed 800x600 viewBox with a 70px left and 60px bottom
// margin. Axes are linear from 0 (or the data minimum for bands) to the data
// maximum padded by 5%; five evenly spaced ticks per axis.

struct Point {
  double x;
  double y;
};

// Scatter with the diagonal y = x drawn from (0,0) to (max,max).
std::string scatter(const std::string& title, const std::string& x_label, const std::string& y_label,
                    const std::vector<Point>& points);

struct BoxGroup {
  std::string label;
  std::vector<double> values;
};

// Box: quartiles (linear interpolation), whiskers at min/max.
std::string box(const std::string& title, const std::string& y_label, const std::vector<BoxGroup>& groups);

struct Band {
  std::string label;
  std::vector<double> mean;
  std::vector<double> std;
};

// Mean curves with shaded +/- 1 standard deviation.
std::string bands(const std::string& title, const std::string& x_label, const std::string& y_label,
                  const std::vector<Band>& series);

double quantile(std::vector<double> values, double q);

}  // namespace rlcg::svg
