#include "rlcg/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rlcg::svg {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#2ca02c", "#d62728", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axes {
  double x_min, x_max, y_min, y_max;
  double px(double x) const { return kLeft + (x - x_min) / (x_max - x_min) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y_min) / (y_max - y_min) * (kHeight - kTop - kBottom); }
};

double padded_max(double max_value) { return max_value > 0.0 ? max_value * 1.05 : 1.0; }

std::string header(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" height=\"600\">\n"
         "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n"
         "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">" +
         escape(title) + "</text>\n";
}

std::string frame(const Axes& ax, const std::string& x_label, const std::string& y_label, bool x_ticks = true) {
  std::string s;
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kHeight - kBottom) + "\" x2=\"" + num(kWidth - kRight) +
       "\" y2=\"" + num(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
       num(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double yv = ax.y_min + (ax.y_max - ax.y_min) * i / 5.0;
    s += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(ax.py(yv) + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" + tick_label(yv) + "</text>\n";
    if (x_ticks) {
      const double xv = ax.x_min + (ax.x_max - ax.x_min) * i / 5.0;
      s += "<text x=\"" + num(ax.px(xv)) + "\" y=\"" + num(kHeight - kBottom + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + tick_label(xv) + "</text>\n";
    }
  }
  s += "<text x=\"" + num((kLeft + kWidth - kRight) / 2) + "\" y=\"" + num(kHeight - 15) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + escape(x_label) + "</text>\n";
  s += "<text x=\"18\" y=\"" + num((kTop + kHeight - kBottom) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
       num((kTop + kHeight - kBottom) / 2) + ")\" font-family=\"sans-serif\" font-size=\"14\">" + escape(y_label) +
       "</text>\n";
  return s;
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return values[lo] + (values[hi] - values[lo]) * (pos - static_cast<double>(lo));
}

std::string scatter(const std::string& title, const std::string& x_label, const std::string& y_label,
                    const std::vector<Point>& points) {
  double max_v = 0.0;
  for (const auto& p : points) max_v = std::max({max_v, p.x, p.y});
  const double top = padded_max(max_v);
  const Axes ax{0.0, top, 0.0, top};
  std::string s = header(title) + frame(ax, x_label, y_label);
  s += "<line class=\"diagonal\" x1=\"" + num(ax.px(0)) + "\" y1=\"" + num(ax.py(0)) + "\" x2=\"" + num(ax.px(max_v)) +
       "\" y2=\"" + num(ax.py(max_v)) + "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
  for (const auto& p : points)
    s += "<circle cx=\"" + num(ax.px(p.x)) + "\" cy=\"" + num(ax.py(p.y)) + "\" r=\"4\" fill=\"" + kPalette[0] +
         "\" fill-opacity=\"0.7\"/>\n";
  s += "</svg>\n";
  return s;
}

std::string box(const std::string& title, const std::string& y_label, const std::vector<BoxGroup>& groups) {
  double max_v = 0.0;
  for (const auto& g : groups)
    for (double v : g.values) max_v = std::max(max_v, v);
  const Axes ax{0.0, static_cast<double>(std::max<std::size_t>(groups.size(), 1)), 0.0, padded_max(max_v)};
  std::string s = header(title) + frame(ax, "policy", y_label, false);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const double cx = ax.px(static_cast<double>(i) + 0.5);
    const double half = 0.25 * (ax.px(1.0) - ax.px(0.0));
    const char* color = kPalette[i % 6];
    s += "<text x=\"" + num(cx) + "\" y=\"" + num(kHeight - kBottom + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + escape(g.label) + "</text>\n";
    if (g.values.empty()) continue;
    const double lo = quantile(g.values, 0.0), q1 = quantile(g.values, 0.25), med = quantile(g.values, 0.5),
                 q3 = quantile(g.values, 0.75), hi = quantile(g.values, 1.0);
    s += "<line x1=\"" + num(cx) + "\" y1=\"" + num(ax.py(lo)) + "\" x2=\"" + num(cx) + "\" y2=\"" + num(ax.py(hi)) +
         "\" stroke=\"black\"/>\n";
    s += "<rect x=\"" + num(cx - half) + "\" y=\"" + num(ax.py(q3)) + "\" width=\"" + num(2 * half) + "\" height=\"" +
         num(ax.py(q1) - ax.py(q3)) + "\" fill=\"" + color + "\" fill-opacity=\"0.5\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + num(cx - half) + "\" y1=\"" + num(ax.py(med)) + "\" x2=\"" + num(cx + half) + "\" y2=\"" +
         num(ax.py(med)) + "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string bands(const std::string& title, const std::string& x_label, const std::string& y_label,
                  const std::vector<Band>& series) {
  std::size_t len = 1;
  double y_min = 0.0, y_max = 1.0;
  for (const auto& b : series) {
    len = std::max(len, b.mean.size());
    for (std::size_t t = 0; t < b.mean.size(); ++t) {
      y_min = std::min(y_min, b.mean[t] - b.std[t]);
      y_max = std::max(y_max, b.mean[t] + b.std[t]);
    }
  }
  const Axes ax{0.0, static_cast<double>(std::max<std::size_t>(len - 1, 1)), y_min, y_max};
  std::string s = header(title) + frame(ax, x_label, y_label);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& b = series[i];
    if (b.mean.empty()) continue;
    const char* color = kPalette[i % 6];
    std::string band = "<polygon fill=\"" + std::string(color) + "\" fill-opacity=\"0.2\" points=\"";
    for (std::size_t t = 0; t < b.mean.size(); ++t)
      band += num(ax.px(static_cast<double>(t))) + "," + num(ax.py(b.mean[t] + b.std[t])) + " ";
    for (std::size_t t = b.mean.size(); t-- > 0;)
      band += num(ax.px(static_cast<double>(t))) + "," + num(ax.py(b.mean[t] - b.std[t])) + " ";
    s += band + "\"/>\n";
    std::string line = "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"";
    for (std::size_t t = 0; t < b.mean.size(); ++t)
      line += num(ax.px(static_cast<double>(t))) + "," + num(ax.py(b.mean[t])) + " ";
    s += line + "\"/>\n";
    s += "<text x=\"" + num(kWidth - kRight - 10) + "\" y=\"" + num(kTop + 20 + 18 * static_cast<double>(i)) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\" fill=\"" + color + "\">" + escape(b.label) +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace rlcg::svg
