#include "irispad/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "irispad/text_util.hpp"

namespace irispad::svg {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 60;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;

std::string num(double v) { return text::format_fixed(v, 2); }

struct Range {
  double lo = 0;
  double hi = 1;

  double span() const { return hi > lo ? hi - lo : 1.0; }
};

Range padded(double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = (hi - lo) * 0.05;
  return {lo - pad, hi + pad};
}

void frame(Document& doc, std::string_view title, std::string_view x_label,
           std::string_view y_label) {
  doc.rect(0, 0, kWidth, kHeight, "#ffffff");
  doc.text(kWidth / 2, 24, title, 15, "middle");
  doc.line(kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom, "#333333");
  doc.line(kLeft, kTop, kLeft, kHeight - kBottom, "#333333");
  doc.text(kWidth / 2, kHeight - 10, x_label, 12, "middle");
  doc.text(14, kHeight / 2, y_label, 12, "middle");
}

void y_ticks(Document& doc, Range r) {
  const double plot_h = kHeight - kTop - kBottom;
  for (int t = 0; t <= 4; ++t) {
    const double v = r.lo + r.span() * t / 4.0;
    const double y = kHeight - kBottom - plot_h * t / 4.0;
    doc.line(kLeft - 4, y, kLeft, y, "#333333");
    doc.text(kLeft - 6, y + 4, text::format_fixed(v, 2), 10, "end");
  }
}

}  // namespace

Document::Document(double width, double height) : width_(width), height_(height) {}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void Document::rect(double x, double y, double w, double h,
                    std::string_view fill, std::string_view css_class) {
  body_ += "<rect";
  if (!css_class.empty()) body_ += " class=\"" + escape(css_class) + "\"";
  body_ += " x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
           "\" height=\"" + num(h) + "\" fill=\"" + escape(fill) + "\"/>\n";
}

void Document::line(double x1, double y1, double x2, double y2,
                    std::string_view stroke, double stroke_width) {
  body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" +
           num(x2) + "\" y2=\"" + num(y2) + "\" stroke=\"" + escape(stroke) +
           "\" stroke-width=\"" + num(stroke_width) + "\"/>\n";
}

void Document::polyline(const std::vector<std::pair<double, double>>& points,
                        std::string_view stroke, std::string_view css_class) {
  body_ += "<polyline";
  if (!css_class.empty()) body_ += " class=\"" + escape(css_class) + "\"";
  body_ += " fill=\"none\" stroke=\"" + escape(stroke) +
           "\" stroke-width=\"2\" points=\"";
  bool first = true;
  for (const auto& [x, y] : points) {
    if (!first) body_ += ' ';
    first = false;
    body_ += num(x) + "," + num(y);
  }
  body_ += "\"/>\n";
}

void Document::circle(double cx, double cy, double r, std::string_view fill,
                      std::string_view css_class) {
  body_ += "<circle";
  if (!css_class.empty()) body_ += " class=\"" + escape(css_class) + "\"";
  body_ += " cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
           "\" fill=\"" + escape(fill) + "\"/>\n";
}

void Document::text(double x, double y, std::string_view content, double size,
                    std::string_view anchor) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
           num(size) + "\" text-anchor=\"" + escape(anchor) +
           "\" font-family=\"sans-serif\">" + escape(content) + "</text>\n";
}

std::string Document::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) +
         "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) +
         " " + num(height_) + "\">\n" + body_ + "</svg>\n";
}

std::string_view palette(std::size_t i) {
  static constexpr std::array<std::string_view, 8> colors = {
      "#1b9e77", "#d95f02", "#7570b3", "#e7298a",
      "#66a61e", "#e6ab02", "#a6761d", "#666666"};
  return colors[i % colors.size()];
}

std::string bar_chart(std::string_view title, const std::vector<Bar>& bars,
                      std::string_view x_label, std::string_view y_label) {
  Document doc(kWidth, kHeight);
  frame(doc, title, x_label, y_label);
  double top = 0;
  for (const auto& b : bars) top = std::max(top, b.value);
  const Range r{0, top > 0 ? top : 1};
  y_ticks(doc, r);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double slot = bars.empty() ? plot_w : plot_w / static_cast<double>(bars.size());
  const std::size_t label_every = std::max<std::size_t>(1, bars.size() / 10);
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double h = plot_h * bars[i].value / r.span();
    const double x = kLeft + slot * static_cast<double>(i);
    doc.rect(x + slot * 0.1, kHeight - kBottom - h, slot * 0.8, h, palette(0), "bar");
    if (i % label_every == 0) {
      doc.text(x + slot / 2, kHeight - kBottom + 14, bars[i].label, 9, "middle");
    }
  }
  return doc.str();
}

std::string line_chart(std::string_view title, const std::vector<Series>& series,
                       std::string_view x_label, std::string_view y_label) {
  Document doc(kWidth, kHeight);
  frame(doc, title, x_label, y_label);
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (!std::isfinite(x_lo)) x_lo = x_hi = y_lo = y_hi = 0;
  const Range xr{x_lo, x_hi > x_lo ? x_hi : x_lo + 1};
  const Range yr = padded(std::min(0.0, y_lo), y_hi);
  y_ticks(doc, yr);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::vector<std::pair<double, double>> px;
    for (const auto& [x, y] : series[i].points) {
      px.emplace_back(kLeft + plot_w * (x - xr.lo) / xr.span(),
                      kHeight - kBottom - plot_h * (y - yr.lo) / yr.span());
    }
    doc.polyline(px, palette(i), "series");
    const double ly = kTop + 14.0 * static_cast<double>(i);
    doc.rect(kWidth - kRight - 150, ly - 8, 10, 10, palette(i));
    doc.text(kWidth - kRight - 136, ly, series[i].name, 10);
  }
  doc.text(kLeft, kHeight - kBottom + 14, text::format_fixed(xr.lo, 0), 10, "middle");
  doc.text(kWidth - kRight, kHeight - kBottom + 14, text::format_fixed(xr.hi, 0), 10, "middle");
  return doc.str();
}

std::string scatter_plot(std::string_view title,
                         const std::vector<ScatterPoint>& points,
                         const std::vector<std::string>& groups) {
  Document doc(kWidth, kHeight);
  frame(doc, title, "component 1", "component 2");
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  for (const auto& p : points) {
    x_lo = std::min(x_lo, p.x);
    x_hi = std::max(x_hi, p.x);
    y_lo = std::min(y_lo, p.y);
    y_hi = std::max(y_hi, p.y);
  }
  if (!std::isfinite(x_lo)) x_lo = x_hi = y_lo = y_hi = 0;
  const Range xr = padded(x_lo, x_hi);
  const Range yr = padded(y_lo, y_hi);
  const double plot_w = kWidth - kLeft - kRight - 160;
  const double plot_h = kHeight - kTop - kBottom;
  for (const auto& p : points) {
    doc.circle(kLeft + plot_w * (p.x - xr.lo) / xr.span(),
               kHeight - kBottom - plot_h * (p.y - yr.lo) / yr.span(), 3.5,
               palette(p.group), "point");
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const double ly = kTop + 14.0 * static_cast<double>(i);
    doc.rect(kWidth - kRight - 150, ly - 8, 10, 10, palette(i));
    doc.text(kWidth - kRight - 136, ly, groups[i], 10);
  }
  return doc.str();
}

}  // namespace irispad::svg
