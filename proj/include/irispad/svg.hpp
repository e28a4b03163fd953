#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace irispad::svg {

/// Minimal SVG writer. Coordinates are in user units with the origin at the
/// top-left corner.
class Document {
 public:
  Document(double width, double height);

  void rect(double x, double y, double w, double h, std::string_view fill,
            std::string_view css_class = {});
  void line(double x1, double y1, double x2, double y2, std::string_view stroke,
            double stroke_width = 1.0);
  void polyline(const std::vector<std::pair<double, double>>& points,
                std::string_view stroke, std::string_view css_class = {});
  void circle(double cx, double cy, double r, std::string_view fill,
              std::string_view css_class = {});
  void text(double x, double y, std::string_view content, double size = 12.0,
            std::string_view anchor = "start");

  std::string str() const;

 private:
  double width_;
  double height_;
  std::string body_;
};

std::string escape(std::string_view s);

/// Qualitative palette entry, cycling.
std::string_view palette(std::size_t i);

struct Bar {
  std::string label;
  double value = 0.0;
};

/// One `rect.bar` per entry.
std::string bar_chart(std::string_view title, const std::vector<Bar>& bars,
                      std::string_view x_label, std::string_view y_label);

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

/// One `polyline.series` per series with a legend entry each.
std::string line_chart(std::string_view title, const std::vector<Series>& series,
                       std::string_view x_label, std::string_view y_label);

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  std::size_t group = 0;
};

/// One `circle.point` per point, colored by group, legend from `groups`.
std::string scatter_plot(std::string_view title,
                         const std::vector<ScatterPoint>& points,
                         const std::vector<std::string>& groups);

}  // namespace irispad::svg
