#include <doctest.h>

#include <regex>

#include "irispad/svg.hpp"

using namespace irispad;

namespace {

std::size_t count(const std::string& doc, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = doc.find(needle); pos != std::string::npos; pos = doc.find(needle, pos + 1)) ++n;
  return n;
}

bool balanced(const std::string& doc) {
  return doc.rfind("<svg", 0) == 0 && doc.find("</svg>") != std::string::npos &&
         count(doc, "<text") == count(doc, "</text>");
}

}  // namespace

TEST_CASE("escaping") {
  CHECK(svg::escape("a<b & \"c\" 'd'>") == "a&lt;b &amp; &quot;c&quot; 'd'&gt;");
  CHECK(svg::escape("plain") == "plain");
}

TEST_CASE("bar chart has one bar per entry and escapes labels") {
  std::vector<svg::Bar> bars;
  for (int i = 0; i < 20; ++i) bars.push_back({"[" + std::to_string(i) + ")", i % 3 * 1.0});
  bars.push_back({"<x>", 0.0});
  const auto doc = svg::bar_chart("hist & co", bars, "confidence", "count");
  CHECK(balanced(doc));
  CHECK(count(doc, "class=\"bar\"") == 21);
  CHECK(doc.find("hist &amp; co") != std::string::npos);
  CHECK(doc.find("<x>") == std::string::npos);
  CHECK(count(svg::bar_chart("empty", {}, "x", "y"), "class=\"bar\"") == 0);
}

TEST_CASE("line chart draws one series per input with a legend") {
  std::vector<svg::Series> series{{"a", {{0, 0}, {1, 1}, {2, 0.5}}}, {"b", {{0, 1}}}, {"c", {}}};
  const auto doc = svg::line_chart("curve", series, "n", "rate");
  CHECK(balanced(doc));
  CHECK(count(doc, "class=\"series\"") == 3);
  CHECK(doc.find(">a</text>") != std::string::npos);
  CHECK(doc.find(">c</text>") != std::string::npos);
}

TEST_CASE("scatter plot colors points by group") {
  std::vector<svg::ScatterPoint> pts{{0, 0, 0}, {1, 1, 1}, {-1, 2, 1}, {3, 3, 0}};
  const auto doc = svg::scatter_plot("pca", pts, {"live", "printout"});
  CHECK(balanced(doc));
  CHECK(count(doc, "class=\"point\"") == 4);
  CHECK(count(doc, std::string("fill=\"") + std::string(svg::palette(1)) + "\"") >= 2);
  const std::regex nan("nan|inf");
  CHECK_FALSE(std::regex_search(svg::scatter_plot("one", {{5, 5, 0}}, {"g"}), nan));
}

TEST_CASE("palette cycles") {
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = i + 1; j < 8; ++j) CHECK(svg::palette(i) != svg::palette(j));
    CHECK(svg::palette(i) == svg::palette(i + 8));
  }
}
