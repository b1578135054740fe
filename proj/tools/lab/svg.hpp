#pragma once

#include <string>
#include <vector>

namespace lab {

struct Series {
  enum class Style { line, points, bars };
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional symmetric error bars
  Style style = Style::line;
  std::string colour = "#1f77b4";
  double width = 1.5;
  double opacity = 1.0;
  bool dashed = false;
};

struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  std::vector<Series> series;
  struct Line {
    double y;
    std::string label;
  };
  std::vector<Line> hlines;

  std::string svg(int width = 720, int height = 480) const;
};

}  // namespace lab
