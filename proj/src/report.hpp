#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dspec {

/// Shortest round-trip decimal; identical bytes on every run.
std::string num(double v);

/// CSV with leading "# key: value" lines. Cells never need quoting: callers
/// keep commas out of them and put free text in the header lines.
class Csv {
 public:
  explicit Csv(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void meta(const std::string& key, const std::string& value);
  void row(std::vector<std::string> cells);
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<std::string>> rows_;
};

struct Series {
  std::string label;
  std::vector<double> x, y;
};

/// Line plot with plain <path> elements and linear axes.
std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<Series>& series, const std::vector<std::string>& comments);

}  // namespace dspec
