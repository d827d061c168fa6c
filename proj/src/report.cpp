#include "report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "error.hpp"

namespace dspec {

std::string num(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void Csv::meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }

void Csv::row(std::vector<std::string> cells) {
  require(cells.size() == columns_.size(), ErrorKind::setup, "CSV row width mismatch");
  for (const auto& c : cells)
    require(c.find_first_of(",\n\"") == std::string::npos, ErrorKind::setup, "CSV cell needs quoting: " + c);
  rows_.push_back(std::move(cells));
}

std::string Csv::str() const {
  std::string out;
  for (const auto& [k, v] : meta_) out += "# " + k + ": " + v + "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
  out += "\n";
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += "\n";
  }
  return out;
}

namespace {

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

std::string fixed(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

}  // namespace

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<Series>& series, const std::vector<std::string>& comments) {
  const double W = 640, H = 400, L = 60, R = 20, T = 40, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = 0.0, y1 = -INFINITY;
  for (const auto& s : series) {
    for (double x : s.x) x0 = std::min(x0, x), x1 = std::max(x1, x);
    for (double y : s.y) y1 = std::max(y1, y);
  }
  if (!(x1 > x0)) x0 -= 1.0, x1 += 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  for (const auto& c : comments) out += "<!-- " + escape(c) + " -->\n";
  out += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  out += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n";
  out += "<path d=\"M" + fixed(L) + " " + fixed(T) + " V" + fixed(H - B) + " H" + fixed(W - R) +
         "\" stroke=\"black\" fill=\"none\"/>\n";
  out += "<text x=\"" + fixed((L + W - R) / 2) + "\" y=\"" + fixed(H - 12) + "\" text-anchor=\"middle\" font-size=\"12\">" +
         escape(xlabel) + "</text>\n";
  out += "<text x=\"16\" y=\"" + fixed((T + H - B) / 2) + "\" font-size=\"12\" transform=\"rotate(-90 16 " +
         fixed((T + H - B) / 2) + ")\" text-anchor=\"middle\">" + escape(ylabel) + "</text>\n";
  for (double v : {x0, x1})
    out += "<text x=\"" + fixed(px(v)) + "\" y=\"" + fixed(H - B + 16) + "\" text-anchor=\"middle\" font-size=\"10\">" +
           num(v) + "</text>\n";
  for (double v : {y0, y1})
    out += "<text x=\"" + fixed(L - 6) + "\" y=\"" + fixed(py(v) + 4) + "\" text-anchor=\"end\" font-size=\"10\">" +
           num(v) + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* col = colors[k % 6];
    std::string d;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      d += (i ? " L" : "M") + fixed(px(s.x[i])) + " " + fixed(py(s.y[i]));
    if (!d.empty()) out += "<path d=\"" + d + "\" stroke=\"" + col + "\" stroke-width=\"2\" fill=\"none\"/>\n";
    out += "<text x=\"" + fixed(W - R - 4) + "\" y=\"" + fixed(T + 14 * (k + 1)) + "\" text-anchor=\"end\" font-size=\"11\" fill=\"" +
           col + "\">" + escape(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace dspec
