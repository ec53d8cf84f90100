#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "splitring/error.hpp"

namespace splitring::cli {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 440;
constexpr double kMargin = 60;
const char* const kColours[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                "#9467bd", "#8c564b", "#e377c2"};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

void write_svg_plot(const std::filesystem::path& csv_path,
                    const std::filesystem::path& svg_path) {
  std::ifstream in(csv_path);
  std::string line;
  if (!in || !std::getline(in, line)) {
    throw Error(ErrorKind::Config, "cannot read '" + csv_path.string() + "' for plotting");
  }
  const std::vector<std::string> header = split(line);
  std::vector<std::vector<double>> cols(header.size());
  while (std::getline(in, line)) {
    const auto cells = split(line);
    for (std::size_t c = 0; c < header.size(); ++c) {
      cols[c].push_back(c < cells.size() ? std::strtod(cells[c].c_str(), nullptr)
                                         : std::numeric_limits<double>::quiet_NaN());
    }
  }

  auto range = [](const std::vector<double>& v, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (double x : v) {
      if (!std::isfinite(x)) continue;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (!(hi >= lo)) lo = hi = 0.0;
    if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
    }
  };
  double xlo, xhi;
  range(cols[0], xlo, xhi);
  double ylo = std::numeric_limits<double>::infinity();
  double yhi = -ylo;
  for (std::size_t c = 1; c < cols.size(); ++c) {
    double a, b;
    range(cols[c], a, b);
    ylo = std::min(ylo, a);
    yhi = std::max(yhi, b);
  }
  if (cols.size() < 2) ylo = 0.0, yhi = 1.0;

  auto px = [&](double x) { return kMargin + (x - xlo) / (xhi - xlo) * (kWidth - 2 * kMargin); };
  auto py = [&](double y) {
    return kHeight - kMargin - (y - ylo) / (yhi - ylo) * (kHeight - 2 * kMargin);
  };

  std::ofstream out(svg_path);
  if (!out) throw Error(ErrorKind::Config, "cannot write '" + svg_path.string() + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
      << kWidth - 2 * kMargin << "\" height=\"" << kHeight - 2 * kMargin
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16 << "\">" << num(xlo)
      << "</text>\n"
      << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16
      << "\" text-anchor=\"end\">" << num(xhi) << "</text>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
      << "\" text-anchor=\"middle\">" << header[0] << "</text>\n"
      << "<text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin
      << "\" text-anchor=\"end\">" << num(ylo) << "</text>\n"
      << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 10
      << "\" text-anchor=\"end\">" << num(yhi) << "</text>\n";

  for (std::size_t c = 1; c < cols.size(); ++c) {
    const char* colour = kColours[(c - 1) % std::size(kColours)];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
    for (std::size_t i = 0; i < cols[c].size(); ++i) {
      if (!std::isfinite(cols[0][i]) || !std::isfinite(cols[c][i])) continue;
      out << num(px(cols[0][i])) << ',' << num(py(cols[c][i])) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << kMargin + 8 << "\" y=\"" << kMargin + 14 * c
        << "\" fill=\"" << colour << "\">" << header[c] << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace splitring::cli
