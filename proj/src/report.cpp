#include "pathspace/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace pathspace {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvWriter::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::runtime_error("CSV row width mismatch");
  rows_.push_back(std::move(cells));
}

namespace {
void write_joined(std::ofstream& out, const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}
}  // namespace

void CsvWriter::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_joined(out, header_);
  for (const auto& r : rows_) write_joined(out, r);
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

void write_summary(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create directory " + path + ": " + ec.message());
}

namespace {

double axis_map(double v, bool log_scale) {
  if (!log_scale) return v;
  if (v <= 0.0) throw std::runtime_error("log axis needs positive data");
  return std::log10(v);
}

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<SvgSeries>& series, bool log_x, bool log_y) {
  const int W = 720, H = 440;
  const int ml = 70, mr = 150, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      double x = axis_map(s.x[i], log_x), y = axis_map(s.y[i], log_y);
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmin > xmax) {
    xmin = 0.0;
    xmax = 1.0;
  }
  if (ymin > ymax) {
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax - xmin < 1e-300) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-300) ymax = ymin + 1.0;
  auto px = [&](double x) { return ml + (axis_map(x, log_x) - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (axis_map(y, log_y) - ymin) / (ymax - ymin) * (H - mt - mb); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='15'>" << title
      << "</text>\n";
  // axes
  out << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
      << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
      << "' stroke='black'/>\n";
  out << "<text x='" << (ml + W - mr) / 2 << "' y='" << H - 12
      << "' text-anchor='middle' font-size='12'>" << x_label << (log_x ? " (log10)" : "")
      << "</text>\n";
  out << "<text x='18' y='" << (mt + H - mb) / 2 << "' text-anchor='middle' font-size='12' "
      << "transform='rotate(-90 18 " << (mt + H - mb) / 2 << ")'>" << y_label
      << (log_y ? " (log10)" : "") << "</text>\n";
  // tick labels at the corners of the data range
  out << "<text x='" << ml << "' y='" << H - mb + 16 << "' font-size='10' text-anchor='middle'>"
      << format_g17(log_x ? std::pow(10.0, xmin) : xmin).substr(0, 8) << "</text>\n";
  out << "<text x='" << W - mr << "' y='" << H - mb + 16
      << "' font-size='10' text-anchor='middle'>"
      << format_g17(log_x ? std::pow(10.0, xmax) : xmax).substr(0, 8) << "</text>\n";
  out << "<text x='" << ml - 6 << "' y='" << H - mb << "' font-size='10' text-anchor='end'>"
      << format_g17(log_y ? std::pow(10.0, ymin) : ymin).substr(0, 8) << "</text>\n";
  out << "<text x='" << ml - 6 << "' y='" << mt + 10 << "' font-size='10' text-anchor='end'>"
      << format_g17(log_y ? std::pow(10.0, ymax) : ymax).substr(0, 8) << "</text>\n";
  int ci = 0;
  for (const auto& s : series) {
    const char* color = colors[ci % 8];
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
    for (size_t i = 0; i < s.x.size(); ++i) out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    out << "'/>\n";
    for (size_t i = 0; i < s.x.size(); ++i)
      out << "<circle cx='" << px(s.x[i]) << "' cy='" << py(s.y[i]) << "' r='2.5' fill='" << color
          << "'/>\n";
    out << "<text x='" << W - mr + 10 << "' y='" << mt + 16 + 16 * ci << "' font-size='11' fill='"
        << color << "'>" << s.label << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

}  // namespace pathspace
