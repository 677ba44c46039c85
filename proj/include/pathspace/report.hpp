#pragma once

#include <string>
#include <utility>
#include <vector>

namespace pathspace {

// Serialize a double with 17 significant digits (round-trip exact).
std::string format_g17(double v);

// Minimal CSV table: header row plus string cells; numeric cells go through
// format_g17 via the num() helper.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  static std::string num(double v) { return format_g17(v); }

  void add_row(std::vector<std::string> cells);
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// key=value summary file, one pair per line, written even on failure.
void write_summary(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& kv);

// Create a directory (and parents); errors are fatal.
void ensure_dir(const std::string& path);

// Minimal self-contained SVG line plot (one polyline per series, legend,
// linear or log10 axes). Intended as a convenience view of the CSV data.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<SvgSeries>& series, bool log_x = false, bool log_y = false);

}  // namespace pathspace
