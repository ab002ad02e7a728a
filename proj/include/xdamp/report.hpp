#pragma once

#include <string>
#include <variant>
#include <vector>

namespace xdamp {

using CsvCell = std::variant<double, long long, std::string>;
using CsvRow = std::vector<CsvCell>;

/// Shortest round-trip representation of a double ('.' decimal separator).
std::string format_double(double v);

/// RFC 4180 style: header row, quoted fields where needed, CRLF-free.
std::string to_csv(const std::vector<std::string>& header, const std::vector<CsvRow>& rows);
void write_csv(const std::string& path, const std::vector<std::string>& header, const std::vector<CsvRow>& rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

struct PlotSpec {
  std::string title, x_label, y_label;
  bool log_x = false;
  std::vector<PlotSeries> series;
};

std::string render_svg(const PlotSpec& plot);
void write_svg(const std::string& path, const PlotSpec& plot);

void write_text(const std::string& path, const std::string& text);

}  // namespace xdamp
