#include "vl/csv.hpp"

#include <cmath>
#include <cstdio>

namespace vl {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv_header(std::ostream& out, std::initializer_list<std::string_view> names) {
  bool first = true;
  for (auto n : names) {
    if (!first) out << ',';
    out << n;
    first = false;
  }
  out << '\n';
}

void write_csv_row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << format_double(v);
    first = false;
  }
  out << '\n';
}

}  // namespace vl
