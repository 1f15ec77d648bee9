#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace vl {

/// 17 significant digits; non-finite values print as nan / inf / -inf.
std::string format_double(double v);

void write_csv_header(std::ostream& out, std::initializer_list<std::string_view> names);
void write_csv_row(std::ostream& out, std::initializer_list<double> values);

}  // namespace vl
