#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace finitekey::csv {

/// %.6g; used for error probabilities.
std::string sig6(double v);

/// Shortest form that reads back to the same double.
std::string exact(double v);

std::string boolean(bool v);

/// RFC 4180 field quoting: fields holding a comma, quote or line break are
/// wrapped in quotes with inner quotes doubled.
std::string quote(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Splits one record; handles quoted fields.
std::vector<std::string> split(std::string_view line);

}  // namespace finitekey::csv
