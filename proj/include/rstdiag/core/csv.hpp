#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace rstdiag::core {

/// UTF-8, comma separated, CRLF-free; fields quoted only when needed.
std::string csv_field(std::string_view s);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// RFC 4180 reader. Accepts LF or CRLF line ends and quoted fields with
/// embedded newlines. Throws ParseError on an unterminated quote.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace rstdiag::core
