#pragma once

#include <string>
#include <string_view>

namespace rstdiag::core {

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

std::string base64_encode(std::string_view bytes);
/// Throws ParseError on malformed input.
std::string base64_decode(std::string_view text);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string utc_now_iso();

}  // namespace rstdiag::core
