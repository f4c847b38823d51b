#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace iconicity {

/// Canonical composition (NFC). Throws InputError on malformed UTF-8.
std::string nfc(std::string_view text);

/// Byte offsets of each code point start in a valid UTF-8 string, plus a
/// trailing entry equal to text.size().
std::vector<std::size_t> code_point_offsets(std::string_view text);

std::size_t code_point_count(std::string_view text);

std::string_view trim(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char delimiter);

}  // namespace iconicity
