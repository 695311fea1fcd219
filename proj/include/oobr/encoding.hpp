#pragma once

#include <string>
#include <string_view>

namespace oobr {

/// Single-byte source encodings accepted by the reader, plus UTF-8 passthrough.
enum class Encoding { Iso8859_1, Iso8859_2, Utf8 };

/// Accepts the usual spellings ("ISO-8859-2", "latin2", "utf8", ...).
/// Throws ConfigError for anything else.
Encoding parse_encoding(std::string_view name);
std::string_view encoding_name(Encoding e);

/// Code point for a byte of a single-byte encoding.
char32_t decode_byte(unsigned char b, Encoding e);

std::string decode_to_utf8(std::string_view bytes, Encoding e);
void append_utf8(std::string& out, char32_t cp);

/// Inverse of decode_to_utf8 for the single-byte encodings. Throws
/// std::invalid_argument if a code point has no byte in the target set.
std::string encode_from_utf8(std::string_view utf8, Encoding e);

}  // namespace oobr
