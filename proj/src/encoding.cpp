#include "oobr/encoding.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

#include "oobr/schema.hpp"

namespace oobr {

namespace {

// ISO/IEC 8859-2 code points for bytes 0xA0..0xFF.
constexpr std::array<char16_t, 96> kLatin2High = {
    0x00A0, 0x0104, 0x02D8, 0x0141, 0x00A4, 0x013D, 0x015A, 0x00A7,
    0x00A8, 0x0160, 0x015E, 0x0164, 0x0179, 0x00AD, 0x017D, 0x017B,
    0x00B0, 0x0105, 0x02DB, 0x0142, 0x00B4, 0x013E, 0x015B, 0x02C7,
    0x00B8, 0x0161, 0x015F, 0x0165, 0x017A, 0x02DD, 0x017E, 0x017C,
    0x0154, 0x00C1, 0x00C2, 0x0102, 0x00C4, 0x0139, 0x0106, 0x00C7,
    0x010C, 0x00C9, 0x0118, 0x00CB, 0x011A, 0x00CD, 0x00CE, 0x010E,
    0x0110, 0x0143, 0x0147, 0x00D3, 0x00D4, 0x0150, 0x00D6, 0x00D7,
    0x0158, 0x016E, 0x00DA, 0x0170, 0x00DC, 0x00DD, 0x0162, 0x00DF,
    0x0155, 0x00E1, 0x00E2, 0x0103, 0x00E4, 0x013A, 0x0107, 0x00E7,
    0x010D, 0x00E9, 0x0119, 0x00EB, 0x011B, 0x00ED, 0x00EE, 0x010F,
    0x0111, 0x0144, 0x0148, 0x00F3, 0x00F4, 0x0151, 0x00F6, 0x00F7,
    0x0159, 0x016F, 0x00FA, 0x0171, 0x00FC, 0x00FD, 0x0163, 0x02D9,
};

std::string normalize(std::string_view name) {
    std::string out;
    for (char c : name)
        if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_ascii(std::string_view s) {
    return std::ranges::all_of(s, [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

}  // namespace

Encoding parse_encoding(std::string_view name) {
    auto n = normalize(name);
    if (n == "iso88592" || n == "latin2" || n == "l2") return Encoding::Iso8859_2;
    if (n == "iso88591" || n == "latin1" || n == "l1") return Encoding::Iso8859_1;
    if (n == "utf8") return Encoding::Utf8;
    throw ConfigError("unsupported encoding: " + std::string(name));
}

std::string_view encoding_name(Encoding e) {
    switch (e) {
        case Encoding::Iso8859_1: return "ISO-8859-1";
        case Encoding::Iso8859_2: return "ISO-8859-2";
        case Encoding::Utf8: return "UTF-8";
    }
    return "?";
}

char32_t decode_byte(unsigned char b, Encoding e) {
    if (b < 0xA0 || e == Encoding::Iso8859_1) return b;
    return kLatin2High[b - 0xA0];
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

std::string decode_to_utf8(std::string_view bytes, Encoding e) {
    if (e == Encoding::Utf8 || is_ascii(bytes)) return std::string(bytes);
    std::string out;
    out.reserve(bytes.size() + bytes.size() / 2);
    for (char c : bytes) append_utf8(out, decode_byte(static_cast<unsigned char>(c), e));
    return out;
}

std::string encode_from_utf8(std::string_view utf8, Encoding e) {
    if (e == Encoding::Utf8 || is_ascii(utf8)) return std::string(utf8);
    std::string out;
    out.reserve(utf8.size());
    for (std::size_t i = 0; i < utf8.size();) {
        auto b0 = static_cast<unsigned char>(utf8[i]);
        char32_t cp = 0;
        std::size_t len = 1;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            len = 4;
        } else {
            throw std::invalid_argument("invalid UTF-8 lead byte");
        }
        if (i + len > utf8.size()) throw std::invalid_argument("truncated UTF-8 sequence");
        for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(utf8[i + k]) & 0x3F);
        i += len;

        if (cp < 0xA0 || (e == Encoding::Iso8859_1 && cp < 0x100)) {
            out += static_cast<char>(cp);
            continue;
        }
        if (e == Encoding::Iso8859_2) {
            auto it = std::ranges::find(kLatin2High, static_cast<char16_t>(cp));
            if (cp < 0x10000 && it != kLatin2High.end()) {
                out += static_cast<char>(0xA0 + (it - kLatin2High.begin()));
                continue;
            }
        }
        throw std::invalid_argument("code point not representable in " + std::string(encoding_name(e)));
    }
    return out;
}

}  // namespace oobr
