#include "eftcot/core/unicode.hpp"

namespace eftcot::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool is_zero_width(char32_t cp) {
    return (cp >= 0x200B && cp <= 0x200D) || cp == 0x2060 || cp == 0xFEFF;
}

// Maps one code point onto the matching alphabet; may expand (ellipsis).
void push_folded(std::u32string& out, char32_t cp) {
    if (cp >= 0xFF01 && cp <= 0xFF5E) cp -= 0xFEE0;  // full-width ASCII block
    switch (cp) {
    case 0x3002: case 0xFF61: cp = U'.'; break;                 // 。｡
    case 0x3001: case 0xFF64: cp = U','; break;                 // 、､
    case 0x201C: case 0x201D: case 0x201E: case 0x201F:
    case 0x2033: case 0x300C: case 0x300D: case 0x300E:
    case 0x300F: case 0xFF62: case 0xFF63: cp = U'"'; break;
    case 0x2018: case 0x2019: case 0x201A: case 0x201B:
    case 0x2032: cp = U'\''; break;
    case 0x300A: case 0x3008: cp = U'<'; break;
    case 0x300B: case 0x3009: cp = U'>'; break;
    case 0x3010: case 0x3016: cp = U'['; break;
    case 0x3011: case 0x3017: cp = U']'; break;
    case 0x3014: cp = U'('; break;
    case 0x3015: cp = U')'; break;
    case 0x2010: case 0x2011: case 0x2012: case 0x2013:
    case 0x2014: case 0x2015: case 0x2212: cp = U'-'; break;
    case 0x301C: cp = U'~'; break;
    case 0x00B7: case 0x30FB: cp = U'.'; break;
    case 0x2026:
        out.append(U"...");
        return;
    default: break;
    }
    out.push_back(fold_case(cp));
}

} // namespace

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        if (i + len > s.size()) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            const auto b = static_cast<unsigned char>(s[i + k]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                              (len == 4 && cp < 0x10000);
        if (!ok || overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode_utf8(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) append_utf8(out, cp);
    return out;
}

bool is_space(char32_t cp) {
    switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
        return true;
    default:
        return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_cjk(char32_t cp) {
    return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
           (cp >= 0x20000 && cp <= 0x2A6DF) || (cp >= 0xF900 && cp <= 0xFAFF) ||
           (cp >= 0x3040 && cp <= 0x30FF) || (cp >= 0xAC00 && cp <= 0xD7AF);
}

bool is_alnum(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= U'0' && cp <= U'9') || (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z');
    }
    if (is_cjk(cp)) return true;
    return (cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7) ||
           (cp >= 0x370 && cp <= 0x3FF) || (cp >= 0x400 && cp <= 0x4FF);
}

char32_t fold_case(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 32;
    if (cp < 0x80) return cp;
    if ((cp >= 0xC0 && cp <= 0xDE) && cp != 0xD7) return cp + 32;
    if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 32;  // Greek
    if (cp >= 0x410 && cp <= 0x42F) return cp + 32;                  // Cyrillic
    if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
    if (cp >= 0x100 && cp <= 0x17F && cp % 2 == 0 && cp != 0x130 && cp != 0x138) return cp + 1;
    return cp;
}

std::u32string normalize_codepoints(std::string_view s) {
    std::u32string out;
    const std::u32string decoded = decode_utf8(s);
    out.reserve(decoded.size());
    for (char32_t cp : decoded) {
        if (is_space(cp) || is_zero_width(cp)) continue;
        push_folded(out, cp);
    }
    return out;
}

std::string normalize_for_match(std::string_view s) { return encode_utf8(normalize_codepoints(s)); }

bool contains_normalized(std::string_view haystack, std::string_view needle) {
    const std::u32string n = normalize_codepoints(needle);
    if (n.empty()) return false;
    return normalize_codepoints(haystack).find(n) != std::u32string::npos;
}

std::string trim(std::string_view s) {
    const std::u32string cps = decode_utf8(s);
    std::size_t b = 0;
    std::size_t e = cps.size();
    while (b < e && is_space(cps[b])) ++b;
    while (e > b && is_space(cps[e - 1])) --e;
    return encode_utf8(std::u32string_view(cps).substr(b, e - b));
}

bool is_blank(std::string_view s) {
    for (char32_t cp : decode_utf8(s)) {
        if (!is_space(cp) && !is_zero_width(cp)) return false;
    }
    return true;
}

} // namespace eftcot::text
