#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace convbench::text {

namespace detail {

inline bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Decodes one UTF-8 code point starting at s[i] and advances i. Invalid bytes decode as U+FFFD.
inline char32_t next_code_point(std::string_view s, std::size_t& i) {
    auto b0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) -> int {
        if (i + k >= s.size()) return -1;
        auto b = static_cast<unsigned char>(s[i + k]);
        return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
    };
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    if ((b0 & 0xE0) == 0xC0) {
        int c1 = cont(1);
        if (c1 >= 0) {
            i += 2;
            return static_cast<char32_t>(((b0 & 0x1F) << 6) | c1);
        }
    } else if ((b0 & 0xF0) == 0xE0) {
        int c1 = cont(1), c2 = cont(2);
        if (c1 >= 0 && c2 >= 0) {
            i += 3;
            return static_cast<char32_t>(((b0 & 0x0F) << 12) | (c1 << 6) | c2);
        }
    } else if ((b0 & 0xF8) == 0xF0) {
        int c1 = cont(1), c2 = cont(2), c3 = cont(3);
        if (c1 >= 0 && c2 >= 0 && c3 >= 0) {
            i += 4;
            return static_cast<char32_t>(((b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3);
        }
    }
    ++i;
    return 0xFFFD;
}

inline void append_utf8(std::string& out, char32_t cp) {
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

// Letters and digits. Non-ASCII code points count as word characters except
// the punctuation and symbol blocks that commonly appear in prose.
inline bool is_word_char(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
    }
    if (cp <= 0xBF) return false;
    if (cp == 0xD7 || cp == 0xF7) return false;
    if (cp >= 0x2000 && cp <= 0x2BFF) return false;
    if (cp >= 0x3000 && cp <= 0x303F) return false;
    if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
    if (cp >= 0xFF00 && cp <= 0xFF0F) return false;
    if (cp == 0xFFFD) return false;
    return true;
}

inline bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

inline char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32;
    if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
    if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
    if (cp >= 0x100 && cp <= 0x17F && (cp % 2) == 0) return cp + 1;
    return cp;
}

}  // namespace detail

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && detail::is_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && detail::is_space(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

/// Collapses whitespace runs to a single space and trims both ends.
inline std::string normalize_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending = false;
    for (char c : s) {
        if (detail::is_space(static_cast<unsigned char>(c))) {
            pending = !out.empty();
            continue;
        }
        if (pending) out.push_back(' ');
        pending = false;
        out.push_back(c);
    }
    return out;
}

/// Lowercased Unicode words. An apostrophe between two word characters stays
/// inside the word ("don't" is one token).
inline std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    std::string cur;
    std::size_t i = 0;
    while (i < s.size()) {
        char32_t cp = detail::next_code_point(s, i);
        if (detail::is_word_char(cp)) {
            detail::append_utf8(cur, detail::to_lower(cp));
            continue;
        }
        if (detail::is_apostrophe(cp) && !cur.empty() && i < s.size()) {
            std::size_t peek = i;
            if (detail::is_word_char(detail::next_code_point(s, peek))) {
                cur.push_back('\'');
                continue;
            }
        }
        if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

inline std::size_t word_count(std::string_view s) { return tokenize(s).size(); }

/// Sentences split after '.', '!' or '?' followed by whitespace, and at blank lines.
/// Each sentence is whitespace-normalized; empty pieces are dropped.
inline std::vector<std::string> split_sentences(std::string_view s) {
    std::vector<std::string> out;
    std::size_t begin = 0;
    auto flush = [&](std::size_t end) {
        auto piece = normalize_whitespace(s.substr(begin, end - begin));
        if (!piece.empty()) out.push_back(std::move(piece));
        begin = end;
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        bool next_space = i + 1 < s.size() && detail::is_space(static_cast<unsigned char>(s[i + 1]));
        if ((c == '.' || c == '!' || c == '?') && (next_space || i + 1 == s.size())) {
            flush(i + 1);
        } else if (c == '\n' && i + 1 < s.size() && s[i + 1] == '\n') {
            flush(i + 1);
        }
    }
    flush(s.size());
    return out;
}

/// Order-sensitive word n-grams joined by a single space. Token lists shorter
/// than n yield a single shingle of the whole list.
inline std::unordered_set<std::string> shingles(const std::vector<std::string>& tokens, std::size_t n = 3) {
    std::unordered_set<std::string> out;
    if (tokens.empty()) return out;
    auto join = [&](std::size_t from, std::size_t len) {
        std::string s;
        for (std::size_t k = 0; k < len; ++k) {
            if (k) s.push_back(' ');
            s += tokens[from + k];
        }
        return s;
    };
    if (tokens.size() < n) {
        out.insert(join(0, tokens.size()));
        return out;
    }
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) out.insert(join(i, n));
    return out;
}

inline double jaccard(const std::unordered_set<std::string>& a, const std::unordered_set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    std::size_t inter = 0;
    for (const auto& s : small) inter += large.count(s);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// First word of a question, lowercased; empty when there is none.
inline std::string first_word(std::string_view s) {
    auto toks = tokenize(s);
    return toks.empty() ? std::string{} : toks.front();
}

inline bool contains_ci(std::string_view haystack, std::string_view needle) {
    auto lower = [](std::string_view v) {
        std::string r(v);
        for (auto& c : r)
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
        return r;
    };
    return lower(haystack).find(lower(needle)) != std::string::npos;
}

}  // namespace convbench::text
