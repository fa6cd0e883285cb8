#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace altsent::text {

inline bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

// Whitespace split; multi-byte UTF-8 sequences pass through untouched since
// no UTF-8 continuation byte matches ASCII whitespace.
inline std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        std::size_t start = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        if (i > start) tokens.emplace_back(s.substr(start, i - start));
    }
    return tokens;
}

inline bool is_punct(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

// Strip leading/trailing ASCII punctuation from a token.
inline std::string strip_punct(std::string_view tok) {
    std::size_t b = 0, e = tok.size();
    while (b < e && is_punct(tok[b])) ++b;
    while (e > b && is_punct(tok[e - 1])) --e;
    return std::string(tok.substr(b, e - b));
}

inline bool has_alpha(std::string_view tok) {
    return std::any_of(tok.begin(), tok.end(), [](unsigned char c) {
        return std::isalpha(c) != 0;
    });
}

// Token contains letters and none of them lowercase.
inline bool is_all_caps(std::string_view tok) {
    bool saw_alpha = false;
    for (unsigned char c : tok) {
        if (std::islower(c)) return false;
        if (std::isupper(c)) saw_alpha = true;
    }
    return saw_alpha;
}

inline std::size_t count_char(std::string_view s, char c) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), c));
}

// Lowercased, punctuation-stripped, non-empty tokens. Shared normalization
// for overlap matching and word reports.
inline std::vector<std::string> normalized_tokens(std::string_view s) {
    std::vector<std::string> out;
    for (const auto& raw : split_whitespace(s)) {
        std::string t = to_lower(strip_punct(raw));
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

}  // namespace altsent::text
