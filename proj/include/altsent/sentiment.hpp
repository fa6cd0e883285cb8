#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "altsent/corpus.hpp"
#include "altsent/text.hpp"

namespace altsent::sentiment {

struct Lexicon {
    std::map<std::string, double> entries;
    std::map<std::string, double> booster_entries;
    std::set<std::string> negation_tokens;
};

class LexiconError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// TSV: `token<TAB>valence`, `#` comments, optional [boosters] / [negations]
// sections. Duplicate tokens: last row wins.
inline Lexicon load_lexicon(std::istream& in) {
    Lexicon lex;
    enum class Section { Entries, Boosters, Negations } section = Section::Entries;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        if (line[first] == '[') {
            std::string name = text::to_lower(line.substr(first));
            if (name == "[boosters]") section = Section::Boosters;
            else if (name == "[negations]") section = Section::Negations;
            else throw LexiconError("unknown section at line " + std::to_string(line_no));
            continue;
        }
        std::size_t tab = line.find('\t');
        std::string token = text::to_lower(line.substr(0, tab == std::string::npos ? line.size() : tab));
        if (section == Section::Negations) {
            lex.negation_tokens.insert(token);
            continue;
        }
        if (tab == std::string::npos) {
            throw LexiconError("missing valence at line " + std::to_string(line_no));
        }
        double valence;
        try {
            std::size_t pos = 0;
            valence = std::stod(line.substr(tab + 1), &pos);
            std::string rest = line.substr(tab + 1 + pos);
            if (rest.find_first_not_of(" \t") != std::string::npos) {
                throw std::invalid_argument("trailing junk");
            }
        } catch (const std::exception&) {
            throw LexiconError("non-numeric valence at line " + std::to_string(line_no));
        }
        if (section == Section::Entries) lex.entries[token] = valence;
        else lex.booster_entries[token] = valence;
    }
    if (in.bad()) throw LexiconError("unreadable lexicon stream");
    return lex;
}

inline Lexicon load_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LexiconError("cannot open lexicon file: " + path);
    return load_lexicon(in);
}

enum class Profile { ValenceRule, PolarityMean };

struct ScorerConfig {
    Profile profile = Profile::ValenceRule;
    int negation_window = 3;
    double negation_factor = -0.74;
    double booster_increment_scale = 0.293;
    double exclamation_increment = 0.292;
    int exclamation_cap = 3;
    double caps_amplifier = 1.733;
    double normalization_alpha = 15.0;

    static ScorerConfig valence_rule() { return ScorerConfig{}; }

    static ScorerConfig polarity_mean() {
        ScorerConfig c;
        c.profile = Profile::PolarityMean;
        c.negation_factor = -0.5;
        c.booster_increment_scale = 0.0;
        c.exclamation_increment = 0.0;
        c.exclamation_cap = 0;
        c.caps_amplifier = 1.0;
        return c;
    }

    static ScorerConfig for_profile(Profile p) {
        return p == Profile::ValenceRule ? valence_rule() : polarity_mean();
    }
};

enum class Polarity { Negative, Neutral, Positive };

inline const char* to_string(Polarity p) {
    switch (p) {
        case Polarity::Negative: return "negative";
        case Polarity::Neutral: return "neutral";
        case Polarity::Positive: return "positive";
    }
    return "neutral";
}

inline Polarity polarity_from_string(const std::string& s) {
    if (s == "negative") return Polarity::Negative;
    if (s == "neutral") return Polarity::Neutral;
    if (s == "positive") return Polarity::Positive;
    throw std::invalid_argument("unknown polarity label: " + s);
}

// [-1, 0) -> Negative, exactly 0 -> Neutral, (0, 1] -> Positive.
inline Polarity classify_score(double score) {
    if (!(score >= -1.0 && score <= 1.0)) {
        throw std::invalid_argument("sentiment score outside [-1, 1]");
    }
    if (score < 0.0) return Polarity::Negative;
    if (score > 0.0) return Polarity::Positive;
    return Polarity::Neutral;
}

namespace detail {

struct ScoreToken {
    std::string raw;      // whitespace token as written
    std::string stripped; // punctuation-stripped, original case
    std::string lower;    // lookup key
    bool emoticon = false;
};

inline std::vector<ScoreToken> score_tokens(const std::string& txt, const Lexicon& lex) {
    std::vector<ScoreToken> out;
    for (const auto& raw : text::split_whitespace(txt)) {
        ScoreToken t;
        t.raw = raw;
        // A token that matches a lexicon entry verbatim (emoticons like ":)")
        // is preserved; everything else is punctuation-stripped.
        if (lex.entries.count(raw)) {
            t.stripped = raw;
            t.lower = raw;
            t.emoticon = true;
        } else {
            t.stripped = text::strip_punct(raw);
            t.lower = text::to_lower(t.stripped);
        }
        if (!t.lower.empty()) out.push_back(std::move(t));
    }
    return out;
}

inline bool negated(const std::vector<ScoreToken>& toks, std::size_t i,
                    const Lexicon& lex, int window) {
    for (int back = 1; back <= window; ++back) {
        if (static_cast<std::size_t>(back) > i) break;
        if (lex.negation_tokens.count(toks[i - static_cast<std::size_t>(back)].lower)) {
            return true;
        }
    }
    return false;
}

}  // namespace detail

// Compound score in [-1, 1]. Unknown tokens contribute nothing.
inline double score_text(const std::string& txt, const Lexicon& lex,
                         const ScorerConfig& cfg = ScorerConfig::valence_rule()) {
    const auto toks = detail::score_tokens(txt, lex);

    if (cfg.profile == Profile::PolarityMean) {
        double sum = 0.0;
        std::size_t matched = 0;
        for (std::size_t i = 0; i < toks.size(); ++i) {
            auto it = lex.entries.find(toks[i].lower);
            if (it == lex.entries.end()) continue;
            double v = it->second;
            if (detail::negated(toks, i, lex, cfg.negation_window)) v *= cfg.negation_factor;
            sum += v;
            ++matched;
        }
        return matched == 0 ? 0.0 : sum / static_cast<double>(matched);
    }

    // Caps amplification only applies when the text itself is mixed-case.
    bool some_caps = false, some_not_caps = false;
    for (const auto& t : toks) {
        if (!text::has_alpha(t.stripped)) continue;
        if (text::is_all_caps(t.stripped)) some_caps = true;
        else some_not_caps = true;
    }
    const bool mixed_case = some_caps && some_not_caps;

    double total = 0.0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        auto it = lex.entries.find(toks[i].lower);
        if (it == lex.entries.end()) continue;
        double v = it->second;
        if (detail::negated(toks, i, lex, cfg.negation_window)) v *= cfg.negation_factor;
        if (i > 0) {
            auto b = lex.booster_entries.find(toks[i - 1].lower);
            if (b != lex.booster_entries.end() && v != 0.0) {
                double inc = b->second * cfg.booster_increment_scale;
                v += (v > 0.0 ? inc : -inc);
            }
        }
        if (mixed_case && !toks[i].emoticon && text::is_all_caps(toks[i].stripped)) {
            v *= cfg.caps_amplifier;
        }
        total += v;
    }

    const auto bangs = static_cast<int>(text::count_char(txt, '!'));
    const double emphasis =
        cfg.exclamation_increment * std::min(bangs, cfg.exclamation_cap);
    if (total > 0.0) total += emphasis;
    else if (total < 0.0) total -= emphasis;

    return total / std::sqrt(total * total + cfg.normalization_alpha);
}

enum class TextField { Title, Abstract, Tweets };

// Corpus tokens of the chosen field that carry lexicon valence, ranked by
// valence (positive list descending, negative ascending), ties broken
// lexicographically.
inline std::pair<std::vector<std::string>, std::vector<std::string>>
top_words(const std::vector<corpus::ArticleRecord>& records, TextField field,
          std::size_t k, const Lexicon& lex) {
    std::set<std::string> seen;
    auto add_text = [&](const std::string& s) {
        for (auto& tok : text::normalized_tokens(s)) seen.insert(std::move(tok));
    };
    for (const auto& rec : records) {
        switch (field) {
            case TextField::Title: add_text(rec.title); break;
            case TextField::Abstract: add_text(rec.abstract_text); break;
            case TextField::Tweets:
                for (const auto& t : rec.tweets) add_text(t.text);
                break;
        }
    }
    std::vector<std::pair<double, std::string>> pos, neg;
    for (const auto& tok : seen) {
        auto it = lex.entries.find(tok);
        if (it == lex.entries.end()) continue;
        if (it->second > 0.0) pos.emplace_back(it->second, tok);
        else if (it->second < 0.0) neg.emplace_back(it->second, tok);
    }
    std::sort(pos.begin(), pos.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::sort(neg.begin(), neg.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first < b.first : a.second < b.second;
    });
    if (pos.size() > k) pos.resize(k);
    if (neg.size() > k) neg.resize(k);
    std::vector<std::string> pos_out, neg_out;
    for (auto& p : pos) pos_out.push_back(std::move(p.second));
    for (auto& n : neg) neg_out.push_back(std::move(n.second));
    return {std::move(pos_out), std::move(neg_out)};
}

}  // namespace altsent::sentiment
