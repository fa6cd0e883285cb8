#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "altsent/corpus.hpp"
#include "altsent/rng.hpp"
#include "altsent/sentiment.hpp"

namespace altsent::corpus {

struct SynthSpec {
    std::size_t n_articles = 0;
    std::uint64_t seed = 0;
    // Fractions of articles planted positive / negative / neutral.
    double mix_positive = 0.4;
    double mix_negative = 0.3;
    double mix_neutral = 0.3;
    std::size_t tweets_min = 1;
    std::size_t tweets_max = 5;
    // Probability a tweet deviates from the planted article sentiment
    // (its sign is then redrawn uniformly from {neg, neutral, pos}).
    double tweet_noise = 0.0;
    // Probability the abstract deviates from the planted article sentiment.
    double abstract_noise = 0.5;
};

namespace detail {

inline const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words = {
        "the",     "study",    "of",        "sample",  "data",     "from",
        "cohort",  "analysis", "measured",  "during",  "trial",    "across",
        "groups",  "between",  "method",    "results", "reported", "subjects",
        "effect",  "observed", "protocol",  "survey",  "annual",   "regional",
        "levels",  "rates",    "among",     "adults",  "children", "patients"};
    return words;
}

inline const std::vector<std::string>& subject_pool() {
    static const std::vector<std::string> subjects = {
        "Medicine",          "Neuroscience", "Computer Science",
        "Environmental Science", "Psychology",  "Biochemistry",
        "Social Sciences",   "Engineering"};
    return subjects;
}

// -1 / 0 / +1 per the mix fractions.
inline int draw_sign(rng::Engine& eng, const SynthSpec& spec) {
    const double total = spec.mix_positive + spec.mix_negative + spec.mix_neutral;
    const double u = eng.next_unit() * total;
    if (u < spec.mix_positive) return 1;
    if (u < spec.mix_positive + spec.mix_negative) return -1;
    return 0;
}

struct WordPools {
    std::vector<std::string> positive;
    std::vector<std::string> negative;
    std::vector<std::string> neutral;
};

inline WordPools make_pools(const sentiment::Lexicon& lex) {
    WordPools pools;
    for (const auto& [tok, val] : lex.entries) {
        if (val > 0.0) pools.positive.push_back(tok);
        else if (val < 0.0) pools.negative.push_back(tok);
    }
    // Filler must stay sentiment-silent under both scorer profiles.
    for (const auto& w : filler_words()) {
        if (!lex.entries.count(w) && !lex.booster_entries.count(w) &&
            !lex.negation_tokens.count(w)) {
            pools.neutral.push_back(w);
        }
    }
    if (pools.positive.empty() || pools.negative.empty() || pools.neutral.empty()) {
        throw std::invalid_argument(
            "lexicon unsuitable for synthesis: needs positive and negative "
            "entries and must not swallow the filler vocabulary");
    }
    return pools;
}

inline std::string make_text(rng::Engine& eng, const WordPools& pools, int sign,
                             std::size_t filler_count, std::size_t loaded_count) {
    std::vector<std::string> words;
    for (std::size_t i = 0; i < filler_count; ++i) {
        words.push_back(pools.neutral[eng.next_below(pools.neutral.size())]);
    }
    if (sign != 0) {
        const auto& pool = sign > 0 ? pools.positive : pools.negative;
        for (std::size_t i = 0; i < loaded_count; ++i) {
            // Insert at a random position so loaded words are not clustered.
            std::size_t at = eng.next_below(words.size() + 1);
            words.insert(words.begin() + static_cast<std::ptrdiff_t>(at),
                         pool[eng.next_below(pool.size())]);
        }
    }
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += ' ';
        out += words[i];
    }
    return out;
}

}  // namespace detail

// Deterministic schema-valid corpus with lexicon words planted so each
// text's score sign matches its drawn sentiment.
inline std::vector<ArticleRecord>
generate_synthetic_corpus(const SynthSpec& spec, const sentiment::Lexicon& lex) {
    if (spec.mix_positive < 0 || spec.mix_negative < 0 || spec.mix_neutral < 0 ||
        spec.mix_positive + spec.mix_negative + spec.mix_neutral <= 0) {
        throw std::invalid_argument("sentiment mix fractions must be >= 0 with positive sum");
    }
    if (spec.tweets_min < 1 || spec.tweets_max < spec.tweets_min) {
        throw std::invalid_argument("tweet count range invalid");
    }
    if (spec.tweet_noise < 0 || spec.tweet_noise > 1 ||
        spec.abstract_noise < 0 || spec.abstract_noise > 1) {
        throw std::invalid_argument("noise probabilities must lie in [0, 1]");
    }
    const auto pools = detail::make_pools(lex);

    std::vector<ArticleRecord> records;
    records.reserve(spec.n_articles);
    for (std::size_t i = 0; i < spec.n_articles; ++i) {
        rng::Engine eng(rng::derive_seed(spec.seed, i));
        const int article_sign = detail::draw_sign(eng, spec);

        ArticleRecord rec;
        char idbuf[24];
        std::snprintf(idbuf, sizeof idbuf, "synth-%06zu", i);
        rec.id = idbuf;
        rec.title = detail::make_text(eng, pools, article_sign,
                                      3 + eng.next_below(4), 1 + eng.next_below(2));
        int abstract_sign = article_sign;
        if (eng.next_unit() < spec.abstract_noise) abstract_sign = detail::draw_sign(eng, spec);
        rec.abstract_text = detail::make_text(eng, pools, abstract_sign,
                                              20 + eng.next_below(21), 2 + eng.next_below(3));
        rec.author_count = 1 + static_cast<long long>(eng.next_below(10));
        std::size_t n_subjects = 1 + eng.next_below(2);
        for (std::size_t s = 0; s < n_subjects; ++s) {
            std::string subj =
                detail::subject_pool()[eng.next_below(detail::subject_pool().size())];
            if (std::find(rec.subjects.begin(), rec.subjects.end(), subj) ==
                rec.subjects.end()) {
                rec.subjects.push_back(subj);
            }
        }
        rec.published_year = 2011 + static_cast<int>(eng.next_below(7));

        std::size_t n_tweets =
            spec.tweets_min + eng.next_below(spec.tweets_max - spec.tweets_min + 1);
        for (std::size_t t = 0; t < n_tweets; ++t) {
            int tweet_sign = article_sign;
            if (eng.next_unit() < spec.tweet_noise) tweet_sign = detail::draw_sign(eng, spec);
            TweetMention tm;
            tm.text = detail::make_text(eng, pools, tweet_sign,
                                        4 + eng.next_below(6), 1 + eng.next_below(2));
            tm.follower_count = static_cast<long long>(eng.next_below(20000));
            tm.posted_year = 2011 + static_cast<int>(eng.next_below(7));
            rec.tweets.push_back(std::move(tm));
        }
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace altsent::corpus
