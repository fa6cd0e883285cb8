#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "altsent/corpus.hpp"
#include "altsent/sentiment.hpp"
#include "altsent/text.hpp"

namespace altsent::features {

enum class AggregationMetric { Mean, Median };

enum class DatasetVariant { A, B };

// Fixed model column order.
inline constexpr std::array<const char*, 5> kFeatureNames = {
    "title_sentiment", "abstract_sentiment", "abstract_length", "tweet_reach",
    "author_count"};

struct CaseConfig {
    sentiment::Profile profile;
    AggregationMetric metric;
    int case_id;

    // case 1 = (valence-rule, mean), 2 = (valence-rule, median),
    // case 3 = (polarity-mean, mean), 4 = (polarity-mean, median).
    static CaseConfig from_case_id(int id) {
        switch (id) {
            case 1: return {sentiment::Profile::ValenceRule, AggregationMetric::Mean, 1};
            case 2: return {sentiment::Profile::ValenceRule, AggregationMetric::Median, 2};
            case 3: return {sentiment::Profile::PolarityMean, AggregationMetric::Mean, 3};
            case 4: return {sentiment::Profile::PolarityMean, AggregationMetric::Median, 4};
        }
        throw std::invalid_argument("case id must be 1..4");
    }
};

inline double aggregate_sentiments(const std::vector<double>& scores,
                                   AggregationMetric metric) {
    if (scores.empty()) throw std::invalid_argument("cannot aggregate empty score list");
    if (metric == AggregationMetric::Mean) {
        double sum = 0.0;
        for (double s : scores) sum += s;
        return sum / static_cast<double>(scores.size());
    }
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

namespace detail {

// Total length of recursively longest matching blocks (Ratcliff-Obershelp)
// over two token sequences.
inline std::size_t matching_blocks(const std::vector<std::string>& a, std::size_t alo,
                                   std::size_t ahi, const std::vector<std::string>& b,
                                   std::size_t blo, std::size_t bhi) {
    std::size_t best_len = 0, best_a = alo, best_b = blo;
    // lengths[j]: longest common suffix ending at (i, j).
    std::vector<std::size_t> lengths(bhi - blo, 0);
    for (std::size_t i = alo; i < ahi; ++i) {
        std::vector<std::size_t> next(bhi - blo, 0);
        for (std::size_t j = blo; j < bhi; ++j) {
            if (a[i] == b[j]) {
                std::size_t len = (j > blo ? lengths[j - blo - 1] : 0) + 1;
                next[j - blo] = len;
                if (len > best_len) {
                    best_len = len;
                    best_a = i + 1 - len;
                    best_b = j + 1 - len;
                }
            }
        }
        lengths.swap(next);
    }
    if (best_len == 0) return 0;
    return best_len +
           matching_blocks(a, alo, best_a, b, blo, best_b) +
           matching_blocks(a, best_a + best_len, ahi, b, best_b + best_len, bhi);
}

}  // namespace detail

// 2M / (len_a + len_b) over normalized token sequences; both empty -> 0.
inline double title_overlap_ratio(const std::string& tweet_text,
                                  const std::string& title) {
    const auto a = text::normalized_tokens(tweet_text);
    const auto b = text::normalized_tokens(title);
    if (a.empty() && b.empty()) return 0.0;
    const std::size_t m = detail::matching_blocks(a, 0, a.size(), b, 0, b.size());
    return 2.0 * static_cast<double>(m) / static_cast<double>(a.size() + b.size());
}

// Dataset B: keep only tweets with overlap ratio < threshold; drop articles
// left with no tweets.
inline std::vector<corpus::ArticleRecord>
apply_title_filter(const std::vector<corpus::ArticleRecord>& records,
                   double threshold = 0.7) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("title-filter threshold must lie in [0, 1]");
    }
    std::vector<corpus::ArticleRecord> out;
    for (const auto& rec : records) {
        corpus::ArticleRecord kept = rec;
        std::erase_if(kept.tweets, [&](const corpus::TweetMention& t) {
            return title_overlap_ratio(t.text, rec.title) >= threshold;
        });
        if (!kept.tweets.empty()) out.push_back(std::move(kept));
    }
    return out;
}

struct ArticleFeatures {
    std::string id;
    double title_sentiment = 0.0;
    double abstract_sentiment = 0.0;
    long long abstract_length = 0;
    double tweet_reach = 0.0;
    long long author_count = 0;
    double target_score = 0.0;
    sentiment::Polarity target_label = sentiment::Polarity::Neutral;

    std::array<double, 5> row() const {
        return {title_sentiment, abstract_sentiment,
                static_cast<double>(abstract_length), tweet_reach,
                static_cast<double>(author_count)};
    }
};

inline ArticleFeatures derive_features(const corpus::ArticleRecord& rec,
                                       const sentiment::Lexicon& lex,
                                       const CaseConfig& cfg) {
    const auto scorer = sentiment::ScorerConfig::for_profile(cfg.profile);
    ArticleFeatures f;
    f.id = rec.id;
    f.title_sentiment = sentiment::score_text(rec.title, lex, scorer);
    f.abstract_sentiment = sentiment::score_text(rec.abstract_text, lex, scorer);
    f.abstract_length =
        static_cast<long long>(text::split_whitespace(rec.abstract_text).size());
    f.author_count = rec.author_count;
    std::vector<double> tweet_scores;
    double follower_sum = 0.0;
    tweet_scores.reserve(rec.tweets.size());
    for (const auto& t : rec.tweets) {
        tweet_scores.push_back(sentiment::score_text(t.text, lex, scorer));
        follower_sum += static_cast<double>(t.follower_count);
    }
    f.tweet_reach = rec.tweets.empty()
                        ? 0.0
                        : follower_sum / static_cast<double>(rec.tweets.size());
    f.target_score = aggregate_sentiments(tweet_scores, cfg.metric);
    f.target_label = sentiment::classify_score(f.target_score);
    return f;
}

struct LabelDistribution {
    long long positive = 0;
    long long negative = 0;
    long long neutral = 0;

    long long total() const { return positive + negative + neutral; }
};

struct Dataset {
    std::vector<ArticleFeatures> rows;
    LabelDistribution distribution;
};

inline Dataset build_dataset(const std::vector<corpus::ArticleRecord>& records,
                             const sentiment::Lexicon& lex, const CaseConfig& cfg,
                             DatasetVariant variant, double title_threshold = 0.7) {
    const std::vector<corpus::ArticleRecord>* src = &records;
    std::vector<corpus::ArticleRecord> filtered;
    if (variant == DatasetVariant::B) {
        filtered = apply_title_filter(records, title_threshold);
        src = &filtered;
    }
    Dataset ds;
    ds.rows.reserve(src->size());
    for (const auto& rec : *src) {
        ArticleFeatures f = derive_features(rec, lex, cfg);
        switch (f.target_label) {
            case sentiment::Polarity::Positive: ++ds.distribution.positive; break;
            case sentiment::Polarity::Negative: ++ds.distribution.negative; break;
            case sentiment::Polarity::Neutral: ++ds.distribution.neutral; break;
        }
        ds.rows.push_back(std::move(f));
    }
    return ds;
}

// Pearson correlation of every column pair; diagonal 1. A constant column's
// off-diagonal entries are NaN (undefined, by convention).
inline std::vector<std::vector<double>>
correlation_matrix(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 2) throw std::invalid_argument("need at least 2 rows for correlation");
    const std::size_t n = rows.size();
    const std::size_t m = rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != m) throw std::invalid_argument("ragged feature matrix");
    }
    std::vector<double> mean(m, 0.0);
    for (const auto& r : rows)
        for (std::size_t c = 0; c < m; ++c) mean[c] += r[c];
    for (auto& v : mean) v /= static_cast<double>(n);

    std::vector<std::vector<double>> cov(m, std::vector<double>(m, 0.0));
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i; j < m; ++j) {
                cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
            }
        }
    }
    std::vector<std::vector<double>> corr(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            double r;
            if (i == j) {
                r = 1.0;
            } else if (cov[i][i] == 0.0 || cov[j][j] == 0.0) {
                r = std::numeric_limits<double>::quiet_NaN();
            } else {
                r = cov[i][j] / std::sqrt(cov[i][i] * cov[j][j]);
            }
            corr[i][j] = corr[j][i] = r;
        }
    }
    return corr;
}

}  // namespace altsent::features
