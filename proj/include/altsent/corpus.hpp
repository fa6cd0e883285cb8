#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "altsent/rng.hpp"

namespace altsent::corpus {

using ordered_json = nlohmann::ordered_json;

struct TweetMention {
    std::string text;
    long long follower_count = 0;
    std::optional<int> posted_year;
};

struct ArticleRecord {
    std::string id;
    std::string title;
    std::string abstract_text;
    long long author_count = 0;
    std::vector<std::string> subjects;
    std::vector<TweetMention> tweets;
    std::optional<int> published_year;
};

struct CorpusSummary {
    std::map<int, long long> tweets_per_year;
    std::map<std::string, long long> tweets_per_subject;
    std::map<std::string, long long> articles_per_subject;
    long long dropped_record_count = 0;
};

struct ParseResult {
    std::vector<ArticleRecord> records;
    long long skipped_lines = 0;
};

// Year from an ISO-8601 timestamp prefix ("2014-03-01T..." -> 2014).
inline std::optional<int> year_from_timestamp(const std::string& ts) {
    if (ts.size() < 4) return std::nullopt;
    int year = 0;
    for (int i = 0; i < 4; ++i) {
        char c = ts[static_cast<std::size_t>(i)];
        if (c < '0' || c > '9') return std::nullopt;
        year = year * 10 + (c - '0');
    }
    return year;
}

namespace detail {

inline std::optional<ArticleRecord> record_from_line(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (!j.is_object()) return std::nullopt;
    try {
        ArticleRecord rec;
        rec.id = j.value("id", std::string{});
        rec.title = j.value("title", std::string{});
        rec.abstract_text = j.value("abstract", std::string{});
        // Explicit author_count wins over an authors array.
        if (j.contains("author_count")) {
            rec.author_count = j.at("author_count").get<long long>();
        } else if (j.contains("authors") && j.at("authors").is_array()) {
            rec.author_count = static_cast<long long>(j.at("authors").size());
        }
        if (j.contains("subjects")) {
            for (const auto& s : j.at("subjects")) {
                rec.subjects.push_back(s.get<std::string>());
            }
        }
        if (j.contains("published_year") && j.at("published_year").is_number_integer()) {
            rec.published_year = j.at("published_year").get<int>();
        }
        if (j.contains("tweets")) {
            for (const auto& t : j.at("tweets")) {
                TweetMention tm;
                tm.text = t.value("text", std::string{});
                tm.follower_count = t.value("follower_count", 0LL);
                if (t.contains("posted_at")) {
                    tm.posted_year = year_from_timestamp(t.at("posted_at").get<std::string>());
                }
                rec.tweets.push_back(std::move(tm));
            }
        }
        return rec;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

}  // namespace detail

// One JSONL record per line; malformed lines are skipped and counted.
inline ParseResult parse_records(std::istream& in) {
    ParseResult result;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        if (auto rec = detail::record_from_line(line)) {
            result.records.push_back(std::move(*rec));
        } else {
            ++result.skipped_lines;
        }
    }
    if (in.bad()) throw std::runtime_error("unreadable input stream");
    return result;
}

inline bool is_valid(const TweetMention& t) {
    return !t.text.empty() && t.follower_count >= 0;
}

inline bool is_valid(const ArticleRecord& rec) {
    if (rec.title.empty() || rec.abstract_text.empty()) return false;
    if (rec.author_count < 1) return false;
    if (rec.tweets.empty()) return false;
    return std::all_of(rec.tweets.begin(), rec.tweets.end(),
                       [](const TweetMention& t) { return is_valid(t); });
}

inline std::pair<std::vector<ArticleRecord>, long long>
validate_and_filter(std::vector<ArticleRecord> records) {
    const auto before = static_cast<long long>(records.size());
    std::erase_if(records, [](const ArticleRecord& r) { return !is_valid(r); });
    return {std::move(records), before - static_cast<long long>(records.size())};
}

// Uniform sample of n distinct records, corpus order preserved.
inline std::vector<ArticleRecord>
sample_without_replacement(const std::vector<ArticleRecord>& records,
                           std::size_t n, std::uint64_t seed) {
    if (n > records.size()) {
        throw std::invalid_argument("sample size exceeds corpus size");
    }
    std::vector<std::size_t> idx(records.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng::Engine eng(seed);
    // Partial Fisher-Yates: the first n slots are a uniform subset.
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(eng.next_below(idx.size() - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    std::vector<ArticleRecord> out;
    out.reserve(n);
    for (std::size_t i : idx) out.push_back(records[i]);
    return out;
}

inline CorpusSummary summarize(const std::vector<ArticleRecord>& records) {
    CorpusSummary s;
    for (const auto& rec : records) {
        const auto n_tweets = static_cast<long long>(rec.tweets.size());
        for (const auto& t : rec.tweets) {
            if (t.posted_year) s.tweets_per_year[*t.posted_year] += 1;
        }
        for (const auto& subj : rec.subjects) {
            s.tweets_per_subject[subj] += n_tweets;
            s.articles_per_subject[subj] += 1;
        }
    }
    return s;
}

inline ordered_json to_json(const TweetMention& t) {
    ordered_json j;
    j["text"] = t.text;
    j["follower_count"] = t.follower_count;
    if (t.posted_year) j["posted_at"] = std::to_string(*t.posted_year) + "-01-01T00:00:00Z";
    return j;
}

inline ordered_json to_json(const ArticleRecord& rec) {
    ordered_json j;
    j["id"] = rec.id;
    j["title"] = rec.title;
    j["abstract"] = rec.abstract_text;
    j["author_count"] = rec.author_count;
    j["subjects"] = rec.subjects;
    if (rec.published_year) j["published_year"] = *rec.published_year;
    auto& tweets = j["tweets"] = ordered_json::array();
    for (const auto& t : rec.tweets) tweets.push_back(to_json(t));
    return j;
}

inline ordered_json to_json(const CorpusSummary& s) {
    ordered_json j;
    auto& per_year = j["tweets_per_year"] = ordered_json::object();
    for (const auto& [year, count] : s.tweets_per_year) {
        per_year[std::to_string(year)] = count;
    }
    auto& per_subject = j["tweets_per_subject"] = ordered_json::object();
    for (const auto& [subj, count] : s.tweets_per_subject) per_subject[subj] = count;
    auto& art_subject = j["articles_per_subject"] = ordered_json::object();
    for (const auto& [subj, count] : s.articles_per_subject) art_subject[subj] = count;
    j["dropped_record_count"] = s.dropped_record_count;
    return j;
}

}  // namespace altsent::corpus
