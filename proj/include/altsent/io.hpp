#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "altsent/features.hpp"

namespace altsent::io {

// 17 significant digits: every double round-trips exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline constexpr const char* kFeatureCsvHeader =
    "article_id,title_sentiment,abstract_sentiment,abstract_length,"
    "tweet_reach,author_count,target_score,target_label";

inline void write_features_csv(std::ostream& out,
                               const std::vector<features::ArticleFeatures>& rows) {
    out << kFeatureCsvHeader << '\n';
    for (const auto& f : rows) {
        out << f.id << ',' << format_double(f.title_sentiment) << ','
            << format_double(f.abstract_sentiment) << ',' << f.abstract_length << ','
            << format_double(f.tweet_reach) << ',' << f.author_count << ','
            << format_double(f.target_score) << ',' << sentiment::to_string(f.target_label)
            << '\n';
    }
}

inline std::vector<features::ArticleFeatures> read_features_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty features file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kFeatureCsvHeader) {
        throw std::runtime_error("unexpected features CSV header");
    }
    std::vector<features::ArticleFeatures> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 8) {
            throw std::runtime_error("bad features row at line " + std::to_string(line_no));
        }
        try {
            features::ArticleFeatures f;
            f.id = fields[0];
            f.title_sentiment = std::stod(fields[1]);
            f.abstract_sentiment = std::stod(fields[2]);
            f.abstract_length = std::stoll(fields[3]);
            f.tweet_reach = std::stod(fields[4]);
            f.author_count = std::stoll(fields[5]);
            f.target_score = std::stod(fields[6]);
            f.target_label = sentiment::polarity_from_string(fields[7]);
            rows.push_back(std::move(f));
        } catch (const std::exception&) {
            throw std::runtime_error("bad features row at line " + std::to_string(line_no));
        }
    }
    return rows;
}

inline std::vector<features::ArticleFeatures> read_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open features file: " + path);
    return read_features_csv(in);
}

}  // namespace altsent::io
