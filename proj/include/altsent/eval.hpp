#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace altsent::eval {

// Row-major (true class x predicted class) counts over a fixed class order.
struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<long long> counts;  // classes.size()^2

    long long at(std::size_t true_c, std::size_t pred_c) const {
        return counts[true_c * classes.size() + pred_c];
    }
    long long& at(std::size_t true_c, std::size_t pred_c) {
        return counts[true_c * classes.size() + pred_c];
    }
    long long total() const {
        long long t = 0;
        for (long long c : counts) t += c;
        return t;
    }
    long long support(std::size_t c) const {
        long long s = 0;
        for (std::size_t j = 0; j < classes.size(); ++j) s += at(c, j);
        return s;
    }
    long long predicted_count(std::size_t c) const {
        long long s = 0;
        for (std::size_t i = 0; i < classes.size(); ++i) s += at(i, c);
        return s;
    }
};

inline ConfusionMatrix confusion_matrix(const std::vector<std::string>& truth,
                                        const std::vector<std::string>& predicted,
                                        const std::vector<std::string>& class_order) {
    if (truth.size() != predicted.size()) {
        throw std::invalid_argument("label vectors differ in length");
    }
    ConfusionMatrix cm;
    cm.classes = class_order;
    cm.counts.assign(class_order.size() * class_order.size(), 0);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < class_order.size(); ++i) index[class_order[i]] = i;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        auto t = index.find(truth[i]);
        auto p = index.find(predicted[i]);
        if (t == index.end() || p == index.end()) {
            throw std::invalid_argument("label outside declared class order");
        }
        ++cm.at(t->second, p->second);
    }
    return cm;
}

struct MetricReport {
    double accuracy = 0.0;
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
    std::vector<long long> support;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
    std::vector<std::string> warnings;
};

// Zero-denominator convention throughout: report 0 and set a warning flag
// instead of failing, so batch reports always complete.
inline double accuracy(const ConfusionMatrix& cm, std::vector<std::string>* warnings = nullptr) {
    const long long total = cm.total();
    if (total == 0) {
        if (warnings) warnings->push_back("accuracy: empty confusion matrix");
        return 0.0;
    }
    long long correct = 0;
    for (std::size_t c = 0; c < cm.classes.size(); ++c) correct += cm.at(c, c);
    return static_cast<double>(correct) / static_cast<double>(total);
}

inline double precision(const ConfusionMatrix& cm, std::size_t c,
                        std::vector<std::string>* warnings = nullptr) {
    const long long denom = cm.predicted_count(c);
    if (denom == 0) {
        if (warnings) warnings->push_back("precision[" + cm.classes[c] + "]: no predictions");
        return 0.0;
    }
    return static_cast<double>(cm.at(c, c)) / static_cast<double>(denom);
}

inline double recall(const ConfusionMatrix& cm, std::size_t c,
                     std::vector<std::string>* warnings = nullptr) {
    const long long denom = cm.support(c);
    if (denom == 0) {
        if (warnings) warnings->push_back("recall[" + cm.classes[c] + "]: no true samples");
        return 0.0;
    }
    return static_cast<double>(cm.at(c, c)) / static_cast<double>(denom);
}

// 2TP / (2TP + FP + FN)
inline double f1(const ConfusionMatrix& cm, std::size_t c,
                 std::vector<std::string>* warnings = nullptr) {
    const long long tp = cm.at(c, c);
    const long long fp = cm.predicted_count(c) - tp;
    const long long fn = cm.support(c) - tp;
    const long long denom = 2 * tp + fp + fn;
    if (denom == 0) {
        if (warnings) warnings->push_back("f1[" + cm.classes[c] + "]: empty class");
        return 0.0;
    }
    return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

inline MetricReport weighted_metrics(const ConfusionMatrix& cm) {
    MetricReport r;
    r.accuracy = accuracy(cm, &r.warnings);
    const std::size_t k = cm.classes.size();
    long long total_support = 0;
    for (std::size_t c = 0; c < k; ++c) {
        r.precision.push_back(precision(cm, c, &r.warnings));
        r.recall.push_back(recall(cm, c, &r.warnings));
        r.f1.push_back(f1(cm, c, &r.warnings));
        r.support.push_back(cm.support(c));
        total_support += cm.support(c);
    }
    if (total_support > 0) {
        for (std::size_t c = 0; c < k; ++c) {
            const double w = static_cast<double>(r.support[c]) /
                             static_cast<double>(total_support);
            r.weighted_precision += w * r.precision[c];
            r.weighted_recall += w * r.recall[c];
            r.weighted_f1 += w * r.f1[c];
        }
    } else {
        r.warnings.push_back("weighted metrics: no samples");
    }
    return r;
}

inline double mse(const std::vector<double>& targets,
                  const std::vector<double>& predictions) {
    if (targets.size() != predictions.size() || targets.empty()) {
        throw std::invalid_argument("mse: mismatched or empty vectors");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double d = targets[i] - predictions[i];
        sum += d * d;
    }
    return sum / static_cast<double>(targets.size());
}

// 1 - SS_res / SS_tot; constant targets -> 0 with warning.
inline double r_squared(const std::vector<double>& targets,
                        const std::vector<double>& predictions,
                        std::vector<std::string>* warnings = nullptr) {
    if (targets.size() != predictions.size() || targets.empty()) {
        throw std::invalid_argument("r_squared: mismatched or empty vectors");
    }
    double mean = 0.0;
    for (double t : targets) mean += t;
    mean /= static_cast<double>(targets.size());
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        ss_tot += (targets[i] - mean) * (targets[i] - mean);
        ss_res += (targets[i] - predictions[i]) * (targets[i] - predictions[i]);
    }
    if (ss_tot == 0.0) {
        if (warnings) warnings->push_back("r_squared: constant targets");
        return 0.0;
    }
    return 1.0 - ss_res / ss_tot;
}

// Chance-corrected agreement between two label assignments.
inline double cohens_kappa(const std::vector<std::string>& a,
                           const std::vector<std::string>& b,
                           std::vector<std::string>* warnings = nullptr) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("cohens_kappa: mismatched or empty vectors");
    }
    const double n = static_cast<double>(a.size());
    std::map<std::string, long long> count_a, count_b;
    long long agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++count_a[a[i]];
        ++count_b[b[i]];
        if (a[i] == b[i]) ++agree;
    }
    const double p_o = static_cast<double>(agree) / n;
    double p_e = 0.0;
    for (const auto& [label, ca] : count_a) {
        auto it = count_b.find(label);
        if (it != count_b.end()) {
            p_e += (static_cast<double>(ca) / n) * (static_cast<double>(it->second) / n);
        }
    }
    if (p_e >= 1.0) {
        if (p_o >= 1.0) return 1.0;
        if (warnings) warnings->push_back("cohens_kappa: degenerate chance agreement");
        return 0.0;
    }
    return (p_o - p_e) / (1.0 - p_e);
}

inline nlohmann::ordered_json to_json(const ConfusionMatrix& cm) {
    nlohmann::ordered_json j;
    j["classes"] = cm.classes;
    j["counts"] = cm.counts;
    return j;
}

inline nlohmann::ordered_json to_json(const MetricReport& r) {
    nlohmann::ordered_json j;
    j["accuracy"] = r.accuracy;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    j["support"] = r.support;
    j["weighted_precision"] = r.weighted_precision;
    j["weighted_recall"] = r.weighted_recall;
    j["weighted_f1"] = r.weighted_f1;
    j["warnings"] = r.warnings;
    return j;
}

}  // namespace altsent::eval
