#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "altsent/rng.hpp"

namespace altsent::models {

using Matrix = std::vector<std::vector<double>>;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Standardization

struct ScalerParams {
    std::vector<double> mean;
    std::vector<double> stddev;  // population std, >= 0
};

inline ScalerParams zscore_fit(const Matrix& X) {
    if (X.empty()) throw std::invalid_argument("zscore_fit: empty matrix");
    const std::size_t m = X.front().size();
    ScalerParams p;
    p.mean.assign(m, 0.0);
    p.stddev.assign(m, 0.0);
    for (const auto& row : X) {
        if (row.size() != m) throw std::invalid_argument("zscore_fit: ragged matrix");
        for (std::size_t c = 0; c < m; ++c) p.mean[c] += row[c];
    }
    for (auto& v : p.mean) v /= static_cast<double>(X.size());
    for (const auto& row : X) {
        for (std::size_t c = 0; c < m; ++c) {
            const double d = row[c] - p.mean[c];
            p.stddev[c] += d * d;
        }
    }
    for (auto& v : p.stddev) v = std::sqrt(v / static_cast<double>(X.size()));
    return p;
}

// Constant columns (std 0) map to zeros.
inline Matrix zscore_apply(const Matrix& X, const ScalerParams& p) {
    Matrix out = X;
    for (auto& row : out) {
        if (row.size() != p.mean.size()) {
            throw std::invalid_argument("zscore_apply: column count mismatch");
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            row[c] = p.stddev[c] == 0.0 ? 0.0 : (row[c] - p.mean[c]) / p.stddev[c];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Splitting and cross-validation

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

inline SplitIndices split_train_test(const std::vector<int>& labels,
                                     const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw std::invalid_argument("train_fraction must lie in (0, 1)");
    }
    const std::size_t n = labels.size();
    if (n < 2) throw std::invalid_argument("need at least 2 samples to split");
    SplitIndices out;
    if (!spec.stratified) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        rng::Engine eng(spec.seed);
        rng::shuffle(idx, eng);
        std::size_t n_train = static_cast<std::size_t>(
            std::llround(spec.train_fraction * static_cast<double>(n)));
        n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
        out.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        out.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    } else {
        std::map<int, std::vector<std::size_t>> by_class;
        for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);
        std::size_t class_idx = 0;
        for (auto& [cls, members] : by_class) {
            if (members.size() < 2) {
                throw std::invalid_argument("stratified split: class " +
                                            std::to_string(cls) + " has fewer than 2 samples");
            }
            rng::Engine eng(rng::derive_seed(spec.seed, class_idx++));
            rng::shuffle(members, eng);
            std::size_t n_train = static_cast<std::size_t>(std::llround(
                spec.train_fraction * static_cast<double>(members.size())));
            n_train = std::clamp<std::size_t>(n_train, 1, members.size() - 1);
            out.train.insert(out.train.end(), members.begin(),
                             members.begin() + static_cast<std::ptrdiff_t>(n_train));
            out.test.insert(out.test.end(),
                            members.begin() + static_cast<std::ptrdiff_t>(n_train),
                            members.end());
        }
        std::sort(out.train.begin(), out.train.end());
        std::sort(out.test.begin(), out.test.end());
    }
    return out;
}

// Round-robin deal of per-class shuffled indices; fold class counts are
// within 1 of proportionality.
inline std::vector<std::vector<std::size_t>>
stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    for (const auto& [cls, members] : by_class) {
        if (members.size() < static_cast<std::size_t>(k)) {
            throw std::invalid_argument("k exceeds size of class " + std::to_string(cls));
        }
    }
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    std::size_t class_idx = 0;
    for (auto& [cls, members] : by_class) {
        rng::Engine eng(rng::derive_seed(seed, class_idx++));
        rng::shuffle(members, eng);
        for (std::size_t i = 0; i < members.size(); ++i) {
            folds[i % static_cast<std::size_t>(k)].push_back(members[i]);
        }
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

inline std::vector<std::vector<std::size_t>> kfold(std::size_t n, int k,
                                                   std::uint64_t seed) {
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw std::invalid_argument("kfold: k out of range");
    }
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    rng::Engine eng(seed);
    rng::shuffle(idx, eng);
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) folds[i % static_cast<std::size_t>(k)].push_back(idx[i]);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

// ---------------------------------------------------------------------------
// Model specs

enum class Family {
    DecisionTree,
    RandomForest,
    LogisticRegression,
    KNN,
    GaussianNB,
    LinearRegression,
    DecisionTreeRegressor,
    RandomForestRegressor,
};

inline const char* to_string(Family f) {
    switch (f) {
        case Family::DecisionTree: return "decision_tree";
        case Family::RandomForest: return "random_forest";
        case Family::LogisticRegression: return "logistic_regression";
        case Family::KNN: return "knn";
        case Family::GaussianNB: return "gaussian_nb";
        case Family::LinearRegression: return "linear_regression";
        case Family::DecisionTreeRegressor: return "decision_tree_regressor";
        case Family::RandomForestRegressor: return "random_forest_regressor";
    }
    return "?";
}

inline Family family_from_string(const std::string& s) {
    static const std::map<std::string, Family> table = {
        {"decision_tree", Family::DecisionTree},
        {"random_forest", Family::RandomForest},
        {"logistic_regression", Family::LogisticRegression},
        {"knn", Family::KNN},
        {"gaussian_nb", Family::GaussianNB},
        {"linear_regression", Family::LinearRegression},
        {"decision_tree_regressor", Family::DecisionTreeRegressor},
        {"random_forest_regressor", Family::RandomForestRegressor},
    };
    auto it = table.find(s);
    if (it == table.end()) throw std::invalid_argument("unknown model family: " + s);
    return it->second;
}

inline bool is_regressor(Family f) {
    return f == Family::LinearRegression || f == Family::DecisionTreeRegressor ||
           f == Family::RandomForestRegressor;
}

struct ModelSpec {
    Family family = Family::RandomForest;
    json params = json::object();
    std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Model interface

class Model {
public:
    virtual ~Model() = default;
    virtual Family family() const = 0;
    // Classifiers take class indices (as doubles); regressors real targets.
    virtual void fit(const Matrix& X, const std::vector<double>& y) = 0;
    virtual std::vector<double> predict(const Matrix& X) const = 0;
    virtual ordered_json state_json() const = 0;
    virtual void load_state(const json& state) = 0;
    virtual json params_json() const { return json::object(); }

    bool is_classifier() const { return !is_regressor(family()); }

    virtual std::vector<double> feature_importances() const {
        throw std::logic_error("feature importances require a tree-based model");
    }

protected:
    void check_fitted() const {
        if (n_features_ == 0) throw std::logic_error("model used before fit");
    }
    void check_columns(const Matrix& X) const {
        check_fitted();
        for (const auto& row : X) {
            if (row.size() != n_features_) {
                throw std::invalid_argument("feature count mismatch");
            }
        }
    }
    std::size_t n_features_ = 0;
};

namespace detail {

inline std::size_t resolve_label_count(const std::vector<double>& y) {
    int max_label = 0;
    for (double v : y) max_label = std::max(max_label, static_cast<int>(v));
    return static_cast<std::size_t>(max_label) + 1;
}

inline double gini(const std::vector<long long>& counts, long long total) {
    if (total == 0) return 0.0;
    double sum_sq = 0.0;
    for (long long c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CART decision tree (classification: Gini; regression: variance)

struct TreeNode {
    int feature = -1;  // -1: leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf class index or mean target
};

struct TreeParams {
    std::optional<int> max_depth;  // nullopt: unlimited
    int min_samples_split = 2;
    // 0: all features; otherwise size of the random per-split subset.
    std::size_t max_features = 0;
    std::uint64_t seed = 0;
};

inline TreeParams tree_params_from_json(const json& p, std::uint64_t seed) {
    TreeParams tp;
    tp.seed = seed;
    if (p.contains("max_depth") && !p.at("max_depth").is_null()) {
        tp.max_depth = p.at("max_depth").get<int>();
    }
    tp.min_samples_split = p.value("min_samples_split", 2);
    if (tp.min_samples_split < 2) throw std::invalid_argument("min_samples_split must be >= 2");
    if (p.contains("max_features")) {
        const auto& mf = p.at("max_features");
        if (mf.is_string()) {
            const std::string s = mf.get<std::string>();
            if (s == "all") tp.max_features = 0;
            else if (s == "sqrt") tp.max_features = SIZE_MAX;  // resolved at fit
            else throw std::invalid_argument("max_features: expected 'sqrt', 'all' or integer");
        } else {
            tp.max_features = mf.get<std::size_t>();
        }
    }
    return tp;
}

class DecisionTree : public Model {
public:
    DecisionTree(TreeParams params, bool classification, Family reported_family)
        : params_(params), classification_(classification), family_(reported_family) {}

    Family family() const override { return family_; }

    void fit(const Matrix& X, const std::vector<double>& y) override {
        if (X.empty() || X.size() != y.size()) {
            throw std::invalid_argument("fit: empty data or target length mismatch");
        }
        n_features_ = X.front().size();
        n_classes_ = classification_ ? detail::resolve_label_count(y) : 0;
        nodes_.clear();
        importance_raw_.assign(n_features_, 0.0);
        std::vector<std::size_t> idx(X.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        rng::Engine eng(params_.seed);
        std::size_t mf = params_.max_features;
        if (mf == SIZE_MAX) {
            mf = static_cast<std::size_t>(
                std::llround(std::sqrt(static_cast<double>(n_features_))));
            mf = std::clamp<std::size_t>(mf, 1, n_features_);
        }
        build(X, y, idx, 0, static_cast<double>(X.size()), mf, eng);
    }

    std::vector<double> predict(const Matrix& X) const override {
        check_columns(X);
        std::vector<double> out;
        out.reserve(X.size());
        for (const auto& row : X) {
            int node = 0;
            while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
                const auto& nd = nodes_[static_cast<std::size_t>(node)];
                node = row[static_cast<std::size_t>(nd.feature)] <= nd.threshold
                           ? nd.left
                           : nd.right;
            }
            out.push_back(nodes_[static_cast<std::size_t>(node)].value);
        }
        return out;
    }

    // Mean decrease in impurity, normalized to sum 1 (uniform when no split
    // reduced impurity).
    std::vector<double> feature_importances() const override {
        check_fitted();
        double total = 0.0;
        for (double v : importance_raw_) total += v;
        std::vector<double> out(importance_raw_.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = total > 0.0 ? importance_raw_[i] / total
                                 : 1.0 / static_cast<double>(out.size());
        }
        return out;
    }

    std::vector<double> importance_raw() const { return importance_raw_; }

    ordered_json state_json() const override {
        ordered_json nodes = ordered_json::array();
        for (const auto& nd : nodes_) {
            nodes.push_back({nd.feature, nd.threshold, nd.left, nd.right, nd.value});
        }
        ordered_json j;
        j["n_features"] = n_features_;
        j["n_classes"] = n_classes_;
        j["nodes"] = nodes;
        j["importance_raw"] = importance_raw_;
        return j;
    }

    void load_state(const json& state) override {
        n_features_ = state.at("n_features").get<std::size_t>();
        n_classes_ = state.at("n_classes").get<std::size_t>();
        nodes_.clear();
        for (const auto& nd : state.at("nodes")) {
            nodes_.push_back(TreeNode{nd.at(0).get<int>(), nd.at(1).get<double>(),
                                      nd.at(2).get<int>(), nd.at(3).get<int>(),
                                      nd.at(4).get<double>()});
        }
        importance_raw_ = state.value("importance_raw", std::vector<double>(n_features_, 0.0));
    }

    json params_json() const override {
        json p;
        if (params_.max_depth) p["max_depth"] = *params_.max_depth;
        else p["max_depth"] = nullptr;
        p["min_samples_split"] = params_.min_samples_split;
        return p;
    }

private:
    struct SplitChoice {
        bool found = false;
        std::size_t feature = 0;
        double threshold = 0.0;
        double decrease = -1.0;
    };

    double leaf_value(const std::vector<double>& y,
                      const std::vector<std::size_t>& idx) const {
        if (classification_) {
            std::vector<long long> counts(n_classes_, 0);
            for (std::size_t i : idx) ++counts[static_cast<std::size_t>(y[i])];
            std::size_t best = 0;
            for (std::size_t c = 1; c < counts.size(); ++c) {
                if (counts[c] > counts[best]) best = c;  // tie: lower class index
            }
            return static_cast<double>(best);
        }
        double sum = 0.0;
        for (std::size_t i : idx) sum += y[i];
        return sum / static_cast<double>(idx.size());
    }

    double node_impurity(const std::vector<double>& y,
                         const std::vector<std::size_t>& idx) const {
        const auto n = static_cast<long long>(idx.size());
        if (classification_) {
            std::vector<long long> counts(n_classes_, 0);
            for (std::size_t i : idx) ++counts[static_cast<std::size_t>(y[i])];
            return detail::gini(counts, n);
        }
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t i : idx) {
            sum += y[i];
            sum_sq += y[i] * y[i];
        }
        const double mean = sum / static_cast<double>(n);
        return sum_sq / static_cast<double>(n) - mean * mean;
    }

    // Exhaustive scan over midpoints of sorted distinct values. Ties broken
    // by lower feature index, then lower threshold (scan order + strict >).
    SplitChoice best_split(const Matrix& X, const std::vector<double>& y,
                           const std::vector<std::size_t>& idx,
                           const std::vector<std::size_t>& features) const {
        SplitChoice best;
        const auto n = static_cast<double>(idx.size());
        const double parent = node_impurity(y, idx);

        std::vector<std::pair<double, double>> vals(idx.size());  // (x, y)
        for (std::size_t f : features) {
            for (std::size_t i = 0; i < idx.size(); ++i) {
                vals[i] = {X[idx[i]][f], y[idx[i]]};
            }
            std::sort(vals.begin(), vals.end());
            if (classification_) {
                std::vector<long long> left(n_classes_, 0), right(n_classes_, 0);
                for (const auto& [x, label] : vals) ++right[static_cast<std::size_t>(label)];
                for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                    const auto cls = static_cast<std::size_t>(vals[i].second);
                    ++left[cls];
                    --right[cls];
                    if (vals[i].first == vals[i + 1].first) continue;
                    const double nl = static_cast<double>(i + 1);
                    const double nr = n - nl;
                    const double child =
                        (nl * detail::gini(left, static_cast<long long>(i + 1)) +
                         nr * detail::gini(right, static_cast<long long>(vals.size() - i - 1))) /
                        n;
                    const double decrease = parent - child;
                    if (decrease > best.decrease) {
                        best = {true, f, (vals[i].first + vals[i + 1].first) / 2.0, decrease};
                    }
                }
            } else {
                double left_sum = 0.0, left_sq = 0.0, right_sum = 0.0, right_sq = 0.0;
                for (const auto& [x, t] : vals) {
                    right_sum += t;
                    right_sq += t * t;
                }
                for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                    const double t = vals[i].second;
                    left_sum += t;
                    left_sq += t * t;
                    right_sum -= t;
                    right_sq -= t * t;
                    if (vals[i].first == vals[i + 1].first) continue;
                    const double nl = static_cast<double>(i + 1);
                    const double nr = n - nl;
                    const double var_l = left_sq / nl - (left_sum / nl) * (left_sum / nl);
                    const double var_r = right_sq / nr - (right_sum / nr) * (right_sum / nr);
                    const double child = (nl * var_l + nr * var_r) / n;
                    const double decrease = parent - child;
                    if (decrease > best.decrease) {
                        best = {true, f, (vals[i].first + vals[i + 1].first) / 2.0, decrease};
                    }
                }
            }
        }
        return best;
    }

    int build(const Matrix& X, const std::vector<double>& y,
              const std::vector<std::size_t>& idx, int depth, double n_total,
              std::size_t max_features, rng::Engine& eng) {
        const int node_id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        nodes_.back().value = leaf_value(y, idx);

        const double impurity = node_impurity(y, idx);
        const bool depth_ok = !params_.max_depth || depth < *params_.max_depth;
        if (!depth_ok || impurity <= 0.0 ||
            idx.size() < static_cast<std::size_t>(params_.min_samples_split)) {
            return node_id;
        }

        std::vector<std::size_t> features(n_features_);
        for (std::size_t f = 0; f < n_features_; ++f) features[f] = f;
        if (max_features > 0 && max_features < n_features_) {
            for (std::size_t i = 0; i < max_features; ++i) {
                std::size_t j = i + static_cast<std::size_t>(
                                        eng.next_below(features.size() - i));
                std::swap(features[i], features[j]);
            }
            features.resize(max_features);
            std::sort(features.begin(), features.end());
        }

        const SplitChoice split = best_split(X, y, idx, features);
        if (!split.found) return node_id;

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx) {
            (X[i][split.feature] <= split.threshold ? left_idx : right_idx).push_back(i);
        }
        importance_raw_[split.feature] +=
            (static_cast<double>(idx.size()) / n_total) * std::max(split.decrease, 0.0);

        nodes_[static_cast<std::size_t>(node_id)].feature = static_cast<int>(split.feature);
        nodes_[static_cast<std::size_t>(node_id)].threshold = split.threshold;
        const int left = build(X, y, left_idx, depth + 1, n_total, max_features, eng);
        nodes_[static_cast<std::size_t>(node_id)].left = left;
        const int right = build(X, y, right_idx, depth + 1, n_total, max_features, eng);
        nodes_[static_cast<std::size_t>(node_id)].right = right;
        return node_id;
    }

    TreeParams params_;
    bool classification_;
    Family family_;
    std::size_t n_classes_ = 0;
    std::vector<TreeNode> nodes_;
    std::vector<double> importance_raw_;
};

// ---------------------------------------------------------------------------
// Random forest (bagging + per-split feature subsampling)

struct ForestParams {
    TreeParams tree;
    int n_trees = 100;
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

class RandomForest : public Model {
public:
    RandomForest(ForestParams params, bool classification, Family reported_family)
        : params_(params), classification_(classification), family_(reported_family) {}

    Family family() const override { return family_; }

    void fit(const Matrix& X, const std::vector<double>& y) override {
        if (X.empty() || X.size() != y.size()) {
            throw std::invalid_argument("fit: empty data or target length mismatch");
        }
        if (params_.n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");
        n_features_ = X.front().size();
        n_classes_ = classification_ ? detail::resolve_label_count(y) : 0;
        trees_.clear();
        for (int t = 0; t < params_.n_trees; ++t) {
            TreeParams tp = params_.tree;
            tp.seed = rng::derive_seed(params_.seed, 2 * static_cast<std::uint64_t>(t));
            DecisionTree tree(tp, classification_, family_);
            if (params_.bootstrap) {
                rng::Engine eng(
                    rng::derive_seed(params_.seed, 2 * static_cast<std::uint64_t>(t) + 1));
                Matrix bx;
                std::vector<double> by;
                bx.reserve(X.size());
                by.reserve(X.size());
                for (std::size_t i = 0; i < X.size(); ++i) {
                    const std::size_t j = eng.next_below(X.size());
                    bx.push_back(X[j]);
                    by.push_back(y[j]);
                }
                tree.fit(bx, by);
            } else {
                tree.fit(X, y);
            }
            trees_.push_back(std::move(tree));
        }
    }

    std::vector<double> predict(const Matrix& X) const override {
        check_columns(X);
        std::vector<std::vector<double>> per_tree;
        per_tree.reserve(trees_.size());
        for (const auto& t : trees_) per_tree.push_back(t.predict(X));
        std::vector<double> out(X.size(), 0.0);
        for (std::size_t i = 0; i < X.size(); ++i) {
            if (classification_) {
                std::vector<long long> votes(n_classes_, 0);
                for (const auto& preds : per_tree) {
                    ++votes[static_cast<std::size_t>(preds[i])];
                }
                std::size_t best = 0;
                for (std::size_t c = 1; c < votes.size(); ++c) {
                    if (votes[c] > votes[best]) best = c;  // tie: lower class index
                }
                out[i] = static_cast<double>(best);
            } else {
                double sum = 0.0;
                for (const auto& preds : per_tree) sum += preds[i];
                out[i] = sum / static_cast<double>(per_tree.size());
            }
        }
        return out;
    }

    std::vector<double> feature_importances() const override {
        check_fitted();
        std::vector<double> acc(n_features_, 0.0);
        for (const auto& t : trees_) {
            const auto imp = t.feature_importances();
            for (std::size_t f = 0; f < n_features_; ++f) acc[f] += imp[f];
        }
        double total = 0.0;
        for (double v : acc) total += v;
        for (auto& v : acc) {
            v = total > 0.0 ? v / total : 1.0 / static_cast<double>(acc.size());
        }
        return acc;
    }

    ordered_json state_json() const override {
        ordered_json j;
        j["n_features"] = n_features_;
        j["n_classes"] = n_classes_;
        auto& trees = j["trees"] = ordered_json::array();
        for (const auto& t : trees_) trees.push_back(t.state_json());
        return j;
    }

    void load_state(const json& state) override {
        n_features_ = state.at("n_features").get<std::size_t>();
        n_classes_ = state.at("n_classes").get<std::size_t>();
        trees_.clear();
        for (const auto& ts : state.at("trees")) {
            DecisionTree t(params_.tree, classification_, family_);
            t.load_state(ts);
            trees_.push_back(std::move(t));
        }
    }

    json params_json() const override {
        json p;
        if (params_.tree.max_depth) p["max_depth"] = *params_.tree.max_depth;
        else p["max_depth"] = nullptr;
        p["min_samples_split"] = params_.tree.min_samples_split;
        p["n_trees"] = params_.n_trees;
        p["bootstrap"] = params_.bootstrap;
        return p;
    }

private:
    ForestParams params_;
    bool classification_;
    Family family_;
    std::size_t n_classes_ = 0;
    std::vector<DecisionTree> trees_;
};

// ---------------------------------------------------------------------------
// Logistic regression (L2, one-vs-rest, gradient descent with backtracking)

class LogisticRegression : public Model {
public:
    explicit LogisticRegression(double c = 1.0, double tol = 1e-6, int max_iter = 1000)
        : c_(c), tol_(tol), max_iter_(max_iter) {
        if (c_ <= 0.0) throw std::invalid_argument("regularization C must be > 0");
    }

    Family family() const override { return Family::LogisticRegression; }

    void fit(const Matrix& X, const std::vector<double>& y) override {
        if (X.empty() || X.size() != y.size()) {
            throw std::invalid_argument("fit: empty data or target length mismatch");
        }
        n_features_ = X.front().size();
        n_classes_ = detail::resolve_label_count(y);
        weights_.assign(n_classes_, std::vector<double>(n_features_ + 1, 0.0));
        for (std::size_t cls = 0; cls < n_classes_; ++cls) {
            std::vector<double> target(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) {
                target[i] = static_cast<std::size_t>(y[i]) == cls ? 1.0 : -1.0;
            }
            fit_binary(X, target, weights_[cls]);
        }
    }

    std::vector<double> predict(const Matrix& X) const override {
        check_columns(X);
        std::vector<double> out;
        out.reserve(X.size());
        for (const auto& row : X) {
            std::size_t best = 0;
            double best_score = score(weights_[0], row);
            for (std::size_t cls = 1; cls < n_classes_; ++cls) {
                const double s = score(weights_[cls], row);
                if (s > best_score) {
                    best_score = s;
                    best = cls;
                }
            }
            out.push_back(static_cast<double>(best));
        }
        return out;
    }

    ordered_json state_json() const override {
        ordered_json j;
        j["n_features"] = n_features_;
        j["weights"] = weights_;
        return j;
    }

    void load_state(const json& state) override {
        n_features_ = state.at("n_features").get<std::size_t>();
        weights_ = state.at("weights").get<std::vector<std::vector<double>>>();
        n_classes_ = weights_.size();
    }

    json params_json() const override { return json{{"c", c_}}; }

private:
    static double score(const std::vector<double>& w, const std::vector<double>& x) {
        double s = w.back();  // intercept
        for (std::size_t f = 0; f < x.size(); ++f) s += w[f] * x[f];
        return s;
    }

    // Minimize (1/n) sum log(1+exp(-y s)) + lambda/2 ||w||^2 (intercept
    // unregularized), lambda = 1 / (C n).
    void fit_binary(const Matrix& X, const std::vector<double>& y,
                    std::vector<double>& w) const {
        const double n = static_cast<double>(X.size());
        const double lambda = 1.0 / (c_ * n);
        auto objective = [&](const std::vector<double>& wv) {
            double loss = 0.0;
            for (std::size_t i = 0; i < X.size(); ++i) {
                const double m = y[i] * score(wv, X[i]);
                loss += m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
            }
            loss /= n;
            for (std::size_t f = 0; f + 1 < wv.size(); ++f) loss += 0.5 * lambda * wv[f] * wv[f];
            return loss;
        };
        auto gradient = [&](const std::vector<double>& wv) {
            std::vector<double> g(wv.size(), 0.0);
            for (std::size_t i = 0; i < X.size(); ++i) {
                const double m = y[i] * score(wv, X[i]);
                const double sig = 1.0 / (1.0 + std::exp(m));  // d/ds log(1+e^{-ys})
                const double coef = -y[i] * sig / n;
                for (std::size_t f = 0; f < X[i].size(); ++f) g[f] += coef * X[i][f];
                g.back() += coef;
            }
            for (std::size_t f = 0; f + 1 < wv.size(); ++f) g[f] += lambda * wv[f];
            return g;
        };

        double step = 1.0;
        double f_cur = objective(w);
        for (int iter = 0; iter < max_iter_; ++iter) {
            const auto g = gradient(w);
            double g_inf = 0.0, g_norm2 = 0.0;
            for (double v : g) {
                g_inf = std::max(g_inf, std::abs(v));
                g_norm2 += v * v;
            }
            if (g_inf < tol_) break;
            while (step > 1e-12) {
                std::vector<double> trial = w;
                for (std::size_t f = 0; f < w.size(); ++f) trial[f] -= step * g[f];
                const double f_trial = objective(trial);
                if (f_trial <= f_cur - 1e-4 * step * g_norm2) {
                    w = std::move(trial);
                    f_cur = f_trial;
                    step *= 1.2;
                    break;
                }
                step *= 0.5;
            }
            if (step <= 1e-12) break;
        }
    }

    double c_;
    double tol_;
    int max_iter_;
    std::size_t n_classes_ = 0;
    std::vector<std::vector<double>> weights_;  // per class, [coef..., intercept]
};

// ---------------------------------------------------------------------------
// K-nearest neighbors

class KNearestNeighbors : public Model {
public:
    explicit KNearestNeighbors(int k = 5) : k_(k) {
        if (k_ < 1) throw std::invalid_argument("knn: k must be >= 1");
    }

    Family family() const override { return Family::KNN; }

    void fit(const Matrix& X, const std::vector<double>& y) override {
        if (X.empty() || X.size() != y.size()) {
            throw std::invalid_argument("fit: empty data or target length mismatch");
        }
        n_features_ = X.front().size();
        train_x_ = X;
        train_y_ = y;
        n_classes_ = detail::resolve_label_count(y);
    }

    std::vector<double> predict(const Matrix& X) const override {
        check_columns(X);
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_),
                                                    train_x_.size());
        std::vector<double> out;
        out.reserve(X.size());
        for (const auto& row : X) {
            std::vector<std::pair<double, std::size_t>> dists(train_x_.size());
            for (std::size_t i = 0; i < train_x_.size(); ++i) {
                double d2 = 0.0;
                for (std::size_t f = 0; f < row.size(); ++f) {
                    const double d = row[f] - train_x_[i][f];
                    d2 += d * d;
                }
                dists[i] = {d2, i};  // distance ties resolve to lower row index
            }
            std::partial_sort(dists.begin(),
                              dists.begin() + static_cast<std::ptrdiff_t>(k), dists.end());
            std::vector<long long> votes(n_classes_, 0);
            for (std::size_t i = 0; i < k; ++i) {
                ++votes[static_cast<std::size_t>(train_y_[dists[i].second])];
            }
            std::size_t best = 0;
            for (std::size_t c = 1; c < votes.size(); ++c) {
                if (votes[c] > votes[best]) best = c;
            }
            out.push_back(static_cast<double>(best));
        }
        return out;
    }

    ordered_json state_json() const override {
        ordered_json j;
        j["n_features"] = n_features_;
        j["k"] = k_;
        j["train_x"] = train_x_;
        j["train_y"] = train_y_;
        return j;
    }

    void load_state(const json& state) override {
        n_features_ = state.at("n_features").get<std::size_t>();
        k_ = state.at("k").get<int>();
        train_x_ = state.at("train_x").get<Matrix>();
        train_y_ = state.at("train_y").get<std::vector<double>>();
        n_classes_ = detail::resolve_label_count(train_y_);
    }

    json params_json() const override { return json{{"k", k_}}; }

private:
    int k_;
    std::size_t n_classes_ = 0;
    Matrix train_x_;
    std::vector<double> train_y_;
};

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

class GaussianNB : public Model {
public:
    Family family() const override { return Family::GaussianNB; }

    void fit(const Matrix& X, const std::vector<double>& y) override {
        if (X.empty() || X.size() != y.size()) {
            throw std::invalid_argument("fit: empty data or target length mismatch");
        }
        n_features_ = X.front().size();
        const std::size_t k = detail::resolve_label_count(y);
        mean_.assign(k, std::vector<double>(n_features_, 0.0));
        var_.assign(k, std::vector<double>(n_features_, 0.0));
        log_prior_.assign(k, -std::numeric_limits<double>::infinity());
        std::vector<long long> counts(k, 0);
        for (std::size_t i = 0; i < X.size(); ++i) {
            const auto cls = static_cast<std::size_t>(y[i]);
            ++counts[cls];
            for (std::size_t f = 0; f < n_features_; ++f) mean_[cls][f] += X[i][f];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (auto& v : mean_[c]) v /= static_cast<double>(counts[c]);
        }
        double max_var = 0.0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            const auto cls = static_cast<std::size_t>(y[i]);
            for (std::size_t f = 0; f < n_features_; ++f) {
                const double d = X[i][f] - mean_[cls][f];
                var_[cls][f] += d * d;
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            log_prior_[c] = std::log(static_cast<double>(counts[c]) /
                                     static_cast<double>(X.size()));
            for (auto& v : var_[c]) {
                v /= static_cast<double>(counts[c]);
                max_var = std::max(max_var, v);
            }
        }
        // Variance floor keeps degenerate (constant) features finite.
        const double floor = max_var > 0.0 ? 1e-9 * max_var : 1e-9;
        for (auto& row : var_) {
            for (auto& v : row) v = std::max(v, floor);
        }
    }

    std::vector<double> predict(const Matrix& X) const override {
        check_columns(X);
        std::vector<double> out;
        out.reserve(X.size());
        for (const auto& row : X) {
            std::size_t best = 0;
            double best_ll = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < mean_.size(); ++c) {
                double ll = log_prior_[c];
                if (!std::isfinite(ll)) continue;
                for (std::size_t f = 0; f < n_features_; ++f) {
                    const double d = row[f] - mean_[c][f];
                    constexpr double two_pi = 6.283185307179586;
                    ll += -0.5 * std::log(two_pi * var_[c][f]) -
                          d * d / (2.0 * var_[c][f]);
                }
                if (ll > best_ll) {
                    best_ll = ll;
                    best = c;
                }
            }
            out.push_back(static_cast<double>(best));
        }
        return out;
    }

    ordered_json state_json() const override {
        ordered_json j;
        j["n_features"] = n_features_;
        j["mean"] = mean_;
        j["var"] = var_;
        j["log_prior"] = log_prior_;
        return j;
    }

    void load_state(const json& state) override {
        n_features_ = state.at("n_features").get<std::size_t>();
        mean_ = state.at("mean").get<std::vector<std::vector<double>>>();
        var_ = state.at("var").get<std::vector<std::vector<double>>>();
        log_prior_ = state.at("log_prior").get<std::vector<double>>();
    }

private:
    std::vector<std::vector<double>> mean_, var_;
    std::vector<double> log_prior_;
};

// ---------------------------------------------------------------------------
// Linear regression (normal equations, ridge fallback on singular systems)

class LinearRegression : public Model {
public:
    Family family() const override { return Family::LinearRegression; }

    void fit(const Matrix& X, const std::vector<double>& y) override {
        if (X.empty() || X.size() != y.size()) {
            throw std::invalid_argument("fit: empty data or target length mismatch");
        }
        n_features_ = X.front().size();
        const std::size_t m = n_features_ + 1;  // + intercept
        std::vector<std::vector<double>> xtx(m, std::vector<double>(m, 0.0));
        std::vector<double> xty(m, 0.0);
        for (std::size_t i = 0; i < X.size(); ++i) {
            std::vector<double> row = X[i];
            row.push_back(1.0);
            for (std::size_t a = 0; a < m; ++a) {
                xty[a] += row[a] * y[i];
                for (std::size_t b = 0; b < m; ++b) xtx[a][b] += row[a] * row[b];
            }
        }
        if (!solve(xtx, xty, coef_)) {
            for (std::size_t a = 0; a < m; ++a) xtx[a][a] += 1e-10;
            if (!solve(xtx, xty, coef_)) {
                throw std::runtime_error("linear regression: singular system");
            }
        }
    }

    std::vector<double> predict(const Matrix& X) const override {
        check_columns(X);
        std::vector<double> out;
        out.reserve(X.size());
        for (const auto& row : X) {
            double s = coef_.back();
            for (std::size_t f = 0; f < row.size(); ++f) s += coef_[f] * row[f];
            out.push_back(s);
        }
        return out;
    }

    const std::vector<double>& coefficients() const { return coef_; }

    ordered_json state_json() const override {
        ordered_json j;
        j["n_features"] = n_features_;
        j["coef"] = coef_;
        return j;
    }

    void load_state(const json& state) override {
        n_features_ = state.at("n_features").get<std::size_t>();
        coef_ = state.at("coef").get<std::vector<double>>();
    }

private:
    // Gaussian elimination with partial pivoting; false when near-singular.
    static bool solve(std::vector<std::vector<double>> a, std::vector<double> b,
                      std::vector<double>& out) {
        const std::size_t m = b.size();
        double scale = 0.0;
        for (const auto& row : a) {
            for (double v : row) scale = std::max(scale, std::abs(v));
        }
        if (scale == 0.0) return false;
        for (std::size_t col = 0; col < m; ++col) {
            std::size_t pivot = col;
            for (std::size_t r = col + 1; r < m; ++r) {
                if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
            }
            if (std::abs(a[pivot][col]) < 1e-12 * scale) return false;
            std::swap(a[pivot], a[col]);
            std::swap(b[pivot], b[col]);
            for (std::size_t r = col + 1; r < m; ++r) {
                const double factor = a[r][col] / a[col][col];
                for (std::size_t c = col; c < m; ++c) a[r][c] -= factor * a[col][c];
                b[r] -= factor * b[col];
            }
        }
        out.assign(m, 0.0);
        for (std::size_t r = m; r-- > 0;) {
            double s = b[r];
            for (std::size_t c = r + 1; c < m; ++c) s -= a[r][c] * out[c];
            out[r] = s / a[r][r];
        }
        return true;
    }

    std::vector<double> coef_;  // [per-feature..., intercept]
};

// ---------------------------------------------------------------------------
// Factory, persistence, grid search

inline std::unique_ptr<Model> make_model(const ModelSpec& spec) {
    const json& p = spec.params;
    switch (spec.family) {
        case Family::DecisionTree:
        case Family::DecisionTreeRegressor: {
            TreeParams tp = tree_params_from_json(p, spec.seed);
            return std::make_unique<DecisionTree>(
                tp, spec.family == Family::DecisionTree, spec.family);
        }
        case Family::RandomForest:
        case Family::RandomForestRegressor: {
            ForestParams fp;
            json tree_p = p;
            if (!tree_p.contains("max_features")) tree_p["max_features"] = "sqrt";
            fp.tree = tree_params_from_json(tree_p, 0);
            fp.n_trees = p.value("n_trees", 100);
            fp.bootstrap = p.value("bootstrap", true);
            fp.seed = spec.seed;
            return std::make_unique<RandomForest>(
                fp, spec.family == Family::RandomForest, spec.family);
        }
        case Family::LogisticRegression:
            return std::make_unique<LogisticRegression>(
                p.value("c", 1.0), p.value("tol", 1e-6), p.value("max_iter", 1000));
        case Family::KNN:
            return std::make_unique<KNearestNeighbors>(p.value("k", 5));
        case Family::GaussianNB:
            return std::make_unique<GaussianNB>();
        case Family::LinearRegression:
            return std::make_unique<LinearRegression>();
    }
    throw std::invalid_argument("unknown model family");
}

inline ordered_json model_to_json(const Model& model) {
    ordered_json j;
    j["family"] = to_string(model.family());
    j["params"] = model.params_json();
    j["state"] = model.state_json();
    return j;
}

inline std::unique_ptr<Model> model_from_json(const json& j) {
    ModelSpec spec;
    spec.family = family_from_string(j.at("family").get<std::string>());
    spec.params = j.value("params", json::object());
    auto model = make_model(spec);
    model->load_state(j.at("state"));
    return model;
}

struct GridPoint {
    json params;
    std::vector<double> fold_scores;
    double mean_score = 0.0;
};

struct GridSearchResult {
    json best_params;
    std::size_t best_index = 0;
    std::vector<GridPoint> table;
};

enum class Scoring { Accuracy, RSquared };

namespace detail {

inline double fold_score(const ModelSpec& spec, const Matrix& X,
                         const std::vector<double>& y,
                         const std::vector<std::size_t>& fold, Scoring scoring) {
    std::vector<bool> in_fold(X.size(), false);
    for (std::size_t i : fold) in_fold[i] = true;
    Matrix train_x, test_x;
    std::vector<double> train_y, test_y;
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (in_fold[i]) {
            test_x.push_back(X[i]);
            test_y.push_back(y[i]);
        } else {
            train_x.push_back(X[i]);
            train_y.push_back(y[i]);
        }
    }
    auto model = make_model(spec);
    model->fit(train_x, train_y);
    const auto pred = model->predict(test_x);
    if (scoring == Scoring::Accuracy) {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (static_cast<int>(pred[i]) == static_cast<int>(test_y[i])) ++correct;
        }
        return test_y.empty() ? 0.0
                              : static_cast<double>(correct) /
                                    static_cast<double>(test_y.size());
    }
    double mean = 0.0;
    for (double t : test_y) mean += t;
    mean /= static_cast<double>(test_y.size());
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < test_y.size(); ++i) {
        ss_tot += (test_y[i] - mean) * (test_y[i] - mean);
        ss_res += (test_y[i] - pred[i]) * (test_y[i] - pred[i]);
    }
    return ss_tot == 0.0 ? 0.0 : 1.0 - ss_res / ss_tot;
}

}  // namespace detail

// Exhaustive evaluation of every grid point under the given CV folds; best
// point = highest mean validation score, ties to the earliest grid entry.
inline GridSearchResult grid_search(const ModelSpec& base,
                                    const std::vector<json>& grid,
                                    const Matrix& X, const std::vector<double>& y,
                                    const std::vector<std::vector<std::size_t>>& folds,
                                    Scoring scoring = Scoring::Accuracy) {
    if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");
    GridSearchResult result;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        ModelSpec spec = base;
        for (const auto& [key, value] : grid[g].items()) spec.params[key] = value;
        GridPoint point;
        point.params = grid[g];
        double sum = 0.0;
        for (const auto& fold : folds) {
            const double s = detail::fold_score(spec, X, y, fold, scoring);
            point.fold_scores.push_back(s);
            sum += s;
        }
        point.mean_score = sum / static_cast<double>(folds.size());
        if (point.mean_score > best_score) {
            best_score = point.mean_score;
            result.best_index = g;
            result.best_params = grid[g];
        }
        result.table.push_back(std::move(point));
    }
    return result;
}

// Declared default grids; overridable via a grid file.
inline std::vector<json> default_grid(Family family) {
    switch (family) {
        case Family::DecisionTree:
        case Family::DecisionTreeRegressor:
        case Family::RandomForest:
        case Family::RandomForestRegressor: {
            std::vector<json> grid;
            const std::vector<json> depths = {4, 8, 16, nullptr};
            for (const auto& d : depths) {
                for (int mss : {2, 10}) {
                    grid.push_back(json{{"max_depth", d}, {"min_samples_split", mss}});
                }
            }
            return grid;
        }
        case Family::KNN:
            return {json{{"k", 3}}, json{{"k", 5}}, json{{"k", 11}}};
        case Family::LogisticRegression:
            return {json{{"c", 0.1}}, json{{"c", 1.0}}, json{{"c", 10.0}}};
        case Family::GaussianNB:
        case Family::LinearRegression:
            return {json::object()};
    }
    return {json::object()};
}

}  // namespace altsent::models
