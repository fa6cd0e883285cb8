#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "altsent/balance.hpp"
#include "altsent/eval.hpp"
#include "altsent/features.hpp"
#include "altsent/models.hpp"
#include "altsent/rng.hpp"

namespace altsent::pipeline {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

enum class Task { Binary, ThreeClass, Regression };

inline const char* to_string(Task t) {
    switch (t) {
        case Task::Binary: return "binary";
        case Task::ThreeClass: return "three-class";
        case Task::Regression: return "regression";
    }
    return "?";
}

inline Task task_from_string(const std::string& s) {
    if (s == "binary") return Task::Binary;
    if (s == "three-class") return Task::ThreeClass;
    if (s == "regression") return Task::Regression;
    throw std::invalid_argument("unknown task: " + s);
}

struct TrainConfig {
    Task task = Task::Binary;
    models::Family family = models::Family::RandomForest;
    json params = json::object();
    std::vector<json> grid;  // empty -> declared default grid
    double train_fraction = 0.8;
    int cv_folds = 10;
    int smote_k = 5;
    std::uint64_t seed = 0;
};

struct TrainResult {
    std::vector<std::string> classes;  // empty for regression
    models::ScalerParams scaler;
    std::unique_ptr<models::Model> model;
    models::GridSearchResult grid_result;
    // classification
    eval::ConfusionMatrix confusion;
    eval::MetricReport report;
    // regression
    double test_mse = 0.0;
    double test_r2 = 0.0;
    std::vector<std::string> warnings;
    std::vector<double> importances;
    bool has_importances = false;
};

namespace detail {

inline int class_index(sentiment::Polarity p, Task task) {
    if (task == Task::Binary) {
        switch (p) {
            case sentiment::Polarity::Negative: return 0;
            case sentiment::Polarity::Positive: return 1;
            default: return -1;  // neutral rows are excluded
        }
    }
    switch (p) {
        case sentiment::Polarity::Negative: return 0;
        case sentiment::Polarity::Neutral: return 1;
        case sentiment::Polarity::Positive: return 2;
    }
    return -1;
}

inline std::vector<std::string> class_names(Task task) {
    if (task == Task::Binary) return {"negative", "positive"};
    return {"negative", "neutral", "positive"};
}

}  // namespace detail

// Fixed order: drop rows per task -> split -> fit scaler on the training
// portion -> SMOTE the training portion (classification) -> grid-search CV
// -> fit best -> evaluate on the held-out portion.
inline TrainResult train(const std::vector<features::ArticleFeatures>& rows,
                         const TrainConfig& cfg) {
    if (rows.empty()) throw std::invalid_argument("train: empty feature set");
    const bool regression = cfg.task == Task::Regression;
    if (regression != models::is_regressor(cfg.family)) {
        throw std::invalid_argument("model family does not match task");
    }

    models::Matrix X;
    std::vector<double> y;
    std::vector<int> y_int;
    for (const auto& f : rows) {
        if (regression) {
            const auto r = f.row();
            X.emplace_back(r.begin(), r.end());
            y.push_back(f.target_score);
        } else {
            const int cls = detail::class_index(f.target_label, cfg.task);
            if (cls < 0) continue;
            const auto r = f.row();
            X.emplace_back(r.begin(), r.end());
            y_int.push_back(cls);
        }
    }

    TrainResult result;
    if (!regression) {
        result.classes = detail::class_names(cfg.task);
        std::vector<long long> counts(result.classes.size(), 0);
        for (int c : y_int) ++counts[static_cast<std::size_t>(c)];
        for (std::size_t c = 0; c < counts.size(); ++c) {
            if (counts[c] < 2) {
                throw std::invalid_argument("class '" + result.classes[c] +
                                            "' has fewer than 2 samples; "
                                            "stratification impossible");
            }
        }
    }

    models::SplitSpec split_spec;
    split_spec.train_fraction = cfg.train_fraction;
    split_spec.seed = rng::derive_seed(cfg.seed, 0);
    split_spec.stratified = !regression;
    std::vector<int> split_labels =
        regression ? std::vector<int>(X.size(), 0) : y_int;
    if (regression) {
        // plain shuffled split
        split_spec.stratified = false;
    }
    const auto split = models::split_train_test(split_labels, split_spec);

    models::Matrix train_x_raw, test_x_raw;
    std::vector<double> train_y, test_y;
    std::vector<int> train_y_int, test_y_int;
    for (std::size_t i : split.train) {
        train_x_raw.push_back(X[i]);
        if (regression) train_y.push_back(y[i]);
        else train_y_int.push_back(y_int[i]);
    }
    for (std::size_t i : split.test) {
        test_x_raw.push_back(X[i]);
        if (regression) test_y.push_back(y[i]);
        else test_y_int.push_back(y_int[i]);
    }

    result.scaler = models::zscore_fit(train_x_raw);
    models::Matrix train_x = models::zscore_apply(train_x_raw, result.scaler);
    models::Matrix test_x = models::zscore_apply(test_x_raw, result.scaler);

    if (!regression) {
        balance::SmoteConfig smote_cfg;
        smote_cfg.k_neighbors = cfg.smote_k;
        smote_cfg.seed = rng::derive_seed(cfg.seed, 1);
        auto [bx, by] = balance::smote(train_x, train_y_int, smote_cfg);
        train_x = std::move(bx);
        train_y_int = std::move(by);
        train_y.assign(train_y_int.size(), 0.0);
        for (std::size_t i = 0; i < train_y_int.size(); ++i) {
            train_y[i] = static_cast<double>(train_y_int[i]);
        }
    }

    models::ModelSpec base;
    base.family = cfg.family;
    base.params = cfg.params;
    base.seed = rng::derive_seed(cfg.seed, 2);
    const std::vector<json> grid =
        cfg.grid.empty() ? models::default_grid(cfg.family) : cfg.grid;
    const auto folds =
        regression
            ? models::kfold(train_x.size(), cfg.cv_folds, rng::derive_seed(cfg.seed, 3))
            : models::stratified_kfold(train_y_int, cfg.cv_folds,
                                       rng::derive_seed(cfg.seed, 3));
    result.grid_result = models::grid_search(
        base, grid, train_x, train_y, folds,
        regression ? models::Scoring::RSquared : models::Scoring::Accuracy);

    models::ModelSpec best = base;
    for (const auto& [key, value] : result.grid_result.best_params.items()) {
        best.params[key] = value;
    }
    best.seed = rng::derive_seed(cfg.seed, 4);
    result.model = models::make_model(best);
    result.model->fit(train_x, train_y);

    const auto pred = result.model->predict(test_x);
    if (regression) {
        result.test_mse = eval::mse(test_y, pred);
        result.test_r2 = eval::r_squared(test_y, pred, &result.warnings);
    } else {
        std::vector<std::string> truth, predicted;
        for (int c : test_y_int) truth.push_back(result.classes[static_cast<std::size_t>(c)]);
        for (double p : pred) {
            predicted.push_back(result.classes[static_cast<std::size_t>(p)]);
        }
        result.confusion = eval::confusion_matrix(truth, predicted, result.classes);
        result.report = eval::weighted_metrics(result.confusion);
    }

    if (cfg.family == models::Family::DecisionTree ||
        cfg.family == models::Family::RandomForest ||
        cfg.family == models::Family::DecisionTreeRegressor ||
        cfg.family == models::Family::RandomForestRegressor) {
        result.importances = result.model->feature_importances();
        result.has_importances = true;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Model persistence wrapper (scaler + class order + model state)

inline ordered_json model_file_json(const TrainResult& result, Task task) {
    ordered_json j;
    j["format"] = "altsent-model";
    j["version"] = 1;
    j["task"] = to_string(task);
    j["classes"] = result.classes;
    j["scaler"]["mean"] = result.scaler.mean;
    j["scaler"]["std"] = result.scaler.stddev;
    j["model"] = models::model_to_json(*result.model);
    return j;
}

struct LoadedModel {
    Task task = Task::Binary;
    std::vector<std::string> classes;
    models::ScalerParams scaler;
    std::unique_ptr<models::Model> model;
};

inline LoadedModel load_model_file(const json& j) {
    if (j.value("format", std::string{}) != "altsent-model") {
        throw std::runtime_error("not an altsent model file");
    }
    LoadedModel lm;
    lm.task = task_from_string(j.at("task").get<std::string>());
    lm.classes = j.value("classes", std::vector<std::string>{});
    lm.scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
    lm.scaler.stddev = j.at("scaler").at("std").get<std::vector<double>>();
    lm.model = models::model_from_json(j.at("model"));
    return lm;
}

}  // namespace altsent::pipeline
