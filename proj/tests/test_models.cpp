#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "altsent/models.hpp"
#include "altsent/rng.hpp"

using namespace altsent;
using models::Matrix;

namespace {

Matrix random_matrix(rng::Engine& eng, std::size_t n, std::size_t m) {
    Matrix X(n, std::vector<double>(m));
    for (auto& row : X) {
        for (auto& v : row) v = eng.next_unit() * 10 - 5;
    }
    return X;
}

// Naive re-enumeration of every split by direct counting, same criterion and
// tie rules as the production tree, depth limited. Used as an independent
// check of the incremental split scan.
struct NaiveCart {
    int max_depth;

    static double gini_of(const std::vector<int>& labels) {
        std::map<int, long long> counts;
        for (int l : labels) ++counts[l];
        double s = 0.0;
        for (const auto& [l, c] : counts) {
            const double p = double(c) / double(labels.size());
            s += p * p;
        }
        return 1.0 - s;
    }

    static int majority(const std::vector<int>& labels) {
        std::map<int, long long> counts;
        for (int l : labels) ++counts[l];
        int best = counts.begin()->first;
        for (const auto& [l, c] : counts) {
            if (c > counts.at(best)) best = l;
        }
        return best;
    }

    // Returns number of correctly classified training points in this node.
    long long fit_correct(const Matrix& X, const std::vector<int>& y,
                          std::vector<std::size_t> idx, int depth) const {
        std::vector<int> labels;
        for (auto i : idx) labels.push_back(y[i]);
        const int maj = majority(labels);
        long long leaf_correct = 0;
        for (int l : labels) {
            if (l == maj) ++leaf_correct;
        }
        if (depth >= max_depth || gini_of(labels) <= 0.0 || idx.size() < 2) {
            return leaf_correct;
        }
        const double parent = gini_of(labels);
        double best_decrease = -1.0;
        std::size_t best_f = 0;
        double best_t = 0.0;
        bool found = false;
        for (std::size_t f = 0; f < X.front().size(); ++f) {
            std::set<double> values;
            for (auto i : idx) values.insert(X[i][f]);
            std::vector<double> sorted(values.begin(), values.end());
            for (std::size_t v = 0; v + 1 < sorted.size(); ++v) {
                const double t = (sorted[v] + sorted[v + 1]) / 2.0;
                std::vector<int> left, right;
                for (auto i : idx) (X[i][f] <= t ? left : right).push_back(y[i]);
                const double child = (double(left.size()) * gini_of(left) +
                                      double(right.size()) * gini_of(right)) /
                                     double(idx.size());
                if (parent - child > best_decrease) {
                    best_decrease = parent - child;
                    best_f = f;
                    best_t = t;
                    found = true;
                }
            }
        }
        if (!found) return leaf_correct;
        std::vector<std::size_t> left, right;
        for (auto i : idx) (X[i][best_f] <= best_t ? left : right).push_back(i);
        return fit_correct(X, y, left, depth + 1) +
               fit_correct(X, y, right, depth + 1);
    }

    double training_accuracy(const Matrix& X, const std::vector<int>& y) const {
        std::vector<std::size_t> idx(X.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        return double(fit_correct(X, y, idx, 0)) / double(X.size());
    }
};

std::vector<double> to_double(const std::vector<int>& y) {
    return {y.begin(), y.end()};
}

}  // namespace

TEST_CASE("zscore standardization") {
    SECTION("hand fixture {1,2,3}") {
        Matrix X = {{1}, {2}, {3}};
        auto p = models::zscore_fit(X);
        CHECK(p.mean[0] == Catch::Approx(2.0));
        CHECK(p.stddev[0] == Catch::Approx(std::sqrt(2.0 / 3.0)));
        auto Z = models::zscore_apply(X, p);
        CHECK(Z[0][0] == Catch::Approx(-1.2247).margin(1e-4));
        CHECK(Z[1][0] == Catch::Approx(0.0).margin(1e-12));
        CHECK(Z[2][0] == Catch::Approx(1.2247).margin(1e-4));
    }
    SECTION("constant column maps to zeros") {
        Matrix X = {{5, 1}, {5, 2}, {5, 3}};
        auto Z = models::zscore_apply(X, models::zscore_fit(X));
        for (const auto& row : Z) CHECK(row[0] == 0.0);
    }
    SECTION("fitted-then-applied training matrix is standard") {
        rng::Engine eng(2);
        auto X = random_matrix(eng, 40, 3);
        auto Z = models::zscore_apply(X, models::zscore_fit(X));
        for (std::size_t c = 0; c < 3; ++c) {
            double mean = 0, var = 0;
            for (const auto& row : Z) mean += row[c];
            mean /= double(Z.size());
            for (const auto& row : Z) var += (row[c] - mean) * (row[c] - mean);
            var /= double(Z.size());
            CHECK(std::abs(mean) < 1e-9);
            CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
        }
    }
    SECTION("column-count mismatch on apply") {
        auto p = models::zscore_fit({{1, 2}});
        CHECK_THROWS_AS(models::zscore_apply({{1}}, p), std::invalid_argument);
    }
}

TEST_CASE("split_train_test") {
    SECTION("10 rows, fraction 0.8 gives 8/2") {
        std::vector<int> y(10, 0);
        models::SplitSpec spec;
        spec.stratified = false;
        auto s = models::split_train_test(y, spec);
        CHECK(s.train.size() == 8);
        CHECK(s.test.size() == 2);
    }
    SECTION("stratified 50/50 with n=20 gives 8/8 in train") {
        std::vector<int> y;
        for (int i = 0; i < 10; ++i) y.push_back(0);
        for (int i = 0; i < 10; ++i) y.push_back(1);
        auto s = models::split_train_test(y, {});
        std::map<int, int> train_counts;
        for (auto i : s.train) ++train_counts[y[i]];
        CHECK(train_counts[0] == 8);
        CHECK(train_counts[1] == 8);
    }
    SECTION("partition is disjoint and exhaustive") {
        std::vector<int> y = {0, 0, 0, 1, 1, 1, 0, 1, 0, 1};
        auto s = models::split_train_test(y, {});
        std::set<std::size_t> all(s.train.begin(), s.train.end());
        all.insert(s.test.begin(), s.test.end());
        CHECK(all.size() == y.size());
        CHECK(s.train.size() + s.test.size() == y.size());
    }
    SECTION("same seed gives identical partition") {
        std::vector<int> y = {0, 0, 0, 0, 1, 1, 1, 1};
        models::SplitSpec spec;
        spec.seed = 31;
        auto a = models::split_train_test(y, spec);
        auto b = models::split_train_test(y, spec);
        CHECK(a.train == b.train);
        CHECK(a.test == b.test);
    }
    SECTION("class of size < 2 rejected with class named") {
        std::vector<int> y = {0, 0, 0, 1};
        CHECK_THROWS_WITH(models::split_train_test(y, {}),
                          Catch::Matchers::ContainsSubstring("1"));
    }
}

TEST_CASE("stratified_kfold") {
    SECTION("leave-one-out on balanced single-class data") {
        std::vector<int> y(6, 0);
        auto folds = models::stratified_kfold(y, 6, 0);
        for (const auto& f : folds) CHECK(f.size() == 1);
    }
    SECTION("100 rows, k=10 gives folds of 10") {
        std::vector<int> y;
        for (int i = 0; i < 50; ++i) y.push_back(0);
        for (int i = 0; i < 50; ++i) y.push_back(1);
        auto folds = models::stratified_kfold(y, 10, 1);
        for (const auto& f : folds) CHECK(f.size() == 10);
    }
    SECTION("60/40 data with k=10 gives 6/4 per fold") {
        std::vector<int> y;
        for (int i = 0; i < 60; ++i) y.push_back(0);
        for (int i = 0; i < 40; ++i) y.push_back(1);
        auto folds = models::stratified_kfold(y, 10, 2);
        for (const auto& f : folds) {
            int c0 = 0, c1 = 0;
            for (auto i : f) (y[i] == 0 ? c0 : c1)++;
            CHECK(c0 == 6);
            CHECK(c1 == 4);
        }
    }
    SECTION("folds partition all indices") {
        std::vector<int> y = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
        auto folds = models::stratified_kfold(y, 3, 5);
        std::set<std::size_t> all;
        for (const auto& f : folds) all.insert(f.begin(), f.end());
        CHECK(all.size() == y.size());
    }
    SECTION("k larger than smallest class is rejected") {
        std::vector<int> y = {0, 0, 0, 0, 1, 1};
        CHECK_THROWS_AS(models::stratified_kfold(y, 3, 0), std::invalid_argument);
    }
}

TEST_CASE("decision tree") {
    SECTION("single-class training data always predicts that class") {
        rng::Engine eng(7);
        auto X = random_matrix(eng, 15, 2);
        std::vector<double> y(15, 1.0);
        models::DecisionTree tree({}, true, models::Family::DecisionTree);
        tree.fit(X, y);
        for (double p : tree.predict(X)) CHECK(p == 1.0);
    }
    SECTION("unlimited depth reaches 100% training accuracy on conflict-free data") {
        rng::Engine eng(8);
        for (int trial = 0; trial < 10; ++trial) {
            auto X = random_matrix(eng, 30, 3);
            std::vector<double> y;
            for (const auto& row : X) y.push_back(row[0] + row[1] > 0 ? 1.0 : 0.0);
            models::DecisionTree tree({}, true, models::Family::DecisionTree);
            tree.fit(X, y);
            CHECK(tree.predict(X) == y);
        }
    }
    SECTION("depth-2 CART matches the naive exhaustive-split oracle") {
        rng::Engine eng(9);
        for (int trial = 0; trial < 100; ++trial) {
            auto X = random_matrix(eng, 12, 2);
            std::vector<int> y;
            for (std::size_t i = 0; i < 12; ++i) {
                y.push_back(static_cast<int>(eng.next_below(2)));
            }
            models::TreeParams params;
            params.max_depth = 2;
            models::DecisionTree tree(params, true, models::Family::DecisionTree);
            tree.fit(X, to_double(y));
            const auto pred = tree.predict(X);
            long long correct = 0;
            for (std::size_t i = 0; i < 12; ++i) {
                if (static_cast<int>(pred[i]) == y[i]) ++correct;
            }
            const double acc = double(correct) / 12.0;
            CHECK(acc == NaiveCart{2}.training_accuracy(X, y));
        }
    }
    SECTION("predictions invariant under positive affine rescaling of a column") {
        rng::Engine eng(10);
        auto X = random_matrix(eng, 25, 3);
        std::vector<double> y;
        for (const auto& row : X) y.push_back(row[1] > 0 ? 1.0 : 0.0);
        models::DecisionTree tree({}, true, models::Family::DecisionTree);
        tree.fit(X, y);
        auto scaled = X;
        for (auto& row : scaled) row[1] = 7.5 * row[1] + 3.0;
        models::DecisionTree tree2({}, true, models::Family::DecisionTree);
        tree2.fit(scaled, y);
        auto probe = random_matrix(eng, 10, 3);
        auto probe_scaled = probe;
        for (auto& row : probe_scaled) row[1] = 7.5 * row[1] + 3.0;
        CHECK(tree.predict(probe) == tree2.predict(probe_scaled));
    }
    SECTION("regression tree predicts leaf means") {
        Matrix X = {{0}, {1}, {10}, {11}};
        std::vector<double> y = {1.0, 2.0, 9.0, 11.0};
        models::TreeParams params;
        params.max_depth = 1;
        models::DecisionTree tree(params, false, models::Family::DecisionTreeRegressor);
        tree.fit(X, y);
        auto p = tree.predict({{0.5}, {10.5}});
        CHECK(p[0] == Catch::Approx(1.5));
        CHECK(p[1] == Catch::Approx(10.0));
    }
    SECTION("predict before fit is a usage error") {
        models::DecisionTree tree({}, true, models::Family::DecisionTree);
        CHECK_THROWS_AS(tree.predict({{1.0}}), std::logic_error);
    }
    SECTION("feature-count mismatch is an argument error") {
        models::DecisionTree tree({}, true, models::Family::DecisionTree);
        tree.fit({{1, 2}, {3, 4}}, {0.0, 1.0});
        CHECK_THROWS_AS(tree.predict({{1.0}}), std::invalid_argument);
    }
}

TEST_CASE("random forest") {
    SECTION("n_trees=1, bootstrap off, max_features=all reproduces the tree") {
        rng::Engine eng(11);
        for (int trial = 0; trial < 20; ++trial) {
            auto X = random_matrix(eng, 20, 3);
            std::vector<double> y;
            for (const auto& row : X) {
                y.push_back(row[0] + 0.3 * row[2] > 0 ? 1.0 : 0.0);
            }
            models::ModelSpec forest_spec;
            forest_spec.family = models::Family::RandomForest;
            forest_spec.params = {{"n_trees", 1},
                                  {"bootstrap", false},
                                  {"max_features", "all"}};
            forest_spec.seed = trial;
            auto forest = models::make_model(forest_spec);
            forest->fit(X, y);

            models::ModelSpec tree_spec;
            tree_spec.family = models::Family::DecisionTree;
            tree_spec.seed = trial;
            auto tree = models::make_model(tree_spec);
            tree->fit(X, y);

            auto probe = random_matrix(eng, 15, 3);
            CHECK(forest->predict(probe) == tree->predict(probe));
        }
    }
    SECTION("deterministic per seed") {
        rng::Engine eng(12);
        auto X = random_matrix(eng, 30, 4);
        std::vector<double> y;
        for (const auto& row : X) y.push_back(row[0] > 0 ? 1.0 : 0.0);
        models::ModelSpec spec;
        spec.family = models::Family::RandomForest;
        spec.params = {{"n_trees", 15}};
        spec.seed = 99;
        auto a = models::make_model(spec);
        auto b = models::make_model(spec);
        a->fit(X, y);
        b->fit(X, y);
        auto probe = random_matrix(eng, 10, 4);
        CHECK(a->predict(probe) == b->predict(probe));
        CHECK(a->feature_importances() == b->feature_importances());
    }
}

TEST_CASE("feature importances") {
    SECTION("labels a function of feature 0 concentrate importance there") {
        rng::Engine eng(13);
        auto X = random_matrix(eng, 100, 4);
        std::vector<double> y;
        for (const auto& row : X) y.push_back(row[0] > 0 ? 1.0 : 0.0);
        models::ModelSpec spec;
        spec.family = models::Family::RandomForest;
        spec.params = {{"n_trees", 30}};
        spec.seed = 4;
        auto forest = models::make_model(spec);
        forest->fit(X, y);
        auto imp = forest->feature_importances();
        CHECK(imp[0] > 0.9);
    }
    SECTION("importance vector sums to 1") {
        rng::Engine eng(14);
        auto X = random_matrix(eng, 40, 5);
        std::vector<double> y;
        for (const auto& row : X) y.push_back(row[2] + row[3] > 0 ? 1.0 : 0.0);
        models::DecisionTree tree({}, true, models::Family::DecisionTree);
        tree.fit(X, y);
        double sum = 0.0;
        for (double v : tree.feature_importances()) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == Catch::Approx(1.0).margin(1e-9));
    }
    SECTION("pure-noise labels never concentrate above 0.6 across 10 seeds") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            rng::Engine eng(1000 + seed);
            auto X = random_matrix(eng, 80, 4);
            std::vector<double> y;
            for (std::size_t i = 0; i < X.size(); ++i) {
                y.push_back(static_cast<double>(eng.next_below(2)));
            }
            models::ModelSpec spec;
            spec.family = models::Family::RandomForest;
            spec.params = {{"n_trees", 25}};
            spec.seed = seed;
            auto forest = models::make_model(spec);
            forest->fit(X, y);
            for (double v : forest->feature_importances()) CHECK(v < 0.6);
        }
    }
    SECTION("non-tree model is a usage error") {
        models::LogisticRegression lr;
        lr.fit({{0.0}, {1.0}}, {0.0, 1.0});
        CHECK_THROWS_AS(lr.feature_importances(), std::logic_error);
    }
}

TEST_CASE("logistic regression, knn, naive bayes") {
    rng::Engine eng(15);
    auto X = random_matrix(eng, 60, 2);
    std::vector<double> y;
    for (const auto& row : X) y.push_back(row[0] + row[1] > 1.0 ? 1.0 : 0.0);

    SECTION("logistic separates a linearly separable set") {
        models::LogisticRegression lr;
        lr.fit(X, y);
        auto pred = lr.predict(X);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (pred[i] == y[i]) ++correct;
        }
        CHECK(double(correct) / double(y.size()) > 0.95);
    }
    SECTION("knn with k=1 predicts training labels") {
        models::KNearestNeighbors knn(1);
        knn.fit(X, y);
        CHECK(knn.predict(X) == y);
    }
    SECTION("single-class data predicts that class in every family") {
        std::vector<double> ones(X.size(), 0.0);
        for (auto family :
             {models::Family::DecisionTree, models::Family::RandomForest,
              models::Family::LogisticRegression, models::Family::KNN,
              models::Family::GaussianNB}) {
            models::ModelSpec spec;
            spec.family = family;
            if (family == models::Family::RandomForest) spec.params["n_trees"] = 5;
            auto model = models::make_model(spec);
            model->fit(X, ones);
            for (double p : model->predict(X)) CHECK(p == 0.0);
        }
    }
    SECTION("gaussian nb recovers well-separated clusters") {
        Matrix C;
        std::vector<double> labels;
        for (int i = 0; i < 30; ++i) {
            C.push_back({eng.next_unit() + 10.0, eng.next_unit() - 10.0});
            labels.push_back(0.0);
            C.push_back({eng.next_unit() - 10.0, eng.next_unit() + 10.0});
            labels.push_back(1.0);
        }
        models::GaussianNB nb;
        nb.fit(C, labels);
        CHECK(nb.predict(C) == labels);
    }
}

TEST_CASE("linear regression") {
    SECTION("recovers exact affine coefficients") {
        rng::Engine eng(16);
        Matrix X = random_matrix(eng, 30, 2);
        std::vector<double> y;
        for (const auto& row : X) y.push_back(2.0 * row[0] - row[1] + 3.0);
        models::LinearRegression lr;
        lr.fit(X, y);
        CHECK(lr.coefficients()[0] == Catch::Approx(2.0).margin(1e-8));
        CHECK(lr.coefficients()[1] == Catch::Approx(-1.0).margin(1e-8));
        CHECK(lr.coefficients()[2] == Catch::Approx(3.0).margin(1e-8));
        auto pred = lr.predict(X);
        for (std::size_t i = 0; i < y.size(); ++i) {
            CHECK(pred[i] == Catch::Approx(y[i]).margin(1e-8));
        }
    }
    SECTION("ridge fallback handles duplicated columns") {
        Matrix X = {{1, 1}, {2, 2}, {3, 3}, {4, 4}};
        std::vector<double> y = {2, 4, 6, 8};
        models::LinearRegression lr;
        lr.fit(X, y);
        auto pred = lr.predict(X);
        for (std::size_t i = 0; i < y.size(); ++i) {
            CHECK(pred[i] == Catch::Approx(y[i]).margin(1e-4));
        }
    }
}

TEST_CASE("grid search") {
    SECTION("single-point grid returns that point") {
        rng::Engine eng(17);
        auto X = random_matrix(eng, 40, 2);
        std::vector<double> y;
        for (const auto& row : X) y.push_back(row[0] > 0 ? 1.0 : 0.0);
        std::vector<int> labels(y.begin(), y.end());
        models::ModelSpec base;
        base.family = models::Family::DecisionTree;
        auto folds = models::stratified_kfold(labels, 4, 3);
        auto result = models::grid_search(
            base, {nlohmann::json{{"max_depth", 3}}}, X, y, folds);
        CHECK(result.table.size() == 1);
        CHECK(result.best_params.at("max_depth") == 3);
    }
    SECTION("depth 8 beats depth 1 on xor-like data") {
        rng::Engine eng(18);
        Matrix X;
        std::vector<double> y;
        for (int rep = 0; rep < 15; ++rep) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    X.push_back({a + eng.next_unit() * 0.1,
                                 b + eng.next_unit() * 0.1});
                    y.push_back(double(a ^ b));
                }
            }
        }
        std::vector<int> labels(y.begin(), y.end());
        models::ModelSpec base;
        base.family = models::Family::DecisionTree;
        auto folds = models::stratified_kfold(labels, 5, 4);
        auto result = models::grid_search(
            base,
            {nlohmann::json{{"max_depth", 1}}, nlohmann::json{{"max_depth", 8}}},
            X, y, folds);
        REQUIRE(result.table.size() == 2);
        // Oracle: direct comparison of the two CV means.
        const double s1 = result.table[0].mean_score;
        const double s8 = result.table[1].mean_score;
        CHECK(s8 > s1);
        CHECK(result.best_params.at("max_depth") == 8);
    }
    SECTION("empty grid is an argument error") {
        CHECK_THROWS_AS(models::grid_search({}, {}, {{0.0}}, {0.0}, {{0}}),
                        std::invalid_argument);
    }
}

TEST_CASE("model persistence round-trips predictions") {
    rng::Engine eng(19);
    auto X = random_matrix(eng, 50, 3);
    std::vector<double> y_class;
    std::vector<double> y_reg;
    for (const auto& row : X) {
        y_class.push_back(row[0] + row[1] > 0 ? 1.0 : 0.0);
        y_reg.push_back(row[0] * 2 - row[2]);
    }
    auto probe = random_matrix(eng, 20, 3);

    for (auto family :
         {models::Family::DecisionTree, models::Family::RandomForest,
          models::Family::LogisticRegression, models::Family::KNN,
          models::Family::GaussianNB, models::Family::LinearRegression,
          models::Family::DecisionTreeRegressor,
          models::Family::RandomForestRegressor}) {
        models::ModelSpec spec;
        spec.family = family;
        spec.seed = 5;
        if (family == models::Family::RandomForest ||
            family == models::Family::RandomForestRegressor) {
            spec.params["n_trees"] = 10;
        }
        auto model = models::make_model(spec);
        model->fit(X, models::is_regressor(family) ? y_reg : y_class);
        auto j = models::model_to_json(*model);
        auto restored = models::model_from_json(nlohmann::json::parse(j.dump()));
        CHECK(restored->predict(probe) == model->predict(probe));
    }
}
