#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "altsent/eval.hpp"
#include "altsent/rng.hpp"

using namespace altsent;

namespace {

const std::vector<std::string> kBinary = {"+", "-"};

eval::ConfusionMatrix binary_fixture() {
    // true (+,+,-,-,+,-), pred (+,-,+,-,+,-) -> TP=2, FN=1, FP=1, TN=2
    return eval::confusion_matrix({"+", "+", "-", "-", "+", "-"},
                                  {"+", "-", "+", "-", "+", "-"}, kBinary);
}

}  // namespace

TEST_CASE("confusion_matrix counting") {
    SECTION("hand fixture") {
        auto cm = binary_fixture();
        CHECK(cm.at(0, 0) == 2);  // TP
        CHECK(cm.at(0, 1) == 1);  // FN
        CHECK(cm.at(1, 0) == 1);  // FP
        CHECK(cm.at(1, 1) == 2);  // TN
    }
    SECTION("perfect predictions are diagonal") {
        auto cm = eval::confusion_matrix({"a", "b", "a"}, {"a", "b", "a"},
                                         {"a", "b"});
        CHECK(cm.at(0, 0) == 2);
        CHECK(cm.at(1, 1) == 1);
        CHECK(cm.at(0, 1) == 0);
        CHECK(cm.at(1, 0) == 0);
    }
    SECTION("empty inputs give an all-zero matrix") {
        auto cm = eval::confusion_matrix({}, {}, kBinary);
        CHECK(cm.total() == 0);
    }
    SECTION("argument errors") {
        CHECK_THROWS_AS(eval::confusion_matrix({"a"}, {}, {"a"}),
                        std::invalid_argument);
        CHECK_THROWS_AS(eval::confusion_matrix({"x"}, {"x"}, {"a"}),
                        std::invalid_argument);
    }
}

TEST_CASE("accuracy") {
    auto cm = binary_fixture();
    CHECK(eval::accuracy(cm) == Catch::Approx(4.0 / 6.0));
    auto perfect = eval::confusion_matrix({"+", "-"}, {"+", "-"}, kBinary);
    CHECK(eval::accuracy(perfect) == 1.0);
    auto wrong = eval::confusion_matrix({"+", "-"}, {"-", "+"}, kBinary);
    CHECK(eval::accuracy(wrong) == 0.0);
    std::vector<std::string> warnings;
    auto empty = eval::confusion_matrix({}, {}, kBinary);
    CHECK(eval::accuracy(empty, &warnings) == 0.0);
    CHECK(!warnings.empty());
}

TEST_CASE("precision, recall, f1") {
    auto cm = binary_fixture();
    CHECK(eval::precision(cm, 0) == Catch::Approx(2.0 / 3.0));
    CHECK(eval::recall(cm, 0) == Catch::Approx(2.0 / 3.0));
    CHECK(eval::f1(cm, 0) == Catch::Approx(2.0 / 3.0));

    SECTION("zero denominator reports 0 with warning") {
        auto cm2 = eval::confusion_matrix({"+", "+"}, {"-", "-"}, kBinary);
        std::vector<std::string> warnings;
        CHECK(eval::precision(cm2, 0, &warnings) == 0.0);
        CHECK(!warnings.empty());
    }
    SECTION("f1 fixed point: precision == recall == p implies f1 == p") {
        // Fixture with precision = recall = 2/3 above.
        CHECK(eval::f1(cm, 0) == Catch::Approx(eval::precision(cm, 0)));
    }
}

TEST_CASE("weighted metrics") {
    SECTION("single-class data equals the class metric") {
        auto cm = eval::confusion_matrix({"a", "a"}, {"a", "a"}, {"a"});
        auto r = eval::weighted_metrics(cm);
        CHECK(r.weighted_f1 == Catch::Approx(r.f1[0]));
    }
    SECTION("support 3/1 with f1 1.0/0.0 weights to 0.75") {
        auto cm = eval::confusion_matrix({"a", "a", "a", "b"},
                                         {"a", "a", "a", "a"}, {"a", "b"});
        auto r = eval::weighted_metrics(cm);
        CHECK(r.f1[0] == Catch::Approx(6.0 / 7.0));  // 2*3/(2*3+1+0)
        CHECK(r.f1[1] == 0.0);
        CHECK(r.weighted_f1 ==
              Catch::Approx(0.75 * r.f1[0] + 0.25 * r.f1[1]));
    }
}

TEST_CASE("metric oracle equivalence and weighted-recall identity") {
    rng::Engine eng(55);
    for (int trial = 0; trial < 200; ++trial) {
        const int n_classes = 2 + static_cast<int>(eng.next_below(2));
        std::vector<std::string> classes;
        for (int c = 0; c < n_classes; ++c) classes.push_back(std::string(1, 'a' + c));
        const std::size_t n = 1 + eng.next_below(50);
        std::vector<std::string> truth, pred;
        for (std::size_t i = 0; i < n; ++i) {
            truth.push_back(classes[eng.next_below(classes.size())]);
            pred.push_back(classes[eng.next_below(classes.size())]);
        }
        auto cm = eval::confusion_matrix(truth, pred, classes);
        auto r = eval::weighted_metrics(cm);

        // Brute-force oracle: direct pairwise counting, no confusion matrix.
        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (truth[i] == pred[i]) ++correct;
        }
        CHECK(r.accuracy == static_cast<double>(correct) / static_cast<double>(n));
        for (std::size_t c = 0; c < classes.size(); ++c) {
            long long tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const bool is_true = truth[i] == classes[c];
                const bool is_pred = pred[i] == classes[c];
                if (is_true && is_pred) ++tp;
                if (!is_true && is_pred) ++fp;
                if (is_true && !is_pred) ++fn;
            }
            const double p = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
            const double rc = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
            const double f = 2 * tp + fp + fn == 0
                                 ? 0.0
                                 : 2.0 * double(tp) / double(2 * tp + fp + fn);
            CHECK(r.precision[c] == p);
            CHECK(r.recall[c] == rc);
            CHECK(r.f1[c] == f);
        }
        // Weighted recall equals accuracy for any multiclass matrix.
        CHECK(r.weighted_recall == Catch::Approx(r.accuracy).margin(1e-12));
        CHECK(r.weighted_f1 >= 0.0);
        CHECK(r.weighted_f1 <= 1.0);
    }
}

TEST_CASE("mse and r_squared") {
    SECTION("perfect predictions") {
        CHECK(eval::mse({1, 2, 3}, {1, 2, 3}) == 0.0);
        CHECK(eval::r_squared({1, 2, 3}, {1, 2, 3}) == 1.0);
    }
    SECTION("mean predictor has r^2 = 0") {
        CHECK(eval::r_squared({0, 1, 2}, {1, 1, 1}) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("worse-than-mean predictor: the reversed fixture gives r^2 = -3") {
        CHECK(eval::r_squared({0, 1, 2}, {2, 1, 0}) == Catch::Approx(-3.0));
    }
    SECTION("constant targets report 0 with warning") {
        std::vector<std::string> warnings;
        CHECK(eval::r_squared({2, 2, 2}, {1, 2, 3}, &warnings) == 0.0);
        CHECK(!warnings.empty());
    }
}

TEST_CASE("cohens_kappa") {
    SECTION("identical vectors give 1.0") {
        CHECK(eval::cohens_kappa({"+", "-", "+"}, {"+", "-", "+"}) == 1.0);
    }
    SECTION("hand fixture gives exactly 0") {
        CHECK(eval::cohens_kappa({"+", "+", "-", "-"}, {"+", "-", "+", "-"}) == 0.0);
    }
    SECTION("kappa is symmetric") {
        const std::vector<std::string> a = {"+", "+", "-", "+", "-"};
        const std::vector<std::string> b = {"+", "-", "-", "+", "+"};
        CHECK(eval::cohens_kappa(a, b) == eval::cohens_kappa(b, a));
    }
    SECTION("kappa stays in [-1, 1] on random vectors") {
        rng::Engine eng(13);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 1 + eng.next_below(30);
            std::vector<std::string> a, b;
            for (std::size_t i = 0; i < n; ++i) {
                a.push_back(eng.next_below(2) ? "+" : "-");
                b.push_back(eng.next_below(2) ? "+" : "-");
            }
            const double k = eval::cohens_kappa(a, b);
            CHECK(k >= -1.0 - 1e-12);
            CHECK(k <= 1.0 + 1e-12);
        }
    }
}
