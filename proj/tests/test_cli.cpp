#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = ALTSENT_CLI_PATH;
const std::string kLexicon = std::string(ALTSENT_DATA_DIR) + "/sample_lexicon.tsv";

int run(const std::string& args, const std::string& stdout_file = "/dev/null") {
    const std::string cmd = kCli + " " + args + " > " + stdout_file + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("altsent-cli-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const {
        return (path / name).string();
    }
    static inline int counter = 0;
};

}  // namespace

TEST_CASE("cli usage errors") {
    CHECK(run("--help") == 0);
    CHECK(run("") == 64);
    CHECK(run("frobnicate") == 64);
    CHECK(run("ingest --input x") == 64);  // missing required --output
    TempDir tmp;
    CHECK(run("features --input /nonexistent.jsonl --lexicon " + kLexicon +
              " --case 9 --output " + (tmp / "out")) == 64);
}

TEST_CASE("cli io errors") {
    TempDir tmp;
    CHECK(run("ingest --input /nonexistent.jsonl --output " + (tmp / "o.jsonl")) == 2);
    CHECK(run("synth --articles 5 --lexicon /nonexistent.tsv --output " +
              (tmp / "o.jsonl")) == 2);
}

TEST_CASE("synth is deterministic per seed") {
    TempDir tmp;
    const std::string base =
        "synth --articles 30 --seed 7 --lexicon " + kLexicon + " --output ";
    REQUIRE(run(base + (tmp / "a.jsonl")) == 0);
    REQUIRE(run(base + (tmp / "b.jsonl")) == 0);
    const auto a = slurp(tmp.path / "a.jsonl");
    CHECK(a == slurp(tmp.path / "b.jsonl"));
    CHECK(!a.empty());

    REQUIRE(run("synth --articles 30 --seed 8 --lexicon " + kLexicon +
                " --output " + (tmp / "c.jsonl")) == 0);
    CHECK(a != slurp(tmp.path / "c.jsonl"));
}

TEST_CASE("ingest samples and reports counts") {
    TempDir tmp;
    REQUIRE(run("synth --articles 25 --seed 3 --lexicon " + kLexicon +
                " --output " + (tmp / "corpus.jsonl")) == 0);
    REQUIRE(run("ingest --input " + (tmp / "corpus.jsonl") + " --sample 10 --seed 1"
                " --output " + (tmp / "sampled.jsonl"),
                tmp / "stdout.txt") == 0);
    CHECK(slurp(tmp.path / "stdout.txt").rfind("records 10", 0) == 0);
    std::ifstream in(tmp.path / "sampled.jsonl");
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 10);

    // Sampling more than available is a usage error.
    CHECK(run("ingest --input " + (tmp / "corpus.jsonl") + " --sample 999 --output " +
              (tmp / "x.jsonl")) == 64);
}

TEST_CASE("trends writes summary and per-year/per-subject tables") {
    TempDir tmp;
    REQUIRE(run("synth --articles 20 --seed 5 --lexicon " + kLexicon +
                " --output " + (tmp / "corpus.jsonl")) == 0);
    REQUIRE(run("trends --input " + (tmp / "corpus.jsonl") + " --output " +
                (tmp / "trends")) == 0);
    auto summary = nlohmann::json::parse(slurp(tmp.path / "trends" / "summary.json"));
    long long tweet_total = 0;
    for (const auto& [year, count] : summary.at("tweets_per_year").items()) {
        tweet_total += count.get<long long>();
    }
    CHECK(tweet_total > 0);
    CHECK(summary.at("dropped_record_count").get<long long>() == 0);
    const auto per_year = slurp(tmp.path / "trends" / "tweets_per_year.csv");
    CHECK(per_year.rfind("year,tweets\n", 0) == 0);
    const auto subjects = slurp(tmp.path / "trends" / "subjects.csv");
    CHECK(subjects.rfind("subject,tweets,articles\n", 0) == 0);
}

TEST_CASE("features, train and evaluate round trip") {
    TempDir tmp;
    REQUIRE(run("synth --articles 120 --seed 11 --lexicon " + kLexicon +
                " --output " + (tmp / "corpus.jsonl")) == 0);
    REQUIRE(run("features --input " + (tmp / "corpus.jsonl") + " --lexicon " +
                kLexicon + " --case 1 --variant A --output " + (tmp / "feat")) == 0);

    auto dist = nlohmann::json::parse(slurp(tmp.path / "feat" / "distribution.json"));
    const auto total = dist.at("articles").get<long long>();
    CHECK(total > 0);
    CHECK(dist.at("positive").get<long long>() + dist.at("negative").get<long long>() +
              dist.at("neutral").get<long long>() ==
          total);
    const auto csv = slurp(tmp.path / "feat" / "features.csv");
    CHECK(csv.rfind("article_id,title_sentiment,abstract_sentiment,abstract_length,"
                    "tweet_reach,author_count,target_score,target_label\n",
                    0) == 0);

    {
        std::ofstream grid(tmp.path / "grid.json");
        grid << R"([{"max_depth": 4}])";
    }
    const std::string train_cmd =
        "train --features " + (tmp / "feat") + "/features.csv --task binary"
        " --model decision_tree --grid-file " + (tmp / "grid.json") +
        " --seed 2 --cv-folds 3 --output ";
    REQUIRE(run(train_cmd + (tmp / "run1")) == 0);
    auto report = nlohmann::json::parse(slurp(tmp.path / "run1" / "report.json"));
    CHECK(report.at("metrics").at("accuracy").get<double>() >= 0.0);
    CHECK(report.at("best_params").at("max_depth").get<int>() == 4);
    CHECK(report.contains("feature_importances"));

    // Same command is byte-identical; that includes the persisted model.
    REQUIRE(run(train_cmd + (tmp / "run2")) == 0);
    CHECK(slurp(tmp.path / "run1" / "model.json") ==
          slurp(tmp.path / "run2" / "model.json"));
    CHECK(slurp(tmp.path / "run1" / "report.json") ==
          slurp(tmp.path / "run2" / "report.json"));

    REQUIRE(run("evaluate --model " + (tmp / "run1") + "/model.json --features " +
                (tmp / "feat") + "/features.csv --output " + (tmp / "eval.json")) == 0);
    auto eval_report = nlohmann::json::parse(slurp(tmp.path / "eval.json"));
    CHECK(eval_report.at("metrics").at("accuracy").get<double>() >= 0.0);

    // Corrupt model file is a data error.
    {
        std::ofstream bad(tmp.path / "bad.json");
        bad << "{\"format\": \"other\"}";
    }
    CHECK(run("evaluate --model " + (tmp / "bad.json") + " --features " +
              (tmp / "feat") + "/features.csv --output " + (tmp / "e2.json")) == 65);
}

TEST_CASE("train on regression task reports mse and r2") {
    TempDir tmp;
    REQUIRE(run("synth --articles 80 --seed 13 --lexicon " + kLexicon +
                " --output " + (tmp / "corpus.jsonl")) == 0);
    REQUIRE(run("features --input " + (tmp / "corpus.jsonl") + " --lexicon " +
                kLexicon + " --case 2 --variant B --output " + (tmp / "feat")) == 0);
    {
        std::ofstream grid(tmp.path / "grid.json");
        grid << R"([{}])";
    }
    REQUIRE(run("train --features " + (tmp / "feat") + "/features.csv"
                " --task regression --model linear_regression --grid-file " +
                (tmp / "grid.json") + " --seed 4 --cv-folds 3 --output " +
                (tmp / "run"),
                tmp / "stdout.txt") == 0);
    auto report = nlohmann::json::parse(slurp(tmp.path / "run" / "report.json"));
    CHECK(report.at("test_mse").get<double>() >= 0.0);
    CHECK(report.contains("test_r_squared"));
    CHECK(slurp(tmp.path / "stdout.txt").rfind("mse ", 0) == 0);
}
