// altsent: sentiment analytics pipeline for social-media mentions of
// research articles. Subcommands: ingest, trends, features, train,
// evaluate, synth.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "altsent/corpus.hpp"
#include "altsent/eval.hpp"
#include "altsent/features.hpp"
#include "altsent/io.hpp"
#include "altsent/models.hpp"
#include "altsent/pipeline.hpp"
#include "altsent/sentiment.hpp"
#include "altsent/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Exit codes: 0 success, 2 I/O, 64 usage, 65 data error.
constexpr int kExitIo = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file: " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path);
    return out;
}

std::vector<altsent::corpus::ArticleRecord>
load_corpus(const std::string& path, long long* dropped = nullptr,
            long long* skipped = nullptr) {
    auto in = open_input(path);
    auto parsed = altsent::corpus::parse_records(in);
    auto [records, n_dropped] =
        altsent::corpus::validate_and_filter(std::move(parsed.records));
    if (dropped) *dropped = n_dropped;
    if (skipped) *skipped = parsed.skipped_lines;
    return records;
}

void write_corpus(const std::string& path,
                  const std::vector<altsent::corpus::ArticleRecord>& records) {
    auto out = open_output(path);
    for (const auto& rec : records) {
        out << altsent::corpus::to_json(rec).dump() << '\n';
    }
}

altsent::sentiment::Lexicon load_lexicon_or_die(const std::string& path) {
    if (!fs::exists(path)) throw IoError("cannot open lexicon file: " + path);
    return altsent::sentiment::load_lexicon(path);
}

// ---------------------------------------------------------------------------

int cmd_ingest(const std::string& input, const std::string& output,
               long long sample, std::uint64_t seed) {
    long long dropped = 0, skipped = 0;
    auto records = load_corpus(input, &dropped, &skipped);
    if (sample >= 0) {
        records = altsent::corpus::sample_without_replacement(
            records, static_cast<std::size_t>(sample), seed);
    }
    write_corpus(output, records);
    std::cout << "records " << records.size() << " dropped " << dropped
              << " skipped_lines " << skipped << '\n';
    return 0;
}

int cmd_trends(const std::string& input, const std::string& output_dir) {
    long long dropped = 0;
    auto records = load_corpus(input, &dropped);
    auto summary = altsent::corpus::summarize(records);
    summary.dropped_record_count = dropped;

    fs::create_directories(output_dir);
    open_output((fs::path(output_dir) / "summary.json").string())
        << altsent::corpus::to_json(summary).dump(2) << '\n';

    auto per_year = open_output((fs::path(output_dir) / "tweets_per_year.csv").string());
    per_year << "year,tweets\n";
    for (const auto& [year, count] : summary.tweets_per_year) {
        per_year << year << ',' << count << '\n';
    }

    auto per_subject = open_output((fs::path(output_dir) / "subjects.csv").string());
    per_subject << "subject,tweets,articles\n";
    for (const auto& [subj, tweets] : summary.tweets_per_subject) {
        per_subject << '"' << subj << "\"," << tweets << ','
                    << summary.articles_per_subject.at(subj) << '\n';
    }
    return 0;
}

int cmd_features(const std::string& input, const std::string& lexicon_path,
                 int case_id, const std::string& variant,
                 const std::string& output_dir, double threshold) {
    auto records = load_corpus(input);
    auto lexicon = load_lexicon_or_die(lexicon_path);
    const auto cfg = altsent::features::CaseConfig::from_case_id(case_id);
    const auto var = variant == "A" ? altsent::features::DatasetVariant::A
                                    : altsent::features::DatasetVariant::B;
    auto ds = altsent::features::build_dataset(records, lexicon, cfg, var, threshold);

    fs::create_directories(output_dir);
    auto csv = open_output((fs::path(output_dir) / "features.csv").string());
    altsent::io::write_features_csv(csv, ds.rows);

    const auto total = ds.distribution.total();
    auto pct = [&](long long n) {
        return total == 0 ? 0.0
                          : 100.0 * static_cast<double>(n) / static_cast<double>(total);
    };
    ordered_json dist;
    dist["case"] = case_id;
    dist["variant"] = variant;
    dist["articles"] = total;
    dist["positive"] = ds.distribution.positive;
    dist["negative"] = ds.distribution.negative;
    dist["neutral"] = ds.distribution.neutral;
    dist["positive_pct"] = pct(ds.distribution.positive);
    dist["negative_pct"] = pct(ds.distribution.negative);
    dist["neutral_pct"] = pct(ds.distribution.neutral);
    open_output((fs::path(output_dir) / "distribution.json").string())
        << dist.dump(2) << '\n';
    std::cout << "articles " << total << " positive " << ds.distribution.positive
              << " negative " << ds.distribution.negative << " neutral "
              << ds.distribution.neutral << '\n';
    return 0;
}

ordered_json grid_table_json(const altsent::models::GridSearchResult& gr) {
    ordered_json table = ordered_json::array();
    for (const auto& point : gr.table) {
        ordered_json row;
        row["params"] = point.params;
        row["fold_scores"] = point.fold_scores;
        row["mean_score"] = point.mean_score;
        table.push_back(std::move(row));
    }
    return table;
}

int cmd_train(const std::string& features_path, const std::string& task_name,
              const std::string& model_name, const std::string& grid_file,
              std::uint64_t seed, double train_fraction, int cv_folds,
              int smote_k, const std::string& output_dir) {
    const auto rows = altsent::io::read_features_csv(features_path);

    altsent::pipeline::TrainConfig cfg;
    cfg.task = altsent::pipeline::task_from_string(task_name);
    cfg.family = altsent::models::family_from_string(model_name);
    cfg.train_fraction = train_fraction;
    cfg.cv_folds = cv_folds;
    cfg.smote_k = smote_k;
    cfg.seed = seed;
    if (!grid_file.empty()) {
        auto in = open_input(grid_file);
        json g;
        in >> g;
        if (!g.is_array()) throw DataError("grid file must be a JSON array of objects");
        cfg.grid.assign(g.begin(), g.end());
    }

    auto result = altsent::pipeline::train(rows, cfg);

    fs::create_directories(output_dir);
    open_output((fs::path(output_dir) / "model.json").string())
        << altsent::pipeline::model_file_json(result, cfg.task).dump(2) << '\n';

    ordered_json report;
    // Resolved configuration, so the report reproduces itself from inputs.
    report["config"]["features"] = features_path;
    report["config"]["task"] = task_name;
    report["config"]["model"] = model_name;
    report["config"]["seed"] = seed;
    report["config"]["train_fraction"] = train_fraction;
    report["config"]["cv_folds"] = cv_folds;
    report["config"]["smote_k"] = smote_k;
    report["config"]["grid_file"] = grid_file;
    report["best_params"] = result.grid_result.best_params;
    report["cv_table"] = grid_table_json(result.grid_result);
    if (cfg.task == altsent::pipeline::Task::Regression) {
        report["test_mse"] = result.test_mse;
        report["test_r_squared"] = result.test_r2;
        report["warnings"] = result.warnings;
    } else {
        report["confusion_matrix"] = altsent::eval::to_json(result.confusion);
        report["metrics"] = altsent::eval::to_json(result.report);
    }
    if (result.has_importances) {
        ordered_json imp;
        for (std::size_t f = 0; f < result.importances.size(); ++f) {
            imp[altsent::features::kFeatureNames[f]] = result.importances[f];
        }
        report["feature_importances"] = imp;
    }
    open_output((fs::path(output_dir) / "report.json").string())
        << report.dump(2) << '\n';

    if (cfg.task == altsent::pipeline::Task::Regression) {
        std::cout << "mse " << result.test_mse << " r2 " << result.test_r2 << '\n';
    } else {
        std::cout << "accuracy " << result.report.accuracy << " weighted_f1 "
                  << result.report.weighted_f1 << '\n';
    }
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& features_path,
                 const std::string& output_path) {
    json mj;
    open_input(model_path) >> mj;
    altsent::pipeline::LoadedModel lm;
    try {
        lm = altsent::pipeline::load_model_file(mj);
    } catch (const std::exception& e) {
        throw DataError(std::string("invalid model file: ") + e.what());
    }
    const auto rows = altsent::io::read_features_csv(features_path);

    const bool regression = lm.task == altsent::pipeline::Task::Regression;
    altsent::models::Matrix X;
    std::vector<double> targets;
    std::vector<std::string> truth;
    for (const auto& f : rows) {
        if (!regression) {
            const std::string label = altsent::sentiment::to_string(f.target_label);
            if (std::find(lm.classes.begin(), lm.classes.end(), label) ==
                lm.classes.end()) {
                continue;  // e.g. neutral rows under a binary model
            }
            truth.push_back(label);
        } else {
            targets.push_back(f.target_score);
        }
        const auto r = f.row();
        X.emplace_back(r.begin(), r.end());
    }
    if (lm.scaler.mean.size() != altsent::features::kFeatureNames.size()) {
        throw DataError("model/feature column mismatch");
    }

    std::vector<double> pred;
    try {
        pred = lm.model->predict(altsent::models::zscore_apply(X, lm.scaler));
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("model/feature mismatch: ") + e.what());
    }

    ordered_json report;
    report["config"]["model"] = model_path;
    report["config"]["features"] = features_path;
    if (regression) {
        std::vector<std::string> warnings;
        report["test_mse"] = altsent::eval::mse(targets, pred);
        report["test_r_squared"] = altsent::eval::r_squared(targets, pred, &warnings);
        report["warnings"] = warnings;
    } else {
        std::vector<std::string> predicted;
        for (double p : pred) {
            predicted.push_back(lm.classes.at(static_cast<std::size_t>(p)));
        }
        const auto cm = altsent::eval::confusion_matrix(truth, predicted, lm.classes);
        report["confusion_matrix"] = altsent::eval::to_json(cm);
        report["metrics"] = altsent::eval::to_json(altsent::eval::weighted_metrics(cm));
    }
    open_output(output_path) << report.dump(2) << '\n';
    return 0;
}

int cmd_synth(long long articles, std::uint64_t seed, const std::string& mix,
              const std::string& lexicon_path, double noise, double abstract_noise,
              long long tweets_min, long long tweets_max, const std::string& output) {
    altsent::corpus::SynthSpec spec;
    spec.n_articles = static_cast<std::size_t>(articles);
    spec.seed = seed;
    {
        std::stringstream ss(mix);
        char c1 = 0, c2 = 0;
        if (!(ss >> spec.mix_positive >> c1 >> spec.mix_negative >> c2 >>
              spec.mix_neutral) ||
            c1 != ',' || c2 != ',') {
            throw std::invalid_argument("--mix expects p,n,z");
        }
    }
    spec.tweet_noise = noise;
    spec.abstract_noise = abstract_noise;
    spec.tweets_min = static_cast<std::size_t>(tweets_min);
    spec.tweets_max = static_cast<std::size_t>(tweets_max);
    const auto lexicon = load_lexicon_or_die(lexicon_path);
    const auto records = altsent::corpus::generate_synthetic_corpus(spec, lexicon);
    write_corpus(output, records);
    std::cout << "articles " << records.size() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sentiment analytics for social-media mentions of research articles"};
    app.require_subcommand(1);

    std::string input, output, lexicon_path, variant = "A";
    std::string features_path, task_name = "binary", model_name = "random_forest";
    std::string grid_file, model_path, mix = "0.4,0.3,0.3";
    long long sample = -1, articles = 100, tweets_min = 1, tweets_max = 5;
    std::uint64_t seed = 0;
    int case_id = 4, cv_folds = 10, smote_k = 5;
    double threshold = 0.7, train_fraction = 0.8, noise = 0.0, abstract_noise = 0.5;

    auto* ingest = app.add_subcommand("ingest", "Parse, validate and sample a JSONL corpus");
    ingest->add_option("--input", input)->required();
    ingest->add_option("--output", output)->required();
    ingest->add_option("--sample", sample, "Sample N articles without replacement");
    ingest->add_option("--seed", seed);

    auto* trends = app.add_subcommand("trends", "Per-year and per-subject tweet counts");
    trends->add_option("--input", input)->required();
    trends->add_option("--output", output, "Output directory")->required();

    auto* feats = app.add_subcommand("features", "Derive the five-feature model rows");
    feats->add_option("--input", input)->required();
    feats->add_option("--lexicon", lexicon_path)->required();
    feats->add_option("--case", case_id)->check(CLI::Range(1, 4));
    feats->add_option("--variant", variant)->check(CLI::IsMember({"A", "B"}));
    feats->add_option("--threshold", threshold, "Title-overlap removal threshold");
    feats->add_option("--output", output, "Output directory")->required();

    auto* train = app.add_subcommand("train", "Split, standardize, SMOTE, grid-search, fit");
    train->add_option("--features", features_path)->required();
    train->add_option("--task", task_name)
        ->check(CLI::IsMember({"binary", "three-class", "regression"}));
    train->add_option("--model", model_name);
    train->add_option("--grid-file", grid_file, "JSON array of parameter objects");
    train->add_option("--seed", seed);
    train->add_option("--train-fraction", train_fraction);
    train->add_option("--cv-folds", cv_folds);
    train->add_option("--smote-k", smote_k);
    train->add_option("--output", output, "Output directory")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Score a persisted model on a feature file");
    evaluate->add_option("--model", model_path)->required();
    evaluate->add_option("--features", features_path)->required();
    evaluate->add_option("--output", output)->required();

    auto* synth = app.add_subcommand("synth", "Generate a deterministic synthetic corpus");
    synth->add_option("--articles", articles);
    synth->add_option("--seed", seed);
    synth->add_option("--mix", mix, "positive,negative,neutral fractions");
    synth->add_option("--lexicon", lexicon_path)->required();
    synth->add_option("--noise", noise, "Probability a tweet deviates from the article");
    synth->add_option("--abstract-noise", abstract_noise);
    synth->add_option("--tweets-min", tweets_min);
    synth->add_option("--tweets-max", tweets_max);
    synth->add_option("--output", output)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*ingest) return cmd_ingest(input, output, sample, seed);
        if (*trends) return cmd_trends(input, output);
        if (*feats)
            return cmd_features(input, lexicon_path, case_id, variant, output, threshold);
        if (*train)
            return cmd_train(features_path, task_name, model_name, grid_file, seed,
                             train_fraction, cv_folds, smote_k, output);
        if (*evaluate) return cmd_evaluate(model_path, features_path, output);
        if (*synth)
            return cmd_synth(articles, seed, mix, lexicon_path, noise, abstract_noise,
                             tweets_min, tweets_max, output);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
