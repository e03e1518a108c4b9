#include <sstream>

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace latticecell;
using namespace latticecell::testing;

namespace {

DocumentVector vec(std::string id, const std::string& bits01, std::string category) {
    return {std::move(id), bits::from_string01(bits01), std::move(category)};
}

ConfusionMatrix confusion(const std::vector<std::size_t>& truth, const std::vector<std::optional<std::size_t>>& pred,
                          std::size_t n) {
    ConfusionMatrix cm(n);
    for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], pred[i]);
    return cm;
}

std::string report_text(const ExperimentReport& r) {
    std::ostringstream out;
    out << report_to_json(r).dump(2) << '\n';
    write_report_table(out, r);
    return out.str();
}

}  // namespace

TEST(Metrics, Perfect) {
    const auto m = metrics(confusion({0, 1, 2}, {0, 1, 2}, 3));
    EXPECT_EQ(m.precision, 1.0);
    EXPECT_EQ(m.recall, 1.0);
    EXPECT_EQ(m.accuracy, 1.0);
    EXPECT_EQ(m.error, 0.0);
    EXPECT_EQ(m.f_measure, 1.0);
}

TEST(Metrics, HandCountedExample) {
    // truth S,E,T against predictions S,E,E
    const auto m = metrics(confusion({0, 1, 2}, {0, 1, 1}, 3));
    EXPECT_DOUBLE_EQ(m.accuracy, 2.0 / 3);
    EXPECT_DOUBLE_EQ(m.error, 1.0 / 3);
    EXPECT_DOUBLE_EQ(m.precision, 0.5);
    EXPECT_DOUBLE_EQ(m.recall, 2.0 / 3);
    EXPECT_DOUBLE_EQ(m.f_measure, 2 * 0.5 * (2.0 / 3) / (0.5 + 2.0 / 3));
}

TEST(Metrics, AllOneClassAndUnclassified) {
    EXPECT_DOUBLE_EQ(metrics(confusion({0, 0, 1, 1, 2, 2}, {0, 0, 0, 0, 0, 0}, 3)).accuracy, 1.0 / 3);
    const auto m = metrics(confusion({0, 1}, {0, std::nullopt}, 2));
    EXPECT_DOUBLE_EQ(m.accuracy, 0.5);
    EXPECT_DOUBLE_EQ(m.recall, 0.5);
    EXPECT_DOUBLE_EQ(m.precision, 0.5);
    EXPECT_THROW(metrics(ConfusionMatrix(3)), UndefinedError);
    ConfusionMatrix cm(2);
    EXPECT_THROW(cm.add(2, 0), BoundsError);
}

TEST(Metrics, RandomMatricesAgreeWithHandCount) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t k = 1 + rng() % 5, n = 1 + rng() % 40;
        std::vector<std::size_t> truth;
        std::vector<std::optional<std::size_t>> pred;
        for (std::size_t i = 0; i < n; ++i) {
            truth.push_back(rng() % k);
            pred.push_back(rng() % 6 == 0 ? std::nullopt : std::optional<std::size_t>(rng() % k));
        }
        const auto m = metrics(confusion(truth, pred, k));
        // Independent per-category count straight from the prediction lists.
        double p = 0, r = 0, right = 0;
        for (std::size_t c = 0; c < k; ++c) {
            double tp = 0, predicted = 0, actual = 0;
            for (std::size_t i = 0; i < n; ++i) {
                tp += truth[i] == c && pred[i] == c;
                predicted += pred[i] == c;
                actual += truth[i] == c;
            }
            if (predicted > 0) p += tp / predicted;
            if (actual > 0) r += tp / actual;
            right += tp;
        }
        EXPECT_NEAR(m.precision, p / static_cast<double>(k), 1e-12);
        EXPECT_NEAR(m.recall, r / static_cast<double>(k), 1e-12);
        EXPECT_DOUBLE_EQ(m.accuracy, right / static_cast<double>(n));
        EXPECT_EQ(m.accuracy + m.error, 1.0);
        for (double v : {m.precision, m.recall, m.accuracy, m.error, m.f_measure}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(NaiveBayesBaseline, Examples) {
    const std::vector<std::string> cats = {"A", "B"};
    const std::vector<DocumentVector> disjoint = {vec("1", "1100", "A"), vec("2", "0011", "B")};
    EXPECT_EQ(baseline_naive_bayes(disjoint, bits::from_string01("1100"), cats), "A");
    EXPECT_EQ(baseline_naive_bayes(disjoint, bits::from_string01("0011"), cats), "B");

    const std::vector<DocumentVector> uniform = {vec("1", "10", "A"), vec("2", "10", "B")};
    EXPECT_EQ(baseline_naive_bayes(uniform, bits::from_string01("10"), cats), "A");
    EXPECT_EQ(baseline_naive_bayes(uniform, bits::from_string01("01"), cats), "A");

    // t (first bit) only occurs in class A.
    const std::vector<DocumentVector> four = {vec("1", "11", "A"), vec("2", "01", "A"), vec("3", "01", "B"),
                                              vec("4", "00", "B")};
    EXPECT_EQ(baseline_naive_bayes(four, bits::from_string01("10"), cats), "A");
    EXPECT_THROW(baseline_naive_bayes({}, bits::from_string01("10"), cats), UndefinedError);
}

TEST(KnnBaseline, Examples) {
    const std::vector<std::string> cats = {"A", "B"};
    const std::vector<DocumentVector> train = {vec("1", "1100", "A"), vec("2", "0011", "B"), vec("3", "1110", "B"),
                                               vec("4", "0001", "A")};
    EXPECT_EQ(baseline_knn(train, bits::from_string01("0011"), 1, Similarity::cosine, cats), "B");
    EXPECT_EQ(baseline_knn(train, bits::from_string01("0011"), 4, Similarity::cosine, cats), "A");
    // Nearest three to 1110 by Jaccard: 3 (B, 1), 1 (A, 2/3), 2 (B, 1/4).
    EXPECT_EQ(baseline_knn(train, bits::from_string01("1110"), 3, Similarity::jaccard, cats), "B");
    EXPECT_THROW(baseline_knn(train, bits::from_string01("1110"), 0, Similarity::jaccard, cats), Error);
}

TEST(Split, DirectoryLayout) {
    const auto s = split_corpus(data_path("corpus"), 0.5, 1);
    EXPECT_EQ(s.description, "directories");
    EXPECT_EQ(s.categories, (std::vector<std::string>{"E", "S", "T"}));
    EXPECT_EQ(s.train.size(), 9u);
    EXPECT_EQ(s.test.size(), 3u);
}

TEST(Split, SeededRatioIsPerCategoryAndReproducible) {
    const auto a = split_corpus(data_path("corpus/train"), 2.0 / 3, 42);
    const auto b = split_corpus(data_path("corpus/train"), 2.0 / 3, 42);
    EXPECT_EQ(a.train.size(), 6u);
    EXPECT_EQ(a.test.size(), 3u);
    for (std::size_t i = 0; i < a.train.size(); ++i) EXPECT_EQ(a.train[i].id, b.train[i].id);
    std::map<std::string, int> per_cat;
    for (const auto& d : a.test) ++per_cat[*d.category];
    EXPECT_EQ(per_cat, (std::map<std::string, int>{{"E", 1}, {"S", 1}, {"T", 1}}));
    EXPECT_THROW(split_corpus(data_path("corpus/train"), 0.0, 1), Error);
}

TEST(Experiment, FixtureCorpusEndToEnd) {
    ExperimentConfig config;
    config.naive_bayes = true;
    config.knn = true;
    const auto r = run_experiment(data_path("corpus"), config);
    ASSERT_EQ(r.rows.size(), 6u);
    EXPECT_EQ(r.rows[0].name, "lattice-cell/jaccard");
    EXPECT_EQ(r.rows[1].name, "lattice-cell/cosine");
    EXPECT_EQ(r.rows[2].name, "lattice-cell/inner");
    EXPECT_EQ(r.rows[3].name, "lattice-cell/dice");
    EXPECT_EQ(r.rows[4].name, "naive-bayes");
    EXPECT_EQ(r.rows[5].name, "knn/k=3/cosine");
    EXPECT_EQ(r.train_documents, 9u);
    EXPECT_EQ(r.test_documents, 3u);
    for (const auto& row : r.rows) {
        EXPECT_EQ(row.confusion.total(), 3u);
        EXPECT_EQ(row.metrics.accuracy + row.metrics.error, 1.0);
    }
    EXPECT_EQ(r.timings.classify_ms.size(), 6u);
    EXPECT_EQ(report_to_json(r)["averaging"], "macro");
}

TEST(Experiment, SingleQueryTestSet) {
    // Nine training documents and the worked-example query as the only test document.
    const auto root = std::filesystem::temp_directory_path() / "latticecell_query_corpus";
    std::filesystem::remove_all(root);
    std::filesystem::create_directories(root / "train");
    std::filesystem::copy(data_path("corpus/train"), root / "train", std::filesystem::copy_options::recursive);
    std::filesystem::create_directories(root / "test" / "E");
    std::filesystem::copy_file(data_path("sample_query.txt"), root / "test" / "E" / "Query");
    ExperimentConfig config;
    config.measures = {Similarity::inner};
    const auto r = run_experiment(root, config);
    std::filesystem::remove_all(root);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].confusion.correct(), 1u);
    EXPECT_EQ(r.rows[0].metrics.accuracy, 1.0);
}

TEST(Experiment, DeterministicAcrossRunsAndThreadCounts) {
    ExperimentConfig config;
    config.naive_bayes = true;
    config.knn = true;
    config.seed = 7;
    config.split_ratio = 2.0 / 3;
    const auto first = report_text(run_experiment(data_path("corpus/train"), config));
    EXPECT_EQ(report_text(run_experiment(data_path("corpus/train"), config)), first);
    config.jobs = 4;
    EXPECT_EQ(report_text(run_experiment(data_path("corpus/train"), config)), first);
    config.seed = 8;
    EXPECT_NO_THROW(run_experiment(data_path("corpus/train"), config));
}

TEST(ParallelMap, KeepsIndexOrder) {
    for (std::size_t jobs : {1u, 2u, 3u, 8u, 100u}) {
        const auto out = detail::parallel_map(37, jobs, [](std::size_t i) { return i * i; });
        ASSERT_EQ(out.size(), 37u);
        for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], i * i);
    }
    EXPECT_TRUE(detail::parallel_map(0, 4, [](std::size_t i) { return i; }).empty());
}
