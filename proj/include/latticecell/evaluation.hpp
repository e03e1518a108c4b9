#pragma once

// Metrics, the Naive Bayes and k-NN baselines, and the end-to-end
// train -> lattice -> model -> classify experiment.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <future>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "classifier.hpp"
#include "compiler.hpp"
#include "lattice.hpp"
#include "text.hpp"

namespace latticecell {

/// Rows are true categories, columns predicted ones. Documents that got no
/// prediction are tallied per true category in `unclassified`.
struct ConfusionMatrix {
    std::vector<std::vector<std::size_t>> counts;
    std::vector<std::size_t> unclassified;

    explicit ConfusionMatrix(std::size_t num_categories = 0)
        : counts(num_categories, std::vector<std::size_t>(num_categories, 0)), unclassified(num_categories, 0) {}

    std::size_t size() const { return counts.size(); }

    void add(std::size_t truth, std::optional<std::size_t> predicted) {
        if (truth >= size() || (predicted && *predicted >= size())) throw BoundsError("category index out of range");
        if (predicted)
            ++counts[truth][*predicted];
        else
            ++unclassified[truth];
    }

    std::size_t total() const {
        std::size_t t = 0;
        for (std::size_t i = 0; i < size(); ++i) {
            t += unclassified[i];
            for (auto c : counts[i]) t += c;
        }
        return t;
    }

    std::size_t correct() const {
        std::size_t t = 0;
        for (std::size_t i = 0; i < size(); ++i) t += counts[i][i];
        return t;
    }
};

struct MetricsReport {
    double precision = 0;
    double recall = 0;
    double accuracy = 0;
    double error = 0;
    double f_measure = 0;
};

/// Macro-averaged precision and recall over all categories (an empty
/// denominator contributes 0), accuracy = trace / total, error = 1 -
/// accuracy, F = 2PR / (P + R). Unclassified documents are wrong for
/// accuracy and misses for recall.
inline MetricsReport metrics(const ConfusionMatrix& cm) {
    const auto total = cm.total();
    if (total == 0 || cm.size() == 0) throw UndefinedError("metrics of an empty confusion matrix are undefined");
    const std::size_t n = cm.size();
    double p_sum = 0, r_sum = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t predicted = 0, actual = cm.unclassified[c];
        for (std::size_t t = 0; t < n; ++t) predicted += cm.counts[t][c];
        for (auto v : cm.counts[c]) actual += v;
        const double tp = static_cast<double>(cm.counts[c][c]);
        if (predicted) p_sum += tp / static_cast<double>(predicted);
        if (actual) r_sum += tp / static_cast<double>(actual);
    }
    MetricsReport r;
    r.precision = p_sum / static_cast<double>(n);
    r.recall = r_sum / static_cast<double>(n);
    r.accuracy = static_cast<double>(cm.correct()) / static_cast<double>(total);
    r.error = 1.0 - r.accuracy;
    r.f_measure = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

// ---------------------------------------------------------------------------
// Baselines

/// Bernoulli Naive Bayes with add-one smoothing over binary term vectors.
class NaiveBayes {
public:
    NaiveBayes(const std::vector<DocumentVector>& train, std::vector<std::string> categories)
        : categories_(std::move(categories)) {
        if (train.empty()) throw UndefinedError("naive Bayes needs a nonempty training set");
        const auto labels = detail::category_indices(train, categories_);
        const std::size_t m = train.front().bits.size();
        const std::size_t k = categories_.size();
        std::vector<double> docs(k, 0);
        std::vector<std::vector<double>> df(k, std::vector<double>(m, 0));
        for (std::size_t d = 0; d < train.size(); ++d) {
            if (train[d].bits.size() != m) throw DimensionError("training vectors differ in length");
            docs[labels[d]] += 1;
            const auto& b = train[d].bits;
            for (auto t = b.find_first(); t != BitVector::npos; t = b.find_next(t)) df[labels[d]][t] += 1;
        }
        log_prior_.resize(k);
        log_present_.assign(k, std::vector<double>(m));
        log_absent_.assign(k, std::vector<double>(m));
        absent_total_.assign(k, 0.0);
        for (std::size_t c = 0; c < k; ++c) {
            // Laplace-smoothed prior keeps empty classes finite.
            log_prior_[c] = std::log((docs[c] + 1) / (static_cast<double>(train.size()) + static_cast<double>(k)));
            for (std::size_t t = 0; t < m; ++t) {
                const double p = (df[c][t] + 1) / (docs[c] + 2);
                log_present_[c][t] = std::log(p);
                log_absent_[c][t] = std::log1p(-p);
                absent_total_[c] += log_absent_[c][t];
            }
        }
    }

    std::size_t predict_index(const BitVector& doc) const {
        std::size_t best = 0;
        double best_score = -INFINITY;
        for (std::size_t c = 0; c < categories_.size(); ++c) {
            if (doc.size() != log_present_[c].size()) throw DimensionError("document vector length mismatch");
            double score = log_prior_[c] + absent_total_[c];
            for (auto t = doc.find_first(); t != BitVector::npos; t = doc.find_next(t))
                score += log_present_[c][t] - log_absent_[c][t];
            if (score > best_score) {
                best_score = score;
                best = c;
            }
        }
        return best;
    }

    const std::string& predict(const BitVector& doc) const { return categories_[predict_index(doc)]; }

private:
    std::vector<std::string> categories_;
    std::vector<double> log_prior_;
    std::vector<std::vector<double>> log_present_, log_absent_;
    std::vector<double> absent_total_;
};

inline std::string baseline_naive_bayes(const std::vector<DocumentVector>& train, const BitVector& doc,
                                        const std::vector<std::string>& categories) {
    return NaiveBayes(train, categories).predict(doc);
}

/// Majority label among the k most similar training vectors. Equal
/// similarities keep training order; equal votes go to the earlier category.
inline std::string baseline_knn(const std::vector<DocumentVector>& train, const BitVector& doc, std::size_t k,
                                Similarity measure, const std::vector<std::string>& categories) {
    if (k == 0) throw Error("k must be at least 1");
    if (train.empty()) throw UndefinedError("k-NN needs a nonempty training set");
    const auto labels = detail::category_indices(train, categories);
    std::vector<Rational> keys;
    keys.reserve(train.size());
    for (const auto& t : train) keys.push_back(similarity_key(doc, t.bits, measure));
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return keys[a] > keys[b]; });
    std::vector<std::size_t> votes(categories.size(), 0);
    for (std::size_t i = 0; i < std::min(k, order.size()); ++i) ++votes[labels[order[i]]];
    std::size_t best = 0;
    for (std::size_t c = 1; c < votes.size(); ++c)
        if (votes[c] > votes[best]) best = c;
    return categories[best];
}

// ---------------------------------------------------------------------------
// Experiment

struct ExperimentConfig {
    std::vector<Similarity> measures{std::begin(kAllSimilarities), std::end(kAllSimilarities)};
    ActivationPolicy activation;
    std::size_t features = kDefaultFeatureCount;
    Preprocessor preprocessor;
    bool naive_bayes = false;
    bool knn = false;
    std::size_t knn_k = 3;
    Similarity knn_measure = Similarity::cosine;
    /// Used when the corpus root has no train/ and test/ subdirectories.
    double split_ratio = 900.0 / 1362.0;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    /// Predict the training majority class instead of leaving a document
    /// unclassified.
    bool majority_fallback = false;
};

struct ConfigurationResult {
    std::string name;
    ConfusionMatrix confusion;
    MetricsReport metrics;
};

struct ExperimentTimings {
    double vectorize_ms = 0;
    double lattice_build_ms = 0;
    double compile_ms = 0;
    std::vector<std::pair<std::string, double>> classify_ms;  // per configuration, whole test set
    std::size_t test_documents = 0;
};

struct ExperimentReport {
    std::vector<std::string> categories;
    std::size_t train_documents = 0;
    std::size_t test_documents = 0;
    std::size_t vocabulary_size = 0;
    std::size_t concepts = 0;
    std::size_t cover_edges = 0;
    std::size_t rules = 0;
    std::size_t facts = 0;
    std::string split;
    std::uint64_t seed = 0;
    std::string activation;
    std::vector<ConfigurationResult> rows;
    ExperimentTimings timings;  // not part of the deterministic report
};

struct CorpusSplit {
    std::vector<std::string> categories;
    std::vector<Document> train;
    std::vector<Document> test;
    std::string description;
};

/// `root/train` + `root/test` when both exist, otherwise a per-category
/// seeded shuffle of `root` keeping round(ratio * n) documents for training.
inline CorpusSplit split_corpus(const std::filesystem::path& root, double ratio, std::uint64_t seed) {
    CorpusSplit out;
    if (std::filesystem::is_directory(root / "train") && std::filesystem::is_directory(root / "test")) {
        auto train = load_labeled_corpus(root / "train");
        auto test = load_labeled_corpus(root / "test");
        std::set<std::string> cats(train.categories.begin(), train.categories.end());
        cats.insert(test.categories.begin(), test.categories.end());
        out.categories.assign(cats.begin(), cats.end());
        out.train = std::move(train.documents);
        out.test = std::move(test.documents);
        out.description = "directories";
        return out;
    }
    if (!(ratio > 0 && ratio <= 1)) throw Error("split ratio must lie in (0, 1]");
    auto corpus = load_labeled_corpus(root);
    out.categories = corpus.categories;
    std::mt19937_64 rng(seed);
    for (const auto& cat : corpus.categories) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < corpus.documents.size(); ++i)
            if (corpus.documents[i].category == cat) idx.push_back(i);
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(idx.size())));
        std::vector<std::size_t> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        std::vector<std::size_t> test(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
        std::sort(train.begin(), train.end());
        std::sort(test.begin(), test.end());
        for (auto i : train) out.train.push_back(corpus.documents[i]);
        for (auto i : test) out.test.push_back(corpus.documents[i]);
    }
    std::ostringstream d;
    d << "ratio:" << ratio;
    out.description = d.str();
    return out;
}

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

/// Evaluates fn(i) for i in [0, n) on up to `jobs` threads; results keep
/// index order.
template <class Fn>
auto parallel_map(std::size_t n, std::size_t jobs, Fn fn) {
    using R = decltype(fn(std::size_t{0}));
    std::vector<R> out(n);
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::future<void>> tasks;
    const std::size_t chunk = (n + jobs - 1) / jobs;
    for (std::size_t start = 0; start < n; start += chunk)
        tasks.push_back(std::async(std::launch::async, [&, start] {
            for (std::size_t i = start; i < std::min(n, start + chunk); ++i) out[i] = fn(i);
        }));
    for (auto& t : tasks) t.get();
    return out;
}

}  // namespace detail

inline ExperimentReport run_experiment(const std::filesystem::path& corpus_root, const ExperimentConfig& config) {
    using clock = std::chrono::steady_clock;
    auto split = split_corpus(corpus_root, config.split_ratio, config.seed);
    if (split.train.empty()) throw Error("training split is empty");
    if (split.test.empty()) throw Error("test split is empty");

    ExperimentReport report;
    report.categories = split.categories;
    report.train_documents = split.train.size();
    report.test_documents = split.test.size();
    report.split = split.description;
    report.seed = config.seed;
    report.activation = to_string(config.activation);

    auto t0 = clock::now();
    const auto vocab = build_vocabulary(split.train, split.categories, config.features, config.preprocessor);
    std::vector<DocumentVector> train, test;
    for (const auto& d : split.train) train.push_back(vectorize(d, vocab, config.preprocessor));
    for (const auto& d : split.test) test.push_back(vectorize(d, vocab, config.preprocessor));
    report.timings.vectorize_ms = detail::elapsed_ms(t0);
    report.vocabulary_size = vocab.size();

    t0 = clock::now();
    const auto lattice = build_lattice(build_context(train, vocab.terms));
    report.timings.lattice_build_ms = detail::elapsed_ms(t0);
    report.concepts = lattice.size();
    report.cover_edges = lattice.covers.size();

    std::vector<std::string> train_labels;
    for (const auto& v : train) train_labels.push_back(*v.category);
    t0 = clock::now();
    const auto model = compile(lattice, train_labels, split.categories);
    report.timings.compile_ms = detail::elapsed_ms(t0);
    report.rules = model.num_rules();
    report.facts = model.num_facts();
    report.timings.test_documents = test.size();

    std::map<std::string, std::size_t> cat_index;
    for (std::size_t c = 0; c < split.categories.size(); ++c) cat_index[split.categories[c]] = c;
    std::vector<std::size_t> train_counts(split.categories.size(), 0);
    for (const auto& v : train) ++train_counts[cat_index.at(*v.category)];
    const auto majority = static_cast<std::size_t>(
        std::max_element(train_counts.begin(), train_counts.end()) - train_counts.begin());

    auto record = [&](std::string name, const std::vector<std::optional<std::size_t>>& predicted, double ms) {
        ConfusionMatrix cm(split.categories.size());
        for (std::size_t i = 0; i < test.size(); ++i) cm.add(cat_index.at(*test[i].category), predicted[i]);
        report.timings.classify_ms.emplace_back(name, ms);
        report.rows.push_back({std::move(name), cm, metrics(cm)});
    };

    for (auto measure : config.measures) {
        t0 = clock::now();
        auto predicted = detail::parallel_map(test.size(), config.jobs, [&](std::size_t i) {
            const auto p = classify(model, test[i].bits, measure, config.activation);
            std::optional<std::size_t> out;
            if (p.category)
                out = cat_index.at(*p.category);
            else if (config.majority_fallback)
                out = majority;
            return out;
        });
        record("lattice-cell/" + std::string(to_string(measure)), predicted, detail::elapsed_ms(t0));
    }
    if (config.naive_bayes) {
        t0 = clock::now();
        const NaiveBayes nb(train, split.categories);
        auto predicted = detail::parallel_map(test.size(), config.jobs, [&](std::size_t i) {
            return std::optional<std::size_t>(nb.predict_index(test[i].bits));
        });
        record("naive-bayes", predicted, detail::elapsed_ms(t0));
    }
    if (config.knn) {
        t0 = clock::now();
        auto predicted = detail::parallel_map(test.size(), config.jobs, [&](std::size_t i) {
            return std::optional<std::size_t>(
                cat_index.at(baseline_knn(train, test[i].bits, config.knn_k, config.knn_measure, split.categories)));
        });
        record("knn/k=" + std::to_string(config.knn_k) + "/" + std::string(to_string(config.knn_measure)), predicted,
               detail::elapsed_ms(t0));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Report output. Timings are written separately so the report itself is
// reproducible byte for byte.

inline nlohmann::ordered_json report_to_json(const ExperimentReport& r) {
    nlohmann::ordered_json j;
    j["averaging"] = "macro";
    j["categories"] = r.categories;
    j["split"] = r.split;
    j["seed"] = r.seed;
    j["activation"] = r.activation;
    j["train_documents"] = r.train_documents;
    j["test_documents"] = r.test_documents;
    j["vocabulary_size"] = r.vocabulary_size;
    j["concepts"] = r.concepts;
    j["cover_edges"] = r.cover_edges;
    j["facts"] = r.facts;
    j["rules"] = r.rules;
    auto& rows = j["results"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"configuration", row.name},
                        {"precision", row.metrics.precision},
                        {"recall", row.metrics.recall},
                        {"accuracy", row.metrics.accuracy},
                        {"error", row.metrics.error},
                        {"f_measure", row.metrics.f_measure},
                        {"confusion", row.confusion.counts},
                        {"unclassified", row.confusion.unclassified}});
    }
    return j;
}

inline nlohmann::ordered_json timings_to_json(const ExperimentTimings& t) {
    nlohmann::ordered_json j;
    j["vectorize_ms"] = t.vectorize_ms;
    j["lattice_build_ms"] = t.lattice_build_ms;
    j["compile_ms"] = t.compile_ms;
    j["test_documents"] = t.test_documents;
    auto& rows = j["classification"] = nlohmann::ordered_json::array();
    for (const auto& [name, ms] : t.classify_ms)
        rows.push_back({{"configuration", name},
                        {"total_ms", ms},
                        {"per_document_ms", t.test_documents ? ms / static_cast<double>(t.test_documents) : 0.0}});
    return j;
}

/// Aligned table with one row per configuration.
inline void write_report_table(std::ostream& out, const ExperimentReport& r) {
    std::size_t width = 13;
    for (const auto& row : r.rows) width = std::max(width, row.name.size());
    out << "# macro-averaged precision/recall; train=" << r.train_documents << " test=" << r.test_documents
        << " vocabulary=" << r.vocabulary_size << " concepts=" << r.concepts << " rules=" << r.rules << '\n';
    out << std::left << std::setw(static_cast<int>(width)) << "Configuration" << std::right;
    for (const char* h : {"Precision", "Recall", "Accuracy", "Error", "F-Measure"}) out << std::setw(11) << h;
    out << '\n';
    out << std::fixed << std::setprecision(4);
    for (const auto& row : r.rows) {
        const auto& m = row.metrics;
        out << std::left << std::setw(static_cast<int>(width)) << row.name << std::right;
        for (double v : {m.precision, m.recall, m.accuracy, m.error, m.f_measure}) out << std::setw(11) << v;
        out << '\n';
    }
    out << std::defaultfloat;
}

}  // namespace latticecell
