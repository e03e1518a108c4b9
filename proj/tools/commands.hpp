#pragma once

// Implementations of the latticecell subcommands. Each takes its parsed
// options plus output/error streams and returns the process exit code.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <latticecell/latticecell.hpp>

namespace latticecell::cli {

namespace fs = std::filesystem;

struct BuildOptions {
    std::string input;  // context CSV or labeled corpus directory
    std::string out;
    std::string dot;
    std::size_t features = kDefaultFeatureCount;
    std::string stopwords;
};

struct CompileOptions {
    std::string lattice;
    std::string labels;
    std::string out;
    bool paper_fixture = false;
};

struct ClassifyOptions {
    std::string model;
    std::vector<std::string> inputs;
    std::vector<std::string> vectors;  // literal "000110" vectors
    std::string similarity = "inner";
    std::string activation = "max";
    std::string stopwords;
    bool trace = false;
    bool paper_fixture = false;
    bool table = false;
};

struct EvaluateOptions {
    std::string corpus;
    std::string similarity = "all";
    std::string activation = "max";
    std::size_t features = kDefaultFeatureCount;
    std::string stopwords;
    std::string baselines;
    std::optional<double> split;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    std::size_t knn_k = 3;
    std::string knn_similarity = "cosine";
    bool majority_fallback = false;
    std::string out_dir;
};

struct InspectOptions {
    std::string file;
    bool paper_fixture = false;
};

namespace detail {

inline nlohmann::ordered_json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        return nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

inline Preprocessor make_preprocessor(const std::string& stopwords) {
    Preprocessor pre;
    if (!stopwords.empty()) pre.stopwords = load_stopwords(stopwords);
    return pre;
}

/// "id,category" per line; blank lines and '#' comments ignored.
inline std::pair<std::map<std::string, std::string>, std::vector<std::string>> read_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open label file " + path);
    std::map<std::string, std::string> labels;
    std::vector<std::string> categories;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = latticecell::detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected 'id,category'");
        auto id = latticecell::detail::trim(line.substr(0, comma));
        auto cat = latticecell::detail::trim(line.substr(comma + 1));
        if (id.empty() || cat.empty()) throw ParseError(path + ":" + std::to_string(line_no) + ": empty field");
        if (std::find(categories.begin(), categories.end(), cat) == categories.end()) categories.push_back(cat);
        labels[id] = cat;
    }
    return {std::move(labels), std::move(categories)};
}

inline nlohmann::ordered_json rationals(const ClassDistribution& d) {
    auto j = nlohmann::ordered_json::array();
    for (const auto& r : d.fractions) j.push_back(to_string(r));
    return j;
}

inline nlohmann::ordered_json doubles(const ClassDistribution& d) {
    auto j = nlohmann::ordered_json::array();
    for (const auto& r : d.fractions) j.push_back(to_double(r));
    return j;
}

inline nlohmann::ordered_json prediction_json(const std::string& id, const Prediction& p, const CellularModel& m) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["category"] = p.category_or_marker();
    j["classified"] = p.classified();
    j["distribution"] = doubles(p.distribution);
    j["distribution_exact"] = rationals(p.distribution);
    auto labels = [&](const std::vector<std::size_t>& facts) {
        auto a = nlohmann::ordered_json::array();
        for (auto f : facts) a.push_back(m.engine.facts[f].label);
        return a;
    };
    j["activated_intents"] = labels(p.activated_intents);
    j["fired_vertices"] = labels(p.fired_vertices);
    return j;
}

}  // namespace detail

inline int cmd_build(const BuildOptions& o, std::ostream& out) {
    FormalContext ctx;
    if (fs::is_directory(o.input)) {
        const auto corpus = load_labeled_corpus(o.input);
        const auto pre = detail::make_preprocessor(o.stopwords);
        const auto vocab = build_vocabulary(corpus.documents, corpus.categories, o.features, pre);
        std::vector<DocumentVector> vectors;
        for (const auto& d : corpus.documents) vectors.push_back(vectorize(d, vocab, pre));
        ctx = build_context(vectors, vocab.terms);
    } else {
        ctx = load_context_csv(o.input);
    }
    const auto lattice = build_lattice(ctx);
    if (!o.out.empty()) detail::write_text(o.out, lattice_to_json(lattice).dump(2) + "\n");
    if (!o.dot.empty()) {
        std::ostringstream dot;
        write_lattice_dot(dot, lattice);
        detail::write_text(o.dot, dot.str());
    }
    const auto edges = lattice.covers.size();
    out << lattice.size() << (lattice.size() == 1 ? " concept, " : " concepts, ") << edges
        << (edges == 1 ? " edge" : " edges") << '\n';
    return 0;
}

inline int cmd_compile(const CompileOptions& o, std::ostream& out) {
    CellularModel model;
    if (o.paper_fixture) {
        model = load_fixture_model();
    } else {
        if (o.lattice.empty() || o.labels.empty()) throw Error("compile needs a lattice file and a label file");
        const auto lattice = lattice_from_json(detail::read_json(o.lattice));
        const auto [labels, categories] = detail::read_labels(o.labels);
        model = compile(lattice, labels, categories);
    }
    if (!o.out.empty()) detail::write_text(o.out, model_to_json(model).dump(2) + "\n");
    out << model.num_facts() << " facts, " << model.num_rules() << " rules\n";
    return 0;
}

inline int cmd_classify(const ClassifyOptions& o, std::ostream& out, std::ostream& trace) {
    const CellularModel model =
        o.paper_fixture ? load_fixture_model() : model_from_json(detail::read_json(o.model));
    const auto measure = parse_similarity(o.similarity);
    const auto policy = parse_activation(o.activation);
    const auto pre = detail::make_preprocessor(o.stopwords);

    std::vector<DocumentVector> docs;
    for (const auto& path : o.inputs)
        for (const auto& d : load_unlabeled(path)) docs.push_back(vectorize(d, model.vocabulary, pre));
    for (std::size_t i = 0; i < o.vectors.size(); ++i) {
        auto b = bits::from_string01(o.vectors[i]);
        require_model_vocabulary(model, b);
        docs.push_back({"vector" + std::to_string(i + 1), std::move(b), std::nullopt});
    }

    for (const auto& doc : docs) {
        InferenceObserver observer;
        if (o.trace) {
            trace << "== " << doc.id << ": CELFACT after activation ==\n";
            write_fact_layer(trace, set_facts(model.engine, activate(model, doc.bits, measure, policy)));
            observer = [&](std::size_t cycle, const char* step, const EngineState& s) {
                trace << trace_line(cycle, step, s) << '\n';
                if (cycle == 1 && std::string_view(step) == "delta_fact") {
                    trace << "== CELRULE after cycle 1 delta_fact ==\n";
                    write_rule_layer(trace, s);
                }
            };
        }
        const auto p = classify(model, doc.bits, measure, policy, observer);
        if (o.trace && !p.activated_intents.empty()) {
            // Facts established by the inference itself, laid out like the
            // final CELFACT table.
            auto inferred = run_inference(set_facts(model.engine, p.activated_intents)).state;
            for (auto i : p.activated_intents) inferred.facts[i].ef = false;
            for (auto& f : inferred.facts) f.sf = false;
            trace << "== CELFACT established by inference ==\n";
            write_fact_layer(trace, inferred);
        }
        if (o.table) {
            out << doc.id << '\t' << p.category_or_marker();
            for (const auto& r : p.distribution.fractions) out << '\t' << to_double(r);
            out << '\n';
        } else {
            out << detail::prediction_json(doc.id, p, model).dump() << '\n';
        }
    }
    return 0;
}

inline std::vector<Similarity> parse_similarity_list(const std::string& spec) {
    if (spec.empty() || spec == "all") return {std::begin(kAllSimilarities), std::end(kAllSimilarities)};
    std::vector<Similarity> out;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_similarity(latticecell::detail::trim(item)));
    return out;
}

inline int cmd_evaluate(const EvaluateOptions& o, std::ostream& out, std::ostream& err) {
    ExperimentConfig config;
    config.measures = parse_similarity_list(o.similarity);
    config.activation = parse_activation(o.activation);
    if (o.features == 0) throw Error("--features must be at least 1");
    config.features = o.features;
    config.preprocessor = detail::make_preprocessor(o.stopwords);
    std::istringstream in(o.baselines);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = latticecell::detail::trim(item);
        if (item == "nb")
            config.naive_bayes = true;
        else if (item == "knn")
            config.knn = true;
        else if (!item.empty())
            throw Error("unknown baseline '" + item + "' (expected nb or knn)");
    }
    if (o.split) config.split_ratio = *o.split;
    config.seed = o.seed;
    config.jobs = o.jobs;
    config.knn_k = o.knn_k;
    config.knn_measure = parse_similarity(o.knn_similarity);
    config.majority_fallback = o.majority_fallback;

    const auto report = run_experiment(o.corpus, config);
    std::ostringstream table;
    write_report_table(table, report);
    const auto timings = timings_to_json(report.timings).dump(2) + "\n";
    if (!o.out_dir.empty()) {
        fs::create_directories(o.out_dir);
        detail::write_text((fs::path(o.out_dir) / "report.json").string(), report_to_json(report).dump(2) + "\n");
        detail::write_text((fs::path(o.out_dir) / "report.txt").string(), table.str());
        detail::write_text((fs::path(o.out_dir) / "timings.json").string(), timings);
    }
    out << table.str();
    err << "timings: " << timings;
    return 0;
}

inline int cmd_inspect(const InspectOptions& o, std::ostream& out) {
    if (o.paper_fixture || o.file.empty()) {
        if (!o.paper_fixture) throw Error("inspect needs a file or --paper-fixture");
        const auto m = load_fixture_model();
        out << m.num_facts() << " facts, " << m.num_rules() << " rules\n";
        write_fact_layer(out, m.engine);
        write_rule_layer(out, m.engine);
        return 0;
    }
    if (o.file.size() > 4 && o.file.substr(o.file.size() - 4) == ".csv") {
        const auto ctx = load_context_csv(o.file);
        out << ctx.num_objects() << " objects, " << ctx.num_attributes() << " attributes\n";
        return 0;
    }
    const auto j = detail::read_json(o.file);
    if (j.contains("concepts")) {
        const auto l = lattice_from_json(j);
        out << l.size() << " concepts, " << l.covers.size() << " edges\n";
        for (std::size_t k = 0; k < l.size(); ++k) {
            out << k << ": {";
            bool first = true;
            for (auto i : bits::to_indices(l.concepts[k].extent)) {
                out << (first ? "" : ", ") << l.object_ids[i];
                first = false;
            }
            out << "} " << intent_label(l.concepts[k].intent, l.attribute_names) << '\n';
        }
    } else if (j.contains("rules")) {
        const auto m = model_from_json(j);
        out << m.num_facts() << " facts, " << m.num_rules() << " rules\n";
        write_fact_layer(out, m.engine);
        write_rule_layer(out, m.engine);
    } else if (j.contains("results")) {
        out << j.at("results").size() << " configurations\n";
    } else {
        throw ParseError(o.file + ": not a lattice, model or report document");
    }
    return 0;
}

}  // namespace latticecell::cli
