// latticecell: build concept lattices, compile them into cellular models,
// classify documents and run evaluations.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace latticecell::cli;

    CLI::App app{"Concept-lattice text categorization with a Boolean cellular inference engine"};
    app.require_subcommand(1);
    std::size_t jobs = 1;
    app.add_option("--jobs", jobs, "Worker threads for per-document work")->check(CLI::PositiveNumber);

    BuildOptions build;
    auto* b = app.add_subcommand("build", "Build the concept lattice of a context CSV or labeled corpus");
    b->add_option("input", build.input, "Context CSV file or corpus root")->required();
    b->add_option("-o,--out", build.out, "Lattice JSON output");
    b->add_option("--dot", build.dot, "Hasse diagram in Graphviz DOT format");
    b->add_option("--features", build.features, "Number of IG-selected terms (corpus input)");
    b->add_option("--stopwords", build.stopwords, "Stopword file, one term per line");

    CompileOptions comp;
    auto* c = app.add_subcommand("compile", "Compile a lattice and document labels into a cellular model");
    c->add_option("lattice", comp.lattice, "Lattice JSON");
    c->add_option("labels", comp.labels, "Label CSV: id,category per line");
    c->add_option("-o,--out", comp.out, "Model JSON output");
    c->add_flag("--paper-fixture", comp.paper_fixture, "Use the built-in 12-fact worked-example model");

    ClassifyOptions cls;
    auto* k = app.add_subcommand("classify", "Classify documents against a cellular model");
    k->add_option("--model", cls.model, "Model JSON");
    k->add_option("inputs", cls.inputs, "Document files or directories");
    k->add_option("--vector", cls.vectors, "Literal binary vector over the model vocabulary, e.g. 000110");
    k->add_option("--similarity", cls.similarity, "jaccard|cosine|dice|inner")
        ->check(CLI::IsMember({"jaccard", "cosine", "dice", "inner"}));
    k->add_option("--activation", cls.activation, "max | topk:K | threshold:T");
    k->add_option("--stopwords", cls.stopwords, "Stopword file, one term per line");
    k->add_flag("--trace", cls.trace, "Dump engine layers and per-cycle vectors to stderr");
    k->add_flag("--paper-fixture", cls.paper_fixture, "Use the built-in 12-fact worked-example model");
    k->add_flag("--table", cls.table, "Tab-separated output instead of JSON lines");

    EvaluateOptions ev;
    auto* e = app.add_subcommand("evaluate", "Train on a corpus and report metrics per configuration");
    e->add_option("corpus", ev.corpus, "Corpus root (category subdirectories, or train/ and test/)")->required();
    e->add_option("--similarity", ev.similarity, "all, or a comma list of jaccard,cosine,dice,inner");
    e->add_option("--activation", ev.activation, "max | topk:K | threshold:T");
    e->add_option("--features", ev.features, "Number of IG-selected terms")->check(CLI::PositiveNumber);
    e->add_option("--stopwords", ev.stopwords, "Stopword file, one term per line");
    e->add_option("--baselines", ev.baselines, "Comma list of nb,knn");
    e->add_option("--split", ev.split, "Training fraction when the corpus has no train/test directories");
    e->add_option("--seed", ev.seed, "Seed for the random split");
    e->add_option("--knn-k", ev.knn_k, "Neighbours for the k-NN baseline")->check(CLI::PositiveNumber);
    e->add_option("--knn-similarity", ev.knn_similarity, "Similarity used by the k-NN baseline");
    e->add_flag("--majority-fallback", ev.majority_fallback,
                "Predict the training majority class for unclassifiable documents");
    e->add_option("--out-dir", ev.out_dir, "Directory for report.json, report.txt and timings.json");

    InspectOptions ins;
    auto* i = app.add_subcommand("inspect", "Summarize a context, lattice, model or report file");
    i->add_option("file", ins.file, "File to inspect");
    i->add_flag("--paper-fixture", ins.paper_fixture, "Show the built-in worked-example model");

    CLI11_PARSE(app, argc, argv);
    ev.jobs = jobs;

    try {
        if (*b) return cmd_build(build, std::cout);
        if (*c) return cmd_compile(comp, std::cout);
        if (*k) {
            if (cls.model.empty() && !cls.paper_fixture) throw latticecell::Error("classify needs --model or --paper-fixture");
            return cmd_classify(cls, std::cout, std::cerr);
        }
        if (*e) return cmd_evaluate(ev, std::cout, std::cerr);
        if (*i) return cmd_inspect(ins, std::cout);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
