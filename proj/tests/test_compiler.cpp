#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace latticecell;
using namespace latticecell::testing;

namespace {

// S = 0, E = 1, T = 2
const std::vector<std::size_t> kLabelIdx = {0, 0, 2, 2, 1, 1, 0, 1, 2};

ClassDistribution dist(Rational s, Rational e, Rational t) { return {{s, e, t}}; }

void expect_model_invariants(const CellularModel& m) {
    ASSERT_EQ(m.intent_facts.size(), m.num_rules());
    ASSERT_EQ(m.extent_facts.size(), m.num_rules());
    for (std::size_t j = 0; j < m.num_rules(); ++j) {
        EXPECT_EQ(m.engine.re.column(j).count(), 1u);
        EXPECT_EQ(m.engine.rs.column(j).count(), 1u);
        EXPECT_TRUE(m.engine.re.get(m.intent_facts[j].fact, j));
        EXPECT_TRUE(m.engine.rs.get(m.extent_facts[j].fact, j));
        EXPECT_EQ(m.extent_facts[j].distribution.total(), 1);
        EXPECT_TRUE(m.extent_facts[j].distribution.is_valid());
        const auto& r = m.engine.rules[j];
        EXPECT_TRUE(!r.er && r.ir && r.sr);
    }
    for (const auto& f : m.engine.facts) {
        EXPECT_FALSE(f.ef);
        EXPECT_TRUE(f.in);
    }
}

}  // namespace

TEST(DistributionOf, HandCounts) {
    EXPECT_EQ(distribution_of(docs({5, 6, 8}), kLabelIdx, 3), dist(0, 1, 0));
    EXPECT_EQ(distribution_of(docs({3, 7}), kLabelIdx, 3), dist(Rational(1, 2), 0, Rational(1, 2)));
    EXPECT_EQ(distribution_of(docs({9}), kLabelIdx, 3), dist(0, 0, 1));
    EXPECT_EQ(distribution_of(docs({1, 2, 7, 9}), kLabelIdx, 3), dist(Rational(3, 4), 0, Rational(1, 4)));
    EXPECT_THROW(distribution_of(docs({}), kLabelIdx, 3), UndefinedError);
    EXPECT_THROW(distribution_of(BitVector(2), kLabelIdx, 3), DimensionError);
}

TEST(DistributionFormat, RoundsHalfUp) {
    EXPECT_EQ(percent(Rational(2, 3)), 67);
    EXPECT_EQ(percent(Rational(1, 3)), 33);
    EXPECT_EQ(percent(Rational(1, 200)), 1);
    EXPECT_EQ(percent(Rational(1, 201)), 0);
    EXPECT_EQ(format_distribution(dist(Rational(2, 3), 0, Rational(1, 3)), {"S", "E", "T"}),
              "(67% S), (0% E), (33% T)");
}

TEST(Compile, SampleSkipsTopAndBottom) {
    const auto lattice = build_lattice(sample_context());
    const auto model = compile(lattice, sample_labels(), sample_categories());
    EXPECT_EQ(model.num_rules(), 7u);
    EXPECT_EQ(model.num_facts(), 14u);
    expect_model_invariants(model);

    const auto ctx = sample_context();
    std::set<std::vector<std::size_t>> intents;
    for (const auto& f : model.intent_facts) intents.insert(bits::to_indices(f.attributes));
    std::set<std::vector<std::size_t>> expected;
    for (auto names : std::vector<std::initializer_list<std::string>>{{"Stade"},
                                                                       {"Stade", "Pays"},
                                                                       {"Visage"},
                                                                       {"Stade", "Visage"},
                                                                       {"Ministre"},
                                                                       {"Ministre", "Puissance"},
                                                                       {"Personnage"}})
        expected.insert(bits::to_indices(attrs(ctx, names)));
    EXPECT_EQ(intents, expected);

    // Intent and extent facts alternate, like the CELFACT table.
    for (std::size_t k = 0; k < model.num_rules(); ++k) {
        EXPECT_EQ(model.intent_facts[k].fact, 2 * k);
        EXPECT_EQ(model.extent_facts[k].fact, 2 * k + 1);
    }
}

TEST(Compile, DistributionsAndLabels) {
    const auto lattice = build_lattice(sample_context());
    const auto model = compile(lattice, sample_labels(), sample_categories());
    for (std::size_t k = 0; k < model.num_rules(); ++k) {
        if (model.engine.facts[model.intent_facts[k].fact].label == "[Visage]") {
            EXPECT_EQ(model.extent_facts[k].distribution, dist(Rational(1, 2), 0, Rational(1, 2)));
            EXPECT_EQ(model.engine.facts[model.extent_facts[k].fact].label.substr(0, 3), "[S4");
        }
        if (model.engine.facts[model.intent_facts[k].fact].label == "[Ministre]") {
            EXPECT_EQ(model.extent_facts[k].distribution, dist(0, 1, 0));
        }
    }
}

TEST(Compile, TopAndBottomOnly) {
    const FormalContext ctx({"1", "2"}, {"a"}, {BitVector(1), BitVector(1)});
    const auto model = compile(build_lattice(ctx), std::vector<std::string>{"X", "Y"}, {"X", "Y"});
    EXPECT_EQ(model.num_rules(), 0u);
    EXPECT_EQ(model.num_facts(), 0u);
}

TEST(Compile, UnlabeledObject) {
    const auto lattice = build_lattice(sample_context());
    std::map<std::string, std::string> labels;
    const auto names = sample_labels();
    for (std::size_t o = 0; o < 9; ++o)
        if (o != 3) labels["Doc" + std::to_string(o + 1)] = names[o];
    try {
        compile(lattice, labels, sample_categories());
        FAIL() << "expected a labeling error";
    } catch (const LabelError& e) {
        EXPECT_STREQ(e.what(), "Doc4 unlabeled");
    }
    auto bad = sample_labels();
    bad[0] = "Q";
    EXPECT_THROW(compile(lattice, bad, sample_categories()), LabelError);
}

TEST(FixtureModel, MatchesInitialLayer) {
    const auto m = load_fixture_model();
    EXPECT_EQ(m.num_facts(), 12u);
    EXPECT_EQ(m.num_rules(), 6u);
    expect_model_invariants(m);
    std::vector<std::string> intents;
    for (const auto& f : m.intent_facts) intents.push_back(m.engine.facts[f.fact].label);
    EXPECT_EQ(intents, (std::vector<std::string>{"[Pays, Stade]", "[Visage]", "[Puissance, Ministre]",
                                                 "[Visage, Puissance, Ministre]", "[Stade]", "[Personnage]"}));
    EXPECT_EQ(m.extent_facts[3].distribution, dist(0, 1, 0));
    EXPECT_EQ(m.extent_facts[2].distribution, dist(0, Rational(67, 100), Rational(33, 100)));
    EXPECT_EQ(m.engine.facts[m.extent_facts[4].fact].label, "[S6 (67% S), (0% E), (33% T)]");
    // Printed labels agree with the stored distributions.
    for (const auto& e : m.extent_facts) {
        const auto& label = m.engine.facts[e.fact].label;
        EXPECT_NE(label.find(format_distribution(e.distribution, m.categories)), std::string::npos) << label;
    }
}

TEST(ModelJson, RoundTrips) {
    for (const auto& m : {load_fixture_model(), compile(build_lattice(sample_context()), sample_labels(), sample_categories())}) {
        const auto text = model_to_json(m).dump();
        const auto back = model_from_json(nlohmann::ordered_json::parse(text));
        EXPECT_EQ(back, m);
        EXPECT_EQ(model_to_json(back).dump(), text);
    }
}

TEST(ModelJson, RejectsMalformedDocuments) {
    auto j = model_to_json(load_fixture_model());
    j["facts"][1]["distribution"][0] = {1, 2};  // no longer sums to one
    EXPECT_THROW(model_from_json(j), ParseError);
    j = model_to_json(load_fixture_model());
    j["rules"][0]["premise"] = 1;  // extent fact as premise
    EXPECT_THROW(model_from_json(j), ParseError);
    EXPECT_THROW(model_from_json(nlohmann::ordered_json::parse("{}")), ParseError);
}

TEST(Compile, RandomContextsSatisfyInvariants) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const auto ctx = random_context(rng, 12, 8);
        const std::vector<std::string> cats = {"A", "B", "C"};
        std::vector<std::string> labels;
        for (std::size_t o = 0; o < ctx.num_objects(); ++o) labels.push_back(cats[rng() % 3]);
        const auto lattice = build_lattice(ctx);
        const auto model = compile(lattice, labels, cats);
        expect_model_invariants(model);
        std::size_t eligible = 0;
        for (const auto& c : lattice.concepts) eligible += c.intent.any() && c.extent.any();
        EXPECT_EQ(model.num_rules(), eligible);
        EXPECT_EQ(model_from_json(nlohmann::ordered_json::parse(model_to_json(model).dump())), model);
    }
}
