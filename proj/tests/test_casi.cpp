#include <sstream>

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace latticecell;
using namespace latticecell::testing;

namespace {

// Fact layout of the worked-example model (fact layer row order).
constexpr std::size_t kPaysStade = 0, kS0 = 1, kVisage = 2, kS3 = 3, kPuisMin = 4, kS4 = 5, kVisPuisMin = 6,
                      kS5 = 7, kStade = 8, kS6 = 9, kPersonnage = 10, kS7 = 11;

std::vector<bool> column_ef(const EngineState& s) {
    std::vector<bool> out;
    for (const auto& f : s.facts) out.push_back(f.ef);
    return out;
}

EngineState activated_fixture() { return set_facts(load_fixture_model().engine, {kPuisMin, kVisPuisMin}); }

}  // namespace

TEST(SetFacts, ReproducesInitialLayer) {
    const auto s = activated_fixture();
    ASSERT_EQ(s.facts.size(), 12u);
    const std::vector<bool> ef = {0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0};
    EXPECT_EQ(column_ef(s), ef);
    for (const auto& f : s.facts) {
        EXPECT_TRUE(f.in) << f.label;
        EXPECT_FALSE(f.sf) << f.label;
    }
    EXPECT_EQ(s.facts[kPuisMin].label, "[Puissance, Ministre]");
    EXPECT_EQ(s.facts[kS4].label, "[S4 (0% S), (67% E), (33% T)]");
}

TEST(SetFacts, ResetSemanticsAndBounds) {
    const auto base = load_fixture_model().engine;
    EXPECT_TRUE(set_facts(base, {}).established().none());
    auto twice = set_facts(set_facts(base, {kStade}), {kVisage});
    EXPECT_EQ(bits::to_indices(twice.established()), (std::vector<std::size_t>{kVisage}));
    EXPECT_THROW(set_facts(base, {12}), BoundsError);
}

TEST(DeltaFact, TriggersRulesOfActivatedIntents) {
    const auto s = delta_fact(activated_fixture());
    // Two of the six rules fire, all still participating and unconsumed.
    std::vector<bool> er;
    for (const auto& r : s.rules) {
        er.push_back(r.er);
        EXPECT_TRUE(r.ir);
        EXPECT_TRUE(r.sr);
    }
    EXPECT_EQ(er, (std::vector<bool>{0, 0, 1, 1, 0, 0}));
    EXPECT_TRUE(s.re.get(kPuisMin, 2));
    EXPECT_TRUE(s.re.get(kVisPuisMin, 3));
    // SF copies EF.
    for (const auto& f : s.facts) EXPECT_EQ(f.sf, f.ef);
}

TEST(DeltaFact, NoEstablishedFactsTriggersNothing) {
    const auto s = delta_fact(load_fixture_model().engine);
    EXPECT_TRUE(s.triggered().none());
}

TEST(DeltaFact, ConjunctivePremises) {
    EngineState s;
    for (int i = 0; i < 3; ++i) s.add_fact("f" + std::to_string(i));
    s.add_rule("r", {0, 1}, {2});
    s = delta_fact(set_facts(s, {0}));
    EXPECT_FALSE(s.rules[0].er);
    const auto oracle = oracle_forward_chain(3, {{{0, 1}, {2}}}, {0});
    EXPECT_FALSE(oracle[2]);
}

TEST(DeltaRule, EstablishesConclusionsS4AndS5) {
    const auto before = delta_fact(activated_fixture());
    const auto s = delta_rule(before);
    std::vector<bool> ef = {0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0};
    EXPECT_EQ(column_ef(s), ef);
    for (std::size_t j = 0; j < s.rules.size(); ++j) EXPECT_EQ(s.rules[j].sr, !s.rules[j].er);
}

TEST(DeltaRule, NothingTriggeredChangesNothing) {
    const auto base = activated_fixture();
    const auto s = delta_rule(base);
    EXPECT_EQ(s.established(), base.established());
    for (const auto& r : s.rules) EXPECT_TRUE(r.sr);
}

TEST(DeltaRule, ConsumedRuleDoesNotFireAgain) {
    EngineState s;
    s.add_fact("a");
    s.add_fact("b");
    s.add_rule("r", {0}, {1});
    s.rules[0].er = true;
    s.rules[0].sr = false;
    s = delta_rule(s);
    EXPECT_FALSE(s.facts[1].ef);
}

TEST(RunInference, WorkedExampleFinalLayer) {
    const auto initial = activated_fixture();
    const auto result = run_inference(initial);
    // Extent facts established: exactly S4 and S5.
    for (auto e : {kS0, kS3, kS4, kS5, kS6, kS7})
        EXPECT_EQ(result.state.facts[e].ef, e == kS4 || e == kS5) << result.state.facts[e].label;
    // Inferred view: facts established by the inference itself.
    std::vector<bool> inferred;
    for (std::size_t i = 0; i < 12; ++i) inferred.push_back(result.state.facts[i].ef && !initial.facts[i].ef);
    EXPECT_EQ(inferred, (std::vector<bool>{0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0}));
    for (const auto& f : result.state.facts) EXPECT_TRUE(f.in);
    EXPECT_EQ(result.cycles, 2u);
    (void)kPaysStade;
    (void)kPersonnage;
}

TEST(RunInference, ChainNeedsTwoCycles) {
    EngineState s;
    for (int i = 0; i < 3; ++i) s.add_fact("f" + std::to_string(i + 1));
    s.add_rule("r1", {0}, {1});
    s.add_rule("r2", {1}, {2});
    std::vector<BitVector> per_cycle;
    const auto result = run_inference(set_facts(s, {0}), [&](std::size_t, const char* step, const EngineState& st) {
        if (std::string_view(step) == "delta_rule") per_cycle.push_back(st.established());
    });
    ASSERT_GE(per_cycle.size(), 2u);
    EXPECT_FALSE(per_cycle[0].test(2));
    EXPECT_TRUE(per_cycle[1].test(2));
    EXPECT_EQ(result.cycles, 3u);
    EXPECT_LE(result.cycles, s.rules.size() + 1);
}

TEST(RunInference, NoInitialFactsIsAFixpoint) {
    const auto base = set_facts(load_fixture_model().engine, {});
    const auto result = run_inference(base);
    EXPECT_EQ(result.cycles, 1u);
    EXPECT_EQ(result.state.established(), base.established());
    EXPECT_EQ(result.state.triggered(), base.triggered());
}

TEST(RunInference, PassiveCellsDoNotParticipate) {
    EngineState s;
    s.add_fact("a");
    s.add_fact("b", false);
    s.add_fact("c");
    s.add_rule("r1", {0}, {1});
    s.add_rule("r2", {0}, {2});
    auto st = set_facts(s, {0});
    st.rules[1].ir = false;
    const auto out = delta_rule(delta_fact(st));
    EXPECT_TRUE(out.rules[0].er);
    EXPECT_FALSE(out.facts[1].ef);  // IF = 0 conclusion
    EXPECT_FALSE(out.rules[1].er);  // IR = 0 rule
    EXPECT_FALSE(out.facts[2].ef);
}

TEST(RunInference, RulesWithoutPremisesNeverTrigger) {
    EngineState s;
    s.add_fact("a");
    s.add_rule("axiom", {}, {0});
    const auto out = run_inference(set_facts(s, {}));
    EXPECT_FALSE(out.state.facts[0].ef);
    EXPECT_FALSE(out.state.rules[0].er);
}

TEST(RunInference, OracleEquivalenceAndMonotonicity) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        const auto rs = random_ruleset(rng);
        const auto initial = set_facts(rs.engine(), rs.initial);
        BitVector last_ef = initial.established(), last_er = initial.triggered();
        bool monotone = true;
        const auto result = run_inference(initial, [&](std::size_t, const char*, const EngineState& st) {
            const auto ef = st.established(), er = st.triggered();
            monotone = monotone && last_ef.is_subset_of(ef) && last_er.is_subset_of(er);
            last_ef = ef;
            last_er = er;
        });
        EXPECT_TRUE(monotone);
        EXPECT_LE(result.cycles, rs.rules.size() + 1);
        const auto expected = oracle_forward_chain(rs.facts, rs.rules, rs.initial);
        for (std::size_t i = 0; i < rs.facts; ++i) ASSERT_EQ(result.state.facts[i].ef, expected[i]) << "trial " << trial;
    }
}

TEST(RunInference, CompiledModelsSettleInOnePass) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto ctx = random_context(rng, 10, 8);
        std::vector<std::string> labels;
        for (std::size_t o = 0; o < ctx.num_objects(); ++o) labels.push_back(o % 2 ? "A" : "B");
        const auto model = compile(build_lattice(ctx), labels, {"A", "B"});
        std::vector<std::size_t> active;
        for (const auto& f : model.intent_facts)
            if (rng() % 3 == 0) active.push_back(f.fact);
        const auto start = set_facts(model.engine, active);
        const auto one_pass = delta_rule(delta_fact(start));
        const auto result = run_inference(start);
        EXPECT_EQ(one_pass.established(), result.state.established());
        EXPECT_LE(result.cycles, 2u);
    }
}

TEST(Trace, LineAndTableLayout) {
    const auto s = delta_fact(activated_fixture());
    EXPECT_EQ(trace_line(1, "delta_fact", s), "cycle 1 delta_fact EF=000010100000 ER=001100 SR=111111");
    std::ostringstream facts, rules;
    write_fact_layer(facts, s);
    write_rule_layer(rules, s);
    EXPECT_NE(facts.str().find("[Visage, Puissance, Ministre]  1  1  1"), std::string::npos) << facts.str();
    EXPECT_NE(rules.str().find("R3     1  1  1"), std::string::npos) << rules.str();
}
