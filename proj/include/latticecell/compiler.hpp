#pragma once

// Compilation of a concept lattice into a cellular model: every concept with
// a nonempty intent and a nonempty extent becomes an intent fact, an extent
// fact carrying the class distribution of its documents, and one rule
// linking the two.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "casi.hpp"
#include "lattice.hpp"

namespace latticecell {

/// Per-category fractions, aligned with a category list.
struct ClassDistribution {
    std::vector<Rational> fractions;

    std::size_t size() const { return fractions.size(); }
    const Rational& operator[](std::size_t c) const { return fractions[c]; }

    Rational total() const {
        Rational sum = 0;
        for (const auto& f : fractions) sum += f;
        return sum;
    }

    bool is_valid() const {
        for (const auto& f : fractions)
            if (f < 0 || f > 1) return false;
        return total() == 1;
    }

    friend bool operator==(const ClassDistribution&, const ClassDistribution&) = default;
};

/// round-half-up(100 * f)
inline long long percent(const Rational& f) {
    Rational scaled = f * 100 + Rational(1, 2);
    auto q = boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled);
    return q.convert_to<long long>();
}

/// "(67% E), (33% T)"-style rendering, one term per category.
inline std::string format_distribution(const ClassDistribution& d, const std::vector<std::string>& categories) {
    std::string out;
    for (std::size_t c = 0; c < d.size(); ++c) {
        if (c) out += ", ";
        out += "(" + std::to_string(percent(d[c])) + "% " + categories.at(c) + ")";
    }
    return out;
}

/// Class distribution of the objects in `extent`. `labels[o]` is the
/// category index of object o.
inline ClassDistribution distribution_of(const BitVector& extent, const std::vector<std::size_t>& labels,
                                         std::size_t num_categories) {
    if (extent.size() != labels.size())
        throw DimensionError("extent of length " + std::to_string(extent.size()) + " for " +
                             std::to_string(labels.size()) + " labels");
    const auto n = extent.count();
    if (n == 0) throw UndefinedError("class distribution of an empty extent is undefined");
    std::vector<long long> counts(num_categories, 0);
    for (auto o = extent.find_first(); o != BitVector::npos; o = extent.find_next(o)) {
        if (labels[o] >= num_categories) throw LabelError("object " + std::to_string(o) + " has no valid category");
        ++counts[labels[o]];
    }
    ClassDistribution d;
    d.fractions.reserve(num_categories);
    for (auto c : counts) d.fractions.emplace_back(c, static_cast<long long>(n));
    return d;
}

struct IntentFact {
    std::size_t fact;
    BitVector attributes;  // over the model vocabulary

    friend bool operator==(const IntentFact&, const IntentFact&) = default;
};

struct ExtentFact {
    std::size_t fact;
    ClassDistribution distribution;

    friend bool operator==(const ExtentFact&, const ExtentFact&) = default;
};

/// Compiled engine template (all EF = 0). Rule k has intent_facts[k] as its
/// only premise and extent_facts[k] as its only conclusion.
struct CellularModel {
    EngineState engine;
    std::vector<std::string> categories;
    std::vector<std::string> vocabulary;
    std::vector<IntentFact> intent_facts;
    std::vector<ExtentFact> extent_facts;

    std::size_t num_rules() const { return engine.rules.size(); }
    std::size_t num_facts() const { return engine.facts.size(); }

    /// Appends an intent fact, an extent fact and the rule linking them.
    void add_vertex(std::string intent_label, BitVector attributes, std::string extent_label,
                    ClassDistribution distribution, std::string rule_label) {
        if (attributes.size() != vocabulary.size())
            throw DimensionError("intent over " + std::to_string(attributes.size()) + " attributes, vocabulary has " +
                                 std::to_string(vocabulary.size()));
        if (distribution.size() != categories.size())
            throw DimensionError("distribution over " + std::to_string(distribution.size()) + " categories, model has " +
                                 std::to_string(categories.size()));
        const auto i = engine.add_fact(std::move(intent_label));
        const auto e = engine.add_fact(std::move(extent_label));
        engine.add_rule(std::move(rule_label), {i}, {e});
        intent_facts.push_back({i, std::move(attributes)});
        extent_facts.push_back({e, std::move(distribution)});
    }

    friend bool operator==(const CellularModel&, const CellularModel&) = default;
};

/// "[Stade, Pays]" in vocabulary order.
inline std::string intent_label(const BitVector& intent, const std::vector<std::string>& names) {
    std::string out = "[";
    bool first = true;
    for (auto a : bits::to_indices(intent)) {
        if (!first) out += ", ";
        out += names.at(a);
        first = false;
    }
    return out + "]";
}

/// `labels[o]` is the category name of lattice object o; `categories` fixes
/// the category order.
inline CellularModel compile(const ConceptLattice& lattice, const std::vector<std::string>& labels,
                             const std::vector<std::string>& categories) {
    if (labels.size() != lattice.object_ids.size())
        throw DimensionError("got " + std::to_string(labels.size()) + " labels for " +
                             std::to_string(lattice.object_ids.size()) + " objects");
    std::map<std::string, std::size_t> category_index;
    for (std::size_t c = 0; c < categories.size(); ++c) category_index.emplace(categories[c], c);
    std::vector<std::size_t> label_index(labels.size());
    for (std::size_t o = 0; o < labels.size(); ++o) {
        auto it = category_index.find(labels[o]);
        if (labels[o].empty() || it == category_index.end())
            throw LabelError(lattice.object_ids[o] + " unlabeled");
        label_index[o] = it->second;
    }

    CellularModel model;
    model.categories = categories;
    model.vocabulary = lattice.attribute_names;
    std::size_t rule = 1;
    for (std::size_t k = 0; k < lattice.size(); ++k) {
        const auto& c = lattice.concepts[k];
        if (c.intent.none() || c.extent.none()) continue;
        auto dist = distribution_of(c.extent, label_index, categories.size());
        auto ext_label = "[S" + std::to_string(k) + " " + format_distribution(dist, categories) + "]";
        model.add_vertex(intent_label(c.intent, model.vocabulary), c.intent, std::move(ext_label), std::move(dist),
                         "R" + std::to_string(rule++));
    }
    return model;
}

/// Convenience overload for per-object labels given as a map id -> category.
inline CellularModel compile(const ConceptLattice& lattice, const std::map<std::string, std::string>& labels,
                             const std::vector<std::string>& categories) {
    std::vector<std::string> per_object;
    per_object.reserve(lattice.object_ids.size());
    for (const auto& id : lattice.object_ids) {
        auto it = labels.find(id);
        if (it == labels.end()) throw LabelError(id + " unlabeled");
        per_object.push_back(it->second);
    }
    return compile(lattice, per_object, categories);
}

/// The worked-example cellular lattice: 12 facts and 6 rules, with the
/// distributions exactly as printed (67% is stored as 67/100).
inline CellularModel load_fixture_model() {
    CellularModel m;
    m.categories = {"S", "E", "T"};
    m.vocabulary = {"Stade", "Pays", "Personnage", "Ministre", "Puissance", "Visage"};
    auto attrs = [&](std::initializer_list<std::size_t> idx) { return bits::from_indices(m.vocabulary.size(), idx); };
    auto dist = [](long long s, long long e, long long t) {
        return ClassDistribution{{Rational(s, 100), Rational(e, 100), Rational(t, 100)}};
    };
    m.add_vertex("[Pays, Stade]", attrs({0, 1}), "[S0 (100% S), (0% E), (0% T)]", dist(100, 0, 0), "R1");
    m.add_vertex("[Visage]", attrs({5}), "[S3 (50% S), (50% E), (0% T)]", dist(50, 50, 0), "R2");
    m.add_vertex("[Puissance, Ministre]", attrs({3, 4}), "[S4 (0% S), (67% E), (33% T)]", dist(0, 67, 33), "R3");
    m.add_vertex("[Visage, Puissance, Ministre]", attrs({3, 4, 5}), "[S5 (0% S), (100% E), (0% T)]",
                 dist(0, 100, 0), "R4");
    m.add_vertex("[Stade]", attrs({0}), "[S6 (67% S), (0% E), (33% T)]", dist(67, 0, 33), "R5");
    m.add_vertex("[Personnage]", attrs({2}), "[S7 (0% S), (0% E), (100% T)]", dist(0, 0, 100), "R6");
    return m;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json model_to_json(const CellularModel& m) {
    nlohmann::ordered_json j;
    j["categories"] = m.categories;
    j["vocabulary"] = m.vocabulary;
    std::vector<std::optional<std::size_t>> intent_of(m.num_facts()), extent_of(m.num_facts());
    for (std::size_t k = 0; k < m.intent_facts.size(); ++k) intent_of[m.intent_facts[k].fact] = k;
    for (std::size_t k = 0; k < m.extent_facts.size(); ++k) extent_of[m.extent_facts[k].fact] = k;

    auto& facts = j["facts"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.num_facts(); ++i) {
        nlohmann::ordered_json f;
        f["label"] = m.engine.facts[i].label;
        if (intent_of[i]) {
            f["kind"] = "intent";
            f["attributes"] = bits::to_indices(m.intent_facts[*intent_of[i]].attributes);
        } else if (extent_of[i]) {
            f["kind"] = "extent";
            auto& d = f["distribution"] = nlohmann::ordered_json::array();
            for (const auto& r : m.extent_facts[*extent_of[i]].distribution.fractions)
                d.push_back({boost::multiprecision::numerator(r).convert_to<long long>(),
                             boost::multiprecision::denominator(r).convert_to<long long>()});
        } else {
            throw Error("fact " + std::to_string(i) + " is neither an intent nor an extent fact");
        }
        facts.push_back(std::move(f));
    }
    auto& rules = j["rules"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < m.num_rules(); ++k)
        rules.push_back({{"label", m.engine.rules[k].label},
                         {"premise", m.intent_facts[k].fact},
                         {"conclusion", m.extent_facts[k].fact}});
    return j;
}

inline CellularModel model_from_json(const nlohmann::ordered_json& j) {
    try {
        CellularModel m;
        m.categories = j.at("categories").get<std::vector<std::string>>();
        m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
        const auto& facts = j.at("facts");
        std::vector<std::optional<BitVector>> intents(facts.size());
        std::vector<std::optional<ClassDistribution>> dists(facts.size());
        for (std::size_t i = 0; i < facts.size(); ++i) {
            const auto& f = facts[i];
            const auto kind = f.at("kind").get<std::string>();
            if (kind == "intent") {
                intents[i] = bits::from_indices(m.vocabulary.size(), f.at("attributes").get<std::vector<std::size_t>>());
            } else if (kind == "extent") {
                ClassDistribution d;
                for (const auto& p : f.at("distribution"))
                    d.fractions.emplace_back(p.at(0).get<long long>(), p.at(1).get<long long>());
                if (d.size() != m.categories.size() || !d.is_valid())
                    throw ParseError("fact " + std::to_string(i) + ": invalid class distribution");
                dists[i] = std::move(d);
            } else {
                throw ParseError("fact " + std::to_string(i) + ": unknown kind '" + kind + "'");
            }
            m.engine.add_fact(f.at("label").get<std::string>());
        }
        for (const auto& r : j.at("rules")) {
            const auto p = r.at("premise").get<std::size_t>();
            const auto c = r.at("conclusion").get<std::size_t>();
            if (p >= facts.size() || c >= facts.size() || !intents[p] || !dists[c])
                throw ParseError("rule must link an intent fact to an extent fact");
            m.engine.add_rule(r.at("label").get<std::string>(), {p}, {c});
            m.intent_facts.push_back({p, *intents[p]});
            m.extent_facts.push_back({c, *dists[c]});
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid model document: ") + e.what());
    }
}

}  // namespace latticecell
