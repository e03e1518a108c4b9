#pragma once

// Classification against a compiled cellular model: score the document
// against every intent fact, activate the best ones, run the inference
// engine, and average the distributions of the extent facts it fires.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "casi.hpp"
#include "compiler.hpp"

namespace latticecell {

enum class Similarity { jaccard, cosine, dice, inner };

inline constexpr Similarity kAllSimilarities[] = {Similarity::jaccard, Similarity::cosine, Similarity::inner,
                                                  Similarity::dice};

inline std::string_view to_string(Similarity s) {
    switch (s) {
        case Similarity::jaccard: return "jaccard";
        case Similarity::cosine: return "cosine";
        case Similarity::dice: return "dice";
        case Similarity::inner: return "inner";
    }
    return "?";
}

inline Similarity parse_similarity(std::string_view s) {
    if (s == "jaccard") return Similarity::jaccard;
    if (s == "cosine") return Similarity::cosine;
    if (s == "dice") return Similarity::dice;
    if (s == "inner") return Similarity::inner;
    throw Error("unknown similarity measure '" + std::string(s) + "'");
}

/// Exact key that orders pairs the same way as `similarity` does. Cosine is
/// keyed by its square so no irrational value is ever compared.
inline Rational similarity_key(const BitVector& a, const BitVector& b, Similarity m) {
    bits::require_same_size(a, b, "similarity");
    const auto both = static_cast<long long>((a & b).count());
    const auto na = static_cast<long long>(a.count());
    const auto nb = static_cast<long long>(b.count());
    switch (m) {
        case Similarity::inner: return Rational(both);
        case Similarity::jaccard: {
            const auto either = na + nb - both;
            return either == 0 ? Rational(0) : Rational(both, either);
        }
        case Similarity::dice: return na + nb == 0 ? Rational(0) : Rational(2 * both, na + nb);
        case Similarity::cosine: return na == 0 || nb == 0 ? Rational(0) : Rational(both * both, na * nb);
    }
    return Rational(0);
}

/// Binary-set similarity; empty denominators score 0.
inline double similarity(const BitVector& a, const BitVector& b, Similarity m) {
    const double key = to_double(similarity_key(a, b, m));
    return m == Similarity::cosine ? std::sqrt(key) : key;
}

/// Which intent facts get activated for a document.
struct ActivationPolicy {
    enum class Kind { max, topk, threshold };
    Kind kind = Kind::max;
    std::size_t k = 1;
    double threshold = 0.0;

    static ActivationPolicy max() { return {}; }
    static ActivationPolicy topk(std::size_t k) { return {Kind::topk, k, 0.0}; }
    static ActivationPolicy at_least(double t) { return {Kind::threshold, 1, t}; }
};

/// "max", "topk:K" or "threshold:T".
inline ActivationPolicy parse_activation(std::string_view s) {
    if (s == "max") return ActivationPolicy::max();
    auto value = [&](std::size_t prefix) { return std::string(s.substr(prefix)); };
    try {
        if (s.rfind("topk:", 0) == 0) {
            std::size_t pos = 0;
            const auto text = value(5);
            const long long k = std::stoll(text, &pos);
            if (pos != text.size() || k < 1) throw Error("");
            return ActivationPolicy::topk(static_cast<std::size_t>(k));
        }
        if (s.rfind("threshold:", 0) == 0) {
            std::size_t pos = 0;
            const auto text = value(10);
            const double t = std::stod(text, &pos);
            if (pos != text.size()) throw Error("");
            return ActivationPolicy::at_least(t);
        }
    } catch (const std::exception&) {
    }
    throw Error("invalid activation policy '" + std::string(s) + "' (expected max, topk:K or threshold:T)");
}

inline std::string to_string(const ActivationPolicy& p) {
    switch (p.kind) {
        case ActivationPolicy::Kind::max: return "max";
        case ActivationPolicy::Kind::topk: return "topk:" + std::to_string(p.k);
        case ActivationPolicy::Kind::threshold: {
            std::ostringstream out;
            out << "threshold:" << p.threshold;
            return out.str();
        }
    }
    return "?";
}

inline void require_model_vocabulary(const CellularModel& model, const BitVector& doc) {
    if (doc.size() != model.vocabulary.size())
        throw DimensionError("document vector of length " + std::to_string(doc.size()) + " for a model vocabulary of " +
                             std::to_string(model.vocabulary.size()) + " terms");
}

/// Indices (within `intents`) selected by `policy`; only positive scores
/// ever qualify. Result is ascending.
inline std::vector<std::size_t> select_intents(const std::vector<BitVector>& intents, const BitVector& doc,
                                               Similarity measure, const ActivationPolicy& policy) {
    std::vector<Rational> keys;
    keys.reserve(intents.size());
    for (const auto& in : intents) keys.push_back(similarity_key(doc, in, measure));

    std::vector<std::size_t> out;
    switch (policy.kind) {
        case ActivationPolicy::Kind::max: {
            Rational best = 0;
            for (const auto& k : keys) best = std::max(best, k);
            if (best > 0)
                for (std::size_t i = 0; i < keys.size(); ++i)
                    if (keys[i] == best) out.push_back(i);
            break;
        }
        case ActivationPolicy::Kind::topk: {
            std::vector<std::size_t> order;
            for (std::size_t i = 0; i < keys.size(); ++i)
                if (keys[i] > 0) order.push_back(i);
            std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return keys[a] > keys[b]; });
            order.resize(std::min(order.size(), policy.k));
            out = std::move(order);
            std::sort(out.begin(), out.end());
            break;
        }
        case ActivationPolicy::Kind::threshold: {
            for (std::size_t i = 0; i < keys.size(); ++i) {
                if (keys[i] <= 0) continue;
                const double score = measure == Similarity::cosine ? std::sqrt(to_double(keys[i])) : to_double(keys[i]);
                if (score >= policy.threshold) out.push_back(i);
            }
            break;
        }
    }
    return out;
}

/// Intent fact indices (engine fact numbering) to activate for `doc`.
inline std::vector<std::size_t> activate(const CellularModel& model, const BitVector& doc, Similarity measure,
                                         const ActivationPolicy& policy = {}) {
    require_model_vocabulary(model, doc);
    std::vector<BitVector> intents;
    intents.reserve(model.intent_facts.size());
    for (const auto& f : model.intent_facts) intents.push_back(f.attributes);
    std::vector<std::size_t> out;
    for (auto k : select_intents(intents, doc, measure, policy)) out.push_back(model.intent_facts[k].fact);
    return out;
}

/// Componentwise mean of `distributions`, argmax with ties going to the
/// earlier category.
inline std::pair<std::size_t, ClassDistribution> vote(const std::vector<ClassDistribution>& distributions,
                                                      std::size_t num_categories) {
    if (distributions.empty()) throw UndefinedError("vote over no distributions");
    ClassDistribution mean{std::vector<Rational>(num_categories, Rational(0))};
    for (const auto& d : distributions) {
        if (d.size() != num_categories) throw DimensionError("distribution does not match the category list");
        for (std::size_t c = 0; c < num_categories; ++c) mean.fractions[c] += d[c];
    }
    const Rational n(static_cast<long long>(distributions.size()));
    for (auto& f : mean.fractions) f /= n;
    std::size_t best = 0;
    for (std::size_t c = 1; c < num_categories; ++c)
        if (mean[c] > mean[best]) best = c;
    return {best, std::move(mean)};
}

inline constexpr std::string_view kUnclassifiable = "UNCLASSIFIABLE";

struct Prediction {
    std::optional<std::string> category;  // empty when unclassifiable
    ClassDistribution distribution;       // empty when unclassifiable
    std::vector<std::size_t> fired_vertices;     // extent fact indices
    std::vector<std::size_t> activated_intents;  // intent fact indices

    bool classified() const { return category.has_value(); }
    std::string category_or_marker() const { return category ? *category : std::string(kUnclassifiable); }

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Activation, inference and vote on a private copy of the model's engine.
inline Prediction classify(const CellularModel& model, const BitVector& doc, Similarity measure,
                           const ActivationPolicy& policy = {}, const InferenceObserver& observe = {}) {
    Prediction p;
    p.activated_intents = activate(model, doc, measure, policy);
    if (p.activated_intents.empty()) return p;

    auto result = run_inference(set_facts(model.engine, p.activated_intents), observe);
    std::vector<ClassDistribution> fired;
    for (const auto& e : model.extent_facts)
        if (result.state.facts[e.fact].ef) {
            p.fired_vertices.push_back(e.fact);
            fired.push_back(e.distribution);
        }
    if (fired.empty()) return p;
    auto [best, mean] = vote(fired, model.categories.size());
    p.category = model.categories[best];
    p.distribution = std::move(mean);
    return p;
}

}  // namespace latticecell
