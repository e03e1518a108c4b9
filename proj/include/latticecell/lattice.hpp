#pragma once

// Concept lattice construction by recursive apposition: the attribute set is
// halved until single-attribute contexts remain, whose lattices are trivial,
// and sibling lattices are merged pairwise on the way back up.

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "context.hpp"

namespace latticecell {

struct CoverEdge {
    std::size_t child;
    std::size_t parent;

    friend auto operator<=>(const CoverEdge&, const CoverEdge&) = default;
};

/// Concepts in canonical order plus the Hasse diagram. Carries the object
/// and attribute labels of the context it was built from.
struct ConceptLattice {
    std::vector<std::string> object_ids;
    std::vector<std::string> attribute_names;
    std::vector<Concept> concepts;
    std::vector<CoverEdge> covers;  // sorted
    std::size_t top_index = 0;
    std::size_t bottom_index = 0;

    std::size_t size() const { return concepts.size(); }
    friend bool operator==(const ConceptLattice&, const ConceptLattice&) = default;
};

/// Extent-keyed registry of concepts created during assembly. Regenerating
/// an extent merges the new intent into the stored one.
class ExtentRegistry {
public:
    /// The already-created concept with exactly this extent, if any.
    std::optional<Concept> find_psi(const BitVector& extent) const {
        auto it = index_.find(extent);
        if (it == index_.end()) return std::nullopt;
        return concepts_[it->second];
    }

    void insert_or_merge(const BitVector& extent, const BitVector& intent) {
        auto [it, inserted] = index_.try_emplace(extent, concepts_.size());
        if (inserted)
            concepts_.push_back({extent, intent});
        else
            concepts_[it->second].intent |= intent;
    }

    std::size_t size() const { return concepts_.size(); }

    std::vector<Concept> take() && { return std::move(concepts_); }

private:
    std::unordered_map<BitVector, std::size_t> index_;
    std::vector<Concept> concepts_;
};

/// Hasse diagram of a duplicate-free concept list: (c -> d) iff
/// extent(c) strictly below extent(d) with nothing in between.
///
/// For each concept the strict upper bounds are scanned by increasing extent
/// size; a candidate is a cover unless some cover already found lies below it.
inline std::vector<CoverEdge> find_lower_covers(const std::vector<Concept>& concepts) {
    const std::size_t n = concepts.size();
    std::vector<std::size_t> by_size(n);
    for (std::size_t i = 0; i < n; ++i) by_size[i] = i;
    std::stable_sort(by_size.begin(), by_size.end(), [&](std::size_t a, std::size_t b) {
        return concepts[a].extent.count() < concepts[b].extent.count();
    });

    std::vector<CoverEdge> edges;
    std::vector<std::size_t> found;
    for (std::size_t c = 0; c < n; ++c) {
        const auto& ext = concepts[c].extent;
        const auto size = ext.count();
        found.clear();
        for (auto d : by_size) {
            const auto& up = concepts[d].extent;
            if (up.count() <= size || !ext.is_subset_of(up)) continue;
            bool blocked = false;
            for (auto e : found)
                if (concepts[e].extent.is_subset_of(up)) {
                    blocked = true;
                    break;
                }
            if (!blocked) found.push_back(d);
        }
        for (auto d : found) edges.push_back({c, d});
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

/// Sorts concepts canonically and derives covers, top and bottom.
inline ConceptLattice finalize_lattice(std::vector<std::string> object_ids, std::vector<std::string> attribute_names,
                                       std::vector<Concept> concepts) {
    std::sort(concepts.begin(), concepts.end(), canonical_concept_less);
    ConceptLattice out;
    out.object_ids = std::move(object_ids);
    out.attribute_names = std::move(attribute_names);
    out.concepts = std::move(concepts);
    out.covers = find_lower_covers(out.concepts);
    if (!out.concepts.empty()) {
        out.bottom_index = 0;
        out.top_index = out.concepts.size() - 1;
    }
    return out;
}

/// Splits the attributes at `at`: the left context keeps attributes
/// [0, at), the right one [at, |A|), both over all objects.
inline std::pair<FormalContext, FormalContext> split_context(const FormalContext& ctx, std::size_t at) {
    const std::size_t m = ctx.num_attributes();
    if (m < 2) throw Error("context with " + std::to_string(m) + " attribute(s) is not splittable");
    if (at == 0 || at >= m)
        throw BoundsError("split point " + std::to_string(at) + " outside [1, " + std::to_string(m - 1) + "]");
    const auto& names = ctx.attribute_names();
    std::vector<std::string> left_names(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(at));
    std::vector<std::string> right_names(names.begin() + static_cast<std::ptrdiff_t>(at), names.end());
    std::vector<BitVector> left_rows, right_rows;
    left_rows.reserve(ctx.num_objects());
    right_rows.reserve(ctx.num_objects());
    for (std::size_t o = 0; o < ctx.num_objects(); ++o) {
        const auto& row = ctx.row(o);
        BitVector l(at), r(m - at);
        for (std::size_t a = 0; a < m; ++a)
            if (row.test(a)) (a < at ? l.set(a) : r.set(a - at));
        left_rows.push_back(std::move(l));
        right_rows.push_back(std::move(r));
    }
    return {FormalContext(ctx.object_ids(), std::move(left_names), std::move(left_rows)),
            FormalContext(ctx.object_ids(), std::move(right_names), std::move(right_rows))};
}

/// Midpoint split; the left half gets ceil(|A|/2) attributes.
inline std::pair<FormalContext, FormalContext> split_context(const FormalContext& ctx) {
    return split_context(ctx, (ctx.num_attributes() + 1) / 2);
}

/// Lattice of the apposition of the two contexts `a` and `b` were built
/// from (same objects, a's attributes first).
inline ConceptLattice assemble(const ConceptLattice& a, const ConceptLattice& b) {
    if (a.object_ids != b.object_ids) throw DimensionError("assemble: lattices are over different object sets");
    std::vector<std::size_t> order_a(a.size()), order_b(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) order_a[i] = i;
    for (std::size_t j = 0; j < b.size(); ++j) order_b[j] = j;
    auto by_canon = [](const ConceptLattice& l) {
        return [&l](std::size_t x, std::size_t y) { return canonical_concept_less(l.concepts[x], l.concepts[y]); };
    };
    std::sort(order_a.begin(), order_a.end(), by_canon(a));
    std::sort(order_b.begin(), order_b.end(), by_canon(b));

    ExtentRegistry registry;
    for (auto i : order_a) {
        const auto& ci = a.concepts[i];
        for (auto j : order_b) {
            const auto& cj = b.concepts[j];
            registry.insert_or_merge(ci.extent & cj.extent, bits::concat(ci.intent, cj.intent));
        }
    }
    std::vector<std::string> names = a.attribute_names;
    names.insert(names.end(), b.attribute_names.begin(), b.attribute_names.end());
    return finalize_lattice(a.object_ids, std::move(names), std::move(registry).take());
}

/// Lattice of a context with at most one attribute.
inline ConceptLattice base_lattice(const FormalContext& ctx) {
    if (ctx.num_attributes() > 1) throw Error("base_lattice expects at most one attribute");
    std::vector<Concept> concepts;
    const BitVector all = bits::full(ctx.num_objects());
    if (ctx.num_attributes() == 0) {
        concepts.push_back({all, BitVector(0)});
    } else {
        const BitVector& ext = ctx.column(0);
        BitVector with(1);
        with.set(0);
        if (ext != all) concepts.push_back({all, BitVector(1)});
        concepts.push_back({ext, with});
    }
    return finalize_lattice(ctx.object_ids(), ctx.attribute_names(), std::move(concepts));
}

/// Full concept lattice. `first_split` selects the top-level split point
/// (0 = midpoint); deeper levels always split at the midpoint.
inline ConceptLattice build_lattice(const FormalContext& ctx, std::size_t first_split = 0) {
    if (ctx.num_attributes() <= 1) return base_lattice(ctx);
    auto [left, right] = first_split == 0 ? split_context(ctx) : split_context(ctx, first_split);
    return assemble(build_lattice(left), build_lattice(right));
}

// ---------------------------------------------------------------------------
// Export

inline nlohmann::ordered_json lattice_to_json(const ConceptLattice& l) {
    nlohmann::ordered_json j;
    j["objects"] = l.object_ids;
    j["attributes"] = l.attribute_names;
    auto& cs = j["concepts"] = nlohmann::ordered_json::array();
    for (const auto& c : l.concepts) {
        nlohmann::ordered_json e = nlohmann::ordered_json::array(), i = nlohmann::ordered_json::array();
        for (auto o : bits::to_indices(c.extent)) e.push_back(l.object_ids[o]);
        for (auto a : bits::to_indices(c.intent)) i.push_back(l.attribute_names[a]);
        cs.push_back({{"extent", e}, {"intent", i}});
    }
    auto& es = j["covers"] = nlohmann::ordered_json::array();
    for (const auto& e : l.covers) es.push_back({e.child, e.parent});
    j["top"] = l.top_index;
    j["bottom"] = l.bottom_index;
    return j;
}

inline ConceptLattice lattice_from_json(const nlohmann::ordered_json& j) {
    try {
        ConceptLattice l;
        l.object_ids = j.at("objects").get<std::vector<std::string>>();
        l.attribute_names = j.at("attributes").get<std::vector<std::string>>();
        std::map<std::string, std::size_t> obj, att;
        for (std::size_t i = 0; i < l.object_ids.size(); ++i) obj[l.object_ids[i]] = i;
        for (std::size_t i = 0; i < l.attribute_names.size(); ++i) att[l.attribute_names[i]] = i;
        for (const auto& c : j.at("concepts")) {
            Concept k{BitVector(l.object_ids.size()), BitVector(l.attribute_names.size())};
            for (const auto& o : c.at("extent")) k.extent.set(obj.at(o.get<std::string>()));
            for (const auto& a : c.at("intent")) k.intent.set(att.at(a.get<std::string>()));
            l.concepts.push_back(std::move(k));
        }
        for (const auto& e : j.at("covers")) l.covers.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>()});
        l.top_index = j.at("top").get<std::size_t>();
        l.bottom_index = j.at("bottom").get<std::size_t>();
        return l;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid lattice document: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw ParseError(std::string("lattice references unknown object or attribute: ") + e.what());
    }
}

inline void write_lattice_dot(std::ostream& out, const ConceptLattice& l) {
    out << "digraph lattice {\n  rankdir=BT;\n  node [shape=box];\n";
    for (std::size_t k = 0; k < l.size(); ++k) {
        out << "  c" << k << " [label=\"{";
        bool first = true;
        for (auto o : bits::to_indices(l.concepts[k].extent)) {
            out << (first ? "" : ",") << l.object_ids[o];
            first = false;
        }
        out << "}\\n{";
        first = true;
        for (auto a : bits::to_indices(l.concepts[k].intent)) {
            out << (first ? "" : ",") << l.attribute_names[a];
            first = false;
        }
        out << "}\"];\n";
    }
    for (const auto& e : l.covers) out << "  c" << e.child << " -> c" << e.parent << ";\n";
    out << "}\n";
}

}  // namespace latticecell
