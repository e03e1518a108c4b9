#pragma once

// Formal contexts, derivation operators and formal concepts.

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "common.hpp"

namespace latticecell {

/// Binary object x attribute incidence table. Rows are stored as attribute
/// bit vectors and columns as object bit vectors, so both derivations are a
/// fold of bitwise ANDs.
class FormalContext {
public:
    FormalContext() = default;

    /// `rows[o]` is the attribute set of object `o`.
    FormalContext(std::vector<std::string> object_ids, std::vector<std::string> attribute_names,
                  std::vector<BitVector> rows)
        : object_ids_(std::move(object_ids)), attribute_names_(std::move(attribute_names)), rows_(std::move(rows)) {
        check_unique(object_ids_, "object id");
        check_unique(attribute_names_, "attribute name");
        if (rows_.size() != object_ids_.size())
            throw DimensionError("context has " + std::to_string(rows_.size()) + " rows for " +
                                 std::to_string(object_ids_.size()) + " objects");
        columns_.assign(attribute_names_.size(), BitVector(object_ids_.size()));
        for (std::size_t o = 0; o < rows_.size(); ++o) {
            if (rows_[o].size() != attribute_names_.size())
                throw DimensionError("row " + object_ids_[o] + " has " + std::to_string(rows_[o].size()) +
                                     " cells, expected " + std::to_string(attribute_names_.size()));
            for (auto a = rows_[o].find_first(); a != BitVector::npos; a = rows_[o].find_next(a)) columns_[a].set(o);
        }
    }

    std::size_t num_objects() const { return object_ids_.size(); }
    std::size_t num_attributes() const { return attribute_names_.size(); }
    const std::vector<std::string>& object_ids() const { return object_ids_; }
    const std::vector<std::string>& attribute_names() const { return attribute_names_; }
    const BitVector& row(std::size_t object) const { return rows_.at(object); }
    const BitVector& column(std::size_t attribute) const { return columns_.at(attribute); }
    bool incident(std::size_t object, std::size_t attribute) const { return rows_.at(object).test(attribute); }

    BitVector empty_objects() const { return BitVector(num_objects()); }
    BitVector empty_attributes() const { return BitVector(num_attributes()); }

    friend bool operator==(const FormalContext& a, const FormalContext& b) {
        return a.object_ids_ == b.object_ids_ && a.attribute_names_ == b.attribute_names_ && a.rows_ == b.rows_;
    }

private:
    static void check_unique(const std::vector<std::string>& names, const char* what) {
        std::unordered_set<std::string> seen;
        for (const auto& n : names)
            if (!seen.insert(n).second) throw Error(std::string("duplicate ") + what + " '" + n + "'");
    }

    std::vector<std::string> object_ids_;
    std::vector<std::string> attribute_names_;
    std::vector<BitVector> rows_;
    std::vector<BitVector> columns_;
};

/// Closed (extent, intent) pair.
struct Concept {
    BitVector extent;
    BitVector intent;

    friend bool operator==(const Concept&, const Concept&) = default;
};

/// Attributes shared by every object of `objects`; all attributes for the
/// empty set.
inline BitVector derive_intent(const FormalContext& ctx, const BitVector& objects) {
    if (objects.size() != ctx.num_objects())
        throw DimensionError("object set of length " + std::to_string(objects.size()) + " for context with " +
                             std::to_string(ctx.num_objects()) + " objects");
    BitVector out = bits::full(ctx.num_attributes());
    for (auto o = objects.find_first(); o != BitVector::npos; o = objects.find_next(o)) out &= ctx.row(o);
    return out;
}

/// Objects having every attribute of `attributes`; all objects for the
/// empty set.
inline BitVector derive_extent(const FormalContext& ctx, const BitVector& attributes) {
    if (attributes.size() != ctx.num_attributes())
        throw DimensionError("attribute set of length " + std::to_string(attributes.size()) + " for context with " +
                             std::to_string(ctx.num_attributes()) + " attributes");
    BitVector out = bits::full(ctx.num_objects());
    for (auto a = attributes.find_first(); a != BitVector::npos; a = attributes.find_next(a)) out &= ctx.column(a);
    return out;
}

inline Concept close_objects(const FormalContext& ctx, const BitVector& objects) {
    BitVector intent = derive_intent(ctx, objects);
    BitVector extent = derive_extent(ctx, intent);
    return {std::move(extent), std::move(intent)};
}

inline Concept close_attributes(const FormalContext& ctx, const BitVector& attributes) {
    BitVector extent = derive_extent(ctx, attributes);
    BitVector intent = derive_intent(ctx, extent);
    return {std::move(extent), std::move(intent)};
}

/// `sub <= super` in the concept order (extent inclusion).
inline bool is_subconcept(const Concept& sub, const Concept& super) {
    bits::require_same_size(sub.extent, super.extent, "is_subconcept");
    return sub.extent.is_subset_of(super.extent);
}

inline bool is_closed(const FormalContext& ctx, const Concept& c) {
    return derive_intent(ctx, c.extent) == c.intent && derive_extent(ctx, c.intent) == c.extent;
}

inline bool canonical_concept_less(const Concept& a, const Concept& b) {
    return bits::canonical_less(a.extent, b.extent);
}

inline constexpr std::size_t kNaiveMaxAttributes = 20;

/// Exhaustive closure of every attribute subset. Intended as an oracle for
/// small contexts only (|A| <= kNaiveMaxAttributes).
inline std::vector<Concept> enumerate_concepts_naive(const FormalContext& ctx) {
    const std::size_t m = ctx.num_attributes();
    if (m > kNaiveMaxAttributes)
        throw CapacityError("naive enumeration limited to " + std::to_string(kNaiveMaxAttributes) +
                            " attributes, context has " + std::to_string(m));
    std::vector<Concept> out;
    std::unordered_set<BitVector> seen;
    const std::uint64_t subsets = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
        BitVector attrs(m, static_cast<unsigned long>(mask));
        Concept c = close_attributes(ctx, attrs);
        if (seen.insert(c.extent).second) out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), canonical_concept_less);
    return out;
}

// ---------------------------------------------------------------------------
// CSV: header row "<corner>,attr1,attr2,..."; each following row
// "object_id,0,1,...". Cells are strictly "0" or "1".

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !(c == ' ' || c == '\t' || c == '\r' || c == '\n'); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

}  // namespace detail

inline FormalContext read_context_csv(std::istream& in, const std::string& source = "<input>") {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (detail::trim(line).empty()) continue;
        header = detail::split_csv_line(line);
        break;
    }
    if (header.empty()) throw ParseError(source + ": missing header row");
    std::vector<std::string> attributes;
    for (std::size_t i = 1; i < header.size(); ++i) attributes.push_back(detail::trim(header[i]));

    std::vector<std::string> objects;
    std::vector<BitVector> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != attributes.size() + 1)
            throw ParseError(source + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(attributes.size() + 1) + " cells, found " + std::to_string(cells.size()));
        BitVector row(attributes.size());
        for (std::size_t a = 0; a < attributes.size(); ++a) {
            const auto cell = detail::trim(cells[a + 1]);
            if (cell == "1")
                row.set(a);
            else if (cell != "0")
                throw ParseError(source + ":" + std::to_string(line_no) + ": column " + std::to_string(a + 2) + " (" +
                                 attributes[a] + "): invalid cell value '" + cell + "', expected 0 or 1");
        }
        objects.push_back(detail::trim(cells[0]));
        rows.push_back(std::move(row));
    }
    return FormalContext(std::move(objects), std::move(attributes), std::move(rows));
}

inline FormalContext load_context_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open context file " + path);
    return read_context_csv(in, path);
}

inline void write_context_csv(std::ostream& out, const FormalContext& ctx) {
    out << "object";
    for (const auto& a : ctx.attribute_names()) out << ',' << a;
    out << '\n';
    for (std::size_t o = 0; o < ctx.num_objects(); ++o) {
        out << ctx.object_ids()[o];
        for (std::size_t a = 0; a < ctx.num_attributes(); ++a) out << ',' << (ctx.incident(o, a) ? '1' : '0');
        out << '\n';
    }
}

}  // namespace latticecell
