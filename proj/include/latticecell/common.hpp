#pragma once

// Shared vocabulary types for the latticecell library: bit vectors over
// objects/attributes/facts, exact rationals and the exception hierarchy.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace latticecell {

using BitVector = boost::dynamic_bitset<std::uint64_t>;
using Rational = boost::multiprecision::cpp_rational;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operand sizes disagree (bit-vector length, matrix shape, object sets).
struct DimensionError : Error {
    using Error::Error;
};

/// Input too large for an exhaustive routine.
struct CapacityError : Error {
    using Error::Error;
};

/// Malformed file contents; the message names the location.
struct ParseError : Error {
    using Error::Error;
};

/// A quantity that has no defined value for the given input (empty extent,
/// empty corpus, empty confusion matrix...).
struct UndefinedError : Error {
    using Error::Error;
};

struct LabelError : Error {
    using Error::Error;
};

struct BoundsError : Error {
    using Error::Error;
};

namespace bits {

inline std::vector<std::size_t> to_indices(const BitVector& v) {
    std::vector<std::size_t> out;
    out.reserve(v.count());
    for (auto i = v.find_first(); i != BitVector::npos; i = v.find_next(i)) out.push_back(i);
    return out;
}

inline BitVector from_indices(std::size_t size, const std::vector<std::size_t>& indices) {
    BitVector v(size);
    for (auto i : indices) {
        if (i >= size) throw BoundsError("bit index " + std::to_string(i) + " out of range " + std::to_string(size));
        v.set(i);
    }
    return v;
}

inline BitVector full(std::size_t size) {
    BitVector v(size);
    v.set();
    return v;
}

/// Lexicographic comparison of the ascending index sequences of two sets.
inline bool index_less(const BitVector& a, const BitVector& b) {
    auto i = a.find_first();
    auto j = b.find_first();
    while (i != BitVector::npos && j != BitVector::npos) {
        if (i != j) return i < j;
        i = a.find_next(i);
        j = b.find_next(j);
    }
    return i == BitVector::npos && j != BitVector::npos;
}

/// Canonical set order: cardinality ascending, then lexicographic by index.
inline bool canonical_less(const BitVector& a, const BitVector& b) {
    const auto ca = a.count();
    const auto cb = b.count();
    if (ca != cb) return ca < cb;
    return index_less(a, b);
}

/// "0"/"1" string, index 0 first.
inline std::string to_string01(const BitVector& v) {
    std::string s(v.size(), '0');
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v.test(i)) s[i] = '1';
    return s;
}

inline BitVector from_string01(const std::string& s) {
    BitVector v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1')
            v.set(i);
        else if (s[i] != '0')
            throw ParseError("invalid bit character '" + std::string(1, s[i]) + "' at position " + std::to_string(i));
    }
    return v;
}

/// Concatenate two vectors; `left` occupies the low indices.
inline BitVector concat(const BitVector& left, const BitVector& right) {
    BitVector out(left.size() + right.size());
    for (auto i = left.find_first(); i != BitVector::npos; i = left.find_next(i)) out.set(i);
    for (auto i = right.find_first(); i != BitVector::npos; i = right.find_next(i)) out.set(left.size() + i);
    return out;
}

inline void require_same_size(const BitVector& a, const BitVector& b, const char* what) {
    if (a.size() != b.size())
        throw DimensionError(std::string(what) + ": length " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
}

}  // namespace bits

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// "n/d" (or "n" when d == 1).
inline std::string to_string(const Rational& r) {
    auto num = boost::multiprecision::numerator(r);
    auto den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace latticecell
