#pragma once

// Corpus ingestion and preprocessing: tokenizer, stopword filter,
// information-gain feature selection and binary vectorization.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "context.hpp"

namespace latticecell {

struct Document {
    std::string id;
    std::optional<std::string> category;
    std::string text;
};

struct DocumentVector {
    std::string id;
    BitVector bits;
    std::optional<std::string> category;
};

/// Selected terms with their information gain, best first.
struct Vocabulary {
    std::vector<std::string> terms;
    std::vector<double> ig_scores;

    std::size_t size() const { return terms.size(); }
};

using Stemmer = std::function<std::string(const std::string&)>;

inline constexpr std::size_t kDefaultFeatureCount = 500;

namespace detail {

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

/// Decodes one code point at `i` and advances it; malformed bytes decode
/// to U+FFFD and consume a single byte.
inline char32_t next_code_point(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) -> int {
        if (i + k >= s.size()) return -1;
        const auto b = static_cast<unsigned char>(s[i + k]);
        return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
    };
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = (b0 & 0xE0) == 0xC0 ? 2 : (b0 & 0xF0) == 0xE0 ? 3 : (b0 & 0xF8) == 0xF0 ? 4 : 0;
    if (len == 0) {
        ++i;
        return 0xFFFD;
    }
    char32_t cp = b0 & (0x7F >> len);
    for (int k = 1; k < len; ++k) {
        int c = cont(static_cast<std::size_t>(k));
        if (c < 0) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | static_cast<char32_t>(c);
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

// Letters: ASCII, Latin-1 letters, and everything above U+00FF except the
// general punctuation block and the replacement character.
inline bool is_letter(char32_t cp) {
    if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (cp < 0xC0) return false;
    if (cp == 0xD7 || cp == 0xF7) return false;
    if (cp >= 0x2000 && cp <= 0x206F) return false;
    if (cp == 0xFFFD) return false;
    return true;
}

inline char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
    if (cp == 0x152) return 0x153;  // OE ligature
    if (cp == 0x178) return 0xFF;
    return cp;
}

}  // namespace detail

inline std::string lowercase(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) detail::append_utf8(out, detail::to_lower(detail::next_code_point(s, i)));
    return out;
}

/// Lowercases, splits on every non-letter and drops tokens shorter than two
/// code points. `stem`, when given, is applied to each surviving token.
inline std::vector<std::string> tokenize(std::string_view text, const Stemmer& stem = {}) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t length = 0;
    auto flush = [&] {
        if (length >= 2) tokens.push_back(stem ? stem(current) : current);
        current.clear();
        length = 0;
    };
    for (std::size_t i = 0; i < text.size();) {
        const char32_t cp = detail::next_code_point(text, i);
        if (detail::is_letter(cp)) {
            detail::append_utf8(current, detail::to_lower(cp));
            ++length;
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

inline std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                                 const std::unordered_set<std::string>& stoplist) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens)
        if (!stoplist.contains(t)) out.push_back(t);
    return out;
}

inline const std::unordered_set<std::string>& default_french_stopwords() {
    static const std::unordered_set<std::string> words = {
        "au",    "aux",   "avec",  "ce",    "ces",   "cet",   "cette", "dans",  "de",    "des",   "du",
        "elle",  "elles", "en",    "est",   "et",    "eux",   "il",    "ils",   "je",    "la",    "le",
        "les",   "leur",  "leurs", "lui",   "ma",    "mais",  "me",    "mes",   "moi",   "mon",   "ne",
        "nos",   "notre", "nous",  "on",    "ou",    "où",    "par",   "pas",   "pour",  "qu",    "que",
        "qui",   "sa",    "se",    "ses",   "son",   "sont",  "sur",   "ta",    "te",    "tes",   "toi",
        "ton",   "tu",    "un",    "une",   "vos",   "votre", "vous",  "été",   "être",  "avoir", "fait",
        "comme", "plus",  "très",  "aussi", "était", "ont",   "sans",  "entre", "après", "avant",
    };
    return words;
}

/// One term per line, UTF-8; blank lines and lines starting with '#' are
/// ignored. Terms are lowercased.
inline std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open stopword file " + path.string());
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        out.insert(lowercase(line));
    }
    return out;
}

/// Tokenize, drop stopwords, then stem.
struct Preprocessor {
    std::unordered_set<std::string> stopwords = default_french_stopwords();
    Stemmer stemmer;

    std::vector<std::string> terms(std::string_view text) const {
        auto tokens = remove_stopwords(tokenize(text), stopwords);
        if (stemmer)
            for (auto& t : tokens) t = stemmer(t);
        return tokens;
    }

    /// Normal form of a vocabulary entry, comparable with `terms` output.
    std::string normalize(std::string_view term) const {
        auto t = lowercase(term);
        return stemmer ? stemmer(t) : t;
    }
};

/// Bit i set iff vocabulary term i occurs in the preprocessed document.
/// Matching is on normalized forms, so "Stade" matches the token "stade".
inline DocumentVector vectorize(const Document& doc, const std::vector<std::string>& vocabulary,
                                const Preprocessor& pre = {}) {
    std::unordered_set<std::string> present;
    for (auto& t : pre.terms(doc.text)) present.insert(std::move(t));
    DocumentVector v{doc.id, BitVector(vocabulary.size()), doc.category};
    for (std::size_t i = 0; i < vocabulary.size(); ++i)
        if (present.contains(pre.normalize(vocabulary[i]))) v.bits.set(i);
    return v;
}

inline DocumentVector vectorize(const Document& doc, const Vocabulary& vocab, const Preprocessor& pre = {}) {
    return vectorize(doc, vocab.terms, pre);
}

inline FormalContext build_context(const std::vector<DocumentVector>& vectors,
                                   const std::vector<std::string>& vocabulary) {
    std::vector<std::string> ids;
    std::vector<BitVector> rows;
    ids.reserve(vectors.size());
    rows.reserve(vectors.size());
    for (const auto& v : vectors) {
        if (v.bits.size() != vocabulary.size())
            throw DimensionError("vector for " + v.id + " has length " + std::to_string(v.bits.size()) +
                                 ", vocabulary has " + std::to_string(vocabulary.size()));
        ids.push_back(v.id);
        rows.push_back(v.bits);
    }
    return FormalContext(std::move(ids), vocabulary, std::move(rows));
}

// ---------------------------------------------------------------------------
// Information gain

namespace detail {

inline double entropy_bits(const std::vector<double>& counts) {
    double total = 0;
    for (double c : counts) total += c;
    if (total <= 0) return 0.0;
    double h = 0;
    for (double c : counts)
        if (c > 0) {
            const double p = c / total;
            h -= p * std::log2(p);
        }
    return h;
}

inline std::vector<std::size_t> category_indices(const std::vector<DocumentVector>& corpus,
                                                 const std::vector<std::string>& categories) {
    std::map<std::string, std::size_t> index;
    for (std::size_t c = 0; c < categories.size(); ++c) index.emplace(categories[c], c);
    std::vector<std::size_t> out;
    out.reserve(corpus.size());
    for (const auto& v : corpus) {
        if (!v.category) throw LabelError(v.id + " unlabeled");
        auto it = index.find(*v.category);
        if (it == index.end()) throw LabelError(v.id + ": unknown category '" + *v.category + "'");
        out.push_back(it->second);
    }
    return out;
}

inline double information_gain(const std::vector<DocumentVector>& corpus, const std::vector<std::size_t>& labels,
                               std::size_t num_categories, std::size_t term) {
    std::vector<double> all(num_categories, 0), with(num_categories, 0), without(num_categories, 0);
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        all[labels[d]] += 1;
        (corpus[d].bits.test(term) ? with : without)[labels[d]] += 1;
    }
    const double n = static_cast<double>(corpus.size());
    double n_with = 0;
    for (double c : with) n_with += c;
    const double p_with = n_with / n;
    const double gain = entropy_bits(all) - p_with * entropy_bits(with) - (1 - p_with) * entropy_bits(without);
    return gain < 0 ? 0.0 : gain;  // clamp rounding noise
}

}  // namespace detail

/// IG(t) = H(C) - P(t) H(C | t) - P(not t) H(C | not t), in bits, on binary
/// term presence.
inline double information_gain(const std::vector<DocumentVector>& corpus, std::size_t term,
                               const std::vector<std::string>& categories) {
    if (corpus.empty()) throw UndefinedError("information gain over an empty corpus is undefined");
    if (term >= corpus.front().bits.size()) throw BoundsError("term index " + std::to_string(term) + " out of range");
    const auto labels = detail::category_indices(corpus, categories);
    return detail::information_gain(corpus, labels, categories.size(), term);
}

/// Ranks every candidate term by IG (descending, ties lexicographic) and
/// keeps the best `n`. `corpus` is vectorized over `candidates`.
inline Vocabulary select_features(const std::vector<DocumentVector>& corpus, const std::vector<std::string>& candidates,
                                  const std::vector<std::string>& categories, std::size_t n = kDefaultFeatureCount) {
    if (n == 0) throw Error("feature count must be at least 1");
    if (corpus.empty()) throw UndefinedError("feature selection over an empty corpus is undefined");
    for (const auto& v : corpus)
        if (v.bits.size() != candidates.size()) throw DimensionError("vector for " + v.id + " is not over the candidates");
    const auto labels = detail::category_indices(corpus, categories);
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(candidates.size());
    for (std::size_t t = 0; t < candidates.size(); ++t)
        ranked.emplace_back(detail::information_gain(corpus, labels, categories.size(), t), t);
    std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return candidates[a.second] < candidates[b.second];
    });
    Vocabulary vocab;
    for (std::size_t k = 0; k < std::min(n, ranked.size()); ++k) {
        vocab.terms.push_back(candidates[ranked[k].second]);
        vocab.ig_scores.push_back(ranked[k].first);
    }
    return vocab;
}

/// Every distinct preprocessed term of the corpus, sorted.
inline std::vector<std::string> candidate_terms(const std::vector<Document>& docs, const Preprocessor& pre = {}) {
    std::set<std::string> terms;
    for (const auto& d : docs)
        for (auto& t : pre.terms(d.text)) terms.insert(std::move(t));
    return {terms.begin(), terms.end()};
}

/// Candidate extraction, vectorization over the candidates, and IG ranking.
inline Vocabulary build_vocabulary(const std::vector<Document>& docs, const std::vector<std::string>& categories,
                                   std::size_t n = kDefaultFeatureCount, const Preprocessor& pre = {}) {
    const auto candidates = candidate_terms(docs, pre);
    std::vector<DocumentVector> vectors;
    vectors.reserve(docs.size());
    for (const auto& d : docs) vectors.push_back(vectorize(d, candidates, pre));
    return select_features(vectors, candidates, categories, n);
}

// ---------------------------------------------------------------------------
// Corpus layout: <root>/<category>/<document file>, file name = document id.

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read document " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw Error("cannot read document " + path.string());
    return buf.str();
}

namespace detail {

inline std::vector<std::filesystem::path> sorted_entries(const std::filesystem::path& dir, bool directories) {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.empty() || name[0] == '.') continue;
        if (directories ? e.is_directory() : e.is_regular_file()) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

struct LabeledCorpus {
    std::vector<std::string> categories;  // sorted subdirectory names
    std::vector<Document> documents;      // grouped by category, files sorted
};

inline LabeledCorpus load_labeled_corpus(const std::filesystem::path& root) {
    if (!std::filesystem::is_directory(root)) throw Error("corpus root " + root.string() + " is not a directory");
    LabeledCorpus corpus;
    std::unordered_set<std::string> ids;
    for (const auto& dir : detail::sorted_entries(root, true)) {
        const auto category = dir.filename().string();
        corpus.categories.push_back(category);
        for (const auto& file : detail::sorted_entries(dir, false)) {
            auto id = file.filename().string();
            if (!ids.insert(id).second) throw Error("duplicate document id " + id + " at " + file.string());
            corpus.documents.push_back({std::move(id), category, read_text_file(file)});
        }
    }
    if (corpus.categories.empty()) throw Error("corpus root " + root.string() + " has no category directories");
    return corpus;
}

/// A single file, or every regular file of a directory (sorted).
inline std::vector<Document> load_unlabeled(const std::filesystem::path& path) {
    std::vector<Document> out;
    if (std::filesystem::is_directory(path)) {
        for (const auto& file : detail::sorted_entries(path, false))
            out.push_back({file.filename().string(), std::nullopt, read_text_file(file)});
    } else if (std::filesystem::is_regular_file(path)) {
        out.push_back({path.filename().string(), std::nullopt, read_text_file(path)});
    } else {
        throw Error("no such document or directory: " + path.string());
    }
    return out;
}

}  // namespace latticecell
