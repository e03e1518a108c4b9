#pragma once

// Boolean cellular automaton running a forward-chaining inference cycle.
//
// CELFACT holds one cell per fact (EF established, IF participates, SF
// output), CELRULE one cell per rule (ER triggered, IR participates, SR may
// fire). RE links premises to rules and RS links rules to conclusions; both
// are stored column-wise (one fact bit vector per rule).

#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"

namespace latticecell {

struct FactCell {
    std::string label;
    bool ef = false;
    bool in = true;  // IF
    bool sf = false;

    friend bool operator==(const FactCell&, const FactCell&) = default;
};

struct RuleCell {
    std::string label;
    bool er = false;
    bool ir = true;
    bool sr = true;

    friend bool operator==(const RuleCell&, const RuleCell&) = default;
};

/// Dense |rows| x |cols| bit matrix stored by column.
class IncidenceMatrix {
public:
    IncidenceMatrix() = default;
    IncidenceMatrix(std::size_t rows, std::size_t cols) : rows_(rows), columns_(cols, BitVector(rows)) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return columns_.size(); }
    bool get(std::size_t r, std::size_t c) const { return columns_.at(c).test(r); }
    void set(std::size_t r, std::size_t c, bool v = true) { columns_.at(c).set(r, v); }
    const BitVector& column(std::size_t c) const { return columns_.at(c); }

    /// Appends a row of zeros.
    void add_row() {
        ++rows_;
        for (auto& col : columns_) col.resize(rows_);
    }
    void add_col() { columns_.emplace_back(rows_); }

    friend bool operator==(const IncidenceMatrix&, const IncidenceMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::vector<BitVector> columns_;
};

struct EngineState {
    std::vector<FactCell> facts;
    std::vector<RuleCell> rules;
    IncidenceMatrix re;  // facts x rules, premises
    IncidenceMatrix rs;  // facts x rules, conclusions

    std::size_t add_fact(std::string label, bool participates = true) {
        facts.push_back({std::move(label), false, participates, false});
        re.add_row();
        rs.add_row();
        return facts.size() - 1;
    }

    std::size_t add_rule(std::string label, const std::vector<std::size_t>& premises,
                         const std::vector<std::size_t>& conclusions) {
        rules.push_back({std::move(label), false, true, true});
        re.add_col();
        rs.add_col();
        const auto j = rules.size() - 1;
        for (auto i : premises) re.set(check_fact(i), j);
        for (auto i : conclusions) rs.set(check_fact(i), j);
        return j;
    }

    BitVector established() const {
        BitVector v(facts.size());
        for (std::size_t i = 0; i < facts.size(); ++i) v.set(i, facts[i].ef);
        return v;
    }

    BitVector triggered() const {
        BitVector v(rules.size());
        for (std::size_t j = 0; j < rules.size(); ++j) v.set(j, rules[j].er);
        return v;
    }

    void validate() const {
        if (re.rows() != facts.size() || rs.rows() != facts.size() || re.cols() != rules.size() ||
            rs.cols() != rules.size())
            throw DimensionError("incidence matrices do not match layer sizes");
    }

    friend bool operator==(const EngineState&, const EngineState&) = default;

private:
    std::size_t check_fact(std::size_t i) const {
        if (i >= facts.size()) throw BoundsError("fact index " + std::to_string(i) + " out of range");
        return i;
    }
};

/// Evaluation step: SF <- EF, and every participating rule whose premises
/// are all established (and participating) becomes triggered. Rules without
/// premises never trigger themselves.
inline EngineState delta_fact(EngineState s) {
    s.validate();
    BitVector usable(s.facts.size());
    for (std::size_t i = 0; i < s.facts.size(); ++i) {
        s.facts[i].sf = s.facts[i].ef;
        usable.set(i, s.facts[i].ef && s.facts[i].in);
    }
    for (std::size_t j = 0; j < s.rules.size(); ++j) {
        auto& r = s.rules[j];
        if (!r.ir) continue;
        const auto& premises = s.re.column(j);
        if (premises.none()) continue;
        if (premises.is_subset_of(usable)) r.er = true;
    }
    return s;
}

/// Execution step: every triggered, participating, unconsumed rule
/// establishes its participating conclusions; then SR <- not ER.
inline EngineState delta_rule(EngineState s) {
    s.validate();
    BitVector derived(s.facts.size());
    for (std::size_t j = 0; j < s.rules.size(); ++j) {
        const auto& r = s.rules[j];
        if (r.er && r.ir && r.sr) derived |= s.rs.column(j);
    }
    for (auto i = derived.find_first(); i != BitVector::npos; i = derived.find_next(i))
        if (s.facts[i].in) s.facts[i].ef = true;
    for (auto& r : s.rules) r.sr = !r.er;
    return s;
}

/// Activates exactly the listed facts (EF = IF = 1), clears every other EF
/// and SF, and resets every rule to (0,1,1).
inline EngineState set_facts(EngineState s, const std::vector<std::size_t>& indices) {
    for (auto i : indices)
        if (i >= s.facts.size())
            throw BoundsError("fact index " + std::to_string(i) + " out of range " + std::to_string(s.facts.size()));
    for (auto& f : s.facts) f.ef = f.sf = false;
    for (auto i : indices) {
        s.facts[i].ef = true;
        s.facts[i].in = true;
    }
    for (auto& r : s.rules) {
        r.er = false;
        r.ir = true;
        r.sr = true;
    }
    return s;
}

struct InferenceResult {
    EngineState state;
    std::size_t cycles = 0;  // includes the final cycle that confirmed the fixpoint
};

/// Called after each step with the cycle number (1-based) and step name
/// ("delta_fact" or "delta_rule").
using InferenceObserver = std::function<void(std::size_t cycle, const char* step, const EngineState&)>;

/// Alternates delta_fact and delta_rule until a full cycle leaves EF and ER
/// unchanged. EF and ER only grow, so this takes at most |rules| + 1 cycles.
inline InferenceResult run_inference(EngineState s, const InferenceObserver& observe = {}) {
    std::size_t cycles = 0;
    const std::size_t limit = s.rules.size() + 1;
    while (true) {
        ++cycles;
        const auto ef = s.established();
        const auto er = s.triggered();
        s = delta_fact(std::move(s));
        if (observe) observe(cycles, "delta_fact", s);
        s = delta_rule(std::move(s));
        if (observe) observe(cycles, "delta_rule", s);
        if (s.established() == ef && s.triggered() == er) break;
        if (cycles >= limit) throw Error("inference did not reach a fixpoint within |rules| + 1 cycles");
    }
    return {std::move(s), cycles};
}

// ---------------------------------------------------------------------------
// Trace output, laid out like the CELFACT / CELRULE tables.

inline void write_fact_layer(std::ostream& out, const EngineState& s) {
    std::size_t width = 5;
    for (const auto& f : s.facts) width = std::max(width, f.label.size());
    out << std::left << std::setw(static_cast<int>(width)) << "Facts" << "  EF IF SF\n";
    for (const auto& f : s.facts)
        out << std::left << std::setw(static_cast<int>(width)) << f.label << "  " << f.ef << "  " << f.in << "  "
            << f.sf << '\n';
}

inline void write_rule_layer(std::ostream& out, const EngineState& s) {
    std::size_t width = 5;
    for (const auto& r : s.rules) width = std::max(width, r.label.size());
    out << std::left << std::setw(static_cast<int>(width)) << "Rules" << "  ER IR SR\n";
    for (const auto& r : s.rules)
        out << std::left << std::setw(static_cast<int>(width)) << r.label << "  " << r.er << "  " << r.ir << "  "
            << r.sr << '\n';
}

/// One line per step: "cycle N <step> EF=... ER=... SR=...".
inline std::string trace_line(std::size_t cycle, const char* step, const EngineState& s) {
    std::ostringstream out;
    BitVector sr(s.rules.size());
    for (std::size_t j = 0; j < s.rules.size(); ++j) sr.set(j, s.rules[j].sr);
    out << "cycle " << cycle << ' ' << step << " EF=" << bits::to_string01(s.established())
        << " ER=" << bits::to_string01(s.triggered()) << " SR=" << bits::to_string01(sr);
    return out.str();
}

}  // namespace latticecell
