#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thuelab/thue.hpp"

namespace thuelab {

// The DFA D over Sigma ∪ {B} that recognizes strings wu ending in a leftmost
// redex. Accepting states name the unique rule chosen by the rewrite-core
// tie-break, resolved at build time. delta(k, B) = k for every k. The DFA is
// an Aho-Corasick automaton over all lhs and is deliberately not minimized:
// state identity is embedded in compound tape symbols, so minimization would
// change traces.
struct RedexDfa {
    int state_count = 0;
    int alphabet_size = 0;               // A; column A is the blank self-loop
    std::vector<int32_t> delta;          // state_count x (A+1), row-major
    std::vector<int32_t> accept_rule;    // per state, -1 if not accepting

    static constexpr int initial = 0;

    int next(int state, Sym a) const {
        int col = a == kBlank ? alphabet_size : a;
        return delta[static_cast<size_t>(state) * (alphabet_size + 1) + col];
    }
    bool accepting(int state) const { return accept_rule[static_cast<size_t>(state)] >= 0; }
};

RedexDfa build_redex_dfa(const ThueSystem& sys);

struct ScanHit {
    int end_pos = 0; // 1-based position of the redex's last symbol
    int rule = 0;
};

// First position at which an accepting state is entered; blanks do not
// advance the match state.
std::optional<ScanHit> dfa_scan(const RedexDfa& dfa, const Word& s);

// A compound-cell string [a1,k1][a2,k2]... is historical iff every kj equals
// delta*(k0, a1..aj).
struct CompoundCell {
    Sym a = kBlank; // Sigma or blank
    int k = 0;
};
bool is_historical(const RedexDfa& dfa, const std::vector<CompoundCell>& cells);

// Tab-separated dump: states, initial, transitions, accepting map.
std::string dump_dfa(const RedexDfa& dfa, const ThueSystem& sys);

} // namespace thuelab
