#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "thuelab/symbols.hpp"

namespace thuelab {

struct Rule {
    int id = 0;      // position in the system file, 0-based; doubles as priority
    Word lhs;        // the redex, nonempty
    Word rhs;        // the reduct, strictly shorter than lhs (may be empty)
};

// A length-reducing Thue system together with the context strings t1, t2 and
// the target normal form t3 defining a language {x : t1 x t2 ->* t3}.
struct ThueSystem {
    SymbolTable symbols;
    std::vector<Rule> rules;
    Word t1, t2, t3;
    int max_redex_len = 0; // L

    int alphabet_size() const { return symbols.size(); }
    std::string render(const Word& w) const { return symbols.render(w); }
    Word word(const std::string& text) const { return symbols.parse_word(text); }
};

// Loads a system from the line-based file format:
//   alphabet <tok> ...        (required first non-comment line)
//   t1 <tok> ... / t2 ... / t3 ...   (optional, default empty)
//   rule <tok> ... -> <tok> ...      (order = priority; rhs may be empty)
//   # comment
ThueSystem parse_system(const std::string& text);

// Builds a system from token strings, for tests and builtins. `validate`
// false skips the duplicate-lhs and irreducible-t3 checks (some brute-force
// oracles deliberately exercise ill-formed systems).
ThueSystem make_system(const std::vector<std::string>& alphabet,
                       const std::vector<std::pair<std::string, std::string>>& rules,
                       const std::string& t1, const std::string& t2, const std::string& t3,
                       bool validate = true);

std::string render_system(const ThueSystem& sys);

struct RedexMatch {
    int start = 0; // 0-based start position of the occurrence
    int rule = 0;  // rule id
};

// Leftmost redex under the tie-break: minimal end position, then longest lhs,
// then lowest rule id. (Distinct lhs ending at one position necessarily have
// distinct lengths, so the id tier only matters for ill-formed systems.)
std::optional<RedexMatch> find_leftmost_redex(const ThueSystem& sys, const Word& s);

// Every (position, rule) occurrence, in (position, rule id) order.
std::vector<RedexMatch> all_redexes(const ThueSystem& sys, const Word& s);

Word apply_rule(const ThueSystem& sys, const Word& s, const RedexMatch& m);

// Replaces the leftmost redex; throws if s is irreducible.
Word reduce_once_leftmost(const ThueSystem& sys, const Word& s);

// Iterates leftmost reduction to an irreducible string; terminates because
// every step shrinks the length.
Word normal_form_leftmost(const ThueSystem& sys, const Word& s);

bool is_irreducible(const ThueSystem& sys, const Word& s);

// All irreducible strings reachable under any reduction order (exhaustive
// DFS over every redex choice). Guarded by sizeLimit.
std::set<Word> all_normal_forms(const ThueSystem& sys, const Word& s, int size_limit);

struct CriticalPair {
    Word peak;
    Word left, right; // one-step reducts by two distinct rule applications
    int rule_left = 0, rule_right = 0;
    enum class Overlap { SuffixPrefix, Containment } kind = Overlap::SuffixPrefix;
};

// All overlap peaks: rule2's lhs starting strictly inside rule1's (suffix-
// prefix) or contained in it. Peak length < 2L. Empty iff no redexes overlap.
std::vector<CriticalPair> critical_pairs(const ThueSystem& sys);

struct ConfluenceResult {
    bool yes = true;
    std::optional<CriticalPair> witness; // a non-joinable pair when !yes
};

// Newman: length-reducing => terminating, so confluence <=> all critical
// pairs joinable; joinability decided by intersecting all_normal_forms of
// the two reducts (exhaustive over reduction orders, avoiding circularity).
ConfluenceResult is_church_rosser(const ThueSystem& sys);

// x in L iff t1 x t2 ->* t3 (t3 irreducible).
bool accepts(const ThueSystem& sys, const Word& x);

} // namespace thuelab
