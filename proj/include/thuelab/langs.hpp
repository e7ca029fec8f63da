#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thuelab/thue.hpp"

namespace thuelab {

// The MIDBIT Thue system: isolates the middle bit of odd-length bitstrings by
// alternating packing sweeps. Alphabet (17 symbols): bits 0 1, sentinels $̄ $,
// double symbols [b1b2] and barred [b1b2]̄, sweep symbols P̄ Q R Q̄ R̄. Barred
// tokens carry a trailing combining macron (U+0304).
struct GeneratedSystem {
    ThueSystem system; // t1 = $̄, t2 = $, t3 = $̄ 0 $ (accepts middle bit 0)
    std::map<std::string, int> rule_groups;
    int bitstring_redex_rules = 0; // the four leading groups
    int total_rules = 0;
    static constexpr int reference_rule_count = 20720; // commonly quoted size; see README
};

GeneratedSystem generate_midbit_system();

// The 40 short-string rules alone, over the 4-symbol alphabet {$̄,$,0,1}.
// Input alphabet is exactly {0,1}; used as a small equivalence-test system.
ThueSystem midbit_toy_system();

// Built-in parse-ready systems.
struct NamedSystem {
    std::string name;
    ThueSystem system;
};
std::vector<NamedSystem> builtin_systems(); // DYCK, MIDBIT, AA

ThueSystem dyck_system(); // alphabet a b c d; t1=c t2=d t3=c d; rule a b ->
ThueSystem aa_system();   // alphabet a; t3=a; rule a a -> a

// Middle bit of odd-length bitstrings; empty for even lengths. Bitstrings are
// plain '0'/'1' character strings.
std::optional<int> midbit_oracle(const std::string& x);

bool is_palindrome(const std::string& x);
bool is_square(const std::string& x); // x = y y for some y

// A context (u, v) with u = "" such that exactly one of u x v, u y v is a
// palindrome; verified before returning.
std::pair<std::string, std::string> separating_context(const std::string& x,
                                                       const std::string& y);

} // namespace thuelab
