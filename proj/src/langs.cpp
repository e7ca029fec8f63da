#include "thuelab/langs.hpp"

#include <algorithm>

namespace thuelab {

namespace {

const std::string kMacron = "̄";

std::string bar(const std::string& tok) { return tok + kMacron; }

bool is_barred(const std::string& tok) {
    return tok.size() >= kMacron.size() &&
           tok.compare(tok.size() - kMacron.size(), kMacron.size(), kMacron) == 0;
}

std::string bit_tok(int b) { return b ? "1" : "0"; }

std::string double_tok(int b1, int b2) {
    return "[" + std::to_string(b1) + std::to_string(b2) + "]";
}

// Barred symbols exchange with their unbarred counterparts; bits map to
// themselves. P̄ has no unbarred partner and never occurs in mirrored rules.
std::string bar_swap(const std::string& tok) {
    if (tok == "0" || tok == "1") return tok;
    if (tok == bar("P")) throw Error("P̄ has no unbarred counterpart");
    return is_barred(tok) ? tok.substr(0, tok.size() - kMacron.size()) : bar(tok);
}

using TokRule = std::pair<std::vector<std::string>, std::vector<std::string>>;

TokRule mirror(const TokRule& rule) {
    auto flip = [](const std::vector<std::string>& side) {
        std::vector<std::string> out;
        out.reserve(side.size());
        for (auto it = side.rbegin(); it != side.rend(); ++it) out.push_back(bar_swap(*it));
        return out;
    };
    return {flip(rule.first), flip(rule.second)};
}

std::string join(const std::vector<std::string>& toks) {
    std::string out;
    for (size_t i = 0; i < toks.size(); ++i) {
        if (i) out += ' ';
        out += toks[i];
    }
    return out;
}

// All bit vectors of length n, lexicographic.
template <typename F>
void for_bits(int n, F&& f) {
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<int> b(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) b[static_cast<size_t>(i)] = (mask >> (n - 1 - i)) & 1;
        f(b);
    }
}

// All strings of n double symbols (each of the 4 bit pairs), lexicographic.
template <typename F>
void for_doubles(int n, F&& f) {
    std::vector<std::pair<int, int>> d(static_cast<size_t>(n));
    const std::pair<int, int> vals[4] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    std::vector<int> idx(static_cast<size_t>(n), 0);
    for (;;) {
        for (int i = 0; i < n; ++i) d[static_cast<size_t>(i)] = vals[idx[static_cast<size_t>(i)]];
        f(d);
        int carry = n - 1;
        while (carry >= 0 && ++idx[static_cast<size_t>(carry)] == 4) {
            idx[static_cast<size_t>(carry)] = 0;
            --carry;
        }
        if (carry < 0) break;
    }
}

} // namespace

GeneratedSystem generate_midbit_system() {
    const std::string dollar = "$";
    const std::string dollar_bar = bar("$");
    const std::string P = bar("P");
    const std::string Q = "Q", R = "R";
    const std::string Qb = bar("Q"), Rb = bar("R");

    GeneratedSystem gen;
    std::vector<TokRule> rules;
    auto group = [&](const std::string& name, int start) {
        gen.rule_groups[name] = static_cast<int>(rules.size()) - start;
    };

    // Short strings: the middle bit of length-3 and length-5 inputs directly.
    int mark = 0;
    for_bits(3, [&](const std::vector<int>& b) {
        rules.push_back({{dollar_bar, bit_tok(b[0]), bit_tok(b[1]), bit_tok(b[2]), dollar},
                         {dollar_bar, bit_tok(b[1]), dollar}});
    });
    for_bits(5, [&](const std::vector<int>& b) {
        rules.push_back({{dollar_bar, bit_tok(b[0]), bit_tok(b[1]), bit_tok(b[2]), bit_tok(b[3]),
                          bit_tok(b[4]), dollar},
                         {dollar_bar, bit_tok(b[2]), dollar}});
    });
    group("short", mark);

    // Initiate a right sweep: pack the first 4 bits into two barred doubles.
    // The left sentinel stays on the rhs so the final extraction rules can
    // fire (7 -> 6, still length-reducing).
    mark = static_cast<int>(rules.size());
    for_bits(6, [&](const std::vector<int>& b) {
        rules.push_back({{dollar_bar, bit_tok(b[0]), bit_tok(b[1]), bit_tok(b[2]), bit_tok(b[3]),
                          bit_tok(b[4]), bit_tok(b[5])},
                         {dollar_bar, bar(double_tok(b[0], b[1])), bar(double_tok(b[2], b[3])), P,
                          bit_tok(b[4]), bit_tok(b[5])}});
    });
    group("initiate", mark);

    // Continue the right sweep.
    mark = static_cast<int>(rules.size());
    for_bits(6, [&](const std::vector<int>& b) {
        rules.push_back({{P, bit_tok(b[0]), bit_tok(b[1]), bit_tok(b[2]), bit_tok(b[3]),
                          bit_tok(b[4]), bit_tok(b[5])},
                         {bar(double_tok(b[0], b[1])), bar(double_tok(b[2], b[3])), P,
                          bit_tok(b[4]), bit_tok(b[5])}});
    });
    group("continue", mark);

    // Terminate the right sweep: pad with 0 and hand over to Q, or drop the
    // last bit and hand over to R.
    mark = static_cast<int>(rules.size());
    for_bits(5, [&](const std::vector<int>& b) {
        rules.push_back({{P, bit_tok(b[0]), bit_tok(b[1]), bit_tok(b[2]), bit_tok(b[3]),
                          bit_tok(b[4]), dollar},
                         {bar(double_tok(b[0], b[1])), bar(double_tok(b[2], b[3])),
                          bar(double_tok(b[4], 0)), Q, dollar}});
    });
    for_bits(3, [&](const std::vector<int>& b) {
        rules.push_back({{P, bit_tok(b[0]), bit_tok(b[1]), bit_tok(b[2]), dollar},
                         {bar(double_tok(b[0], b[1])), R, dollar}});
    });
    group("terminate", mark);
    gen.bitstring_redex_rules = static_cast<int>(rules.size());

    // Sweep families. `side` selects the odd or even bit of each double.
    auto sweep_family = [&](const std::string& sweep, bool odd_side) {
        std::vector<TokRule> fam;
        auto pick = [&](const std::pair<int, int>& d) { return odd_side ? d.first : d.second; };
        for_doubles(6, [&](const std::vector<std::pair<int, int>>& d) {
            std::vector<std::string> lhs = {sweep};
            for (const auto& di : d) lhs.push_back(double_tok(di.first, di.second));
            int y1 = pick(d[0]), y2 = pick(d[1]), y3 = pick(d[2]), y4 = pick(d[3]);
            fam.push_back({lhs,
                           {bar(double_tok(y1, y2)), bar(double_tok(y3, y4)), sweep,
                            double_tok(d[4].first, d[4].second),
                            double_tok(d[5].first, d[5].second)}});
        });
        for_doubles(5, [&](const std::vector<std::pair<int, int>>& d) {
            std::vector<std::string> lhs = {sweep};
            for (const auto& di : d) lhs.push_back(double_tok(di.first, di.second));
            lhs.push_back(dollar);
            int y1 = pick(d[0]), y2 = pick(d[1]), y3 = pick(d[2]), y4 = pick(d[3]), y5 = pick(d[4]);
            fam.push_back({lhs,
                           {bar(double_tok(y1, y2)), bar(double_tok(y3, y4)),
                            bar(double_tok(y5, 0)), Q, dollar}});
        });
        // Three doubles left before the sentinel: keep two selected bits and
        // hand over to R. (The doubles here are unbarred like the sibling
        // schemas; see the README note on the printed rules.)
        for_doubles(3, [&](const std::vector<std::pair<int, int>>& d) {
            std::vector<std::string> lhs = {sweep};
            for (const auto& di : d) lhs.push_back(double_tok(di.first, di.second));
            lhs.push_back(dollar);
            int y1 = pick(d[0]), y2 = pick(d[1]);
            fam.push_back({lhs, {bar(double_tok(y1, y2)), R, dollar}});
        });
        for_doubles(1, [&](const std::vector<std::pair<int, int>>& d) {
            fam.push_back({{dollar_bar, sweep, double_tok(d[0].first, d[0].second), dollar},
                           {dollar_bar, bit_tok(pick(d[0])), dollar}});
        });
        return fam;
    };

    mark = static_cast<int>(rules.size());
    auto qbar = sweep_family(Qb, true);
    rules.insert(rules.end(), qbar.begin(), qbar.end());
    group("qbar", mark);

    mark = static_cast<int>(rules.size());
    auto rbar = sweep_family(Rb, false);
    rules.insert(rules.end(), rbar.begin(), rbar.end());
    group("rbar", mark);

    // The left-sweep rules are the mirror images: both sides reversed and
    // barred symbols exchanged with their unbarred counterparts.
    mark = static_cast<int>(rules.size());
    for (const auto& r : qbar) rules.push_back(mirror(r));
    group("q", mark);
    mark = static_cast<int>(rules.size());
    for (const auto& r : rbar) rules.push_back(mirror(r));
    group("r", mark);

    gen.total_rules = static_cast<int>(rules.size());

    std::vector<std::string> alphabet = {"0", "1", dollar_bar, dollar};
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2) alphabet.push_back(double_tok(b1, b2));
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2) alphabet.push_back(bar(double_tok(b1, b2)));
    alphabet.push_back(P);
    alphabet.push_back(Q);
    alphabet.push_back(R);
    alphabet.push_back(Qb);
    alphabet.push_back(Rb);

    std::vector<std::pair<std::string, std::string>> rule_strs;
    rule_strs.reserve(rules.size());
    for (const auto& r : rules) rule_strs.emplace_back(join(r.first), join(r.second));
    gen.system = make_system(alphabet, rule_strs, dollar_bar, dollar,
                             dollar_bar + " 0 " + dollar);
    return gen;
}

ThueSystem midbit_toy_system() {
    const std::string dollar = "$";
    const std::string dollar_bar = bar("$");
    std::vector<std::pair<std::string, std::string>> rules;
    for_bits(3, [&](const std::vector<int>& b) {
        rules.emplace_back(dollar_bar + " " + bit_tok(b[0]) + " " + bit_tok(b[1]) + " " +
                               bit_tok(b[2]) + " " + dollar,
                           dollar_bar + " " + bit_tok(b[1]) + " " + dollar);
    });
    for_bits(5, [&](const std::vector<int>& b) {
        std::string lhs = dollar_bar;
        for (int i = 0; i < 5; ++i) lhs += " " + bit_tok(b[static_cast<size_t>(i)]);
        lhs += " " + dollar;
        rules.emplace_back(lhs, dollar_bar + " " + bit_tok(b[2]) + " " + dollar);
    });
    return make_system({"0", "1", dollar_bar, dollar}, rules, dollar_bar, dollar,
                       dollar_bar + " 0 " + dollar);
}

ThueSystem dyck_system() {
    return make_system({"a", "b", "c", "d"}, {{"a b", ""}}, "c", "d", "c d");
}

ThueSystem aa_system() { return make_system({"a"}, {{"a a", "a"}}, "", "", "a"); }

std::vector<NamedSystem> builtin_systems() {
    std::vector<NamedSystem> out;
    out.push_back({"DYCK", dyck_system()});
    out.push_back({"MIDBIT", generate_midbit_system().system});
    out.push_back({"AA", aa_system()});
    return out;
}

std::optional<int> midbit_oracle(const std::string& x) {
    if (x.size() % 2 == 0) return std::nullopt;
    return x[x.size() / 2] == '1' ? 1 : 0;
}

bool is_palindrome(const std::string& x) {
    return std::equal(x.begin(), x.begin() + static_cast<long>(x.size() / 2), x.rbegin());
}

bool is_square(const std::string& x) {
    if (x.size() % 2 != 0) return false;
    return x.compare(0, x.size() / 2, x, x.size() / 2, x.size() / 2) == 0;
}

std::pair<std::string, std::string> separating_context(const std::string& x,
                                                       const std::string& y) {
    for (char c : x + y)
        if (c != '0' && c != '1') throw Error("separating_context expects bitstrings");
    if (x == y) throw Error("separating_context requires distinct strings");
    // The longer string plays the palindrome side; ties go to the
    // lexicographically later one. Pad with the complement of its last bit.
    const std::string& longer =
        x.size() != y.size() ? (x.size() > y.size() ? x : y) : (x < y ? y : x);
    const std::string& other = &longer == &x ? y : x;
    char last = longer.back();
    char pad = last == '1' ? '0' : '1';
    std::string v(longer.size(), pad);
    v.append(longer.rbegin(), longer.rend());
    if (!is_palindrome(longer + v) || is_palindrome(other + v))
        throw Error("separating_context construction failed its own check");
    return {"", v};
}

} // namespace thuelab
