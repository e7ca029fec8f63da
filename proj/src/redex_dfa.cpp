#include "thuelab/redex_dfa.hpp"

#include <deque>
#include <sstream>

namespace thuelab {

RedexDfa build_redex_dfa(const ThueSystem& sys) {
    const int A = sys.alphabet_size();
    // Trie over all lhs.
    std::vector<std::vector<int32_t>> child;
    std::vector<int32_t> word_rule; // rule ending exactly at this node, -1 if none
    auto add_node = [&]() {
        child.emplace_back(static_cast<size_t>(A), -1);
        word_rule.push_back(-1);
        return static_cast<int>(child.size()) - 1;
    };
    add_node(); // root
    for (const auto& r : sys.rules) {
        int cur = 0;
        for (Sym a : r.lhs) {
            int32_t& slot = child[static_cast<size_t>(cur)][static_cast<size_t>(a)];
            if (slot < 0) slot = add_node();
            cur = slot;
        }
        int32_t& wr = word_rule[static_cast<size_t>(cur)];
        if (wr < 0 || sys.rules[static_cast<size_t>(wr)].id > r.id) wr = r.id;
    }

    const int n = static_cast<int>(child.size());
    RedexDfa dfa;
    dfa.state_count = n;
    dfa.alphabet_size = A;
    dfa.delta.assign(static_cast<size_t>(n) * (A + 1), 0);
    dfa.accept_rule.assign(static_cast<size_t>(n), -1);

    // Breadth-first failure-function construction; goto completed into a
    // total transition table. accept_rule[k] is the tie-break winner among
    // all patterns ending at k (suffixes have distinct lengths, so longest
    // lhs decides; the tie-break is pinned here so runtime never re-resolves it).
    std::vector<int32_t> fail(static_cast<size_t>(n), 0);
    std::deque<int> queue;
    auto better = [&](int32_t a, int32_t b) {
        if (a < 0) return b;
        if (b < 0) return a;
        size_t la = sys.rules[static_cast<size_t>(a)].lhs.size();
        size_t lb = sys.rules[static_cast<size_t>(b)].lhs.size();
        if (la != lb) return la > lb ? a : b;
        return a < b ? a : b;
    };
    for (Sym a = 0; a < A; ++a) {
        int32_t c = child[0][static_cast<size_t>(a)];
        if (c < 0) {
            dfa.delta[static_cast<size_t>(a)] = 0;
        } else {
            dfa.delta[static_cast<size_t>(a)] = c;
            fail[static_cast<size_t>(c)] = 0;
            queue.push_back(c);
        }
    }
    dfa.accept_rule[0] = word_rule[0];
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        dfa.accept_rule[static_cast<size_t>(u)] =
            better(word_rule[static_cast<size_t>(u)],
                   dfa.accept_rule[static_cast<size_t>(fail[static_cast<size_t>(u)])]);
        for (Sym a = 0; a < A; ++a) {
            int32_t c = child[static_cast<size_t>(u)][static_cast<size_t>(a)];
            size_t row = static_cast<size_t>(u) * (A + 1);
            size_t frow = static_cast<size_t>(fail[static_cast<size_t>(u)]) * (A + 1);
            if (c < 0) {
                dfa.delta[row + static_cast<size_t>(a)] = dfa.delta[frow + static_cast<size_t>(a)];
            } else {
                dfa.delta[row + static_cast<size_t>(a)] = c;
                fail[static_cast<size_t>(c)] =
                    dfa.delta[frow + static_cast<size_t>(a)];
                queue.push_back(c);
            }
        }
    }
    // Blank self-loop column.
    for (int k = 0; k < n; ++k)
        dfa.delta[static_cast<size_t>(k) * (A + 1) + static_cast<size_t>(A)] = k;
    return dfa;
}

std::optional<ScanHit> dfa_scan(const RedexDfa& dfa, const Word& s) {
    int k = RedexDfa::initial;
    for (size_t i = 0; i < s.size(); ++i) {
        k = dfa.next(k, s[i]);
        if (dfa.accepting(k)) return ScanHit{static_cast<int>(i) + 1, dfa.accept_rule[static_cast<size_t>(k)]};
    }
    return std::nullopt;
}

bool is_historical(const RedexDfa& dfa, const std::vector<CompoundCell>& cells) {
    int k = RedexDfa::initial;
    for (const auto& c : cells) {
        k = dfa.next(k, c.a);
        if (c.k != k) return false;
    }
    return true;
}

std::string dump_dfa(const RedexDfa& dfa, const ThueSystem& sys) {
    std::ostringstream out;
    out << "states\t" << dfa.state_count << "\n";
    out << "initial\t" << RedexDfa::initial << "\n";
    for (int k = 0; k < dfa.state_count; ++k) {
        for (Sym a = 0; a < dfa.alphabet_size; ++a)
            out << "trans\t" << k << "\t" << sys.symbols.token(a) << "\t" << dfa.next(k, a) << "\n";
        out << "trans\t" << k << "\tB\t" << dfa.next(k, kBlank) << "\n";
    }
    for (int k = 0; k < dfa.state_count; ++k)
        if (dfa.accepting(k))
            out << "accept\t" << k << "\t" << dfa.accept_rule[static_cast<size_t>(k)] << "\n";
    return out.str();
}

} // namespace thuelab
