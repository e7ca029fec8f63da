#include "thuelab/thue.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace thuelab {

namespace {

void check_rule_shape(const Rule& r, const std::string& where) {
    if (r.lhs.empty()) throw Error(where + ": rule lhs must be nonempty");
    if (r.rhs.size() >= r.lhs.size())
        throw Error(where + ": rule is not length-reducing (|rhs| >= |lhs|)");
}

void finalize(ThueSystem& sys, bool validate) {
    sys.max_redex_len = 0;
    std::map<Word, int> seen;
    for (const auto& r : sys.rules) {
        sys.max_redex_len = std::max(sys.max_redex_len, static_cast<int>(r.lhs.size()));
        if (validate) {
            auto [it, fresh] = seen.emplace(r.lhs, r.id);
            if (!fresh)
                throw Error("duplicate lhs in rules " + std::to_string(it->second) + " and " +
                            std::to_string(r.id));
        }
    }
    if (validate && !is_irreducible(sys, sys.t3))
        throw Error("t3 is reducible: '" + sys.render(sys.t3) + "'");
}

} // namespace

ThueSystem parse_system(const std::string& text) {
    ThueSystem sys;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_alphabet = false;
    bool have_t1 = false, have_t2 = false, have_t3 = false;

    auto fail = [&](const std::string& msg) {
        throw Error("line " + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        auto toks = split_tokens(line);
        if (toks.empty() || toks[0][0] == '#') continue;
        const std::string& head = toks[0];
        if (!have_alphabet) {
            if (head != "alphabet") fail("first directive must be 'alphabet'");
            if (toks.size() < 2) fail("alphabet must list at least one token");
            for (size_t i = 1; i < toks.size(); ++i) {
                if (sys.symbols.contains(toks[i])) fail("duplicate alphabet token '" + toks[i] + "'");
                try {
                    sys.symbols.intern(toks[i]);
                } catch (const Error& e) {
                    fail(e.what());
                }
            }
            have_alphabet = true;
            continue;
        }
        auto parse_tail = [&](size_t from, size_t to) {
            Word w;
            for (size_t i = from; i < to; ++i) {
                if (!sys.symbols.contains(toks[i])) fail("symbol '" + toks[i] + "' not in alphabet");
                w.push_back(sys.symbols.id(toks[i]));
            }
            return w;
        };
        if (head == "alphabet") {
            fail("duplicate alphabet line");
        } else if (head == "t1" || head == "t2" || head == "t3") {
            bool& flag = head == "t1" ? have_t1 : head == "t2" ? have_t2 : have_t3;
            if (flag) fail("duplicate " + head + " line");
            flag = true;
            Word w = parse_tail(1, toks.size());
            (head == "t1" ? sys.t1 : head == "t2" ? sys.t2 : sys.t3) = std::move(w);
        } else if (head == "rule") {
            auto arrow = std::find(toks.begin(), toks.end(), "->");
            if (arrow == toks.end()) fail("rule line missing '->'");
            size_t apos = static_cast<size_t>(arrow - toks.begin());
            Rule r;
            r.id = static_cast<int>(sys.rules.size());
            r.lhs = parse_tail(1, apos);
            r.rhs = parse_tail(apos + 1, toks.size());
            try {
                check_rule_shape(r, "rule " + std::to_string(r.id));
            } catch (const Error& e) {
                fail(e.what());
            }
            sys.rules.push_back(std::move(r));
        } else {
            fail("unknown directive '" + head + "'");
        }
    }
    if (!have_alphabet) throw Error("system file has no alphabet line");
    finalize(sys, true);
    return sys;
}

ThueSystem make_system(const std::vector<std::string>& alphabet,
                       const std::vector<std::pair<std::string, std::string>>& rules,
                       const std::string& t1, const std::string& t2, const std::string& t3,
                       bool validate) {
    ThueSystem sys;
    for (const auto& tok : alphabet) sys.symbols.intern(tok);
    sys.t1 = sys.word(t1);
    sys.t2 = sys.word(t2);
    sys.t3 = sys.word(t3);
    for (const auto& [lhs, rhs] : rules) {
        Rule r;
        r.id = static_cast<int>(sys.rules.size());
        r.lhs = sys.word(lhs);
        r.rhs = sys.word(rhs);
        check_rule_shape(r, "rule " + std::to_string(r.id));
        sys.rules.push_back(std::move(r));
    }
    finalize(sys, validate);
    return sys;
}

std::string render_system(const ThueSystem& sys) {
    std::ostringstream out;
    out << "alphabet";
    for (Sym s = 0; s < sys.alphabet_size(); ++s) out << ' ' << sys.symbols.token(s);
    out << '\n';
    out << "t1";
    if (!sys.t1.empty()) out << ' ' << sys.render(sys.t1);
    out << "\nt2";
    if (!sys.t2.empty()) out << ' ' << sys.render(sys.t2);
    out << "\nt3";
    if (!sys.t3.empty()) out << ' ' << sys.render(sys.t3);
    out << '\n';
    for (const auto& r : sys.rules) {
        out << "rule " << sys.render(r.lhs) << " ->";
        if (!r.rhs.empty()) out << ' ' << sys.render(r.rhs);
        out << '\n';
    }
    return out.str();
}

namespace {

bool matches_at(const Word& s, const Word& lhs, int pos) {
    if (pos + lhs.size() > s.size()) return false;
    return std::equal(lhs.begin(), lhs.end(), s.begin() + pos);
}

} // namespace

std::optional<RedexMatch> find_leftmost_redex(const ThueSystem& sys, const Word& s) {
    const int n = static_cast<int>(s.size());
    for (int end = 1; end <= n; ++end) {
        int best_len = 0, best_rule = -1;
        for (const auto& r : sys.rules) {
            int len = static_cast<int>(r.lhs.size());
            if (len > end || len < best_len) continue;
            if (!matches_at(s, r.lhs, end - len)) continue;
            if (len > best_len || (len == best_len && r.id < best_rule)) {
                best_len = len;
                best_rule = r.id;
            }
        }
        if (best_rule >= 0) return RedexMatch{end - best_len, best_rule};
    }
    return std::nullopt;
}

std::vector<RedexMatch> all_redexes(const ThueSystem& sys, const Word& s) {
    std::vector<RedexMatch> out;
    for (int pos = 0; pos <= static_cast<int>(s.size()); ++pos)
        for (const auto& r : sys.rules)
            if (matches_at(s, r.lhs, pos)) out.push_back({pos, r.id});
    return out;
}

Word apply_rule(const ThueSystem& sys, const Word& s, const RedexMatch& m) {
    const Rule& r = sys.rules.at(static_cast<size_t>(m.rule));
    Word out;
    out.reserve(s.size() - r.lhs.size() + r.rhs.size());
    out.insert(out.end(), s.begin(), s.begin() + m.start);
    out.insert(out.end(), r.rhs.begin(), r.rhs.end());
    out.insert(out.end(), s.begin() + m.start + r.lhs.size(), s.end());
    return out;
}

Word reduce_once_leftmost(const ThueSystem& sys, const Word& s) {
    auto m = find_leftmost_redex(sys, s);
    if (!m) throw Error("reduce_once_leftmost: string is irreducible");
    return apply_rule(sys, s, *m);
}

Word normal_form_leftmost(const ThueSystem& sys, const Word& s) {
    Word cur = s;
    while (auto m = find_leftmost_redex(sys, cur)) cur = apply_rule(sys, cur, *m);
    return cur;
}

bool is_irreducible(const ThueSystem& sys, const Word& s) {
    return !find_leftmost_redex(sys, s).has_value();
}

namespace {

void nf_dfs(const ThueSystem& sys, const Word& s, std::map<Word, std::set<Word>>& memo,
            std::set<Word>& out) {
    auto it = memo.find(s);
    if (it != memo.end()) {
        out.insert(it->second.begin(), it->second.end());
        return;
    }
    std::set<Word> here;
    auto occ = all_redexes(sys, s);
    if (occ.empty()) {
        here.insert(s);
    } else {
        for (const auto& m : occ) nf_dfs(sys, apply_rule(sys, s, m), memo, here);
    }
    memo.emplace(s, here);
    out.insert(here.begin(), here.end());
}

} // namespace

std::set<Word> all_normal_forms(const ThueSystem& sys, const Word& s, int size_limit) {
    if (static_cast<int>(s.size()) > size_limit)
        throw Error("all_normal_forms: string exceeds the size limit");
    std::map<Word, std::set<Word>> memo;
    std::set<Word> out;
    nf_dfs(sys, s, memo, out);
    return out;
}

std::vector<CriticalPair> critical_pairs(const ThueSystem& sys) {
    std::vector<CriticalPair> out;
    // Index rules by their first symbol so the MIDBIT-sized systems scan fast.
    std::vector<std::vector<int>> by_first(static_cast<size_t>(sys.alphabet_size()));
    for (const auto& r : sys.rules) by_first[static_cast<size_t>(r.lhs[0])].push_back(r.id);

    for (const auto& r1 : sys.rules) {
        const Word& u1 = r1.lhs;
        const int len1 = static_cast<int>(u1.size());
        for (int p = 0; p < len1; ++p) {
            for (int id2 : by_first[static_cast<size_t>(u1[static_cast<size_t>(p)])]) {
                const Rule& r2 = sys.rules[static_cast<size_t>(id2)];
                const Word& u2 = r2.lhs;
                const int len2 = static_cast<int>(u2.size());
                if (p == 0 && r2.id == r1.id) continue; // same occurrence
                bool contained = p + len2 <= len1;
                if (!contained && p == 0) continue; // left-overhang: handled with roles swapped
                int overlap = std::min(len2, len1 - p);
                bool ok = true;
                for (int i = 0; i < overlap; ++i) {
                    if (u2[static_cast<size_t>(i)] != u1[static_cast<size_t>(p + i)]) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                CriticalPair cp;
                cp.peak = u1;
                if (!contained)
                    cp.peak.insert(cp.peak.end(), u2.begin() + overlap, u2.end());
                cp.rule_left = r1.id;
                cp.rule_right = r2.id;
                cp.kind = contained ? CriticalPair::Overlap::Containment
                                    : CriticalPair::Overlap::SuffixPrefix;
                cp.left = apply_rule(sys, cp.peak, {0, r1.id});
                cp.right = apply_rule(sys, cp.peak, {p, r2.id});
                out.push_back(std::move(cp));
            }
        }
    }
    return out;
}

ConfluenceResult is_church_rosser(const ThueSystem& sys) {
    for (const auto& cp : critical_pairs(sys)) {
        int limit = static_cast<int>(cp.peak.size());
        auto nl = all_normal_forms(sys, cp.left, limit);
        auto nr = all_normal_forms(sys, cp.right, limit);
        bool joinable = false;
        for (const auto& w : nl)
            if (nr.count(w)) {
                joinable = true;
                break;
            }
        if (!joinable) return {false, cp};
    }
    return {true, std::nullopt};
}

bool accepts(const ThueSystem& sys, const Word& x) {
    Word s = sys.t1;
    s.insert(s.end(), x.begin(), x.end());
    s.insert(s.end(), sys.t2.begin(), sys.t2.end());
    return normal_form_leftmost(sys, s) == sys.t3;
}

} // namespace thuelab
