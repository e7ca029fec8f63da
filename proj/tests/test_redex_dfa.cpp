#include <catch2/catch_amalgamated.hpp>

#include <functional>

#include "thuelab/langs.hpp"
#include "thuelab/redex_dfa.hpp"

using namespace thuelab;

namespace {

void enumerate_words(const ThueSystem& sys, const std::vector<std::string>& toks, int max_len,
                     const std::function<void(const Word&)>& f) {
    Word cur;
    std::function<void(int)> rec = [&](int remaining) {
        f(cur);
        if (remaining == 0) return;
        for (const auto& t : toks) {
            cur.push_back(sys.symbols.id(t));
            rec(remaining - 1);
            cur.pop_back();
        }
    };
    rec(max_len);
}

} // namespace

TEST_CASE("dyck dfa structure") {
    ThueSystem dyck = dyck_system();
    RedexDfa dfa = build_redex_dfa(dyck);
    REQUIRE(dfa.state_count == 3);
    const Sym a = dyck.symbols.id("a"), b = dyck.symbols.id("b");
    const int after_a = dfa.next(0, a);
    REQUIRE(after_a != 0);
    CHECK(dfa.next(after_a, a) == after_a);
    const int acc = dfa.next(after_a, b);
    CHECK(dfa.accepting(acc));
    CHECK(dfa.accept_rule[static_cast<size_t>(acc)] == 0);
    CHECK_FALSE(dfa.accepting(0));
    CHECK_FALSE(dfa.accepting(after_a));
    SECTION("blank self-loop on every state") {
        for (int k = 0; k < dfa.state_count; ++k) CHECK(dfa.next(k, kBlank) == k);
    }
    SECTION("dump golden") {
        std::string dump = dump_dfa(dfa, dyck);
        CHECK(dump.find("states\t3") != std::string::npos);
        CHECK(dump.find("initial\t0") != std::string::npos);
        CHECK(dump.find("accept\t2\t0") != std::string::npos);
        CHECK(dump.find("trans\t1\tb\t2") != std::string::npos);
        CHECK(dump.find("trans\t0\tB\t0") != std::string::npos);
    }
}

TEST_CASE("longest-match tie-break baked into accepting states") {
    ThueSystem sys = make_system({"a", "b"}, {{"a a b", "a"}, {"a b", "b"}}, "", "", "");
    RedexDfa dfa = build_redex_dfa(sys);
    auto hit = dfa_scan(dfa, sys.word("a a b"));
    REQUIRE(hit);
    CHECK(hit->end_pos == 3);
    CHECK(hit->rule == 0);
    // Only the short rule matches here.
    auto hit2 = dfa_scan(dfa, sys.word("b a b"));
    REQUIRE(hit2);
    CHECK(hit2->end_pos == 3);
    CHECK(hit2->rule == 1);
}

TEST_CASE("dfa_scan handles blanks") {
    ThueSystem dyck = dyck_system();
    RedexDfa dfa = build_redex_dfa(dyck);
    Word w = {dyck.symbols.id("a"), kBlank, dyck.symbols.id("b")};
    auto hit = dfa_scan(dfa, w);
    REQUIRE(hit);
    CHECK(hit->end_pos == 3);
    CHECK(hit->rule == 0);
    CHECK_FALSE(dfa_scan(dfa, dyck.word("b b")));
    auto hit2 = dfa_scan(dfa, dyck.word("a a b b"));
    REQUIRE(hit2);
    CHECK(hit2->end_pos == 3);
}

TEST_CASE("dfa agrees with find_leftmost_redex exhaustively") {
    std::vector<ThueSystem> systems;
    systems.push_back(dyck_system());
    systems.push_back(make_system({"a", "b"}, {{"a a b", "a"}, {"a b", "b"}}, "", "", ""));
    systems.push_back(make_system({"a", "b", "c"},
                                  {{"a b a", "c"}, {"c c", ""}, {"b b b", "a"}, {"a c", "b"}}, "",
                                  "", ""));
    for (const auto& sys : systems) {
        RedexDfa dfa = build_redex_dfa(sys);
        std::vector<std::string> toks;
        for (Sym s = 0; s < sys.alphabet_size(); ++s) toks.push_back(sys.symbols.token(s));
        if (toks.size() > 3) toks.resize(3);
        int len = toks.size() == 3 ? 10 : 12;
        enumerate_words(sys, toks, len, [&](const Word& w) {
            auto hit = dfa_scan(dfa, w);
            auto want = find_leftmost_redex(sys, w);
            REQUIRE(hit.has_value() == want.has_value());
            if (hit) {
                REQUIRE(hit->end_pos ==
                        want->start + static_cast<int>(
                                          sys.rules[static_cast<size_t>(want->rule)].lhs.size()));
                REQUIRE(hit->rule == want->rule);
            }
        });
    }
}

TEST_CASE("prefix-freeness of acceptance") {
    // dfa_scan stops at the first accepting state, so rescanning the proper
    // prefix before a reported match end finds nothing.
    ThueSystem sys =
        make_system({"a", "b"}, {{"a a b", "a"}, {"a b", "b"}, {"b b", ""}}, "", "", "");
    RedexDfa dfa = build_redex_dfa(sys);
    enumerate_words(sys, {"a", "b"}, 10, [&](const Word& w) {
        auto hit = dfa_scan(dfa, w);
        if (hit && hit->end_pos > 1) {
            Word prefix(w.begin(), w.begin() + hit->end_pos - 1);
            REQUIRE_FALSE(dfa_scan(dfa, prefix));
        }
    });
}

TEST_CASE("historical strings") {
    ThueSystem dyck = dyck_system();
    RedexDfa dfa = build_redex_dfa(dyck);
    const Sym a = dyck.symbols.id("a");
    const int after_a = dfa.next(0, a);
    SECTION("empty is historical") { CHECK(is_historical(dfa, {})); }
    SECTION("single steps") {
        CHECK(is_historical(dfa, {{a, after_a}}));
        CHECK_FALSE(is_historical(dfa, {{a, 0}}));
    }
    SECTION("appending a blank with the same state stays historical") {
        std::vector<CompoundCell> cs = {{a, after_a}};
        cs.push_back({kBlank, after_a});
        CHECK(is_historical(dfa, cs));
        cs.push_back({kBlank, 0});
        CHECK_FALSE(is_historical(dfa, cs));
    }
}
