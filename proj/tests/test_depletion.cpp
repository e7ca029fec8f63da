#include <catch2/catch_amalgamated.hpp>

#include "thuelab/crossing.hpp"
#include "thuelab/depletion.hpp"
#include "thuelab/langs.hpp"

using namespace thuelab;

namespace {

MachineProgram compile(const ThueSystem& sys) {
    return MachineProgram(sys, build_redex_dfa(sys));
}

} // namespace

TEST_CASE("depletion constants") {
    SECTION("worked example: alpha 1/7, A=4, L=2") {
        DepletionParams p = compute_constants(1, 7, 4, 2);
        CHECK(p.log2A == 2);
        CHECK(p.beta_num == 1);
        CHECK(p.beta_den == 14);
        CHECK(p.H == 32);
        CHECK(p.K == 15);
        CHECK(p.d == 14);
    }
    SECTION("A=2 keeps beta = alpha") {
        DepletionParams p = compute_constants(1, 7, 2, 2);
        CHECK(p.log2A == 1);
        CHECK(p.beta_num == 1);
        CHECK(p.beta_den == 7);
    }
    SECTION("degenerate L rejected") {
        CHECK_THROWS_AS(compute_constants(1, 7, 4, 1), Error);
        CHECK_THROWS_AS(compute_constants(7, 7, 4, 2), Error);
        CHECK_THROWS_AS(compute_constants(1, 7, 1, 2), Error);
    }
    SECTION("the section constraint holds and H is minimal") {
        for (int A : {2, 4, 17})
            for (int L : {2, 3, 7}) {
                DepletionParams p = compute_constants(1, 7, A, L);
                CHECK(p.K * p.beta_num > (L - 1) * p.beta_den);
                long k_prev = (p.H - 1) / 2 - 2 + L - 1;
                bool minimal = p.H <= 6 || k_prev * p.beta_num <= (L - 1) * p.beta_den;
                CHECK(minimal);
            }
    }
}

TEST_CASE("is_depleted") {
    DepletionParams p = compute_constants(1, 7, 4, 2); // beta = 1/14
    SECTION("all blank region") {
        std::vector<Cell> tape(20, Cell::plain(kBlank));
        CHECK(is_depleted(tape, 2, 16, p));
    }
    SECTION("fully nonblank region with beta < 1") {
        std::vector<Cell> tape(20, Cell::plain(0));
        CHECK_FALSE(is_depleted(tape, 2, 16, p));
    }
    SECTION("boundary: 14 cells with exactly one nonblank") {
        std::vector<Cell> tape(14, Cell::plain(kBlank));
        tape[5] = Cell::plain(1);
        CHECK(is_depleted(tape, 0, 14, p));
        tape[6] = Cell::plain(1);
        CHECK_FALSE(is_depleted(tape, 0, 14, p));
    }
}

TEST_CASE("checker sensitivity on synthetic data") {
    DepletionParams p = compute_constants(1, 7, 4, 2);
    const int n = 40;
    std::vector<Cell> tape(static_cast<size_t>(n), Cell::plain(kBlank));
    std::vector<long> heights(static_cast<size_t>(n) + 1, 0);
    SECTION("qualifying pair over a nonblank stretch is reported") {
        for (int i = 0; i <= n; ++i) heights[static_cast<size_t>(i)] = p.H;
        for (int sq = 10; sq <= 30; ++sq) tape[static_cast<size_t>(sq - 1)] = Cell::plain(0);
        auto v = check_depletion_snapshot(heights, tape, p, 123);
        REQUIRE_FALSE(v.empty());
        CHECK(v.front().time == 123);
    }
    SECTION("below the height threshold nothing qualifies") {
        for (int i = 0; i <= n; ++i) heights[static_cast<size_t>(i)] = p.H - 1;
        for (auto& c : tape) c = Cell::plain(0);
        CHECK(check_depletion_snapshot(heights, tape, p, 0).empty());
    }
    SECTION("pairs closer than d are ignored") {
        for (int i = 0; i <= n; ++i)
            heights[static_cast<size_t>(i)] = (i >= 5 && i <= 5 + static_cast<int>(p.d) - 1)
                                                  ? p.H
                                                  : 0;
        for (auto& c : tape) c = Cell::plain(0);
        CHECK(check_depletion_snapshot(heights, tape, p, 0).empty());
    }
}

TEST_CASE("depletion lemma holds on machine runs") {
    // Long balanced inputs drive crossing heights past H = 32 around the
    // stationary redex boundary, so the check is not vacuous.
    ThueSystem dyck = dyck_system();
    MachineProgram prog = compile(dyck);
    DepletionParams p = compute_constants(1, 7, dyck.alphabet_size(), dyck.max_redex_len);
    SECTION("deep balanced run, non-vacuous") {
        Word x;
        const Sym a = dyck.symbols.id("a"), b = dyck.symbols.id("b");
        for (int i = 0; i < 24; ++i) x.push_back(a);
        for (int i = 0; i < 24; ++i) x.push_back(b);
        // Confirm the threshold regime is reached at all.
        TraceData tr = record_trace(prog, x);
        long deep_points = 0;
        for (const auto& s : tr.seqs)
            if (s.height() >= p.H) ++deep_points;
        REQUIRE(deep_points > static_cast<long>(p.d));
        CHECK(check_depletion_lemma(prog, x, p).empty());
    }
    SECTION("small corpus runs") {
        for (const char* s : {"a b", "b a b a", "a a b b a b", "a a a b b b"})
            CHECK(check_depletion_lemma(prog, dyck.word(s), p).empty());
        ThueSystem aa = aa_system();
        MachineProgram paa = compile(aa);
        DepletionParams pa = compute_constants(1, 7, 2, 2);
        CHECK(check_depletion_lemma(paa, Word(10, 0), pa).empty());
    }
}
