#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "thuelab/redex_dfa.hpp"
#include "thuelab/thue.hpp"

namespace thuelab {

// Worktape cells: sentinels, plain symbols of Sigma ∪ {B}, and compound
// symbols [a,k] pairing a symbol with a DFA state. Blank cells are Plain(B)
// and Compound(B,k).
struct Cell {
    enum class Kind : uint8_t { Cent, Dollar, Plain, Compound };
    Kind kind = Kind::Plain;
    Sym a = kBlank; // meaningful for Plain/Compound
    int32_t k = 0;  // meaningful for Compound

    static Cell cent() { return {Kind::Cent, 0, 0}; }
    static Cell dollar() { return {Kind::Dollar, 0, 0}; }
    static Cell plain(Sym a) { return {Kind::Plain, a, 0}; }
    static Cell compound(Sym a, int32_t k) { return {Kind::Compound, a, k}; }

    bool is_blank() const {
        return (kind == Kind::Plain || kind == Kind::Compound) && a == kBlank;
    }
    bool operator==(const Cell& o) const {
        if (kind != o.kind) return false;
        if (kind == Kind::Cent || kind == Kind::Dollar) return true;
        return a == o.a && (kind != Kind::Compound || k == o.k);
    }
};

// Machine states. The phases follow the construction: write t2$ to the
// right, write reversed t1 and the cent to the left, then alternate SHIFT
// and REDUCE until $ is scanned, then compare h(alpha) with t3 right to
// left. The cent is written with a rightward move so the head never leaves
// squares 1..n and crossing points 0 and n are never crossed.
struct MachineState {
    enum class Phase : uint8_t {
        InitRight,    // x = progress into t2 · $
        InitLeft,     // x = progress into reversed t1 · cent
        Shift,        // x = DFA state k'
        ReduceWrite,  // x = rule, y = reduct symbols remaining, z = nonblank cells remaining
        ReducePeek,   // x = rule
        ReduceReturn, // x = DFA state k'
        Final,        // x = progress into reversed t3
        Accept,
        Reject,
    };
    Phase phase = Phase::InitRight;
    int32_t x = 0, y = 0, z = 0;

    bool halted() const { return phase == Phase::Accept || phase == Phase::Reject; }
    bool operator==(const MachineState& o) const {
        return phase == o.phase && x == o.x && y == o.y && z == o.z;
    }
    bool operator!=(const MachineState& o) const { return !(*this == o); }

    static MachineState init_right(int j) { return {Phase::InitRight, j, 0, 0}; }
    static MachineState init_left(int j) { return {Phase::InitLeft, j, 0, 0}; }
    static MachineState shift(int k) { return {Phase::Shift, k, 0, 0}; }
    static MachineState reduce_write(int r, int v_rem, int u_rem) {
        return {Phase::ReduceWrite, r, v_rem, u_rem};
    }
    static MachineState reduce_peek(int r) { return {Phase::ReducePeek, r, 0, 0}; }
    static MachineState reduce_return(int k) { return {Phase::ReduceReturn, k, 0, 0}; }
    static MachineState final_phase(int j) { return {Phase::Final, j, 0, 0}; }
    static MachineState accept() { return {Phase::Accept, 0, 0, 0}; }
    static MachineState reject() { return {Phase::Reject, 0, 0, 0}; }
};

// Stable textual names, used in trace files.
std::string state_name(const MachineState& s);
MachineState parse_state_name(const std::string& name);

struct Quintuple {
    Cell write;
    bool move_right = true;
    MachineState next;
};

// The compiled machine. The quintuple map is total over the (state, cell)
// combinations reachable from a legal initial configuration; combinations no
// configuration can produce have no instruction (quintuple() returns empty,
// step() reports a machine bug, verification reports such a claimed crossing
// as inconsistent).
class MachineProgram {
public:
    MachineProgram(ThueSystem sys, RedexDfa dfa);

    const ThueSystem& system() const { return sys_; }
    const RedexDfa& dfa() const { return dfa_; }

    long state_count() const { return state_count_; }
    int state_bits() const { return state_bits_; } // Q: smallest with state_count < 2^Q

    // Dense index of a state in the canonical enumeration, 0..state_count-1.
    long state_index(const MachineState& s) const;
    MachineState state_at(long index) const;

    std::optional<Quintuple> quintuple(const MachineState& state, const Cell& cell) const;

    int initial_head(int input_len) const;   // |cent t1| + 1
    int tape_len(int input_len) const;       // n = |cent t1 x t2 $|
    int cent_t1_len() const { return static_cast<int>(sys_.t1.size()) + 1; }

    // The initial redex as cells (cent t1 x t2 $), what the init phases leave.
    std::vector<Cell> initial_redex(const Word& x) const;

private:
    ThueSystem sys_;
    RedexDfa dfa_;

    // ReduceWrite(r, v, u) states are enumerated exactly over the pairs the
    // reduce pass can reach (blanks interleaved in the footprint decouple
    // the two counters); per-rule lookup tables give dense indices.
    struct RuleStates {
        long base = 0;
        std::vector<std::pair<int32_t, int32_t>> pairs; // (v_rem, u_rem), canonical order
        std::vector<int32_t> index_of;                  // (v_rem*(|u|+1)+u_rem) -> local index
    };
    std::vector<RuleStates> rule_states_;
    long off_init_right_ = 0, off_init_left_ = 0, off_shift_ = 0, off_reduce_write_ = 0;
    long off_reduce_peek_ = 0, off_reduce_return_ = 0, off_final_ = 0, off_accept_ = 0;
    long state_count_ = 0;
    int state_bits_ = 0;
};

struct Configuration {
    std::vector<Cell> tape; // squares 1..n stored at indices 0..n-1
    int head = 1;           // 1-based square index
    MachineState state;
    long time = 0;
    int blanks = 0; // count of blank cells

    int n() const { return static_cast<int>(tape.size()); }
    const Cell& at(int square) const { return tape[static_cast<size_t>(square - 1)]; }
    Cell& at(int square) { return tape[static_cast<size_t>(square - 1)]; }
};

Configuration initial_config(const MachineProgram& prog, const Word& x);

// One move; crossing points are min(from, to).
struct StepEvent {
    int from = 0, to = 0;
    MachineState state_after;
};

// Applies exactly one quintuple. Throws on a halted state or a missing
// instruction (the latter signals a compiler bug).
StepEvent step(const MachineProgram& prog, Configuration& cfg);

struct RunResult {
    bool accepted = false;
    std::vector<Cell> final_tape;
    long steps = 0;
    int reduce_count = 0;
    Word h_image_word;
};

long default_fuel(int n); // 8n^2 + 8n

// Observer is called after every step with (cfg, event); return false to stop
// early (the snapshot machinery uses this).
using StepObserver = std::function<bool(const Configuration&, const StepEvent&)>;

RunResult run(const MachineProgram& prog, const Word& x, long fuel = -1,
              const StepObserver& observer = nullptr, bool audit = false);

// h: erases blanks and sentinels, projects compounds to their symbol.
Word h_image(const std::vector<Cell>& cells);
Word h_image(const std::vector<Cell>& cells, int from_square, int to_square); // inclusive, 1-based

// Widens the tape by `count` cells so that the new cells occupy squares
// square..square+count-1: Plain(B) right of the head, Compound(B,k) with k
// copied from the nearest compound to the left (k0 if none) otherwise. Only
// legal between phases (state is Shift); 2 <= square <= n.
Configuration insert_blanks(const MachineProgram& prog, const Configuration& cfg, int square,
                            int count);

// Resumes a run from an arbitrary configuration (used after insert_blanks).
RunResult run_from(const MachineProgram& prog, Configuration cfg, long fuel = -1,
                   const StepObserver& observer = nullptr, bool audit = false);

} // namespace thuelab
