#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thuelab/machine.hpp"

namespace thuelab {

// Crossing sequence at one crossing point: the leading bit (0 = the point is
// left of the initially scanned square) and the machine states immediately
// after each crossing, in order. Crossings alternate direction starting
// leftward for lead 0, rightward for lead 1.
struct CrossingSeq {
    uint8_t lead = 0;
    std::vector<MachineState> states;

    int height() const { return static_cast<int>(states.size()); }
    bool operator==(const CrossingSeq& o) const { return lead == o.lead && states == o.states; }
    bool operator!=(const CrossingSeq& o) const { return !(*this == o); }
};

// A partial computation's crossing data: squares 1..n, crossing points 0..n.
// cells holds the initial redex (cent t1 x t2 $); the init sweeps' crossings
// are recorded. final_cells/head/state describe the snapshot at `time`.
struct TraceData {
    int n = 0;
    std::vector<Cell> cells;       // size n
    std::vector<CrossingSeq> seqs; // size n+1, indexed by crossing point
    int head = 1;
    MachineState state;
    long time = 0;
    std::vector<Cell> final_cells; // size n; not serialized
};

// Runs the machine on x, recording every crossing. stop_time < 0 runs to the
// halt; otherwise at most stop_time steps (a run that halts earlier just
// ends there, with trace.time telling how far it got).
TraceData record_trace(const MachineProgram& prog, const Word& x, long stop_time = -1);

struct VerificationReport {
    bool consistent = false;
    std::string reason;             // first failure, empty when consistent
    std::vector<Cell> final_cells;  // replayed tape at the stop
    std::vector<long> cancelled;    // I_i per crossing point
    int end_square = 0;             // unique square where the computation ends
    MachineState end_state;
    bool halted = false; // stopped in Accept/Reject rather than at a snapshot
};

// Replays the computation determined by the quintuples and the trace's cells,
// cancelling each crossing against the recorded sequences, with per-index
// direction checks derived from the lead bits. Stops on halt, on a crossing
// against an exhausted sequence, or on a mismatch; consistent iff no mismatch
// and every state in every sequence is cancelled.
VerificationReport full_verification(const MachineProgram& prog, const TraceData& trace);

struct LocalReport {
    bool consistent = false;
    std::string reason;
    Cell final_cell;       // the square's content at the end of the partial computation
    bool ends_here = false; // the partial computation's last configuration scans this square
    MachineState end_state;
};

// Simulates only the visits to square k, drawing entry states from c_{k-1}
// and c_k per the alternation discipline and cancelling exit states.
LocalReport local_verification(const MachineProgram& prog, int n, int k, const CrossingSeq& c_left,
                               const Cell& a_k, const CrossingSeq& c_right);

// Theorem: all consecutive triples compatible <=> full verification consistent.
bool triples_all_compatible(const MachineProgram& prog, const TraceData& trace);
std::vector<LocalReport> all_local_reports(const MachineProgram& prog, const TraceData& trace);

// Splices out the region between crossing points i and j (requires equal
// crossing sequences there and the cut inside the input-string squares); the
// result is renumbered, re-verified, and carries the derived end snapshot.
TraceData pump_cut(const MachineProgram& prog, const TraceData& trace, int i, int j);

// The residue of the middle piece of a split initial redex at a time T.
struct Residue {
    int len_v = 0;
    CrossingSeq c1, c2;
    Word h_z;
    int ell = 0; // 0 when the head is outside the piece, else 1 + |h| left of the head
    MachineState q;

    bool operator==(const Residue& o) const {
        return len_v == o.len_v && c1 == o.c1 && c2 == o.c2 && h_z == o.h_z && ell == o.ell &&
               q == o.q;
    }
    // Name of the first differing component, empty when equal.
    std::string first_difference(const Residue& o) const;
};

// Split of the initial redex: |u| = len_u squares, then |v| = len_v, then the
// rest. T must not exceed the halting time.
Residue extract_residue(const MachineProgram& prog, const Word& x, int len_u, int len_v, long T);

struct SpliceSpec {
    Word x;
    int len_u = 0, len_v = 0;
    long time = 0;
};

// Residue-matched cut and paste: returns the input x'' whose initial redex is
// u v' w. Verifies by two machine runs that the normal forms coincide.
Word splice(const MachineProgram& prog, const SpliceSpec& first, const SpliceSpec& second);

// Trace file format: {n, cells:[token...], sequences:[{point, lead,
// states:[name...]}...], head, state, time}.
std::string trace_to_json(const MachineProgram& prog, const TraceData& trace);
TraceData trace_from_json(const MachineProgram& prog, const std::string& text);

} // namespace thuelab
