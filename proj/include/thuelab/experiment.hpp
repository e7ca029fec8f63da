#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "thuelab/bitcodec.hpp"
#include "thuelab/crossing.hpp"
#include "thuelab/depletion.hpp"

namespace thuelab {

enum class InputFamily { PalPower, FourthPower };

// Block structure of (w w^R)^(2i+1) or w^4 inputs: block 0 is the cent-t1
// footprint, the last block is the t2-$ footprint, inner blocks have width 2m
// (palpower) or m (fourthpower). edges are crossing-point indices.
struct BlockLayout {
    int block_count = 0;
    std::vector<int> edges; // size block_count + 1
    int middle_index = 0;   // i + 1 for the palindrome family
    int inner_width = 0;
    int m = 0;
    int power_i = 0;

    int inner_lo() const { return 1; }
    int inner_hi() const { return block_count - 2; }
};

struct BuiltInput {
    Word input;
    BlockLayout layout;
};

// Maps bit characters of w through (sym0, sym1). The palpower family builds
// (w w^R)^(2i+1); fourthpower builds w^4 and ignores i.
BuiltInput build_input(const MachineProgram& prog, InputFamily family, const std::string& w_bits,
                       int i, const std::string& sym0, const std::string& sym1);

struct BlockSample {
    long nonblank = 0;
    bool depleted = false;
};

struct DepletionSnapshot {
    long time = 0;
    std::vector<BlockSample> inner; // one per inner block, in block order
};

struct DepletionReport {
    std::vector<DepletionSnapshot> snapshots; // one per REDUCE-phase boundary
    // First snapshot at which exactly one inner block is depleted.
    std::optional<std::pair<int, long>> first_depleted; // (block index, time)
    // Snapshots where several blocks crossed the threshold together before
    // any single-block snapshot was seen.
    std::vector<long> ambiguous_times;
    bool accepted = false;
    long halt_time = 0;
};

DepletionReport depletion_monitor(const MachineProgram& prog, const Word& input,
                                  const BlockLayout& layout, const DepletionParams& params);

// Two crossing points inside the input region with identical crossing
// sequences and k2 - k1 divisible by the family period (4m for palpower, m
// for fourthpower), both of height <= H. Empty when no pair exists.
std::optional<std::pair<int, int>> find_pump_pair(const TraceData& trace,
                                                  const BlockLayout& layout, int H,
                                                  InputFamily family);

// The middle-block data tuple m,i,j,j1,c1,j2,c2,h(y'),ell,q.
struct MiddleBlockRecord {
    long m = 0, i = 0, j = 0;
    int j1 = 0, j2 = 0;
    CrossingSeq c1, c2;
    Word h_y;
    int ell = 0;
    MachineState q;

    bool same_observation(const MiddleBlockRecord& o) const {
        return j == o.j && j1 == o.j1 && j2 == o.j2 && c1 == o.c1 && c2 == o.c2 && h_y == o.h_y &&
               ell == o.ell && q == o.q;
    }
};

struct RecordResult {
    std::optional<MiddleBlockRecord> record;
    BitString bits;       // encoding, when the record exists
    std::string reason;   // why the preconditions were unmet otherwise
};

// j1 = rightmost crossing point of height <= H in block j-1, j2 = leftmost in
// block j+1, both at snapshot time t; h(y') is the h-image between them.
// Preconditions unmet are reported, not fatal.
RecordResult emit_middle_block_record(const MachineProgram& prog, const Word& input,
                                      const BlockLayout& layout, const DepletionParams& params,
                                      int j, long t);

BitString encode_middle_block_record(const MachineProgram& prog, const MiddleBlockRecord& rec,
                                     const DepletionParams& params);
MiddleBlockRecord decode_middle_block_record(const MachineProgram& prog, const BitString& bits,
                                             const DepletionParams& params);

// One candidate run of the brute-force preimage search.
struct PreimageInstance {
    std::shared_ptr<const MachineProgram> prog;
    Word input;
    BlockLayout layout;
};
using PreimageBuilder = std::function<PreimageInstance(const std::string& w_bits)>;

// The target observation: the first-depleted block and its record.
struct PreimageTarget {
    int block_j = 0;
    MiddleBlockRecord record;
};

// Builds the target from w's own run; empty when the run never reaches a
// single-depleted-block snapshot.
std::optional<PreimageTarget> preimage_target(const PreimageInstance& inst,
                                              const DepletionParams& params);

// Every w' of length m whose run reproduces the target observation. m <= 12.
std::vector<std::string> residue_preimage_search(const PreimageBuilder& builder, int m,
                                                 const PreimageTarget& target,
                                                 const DepletionParams& params, int jobs = 1);

// Deterministic seeded stand-in for a hard string; never claimed incompressible.
std::string pseudo_hard_string(int m, uint64_t seed);

struct ExperimentConfig {
    InputFamily family = InputFamily::PalPower;
    std::string w_bits;
    int i = 1;
    long alpha_num = 1, alpha_den = 7;
    std::string sym0 = "0", sym1 = "1";
};

// Full experiment driver: monitor, middle-block records at the qualifying
// snapshot, pump-pair search, and pump round-trip. Returns the report JSON.
std::string run_experiment_json(const MachineProgram& prog, const ExperimentConfig& cfg);

} // namespace thuelab
