#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thuelab/symbols.hpp"

namespace thuelab {

struct BitString {
    std::vector<uint8_t> bits; // each 0 or 1

    size_t size() const { return bits.size(); }
    void push(int b) { bits.push_back(static_cast<uint8_t>(b & 1)); }
    void append(const BitString& o) { bits.insert(bits.end(), o.bits.begin(), o.bits.end()); }
    bool operator==(const BitString& o) const { return bits == o.bits; }

    std::string str() const;
    static BitString parse(const std::string& s); // "0101..."
};

// Cursor for sequential decoding.
struct BitReader {
    const BitString& bs;
    size_t pos = 0;

    bool done() const { return pos >= bs.size(); }
    size_t remaining() const { return bs.size() - pos; }
    int take();
    unsigned long take_fixed(int width);
};

// Prefix-free number code: 0 -> "11"; r >= 1 -> q(binary of r)11 with
// q: 0 -> 00, 1 -> 01. Uses fewer than 4 + 2*log2(r+1) bits.
BitString encode_number(unsigned long r);
// Decodes one number off the front; returns the value and leaves the reader
// positioned at the remainder. Throws if no valid prefix exists.
unsigned long decode_number(BitReader& in);
// Convenience: (value, remainder-as-bits).
std::pair<unsigned long, BitString> decode_number(const BitString& bs);

// Crossing-sequence encoding: the leading bit, then H fields of Q bits each.
// The first height fields hold state indices; the rest hold the reserved
// all-ones "no state" padding. Exactly Q*H+1 bits; injective on sequences of
// height <= H with state indices < 2^Q - 1.
struct PackedSeq {
    uint8_t lead = 0;
    std::vector<unsigned long> state_indices;
};
BitString encode_crossing_sequence(const PackedSeq& seq, int Q, int H);
PackedSeq decode_crossing_sequence(BitReader& in, int Q, int H);

// The middle-block data tuple, with crossing sequences as packed indices and
// h(y') as alphabet-symbol indices.
struct ResidueRecordData {
    unsigned long m = 0, i = 0, j = 0, j1 = 0, j2 = 0, ell = 0, q_index = 0;
    PackedSeq c1, c2;
    std::vector<unsigned long> h_y; // alphabet indices, each < 2^sym_bits
};

// Layout: prefix-coded numbers m,i,j,j1,j2,ell,q_index,|hY|, then the two
// QH+1-bit sequences, then hY at sym_bits bits per symbol. Prefix-free
// overall.
BitString encode_residue_record(const ResidueRecordData& rec, int Q, int H, int sym_bits);
ResidueRecordData decode_residue_record(BitReader& in, int Q, int H, int sym_bits);

int bits_per_symbol(int alphabet_size); // ceil(log2 A), at least 1

} // namespace thuelab
