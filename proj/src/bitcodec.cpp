#include "thuelab/bitcodec.hpp"

#include <bit>

namespace thuelab {

std::string BitString::str() const {
    std::string s;
    s.reserve(bits.size());
    for (uint8_t b : bits) s += b ? '1' : '0';
    return s;
}

BitString BitString::parse(const std::string& s) {
    BitString out;
    out.bits.reserve(s.size());
    for (char c : s) {
        if (c == '0') out.bits.push_back(0);
        else if (c == '1') out.bits.push_back(1);
        else throw Error("bit string may contain only 0 and 1");
    }
    return out;
}

int BitReader::take() {
    if (done()) throw Error("bit stream exhausted");
    return bs.bits[pos++];
}

unsigned long BitReader::take_fixed(int width) {
    unsigned long v = 0;
    for (int i = 0; i < width; ++i) v = (v << 1) | static_cast<unsigned long>(take());
    return v;
}

BitString encode_number(unsigned long r) {
    BitString out;
    if (r > 0) {
        int w = std::bit_width(r);
        for (int i = w - 1; i >= 0; --i) {
            out.push(0);
            out.push(static_cast<int>((r >> i) & 1));
        }
    }
    out.push(1);
    out.push(1);
    return out;
}

unsigned long decode_number(BitReader& in) {
    unsigned long value = 0;
    int digits = 0;
    for (;;) {
        int b1 = in.take();
        int b2 = in.take();
        if (b1 == 1 && b2 == 1) {
            if (digits == 0) return 0;
            return value;
        }
        if (b1 == 1) throw Error("invalid prefix code group '10'");
        if (digits == 0 && b2 == 0) throw Error("invalid prefix code: leading zero digit");
        if (digits >= 64) throw Error("prefix-coded number too large");
        value = (value << 1) | static_cast<unsigned long>(b2);
        ++digits;
    }
}

std::pair<unsigned long, BitString> decode_number(const BitString& bs) {
    BitReader in{bs};
    unsigned long v = decode_number(in);
    BitString rem;
    rem.bits.assign(bs.bits.begin() + static_cast<long>(in.pos), bs.bits.end());
    return {v, rem};
}

BitString encode_crossing_sequence(const PackedSeq& seq, int Q, int H) {
    if (static_cast<int>(seq.state_indices.size()) > H)
        throw Error("crossing sequence height exceeds H");
    const unsigned long padding = (1ul << Q) - 1;
    BitString out;
    out.push(seq.lead);
    for (int f = 0; f < H; ++f) {
        unsigned long v = padding;
        if (f < static_cast<int>(seq.state_indices.size())) {
            v = seq.state_indices[static_cast<size_t>(f)];
            if (v >= padding) throw Error("state index collides with the no-state pattern");
        }
        for (int i = Q - 1; i >= 0; --i) out.push(static_cast<int>((v >> i) & 1));
    }
    return out;
}

PackedSeq decode_crossing_sequence(BitReader& in, int Q, int H) {
    PackedSeq seq;
    seq.lead = static_cast<uint8_t>(in.take());
    const unsigned long padding = (1ul << Q) - 1;
    bool padded = false;
    for (int f = 0; f < H; ++f) {
        unsigned long v = in.take_fixed(Q);
        if (v == padding) {
            padded = true;
            continue;
        }
        if (padded) throw Error("state field after padding in crossing sequence");
        seq.state_indices.push_back(v);
    }
    return seq;
}

BitString encode_residue_record(const ResidueRecordData& rec, int Q, int H, int sym_bits) {
    BitString out;
    out.append(encode_number(rec.m));
    out.append(encode_number(rec.i));
    out.append(encode_number(rec.j));
    out.append(encode_number(rec.j1));
    out.append(encode_number(rec.j2));
    out.append(encode_number(rec.ell));
    out.append(encode_number(rec.q_index));
    out.append(encode_number(rec.h_y.size()));
    out.append(encode_crossing_sequence(rec.c1, Q, H));
    out.append(encode_crossing_sequence(rec.c2, Q, H));
    for (unsigned long s : rec.h_y) {
        if (sym_bits < 64 && s >= (1ul << sym_bits)) throw Error("symbol index too wide to pack");
        for (int i = sym_bits - 1; i >= 0; --i) out.push(static_cast<int>((s >> i) & 1));
    }
    return out;
}

ResidueRecordData decode_residue_record(BitReader& in, int Q, int H, int sym_bits) {
    ResidueRecordData rec;
    rec.m = decode_number(in);
    rec.i = decode_number(in);
    rec.j = decode_number(in);
    rec.j1 = decode_number(in);
    rec.j2 = decode_number(in);
    rec.ell = decode_number(in);
    rec.q_index = decode_number(in);
    unsigned long hy_len = decode_number(in);
    rec.c1 = decode_crossing_sequence(in, Q, H);
    rec.c2 = decode_crossing_sequence(in, Q, H);
    for (unsigned long k = 0; k < hy_len; ++k) rec.h_y.push_back(in.take_fixed(sym_bits));
    return rec;
}

int bits_per_symbol(int alphabet_size) {
    if (alphabet_size < 2) return 1;
    return std::bit_width(static_cast<unsigned>(alphabet_size - 1));
}

} // namespace thuelab
