#include "thuelab/experiment.hpp"

#include <algorithm>
#include <map>
#include <thread>

#include "json.hpp"

namespace thuelab {

BuiltInput build_input(const MachineProgram& prog, InputFamily family, const std::string& w_bits,
                       int i, const std::string& sym0, const std::string& sym1) {
    if (w_bits.empty()) throw Error("w must be nonempty");
    if (family == InputFamily::PalPower && i < 0) throw Error("i must be nonnegative");
    const ThueSystem& sys = prog.system();
    const Sym s0 = sys.symbols.id(sym0);
    const Sym s1 = sys.symbols.id(sym1);
    auto bit_sym = [&](char c) {
        if (c == '0') return s0;
        if (c == '1') return s1;
        throw Error("w must be a bitstring");
    };
    const int m = static_cast<int>(w_bits.size());
    BuiltInput out;
    out.layout.m = m;
    Word unit;
    int reps = 0;
    if (family == InputFamily::PalPower) {
        for (char c : w_bits) unit.push_back(bit_sym(c));
        for (auto it = w_bits.rbegin(); it != w_bits.rend(); ++it) unit.push_back(bit_sym(*it));
        reps = 2 * i + 1;
        out.layout.inner_width = 2 * m;
        out.layout.middle_index = i + 1;
        out.layout.power_i = i;
    } else {
        for (char c : w_bits) unit.push_back(bit_sym(c));
        reps = 4;
        out.layout.inner_width = m;
        out.layout.middle_index = 2;
        out.layout.power_i = 0;
    }
    for (int r = 0; r < reps; ++r) out.input.insert(out.input.end(), unit.begin(), unit.end());

    out.layout.block_count = reps + 2;
    const int c = prog.cent_t1_len();
    const int n = prog.tape_len(static_cast<int>(out.input.size()));
    out.layout.edges.push_back(0);
    out.layout.edges.push_back(c);
    for (int b = 1; b <= reps; ++b) out.layout.edges.push_back(c + b * out.layout.inner_width);
    out.layout.edges.push_back(n);
    return out;
}

DepletionReport depletion_monitor(const MachineProgram& prog, const Word& input,
                                  const BlockLayout& layout, const DepletionParams& params) {
    DepletionReport rep;
    Configuration cfg = initial_config(prog, input);
    MachineState prev = cfg.state;
    auto sample = [&](const Configuration& c) {
        DepletionSnapshot snap;
        snap.time = c.time;
        int depleted_count = 0;
        int depleted_block = -1;
        for (int b = layout.inner_lo(); b <= layout.inner_hi(); ++b) {
            int j1 = layout.edges[static_cast<size_t>(b)];
            int j2 = layout.edges[static_cast<size_t>(b + 1)];
            BlockSample s;
            s.nonblank = static_cast<long>(h_image(c.tape, j1 + 1, j2).size());
            s.depleted = is_depleted_counts(s.nonblank, j2 - j1, params);
            if (s.depleted) {
                ++depleted_count;
                depleted_block = b;
            }
            snap.inner.push_back(s);
        }
        rep.snapshots.push_back(std::move(snap));
        if (!rep.first_depleted) {
            if (depleted_count == 1)
                rep.first_depleted = {depleted_block, c.time};
            else if (depleted_count > 1)
                rep.ambiguous_times.push_back(c.time);
        }
    };
    auto observer = [&](const Configuration& c, const StepEvent& ev) {
        if (prev.phase == MachineState::Phase::ReduceReturn &&
            ev.state_after.phase == MachineState::Phase::Shift)
            sample(c);
        prev = ev.state_after;
        return true;
    };
    RunResult res = run_from(prog, std::move(cfg), -1, observer, false);
    rep.accepted = res.accepted;
    rep.halt_time = res.steps;
    return rep;
}

std::optional<std::pair<int, int>> find_pump_pair(const TraceData& trace,
                                                  const BlockLayout& layout, int H,
                                                  InputFamily family) {
    const int period = family == InputFamily::PalPower ? 4 * layout.m : layout.m;
    const int lo = layout.edges[1];
    const int hi = layout.edges[static_cast<size_t>(layout.block_count) - 1];
    std::map<std::pair<int, std::string>, int> firsts;
    for (int k = lo; k <= hi; ++k) {
        const CrossingSeq& s = trace.seqs[static_cast<size_t>(k)];
        if (s.height() > H) continue;
        std::string key;
        key += static_cast<char>('0' + s.lead);
        for (const auto& st : s.states) {
            key += '|';
            key += state_name(st);
        }
        auto [it, fresh] = firsts.try_emplace({k % period, key}, k);
        if (!fresh) return std::make_pair(it->second, k);
    }
    return std::nullopt;
}

RecordResult emit_middle_block_record(const MachineProgram& prog, const Word& input,
                                      const BlockLayout& layout, const DepletionParams& params,
                                      int j, long t) {
    RecordResult out;
    if (j - 1 < 0 || j + 2 > layout.block_count) {
        out.reason = "block j must have neighbours on both sides";
        return out;
    }
    TraceData trace = record_trace(prog, input, t);
    if (trace.time < t) {
        out.reason = "snapshot time exceeds the halting time";
        return out;
    }
    auto height_ok = [&](int k) { return trace.seqs[static_cast<size_t>(k)].height() <= params.H; };
    int j1 = -1, j2 = -1;
    for (int k = layout.edges[static_cast<size_t>(j)]; k >= layout.edges[static_cast<size_t>(j - 1)];
         --k)
        if (height_ok(k)) {
            j1 = k;
            break;
        }
    for (int k = layout.edges[static_cast<size_t>(j + 1)];
         k <= layout.edges[static_cast<size_t>(j + 2)]; ++k)
        if (height_ok(k)) {
            j2 = k;
            break;
        }
    if (j1 < 0 || j2 < 0) {
        out.reason = "no crossing point of height <= H in a neighbouring block";
        return out;
    }
    MiddleBlockRecord rec;
    rec.m = layout.m;
    rec.i = layout.power_i;
    rec.j = j;
    rec.j1 = j1;
    rec.j2 = j2;
    rec.c1 = trace.seqs[static_cast<size_t>(j1)];
    rec.c2 = trace.seqs[static_cast<size_t>(j2)];
    rec.h_y = h_image(trace.final_cells, j1 + 1, j2);
    if (trace.head > j1 && trace.head <= j2)
        rec.ell = 1 + static_cast<int>(h_image(trace.final_cells, j1 + 1, trace.head - 1).size());
    else
        rec.ell = 0;
    rec.q = trace.state;
    out.bits = encode_middle_block_record(prog, rec, params);
    out.record = std::move(rec);
    return out;
}

namespace {

PackedSeq pack_seq(const MachineProgram& prog, const CrossingSeq& s) {
    PackedSeq p;
    p.lead = s.lead;
    for (const auto& st : s.states)
        p.state_indices.push_back(static_cast<unsigned long>(prog.state_index(st)));
    return p;
}

CrossingSeq unpack_seq(const MachineProgram& prog, const PackedSeq& p) {
    CrossingSeq s;
    s.lead = p.lead;
    for (unsigned long idx : p.state_indices)
        s.states.push_back(prog.state_at(static_cast<long>(idx)));
    return s;
}

} // namespace

BitString encode_middle_block_record(const MachineProgram& prog, const MiddleBlockRecord& rec,
                                     const DepletionParams& params) {
    ResidueRecordData data;
    data.m = static_cast<unsigned long>(rec.m);
    data.i = static_cast<unsigned long>(rec.i);
    data.j = static_cast<unsigned long>(rec.j);
    data.j1 = static_cast<unsigned long>(rec.j1);
    data.j2 = static_cast<unsigned long>(rec.j2);
    data.ell = static_cast<unsigned long>(rec.ell);
    data.q_index = static_cast<unsigned long>(prog.state_index(rec.q));
    data.c1 = pack_seq(prog, rec.c1);
    data.c2 = pack_seq(prog, rec.c2);
    for (Sym a : rec.h_y) data.h_y.push_back(static_cast<unsigned long>(a));
    return encode_residue_record(data, prog.state_bits(), params.H,
                                 bits_per_symbol(prog.system().alphabet_size()));
}

MiddleBlockRecord decode_middle_block_record(const MachineProgram& prog, const BitString& bits,
                                             const DepletionParams& params) {
    BitReader in{bits};
    ResidueRecordData data = decode_residue_record(
        in, prog.state_bits(), params.H, bits_per_symbol(prog.system().alphabet_size()));
    MiddleBlockRecord rec;
    rec.m = static_cast<long>(data.m);
    rec.i = static_cast<long>(data.i);
    rec.j = static_cast<long>(data.j);
    rec.j1 = static_cast<int>(data.j1);
    rec.j2 = static_cast<int>(data.j2);
    rec.ell = static_cast<int>(data.ell);
    rec.q = prog.state_at(static_cast<long>(data.q_index));
    rec.c1 = unpack_seq(prog, data.c1);
    rec.c2 = unpack_seq(prog, data.c2);
    for (unsigned long a : data.h_y) rec.h_y.push_back(static_cast<Sym>(a));
    return rec;
}

std::optional<PreimageTarget> preimage_target(const PreimageInstance& inst,
                                              const DepletionParams& params) {
    DepletionReport rep = depletion_monitor(*inst.prog, inst.input, inst.layout, params);
    if (!rep.first_depleted) return std::nullopt;
    auto [block, time] = *rep.first_depleted;
    RecordResult rr =
        emit_middle_block_record(*inst.prog, inst.input, inst.layout, params, block, time);
    if (!rr.record) return std::nullopt;
    PreimageTarget target;
    target.block_j = block;
    target.record = *rr.record;
    return target;
}

std::vector<std::string> residue_preimage_search(const PreimageBuilder& builder, int m,
                                                 const PreimageTarget& target,
                                                 const DepletionParams& params, int jobs) {
    if (m < 1 || m > 12) throw Error("residue_preimage_search: m must be in 1..12");
    const long total = 1l << m;
    auto bits_of = [&](long v) {
        std::string s(static_cast<size_t>(m), '0');
        for (int b = 0; b < m; ++b)
            if ((v >> (m - 1 - b)) & 1) s[static_cast<size_t>(b)] = '1';
        return s;
    };
    auto matches = [&](const std::string& w) {
        PreimageInstance inst = builder(w);
        auto t = preimage_target(inst, params);
        return t && t->block_j == target.block_j && t->record.same_observation(target.record);
    };
    std::vector<std::string> out;
    if (jobs <= 1) {
        for (long v = 0; v < total; ++v) {
            std::string w = bits_of(v);
            if (matches(w)) out.push_back(w);
        }
        return out;
    }
    std::vector<std::vector<std::string>> parts(static_cast<size_t>(jobs));
    std::vector<std::thread> workers;
    for (int t = 0; t < jobs; ++t) {
        workers.emplace_back([&, t]() {
            for (long v = t; v < total; v += jobs) {
                std::string w = bits_of(v);
                if (matches(w)) parts[static_cast<size_t>(t)].push_back(w);
            }
        });
    }
    for (auto& w : workers) w.join();
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::string pseudo_hard_string(int m, uint64_t seed) {
    if (m < 1) throw Error("pseudo_hard_string: m must be positive");
    // splitmix64 stream keyed by (m, seed).
    uint64_t state = seed * 0x9e3779b97f4a7c15ull + static_cast<uint64_t>(m) * 0xbf58476d1ce4e5b9ull;
    auto next = [&]() {
        state += 0x9e3779b97f4a7c15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    std::string out;
    out.reserve(static_cast<size_t>(m));
    uint64_t word = 0;
    int have = 0;
    for (int b = 0; b < m; ++b) {
        if (have == 0) {
            word = next();
            have = 64;
        }
        out += (word & 1) ? '1' : '0';
        word >>= 1;
        --have;
    }
    return out;
}

std::string run_experiment_json(const MachineProgram& prog, const ExperimentConfig& cfg) {
    nlohmann::json j;
    BuiltInput built =
        build_input(prog, cfg.family, cfg.w_bits, cfg.i, cfg.sym0, cfg.sym1);
    DepletionParams params = compute_constants(cfg.alpha_num, cfg.alpha_den,
                                               prog.system().alphabet_size(),
                                               prog.system().max_redex_len);
    j["family"] = cfg.family == InputFamily::PalPower ? "palpower" : "fourthpower";
    j["w"] = cfg.w_bits;
    j["i"] = cfg.i;
    j["alpha"] = std::to_string(cfg.alpha_num) + "/" + std::to_string(cfg.alpha_den);
    j["constants"] = {{"A", params.A},     {"log2A", params.log2A}, {"L", params.L},
                      {"H", params.H},     {"K", params.K},         {"d", params.d},
                      {"Q", prog.state_bits()}};
    j["input_len"] = built.input.size();
    j["blocks"] = {{"count", built.layout.block_count},
                   {"edges", built.layout.edges},
                   {"middle", built.layout.middle_index},
                   {"inner_width", built.layout.inner_width}};

    DepletionReport rep = depletion_monitor(prog, built.input, built.layout, params);
    j["accepted"] = rep.accepted;
    j["halt_time"] = rep.halt_time;
    auto& snaps = j["snapshots"] = nlohmann::json::array();
    for (const auto& s : rep.snapshots) {
        nlohmann::json e;
        e["time"] = s.time;
        auto& blocks = e["inner"] = nlohmann::json::array();
        for (const auto& b : s.inner)
            blocks.push_back({{"nonblank", b.nonblank}, {"depleted", b.depleted}});
        snaps.push_back(std::move(e));
    }
    j["ambiguous_times"] = rep.ambiguous_times;
    if (rep.first_depleted) {
        auto [block, time] = *rep.first_depleted;
        j["first_depleted"] = {{"block", block}, {"time", time}};
        RecordResult rr =
            emit_middle_block_record(prog, built.input, built.layout, params, block, time);
        if (rr.record) {
            const MiddleBlockRecord& r = *rr.record;
            nlohmann::json e;
            e["m"] = r.m;
            e["i"] = r.i;
            e["j"] = r.j;
            e["j1"] = r.j1;
            e["j2"] = r.j2;
            e["ell"] = r.ell;
            e["q"] = state_name(r.q);
            e["h_y"] = prog.system().render(r.h_y);
            auto seq_json = [&](const CrossingSeq& s) {
                nlohmann::json sj;
                sj["lead"] = static_cast<int>(s.lead);
                auto& st = sj["states"] = nlohmann::json::array();
                for (const auto& ms : s.states) st.push_back(state_name(ms));
                return sj;
            };
            e["c1"] = seq_json(r.c1);
            e["c2"] = seq_json(r.c2);
            e["bits"] = rr.bits.str();
            e["bit_length"] = rr.bits.size();
            j["record"] = std::move(e);
        } else {
            j["record_unavailable"] = rr.reason;
        }
        // Pump-pair search at the qualifying snapshot.
        TraceData trace = record_trace(prog, built.input, time);
        auto pair = find_pump_pair(trace, built.layout, params.H, cfg.family);
        if (pair) {
            j["pump_pair"] = {{"k1", pair->first}, {"k2", pair->second}};
            TraceData cut = pump_cut(prog, trace, pair->first, pair->second);
            j["pump_cut"] = {{"n", cut.n}, {"verified", true}};
        }
    }
    return j.dump(2);
}

} // namespace thuelab
