#include "thuelab/crossing.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace thuelab {

namespace {

enum class Dir { Left, Right };

// Direction of the index-th crossing at a point with the given lead bit.
Dir crossing_dir(uint8_t lead, long index) {
    Dir first = lead ? Dir::Right : Dir::Left;
    if (index % 2 == 0) return first;
    return first == Dir::Right ? Dir::Left : Dir::Right;
}

int x_region_len(const MachineProgram& prog, int n) {
    return n - prog.cent_t1_len() - static_cast<int>(prog.system().t2.size()) - 1;
}

// Checks a stored initial-redex cell against the program's pattern. X-region
// squares may hold any alphabet symbol.
bool cell_ok(const MachineProgram& prog, int n, int k, const Cell& cell) {
    const ThueSystem& sys = prog.system();
    const int t1n = static_cast<int>(sys.t1.size());
    const int t2n = static_cast<int>(sys.t2.size());
    if (k == 1) return cell.kind == Cell::Kind::Cent;
    if (k == n) return cell.kind == Cell::Kind::Dollar;
    if (cell.kind != Cell::Kind::Plain) return false;
    if (k <= 1 + t1n) return cell.a == sys.t1[static_cast<size_t>(k - 2)];
    if (k >= n - t2n) return cell.a == sys.t2[static_cast<size_t>(k - (n - t2n))];
    return cell.a >= 0 && cell.a < sys.alphabet_size();
}

// Time-0 cell for the replay: context regions are blank before the init
// sweeps write them.
Cell stripped_cell(const MachineProgram& prog, int n, int k, const Cell& cell) {
    const int t1n = static_cast<int>(prog.system().t1.size());
    const int t2n = static_cast<int>(prog.system().t2.size());
    if (k <= 1 + t1n || k >= n - t2n) return Cell::plain(kBlank);
    return cell;
}

} // namespace

TraceData record_trace(const MachineProgram& prog, const Word& x, long stop_time) {
    TraceData trace;
    Configuration cfg = initial_config(prog, x);
    trace.n = cfg.n();
    trace.cells = prog.initial_redex(x);
    trace.seqs.resize(static_cast<size_t>(trace.n) + 1);
    const int i0 = cfg.head;
    for (int p = 0; p <= trace.n; ++p)
        trace.seqs[static_cast<size_t>(p)].lead = p >= i0 ? 1 : 0;
    const long fuel = default_fuel(trace.n);
    while (!cfg.state.halted() && (stop_time < 0 || cfg.time < stop_time)) {
        if (cfg.time >= fuel) throw Error("record_trace: fuel exhausted (machine compiler bug)");
        StepEvent ev = step(prog, cfg);
        trace.seqs[static_cast<size_t>(std::min(ev.from, ev.to))].states.push_back(ev.state_after);
    }
    trace.head = cfg.head;
    trace.state = cfg.state;
    trace.time = cfg.time;
    trace.final_cells = std::move(cfg.tape);
    return trace;
}

VerificationReport full_verification(const MachineProgram& prog, const TraceData& trace) {
    VerificationReport rep;
    const int n = trace.n;
    if (static_cast<int>(trace.cells.size()) != n ||
        static_cast<int>(trace.seqs.size()) != n + 1)
        throw Error("trace has inconsistent sizes");
    if (x_region_len(prog, n) < 0) {
        rep.reason = "tape too short for the context strings";
        return rep;
    }
    for (int k = 1; k <= n; ++k) {
        if (!cell_ok(prog, n, k, trace.cells[static_cast<size_t>(k - 1)])) {
            rep.reason = "initial cell at square " + std::to_string(k) +
                         " does not match any initial redex";
            return rep;
        }
    }
    // Lead bits are part of the data's well-formedness: 0 left of the initial
    // square, 1 otherwise. The local procedure checks the same thing.
    for (int p = 0; p <= n; ++p) {
        uint8_t want = (p >= prog.initial_head(0)) ? 1 : 0;
        if (trace.seqs[static_cast<size_t>(p)].lead != want) {
            rep.reason = "lead bit at point " + std::to_string(p) +
                         " contradicts the point's position";
            return rep;
        }
    }

    Configuration cfg;
    cfg.tape.resize(static_cast<size_t>(n));
    for (int k = 1; k <= n; ++k)
        cfg.tape[static_cast<size_t>(k - 1)] =
            stripped_cell(prog, n, k, trace.cells[static_cast<size_t>(k - 1)]);
    cfg.head = prog.initial_head(0);
    cfg.state = MachineState::init_right(0);

    std::vector<long> cancelled(static_cast<size_t>(n) + 1, 0);
    bool stopped_by_halt = false;
    std::string mismatch;
    for (;;) {
        if (cfg.state.halted()) {
            stopped_by_halt = true;
            break;
        }
        auto q = prog.quintuple(cfg.state, cfg.at(cfg.head));
        if (!q)
            throw Error("replay hit a missing instruction; the trace cells were validated, "
                        "so this is a machine bug");
        const int to = cfg.head + (q->move_right ? 1 : -1);
        const int point = std::min(cfg.head, to);
        const CrossingSeq& seq = trace.seqs[static_cast<size_t>(point)];
        long& idx = cancelled[static_cast<size_t>(point)];
        if (idx >= seq.height()) break; // over-cancellation: the recorded data ends here
        Dir want = crossing_dir(seq.lead, idx);
        Dir got = q->move_right ? Dir::Right : Dir::Left;
        if (want != got) {
            mismatch = "crossing direction at point " + std::to_string(point) + " index " +
                       std::to_string(idx) + " contradicts the lead bit";
            break;
        }
        if (!(seq.states[static_cast<size_t>(idx)] == q->next)) {
            mismatch = "state mismatch at point " + std::to_string(point) + " index " +
                       std::to_string(idx) + ": computed " + state_name(q->next) + ", recorded " +
                       state_name(seq.states[static_cast<size_t>(idx)]);
            break;
        }
        ++idx;
        cfg.at(cfg.head) = q->write;
        cfg.head = to;
        cfg.state = q->next;
        ++cfg.time;
    }

    rep.final_cells = cfg.tape;
    rep.cancelled = cancelled;
    rep.end_square = cfg.head;
    rep.end_state = cfg.state;
    rep.halted = stopped_by_halt;
    if (!mismatch.empty()) {
        rep.reason = mismatch;
        return rep;
    }
    for (int p = 0; p <= n; ++p) {
        if (cancelled[static_cast<size_t>(p)] !=
            trace.seqs[static_cast<size_t>(p)].height()) {
            rep.reason = "uncancelled states remain at point " + std::to_string(p);
            return rep;
        }
    }
    rep.consistent = true;
    return rep;
}

LocalReport local_verification(const MachineProgram& prog, int n, int k,
                               const CrossingSeq& c_left, const Cell& a_k,
                               const CrossingSeq& c_right) {
    LocalReport rep;
    rep.final_cell = a_k;
    if (k < 1 || k > n) throw Error("local_verification: square out of range");
    if (x_region_len(prog, n) < 0) {
        rep.reason = "tape too short for the context strings";
        return rep;
    }
    if (!cell_ok(prog, n, k, a_k)) {
        rep.reason = "initial cell does not match any initial redex";
        return rep;
    }
    const int i0 = prog.initial_head(0);
    // Geometric lead bits: point k-1 is left of the initial square iff
    // k-1 < i0, likewise for point k.
    const uint8_t want_left_lead = (k - 1 >= i0) ? 1 : 0;
    const uint8_t want_right_lead = (k >= i0) ? 1 : 0;
    if (c_left.lead != want_left_lead || c_right.lead != want_right_lead) {
        rep.reason = "lead bit contradicts the square's position";
        return rep;
    }

    long i_left = 0, i_right = 0;
    Cell content = stripped_cell(prog, n, k, a_k);
    auto fully_cancelled = [&]() {
        return i_left == c_left.height() && i_right == c_right.height();
    };
    auto finish = [&](bool ends_here, const MachineState& st) {
        rep.ends_here = ends_here;
        rep.end_state = st;
        if (fully_cancelled()) {
            rep.consistent = true;
            rep.final_cell = content;
        } else {
            rep.reason = "uncancelled states remain";
        }
        return rep;
    };

    enum class Side { L, R };
    // Entry into square k: from the left = crossing point k-1 rightward; from
    // the right = crossing point k leftward.
    auto draw_entry = [&](Side s, MachineState& out) -> int {
        const CrossingSeq& seq = s == Side::L ? c_left : c_right;
        long& idx = s == Side::L ? i_left : i_right;
        if (idx >= seq.height()) return 0; // participation over
        Dir want = s == Side::L ? Dir::Right : Dir::Left;
        if (crossing_dir(seq.lead, idx) != want) return -1;
        out = seq.states[static_cast<size_t>(idx)];
        ++idx;
        return 1;
    };
    auto cancel_exit = [&](Side s, const MachineState& st) -> int {
        const CrossingSeq& seq = s == Side::L ? c_left : c_right;
        long& idx = s == Side::L ? i_left : i_right;
        if (idx >= seq.height()) return 0; // the computation ends on this square
        Dir want = s == Side::L ? Dir::Left : Dir::Right;
        if (crossing_dir(seq.lead, idx) != want) return -1;
        if (!(seq.states[static_cast<size_t>(idx)] == st)) return -1;
        ++idx;
        return 1;
    };

    MachineState q;
    Side entry_side = k > i0 ? Side::L : Side::R;
    if (k == i0) {
        q = MachineState::init_right(0);
    } else {
        int res = draw_entry(entry_side, q);
        if (res == 0) {
            // Never visited: per contract the final content is the stored cell.
            rep.ends_here = false;
            rep.end_state = MachineState::accept();
            if (fully_cancelled()) {
                rep.consistent = true;
                rep.final_cell = a_k;
            } else {
                rep.reason = "uncancelled states at an unentered square";
            }
            return rep;
        }
        if (res < 0) {
            rep.reason = "first entry contradicts the lead bit";
            return rep;
        }
    }

    for (;;) {
        if (q.halted()) return finish(true, q);
        try {
            prog.state_index(q); // drawn states may come from hostile data
        } catch (const Error&) {
            rep.reason = "claimed crossing names a state outside the program";
            return rep;
        }
        auto quint = prog.quintuple(q, content);
        if (!quint) {
            rep.reason = "claimed crossing has no applicable instruction (state " +
                         state_name(q) + ")";
            return rep;
        }
        Side exit_side = quint->move_right ? Side::R : Side::L;
        int res = cancel_exit(exit_side, quint->next);
        if (res == 0) return finish(true, q); // snapshot ends here; the write never happened
        if (res < 0) {
            rep.reason = "exit crossing mismatch (state " + state_name(quint->next) + ")";
            return rep;
        }
        content = quint->write;
        res = draw_entry(exit_side, q);
        if (res == 0) return finish(false, quint->next);
        if (res < 0) {
            rep.reason = "re-entry contradicts the alternation discipline";
            return rep;
        }
    }
}

std::vector<LocalReport> all_local_reports(const MachineProgram& prog, const TraceData& trace) {
    std::vector<LocalReport> out;
    out.reserve(static_cast<size_t>(trace.n));
    for (int k = 1; k <= trace.n; ++k)
        out.push_back(local_verification(prog, trace.n, k, trace.seqs[static_cast<size_t>(k - 1)],
                                         trace.cells[static_cast<size_t>(k - 1)],
                                         trace.seqs[static_cast<size_t>(k)]));
    return out;
}

bool triples_all_compatible(const MachineProgram& prog, const TraceData& trace) {
    for (int k = 1; k <= trace.n; ++k) {
        LocalReport rep =
            local_verification(prog, trace.n, k, trace.seqs[static_cast<size_t>(k - 1)],
                               trace.cells[static_cast<size_t>(k - 1)],
                               trace.seqs[static_cast<size_t>(k)]);
        if (!rep.consistent) return false;
    }
    return true;
}

TraceData pump_cut(const MachineProgram& prog, const TraceData& trace, int i, int j) {
    if (i >= j) throw Error("pump_cut requires i < j");
    const int t1n = prog.cent_t1_len() - 1;
    const int xlen = x_region_len(prog, trace.n);
    if (i < t1n + 1 || j > t1n + 1 + xlen)
        throw Error("pump_cut: the cut must lie within the input-string squares");
    if (trace.seqs[static_cast<size_t>(i)] != trace.seqs[static_cast<size_t>(j)])
        throw Error("pump_cut: crossing sequences at i and j differ");

    TraceData out;
    out.n = trace.n - (j - i);
    out.cells.assign(trace.cells.begin(), trace.cells.begin() + i);
    out.cells.insert(out.cells.end(), trace.cells.begin() + j, trace.cells.end());
    out.seqs.assign(trace.seqs.begin(), trace.seqs.begin() + i + 1);
    out.seqs.insert(out.seqs.end(), trace.seqs.begin() + j + 1, trace.seqs.end());

    VerificationReport rep = full_verification(prog, out);
    if (!rep.consistent)
        throw Error("pump_cut: spliced trace failed verification: " + rep.reason);
    out.final_cells = rep.final_cells;
    out.head = rep.end_square;
    out.state = rep.end_state;
    long steps = 0;
    for (const auto& s : out.seqs) steps += s.height();
    out.time = steps;
    return out;
}

std::string Residue::first_difference(const Residue& o) const {
    if (len_v != o.len_v) return "|v|";
    if (!(c1 == o.c1)) return "c1";
    if (h_z != o.h_z) return "h(z)";
    if (!(c2 == o.c2)) return "c2";
    if (ell != o.ell) return "ell";
    if (!(q == o.q)) return "q";
    return "";
}

Residue extract_residue(const MachineProgram& prog, const Word& x, int len_u, int len_v, long T) {
    const int n = prog.tape_len(static_cast<int>(x.size()));
    if (len_u < 0 || len_v < 0 || len_u + len_v > n)
        throw Error("extract_residue: split out of range");
    TraceData trace = record_trace(prog, x, T);
    if (trace.time < T) throw Error("extract_residue: T exceeds the halting time");
    Residue r;
    r.len_v = len_v;
    r.c1 = trace.seqs[static_cast<size_t>(len_u)];
    r.c2 = trace.seqs[static_cast<size_t>(len_u + len_v)];
    r.h_z = h_image(trace.final_cells, len_u + 1, len_u + len_v);
    if (trace.head > len_u && trace.head <= len_u + len_v)
        r.ell = 1 + static_cast<int>(h_image(trace.final_cells, len_u + 1, trace.head - 1).size());
    else
        r.ell = 0;
    r.q = trace.state;
    return r;
}

Word splice(const MachineProgram& prog, const SpliceSpec& first, const SpliceSpec& second) {
    Residue r1 = extract_residue(prog, first.x, first.len_u, first.len_v, first.time);
    Residue r2 = extract_residue(prog, second.x, second.len_u, second.len_v, second.time);
    std::string diff = r1.first_difference(r2);
    if (!diff.empty()) throw Error("splice: residues differ at component " + diff);

    auto redex1 = prog.initial_redex(first.x);
    auto redex2 = prog.initial_redex(second.x);
    std::vector<Cell> spliced(redex1.begin(), redex1.begin() + first.len_u);
    spliced.insert(spliced.end(), redex2.begin() + second.len_u,
                   redex2.begin() + second.len_u + second.len_v);
    spliced.insert(spliced.end(), redex1.begin() + first.len_u + first.len_v, redex1.end());

    // The spliced cells must again form an initial redex cent t1 y t2 $.
    const int n = static_cast<int>(spliced.size());
    for (int k = 1; k <= n; ++k)
        if (!cell_ok(prog, n, k, spliced[static_cast<size_t>(k - 1)]))
            throw Error("splice: spliced string is not a well-formed initial redex");
    Word x2;
    const int t1n = prog.cent_t1_len();
    for (int k = t1n + 1; k <= n - static_cast<int>(prog.system().t2.size()) - 1; ++k)
        x2.push_back(spliced[static_cast<size_t>(k - 1)].a);

    RunResult a = run(prog, first.x);
    RunResult b = run(prog, x2);
    if (a.accepted != b.accepted || a.h_image_word != b.h_image_word)
        throw Error("splice: the spliced input's normal form differs (theorem violation)");
    return x2;
}

std::string trace_to_json(const MachineProgram& prog, const TraceData& trace) {
    nlohmann::json j;
    j["n"] = trace.n;
    auto& cells = j["cells"] = nlohmann::json::array();
    for (const Cell& c : trace.cells) {
        switch (c.kind) {
            case Cell::Kind::Cent: cells.push_back("CENT"); break;
            case Cell::Kind::Dollar: cells.push_back("DOLLAR"); break;
            case Cell::Kind::Plain:
                cells.push_back(c.a == kBlank ? "B" : prog.system().symbols.token(c.a));
                break;
            case Cell::Kind::Compound:
                throw Error("initial redex cells cannot be compound");
        }
    }
    auto& seqs = j["sequences"] = nlohmann::json::array();
    for (int p = 0; p <= trace.n; ++p) {
        const CrossingSeq& s = trace.seqs[static_cast<size_t>(p)];
        nlohmann::json e;
        e["point"] = p;
        e["lead"] = static_cast<int>(s.lead);
        auto& st = e["states"] = nlohmann::json::array();
        for (const auto& m : s.states) st.push_back(state_name(m));
        seqs.push_back(std::move(e));
    }
    j["head"] = trace.head;
    j["state"] = state_name(trace.state);
    j["time"] = trace.time;
    return j.dump(2);
}

TraceData trace_from_json(const MachineProgram& prog, const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Error(std::string("trace JSON parse error: ") + e.what());
    }
    TraceData trace;
    try {
        trace.n = j.at("n").get<int>();
        if (trace.n < 2) throw Error("n must be at least 2");
        for (const auto& tok : j.at("cells")) {
            std::string t = tok.get<std::string>();
            if (t == "CENT") trace.cells.push_back(Cell::cent());
            else if (t == "DOLLAR") trace.cells.push_back(Cell::dollar());
            else if (t == "B") trace.cells.push_back(Cell::plain(kBlank));
            else trace.cells.push_back(Cell::plain(prog.system().symbols.id(t)));
        }
        if (static_cast<int>(trace.cells.size()) != trace.n)
            throw Error("cells must have exactly n entries");
        trace.seqs.assign(static_cast<size_t>(trace.n) + 1, CrossingSeq{});
        std::vector<bool> seen(static_cast<size_t>(trace.n) + 1, false);
        for (const auto& e : j.at("sequences")) {
            int p = e.at("point").get<int>();
            if (p < 0 || p > trace.n) throw Error("sequence point out of range");
            if (seen[static_cast<size_t>(p)]) throw Error("duplicate sequence point");
            seen[static_cast<size_t>(p)] = true;
            CrossingSeq s;
            int lead = e.at("lead").get<int>();
            if (lead != 0 && lead != 1) throw Error("lead bit must be 0 or 1");
            s.lead = static_cast<uint8_t>(lead);
            for (const auto& name : e.at("states")) {
                MachineState st = parse_state_name(name.get<std::string>());
                prog.state_index(st); // rejects out-of-range state parameters
                s.states.push_back(st);
            }
            trace.seqs[static_cast<size_t>(p)] = std::move(s);
        }
        for (bool b : seen)
            if (!b) throw Error("missing sequence point");
        trace.head = j.at("head").get<int>();
        if (trace.head < 1 || trace.head > trace.n) throw Error("head out of range");
        trace.state = parse_state_name(j.at("state").get<std::string>());
        prog.state_index(trace.state);
        trace.time = j.at("time").get<long>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("trace JSON shape error: ") + e.what());
    }
    return trace;
}

} // namespace thuelab
