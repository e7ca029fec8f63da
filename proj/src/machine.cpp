#include "thuelab/machine.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace thuelab {

std::string state_name(const MachineState& s) {
    using P = MachineState::Phase;
    switch (s.phase) {
        case P::InitRight: return "ir:" + std::to_string(s.x);
        case P::InitLeft: return "il:" + std::to_string(s.x);
        case P::Shift: return "sh:" + std::to_string(s.x);
        case P::ReduceWrite:
            return "rw:" + std::to_string(s.x) + ":" + std::to_string(s.y) + ":" +
                   std::to_string(s.z);
        case P::ReducePeek: return "pk:" + std::to_string(s.x);
        case P::ReduceReturn: return "rt:" + std::to_string(s.x);
        case P::Final: return "fi:" + std::to_string(s.x);
        case P::Accept: return "acc";
        case P::Reject: return "rej";
    }
    throw Error("unreachable state phase");
}

MachineState parse_state_name(const std::string& name) {
    if (name == "acc") return MachineState::accept();
    if (name == "rej") return MachineState::reject();
    auto c1 = name.find(':');
    if (c1 == std::string::npos) throw Error("bad state name '" + name + "'");
    std::string tag = name.substr(0, c1);
    std::vector<int32_t> args;
    size_t pos = c1 + 1;
    while (pos <= name.size()) {
        auto c2 = name.find(':', pos);
        std::string part = name.substr(pos, c2 == std::string::npos ? std::string::npos : c2 - pos);
        try {
            args.push_back(std::stoi(part));
        } catch (...) {
            throw Error("bad state name '" + name + "'");
        }
        if (c2 == std::string::npos) break;
        pos = c2 + 1;
    }
    auto want = [&](size_t k) {
        if (args.size() != k) throw Error("bad state name '" + name + "'");
    };
    if (tag == "ir") { want(1); return MachineState::init_right(args[0]); }
    if (tag == "il") { want(1); return MachineState::init_left(args[0]); }
    if (tag == "sh") { want(1); return MachineState::shift(args[0]); }
    if (tag == "rw") { want(3); return MachineState::reduce_write(args[0], args[1], args[2]); }
    if (tag == "pk") { want(1); return MachineState::reduce_peek(args[0]); }
    if (tag == "rt") { want(1); return MachineState::reduce_return(args[0]); }
    if (tag == "fi") { want(1); return MachineState::final_phase(args[0]); }
    throw Error("bad state name '" + name + "'");
}

MachineProgram::MachineProgram(ThueSystem sys, RedexDfa dfa)
    : sys_(std::move(sys)), dfa_(std::move(dfa)) {
    rule_states_.resize(sys_.rules.size());
    long off = 0;
    off_init_right_ = off;
    off += static_cast<long>(sys_.t2.size()) + 1;
    off_init_left_ = off;
    off += static_cast<long>(sys_.t1.size()) + 1;
    off_shift_ = off;
    off += dfa_.state_count;
    off_reduce_write_ = off;
    for (size_t ri = 0; ri < sys_.rules.size(); ++ri) {
        const Rule& r = sys_.rules[ri];
        const int U = static_cast<int>(r.lhs.size());
        const int V = static_cast<int>(r.rhs.size());
        RuleStates& rs = rule_states_[ri];
        rs.base = off;
        rs.index_of.assign(static_cast<size_t>((V + 1) * (U + 1)), -1);
        if (U >= 2) {
            // The reduct lands on the rightmost |v| nonblank cells of the
            // footprint, so v_rem is tied to u_rem: both drop only on
            // nonblank cells. Reachable pairs are (max(V-(U-u),0), u).
            for (int u = U - 1; u >= 1; --u) {
                int v = std::max(V - (U - u), 0);
                rs.index_of[static_cast<size_t>(v * (U + 1) + u)] =
                    static_cast<int32_t>(rs.pairs.size());
                rs.pairs.emplace_back(v, u);
            }
        }
        off += static_cast<long>(rs.pairs.size());
    }
    off_reduce_peek_ = off;
    off += static_cast<long>(sys_.rules.size());
    off_reduce_return_ = off;
    off += dfa_.state_count;
    off_final_ = off;
    off += static_cast<long>(sys_.t3.size()) + 1;
    off_accept_ = off;
    state_count_ = off + 2;
    state_bits_ = std::bit_width(static_cast<unsigned long>(state_count_));
}

long MachineProgram::state_index(const MachineState& s) const {
    using P = MachineState::Phase;
    auto in_range = [&](long v, long lo, long hi) {
        if (v < lo || v > hi) throw Error("state parameter out of range: " + state_name(s));
        return v;
    };
    switch (s.phase) {
        case P::InitRight:
            return off_init_right_ + in_range(s.x, 0, static_cast<long>(sys_.t2.size()));
        case P::InitLeft:
            return off_init_left_ + in_range(s.x, 0, static_cast<long>(sys_.t1.size()));
        case P::Shift: return off_shift_ + in_range(s.x, 0, dfa_.state_count - 1);
        case P::ReduceWrite: {
            in_range(s.x, 0, static_cast<long>(sys_.rules.size()) - 1);
            const RuleStates& rs = rule_states_[static_cast<size_t>(s.x)];
            const int U = static_cast<int>(sys_.rules[static_cast<size_t>(s.x)].lhs.size());
            const int V = static_cast<int>(sys_.rules[static_cast<size_t>(s.x)].rhs.size());
            in_range(s.y, 0, V);
            in_range(s.z, 1, U);
            int32_t local = rs.index_of[static_cast<size_t>(s.y * (U + 1) + s.z)];
            if (local < 0) throw Error("unreachable ReduceWrite state: " + state_name(s));
            return rs.base + local;
        }
        case P::ReducePeek:
            return off_reduce_peek_ + in_range(s.x, 0, static_cast<long>(sys_.rules.size()) - 1);
        case P::ReduceReturn: return off_reduce_return_ + in_range(s.x, 0, dfa_.state_count - 1);
        case P::Final:
            return off_final_ + in_range(s.x, 0, static_cast<long>(sys_.t3.size()));
        case P::Accept: return off_accept_;
        case P::Reject: return off_accept_ + 1;
    }
    throw Error("unreachable state phase");
}

MachineState MachineProgram::state_at(long index) const {
    if (index < 0 || index >= state_count_) throw Error("state index out of range");
    if (index >= off_accept_)
        return index == off_accept_ ? MachineState::accept() : MachineState::reject();
    if (index >= off_final_) return MachineState::final_phase(static_cast<int>(index - off_final_));
    if (index >= off_reduce_return_)
        return MachineState::reduce_return(static_cast<int>(index - off_reduce_return_));
    if (index >= off_reduce_peek_)
        return MachineState::reduce_peek(static_cast<int>(index - off_reduce_peek_));
    if (index >= off_reduce_write_) {
        // Binary search over per-rule base offsets.
        size_t lo = 0, hi = rule_states_.size();
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            if (rule_states_[mid].base <= index) lo = mid;
            else hi = mid;
        }
        const RuleStates& rs = rule_states_[lo];
        auto [v, u] = rs.pairs.at(static_cast<size_t>(index - rs.base));
        return MachineState::reduce_write(static_cast<int>(lo), v, u);
    }
    if (index >= off_shift_) return MachineState::shift(static_cast<int>(index - off_shift_));
    if (index >= off_init_left_)
        return MachineState::init_left(static_cast<int>(index - off_init_left_));
    return MachineState::init_right(static_cast<int>(index - off_init_right_));
}

int MachineProgram::initial_head(int) const { return cent_t1_len() + 1; }

int MachineProgram::tape_len(int input_len) const {
    return 2 + static_cast<int>(sys_.t1.size()) + input_len + static_cast<int>(sys_.t2.size());
}

std::vector<Cell> MachineProgram::initial_redex(const Word& x) const {
    std::vector<Cell> cells;
    cells.push_back(Cell::cent());
    for (Sym a : sys_.t1) cells.push_back(Cell::plain(a));
    for (Sym a : x) cells.push_back(Cell::plain(a));
    for (Sym a : sys_.t2) cells.push_back(Cell::plain(a));
    cells.push_back(Cell::dollar());
    return cells;
}

std::optional<Quintuple> MachineProgram::quintuple(const MachineState& state,
                                                   const Cell& cell) const {
    using P = MachineState::Phase;
    using K = Cell::Kind;
    const int t1n = static_cast<int>(sys_.t1.size());
    const int t2n = static_cast<int>(sys_.t2.size());
    const int t3n = static_cast<int>(sys_.t3.size());
    switch (state.phase) {
        case P::InitRight: {
            const int j = state.x;
            if (cell.kind == K::Plain && cell.a != kBlank && j == 0)
                return Quintuple{cell, true, MachineState::init_right(0)};
            if (cell.kind == K::Plain && cell.a == kBlank) {
                if (j < t2n)
                    return Quintuple{Cell::plain(sys_.t2[static_cast<size_t>(j)]), true,
                                     MachineState::init_right(j + 1)};
                return Quintuple{Cell::dollar(), false, MachineState::init_left(0)};
            }
            return std::nullopt;
        }
        case P::InitLeft: {
            const int j = state.x;
            if (cell.kind == K::Plain && cell.a != kBlank && j == 0)
                return Quintuple{cell, false, MachineState::init_left(0)};
            if (cell.kind == K::Plain && cell.a == kBlank) {
                if (j < t1n)
                    return Quintuple{Cell::plain(sys_.t1[static_cast<size_t>(t1n - 1 - j)]), false,
                                     MachineState::init_left(j + 1)};
                return Quintuple{Cell::cent(), true, MachineState::shift(RedexDfa::initial)};
            }
            return std::nullopt;
        }
        case P::Shift: {
            const int k = state.x;
            if (cell.kind == K::Cent) return Quintuple{Cell::cent(), true, MachineState::shift(k)};
            if (cell.kind == K::Dollar)
                return Quintuple{Cell::dollar(), false, MachineState::final_phase(0)};
            if (cell.kind == K::Plain && cell.a == kBlank)
                return Quintuple{Cell::compound(kBlank, k), true, MachineState::shift(k)};
            if (cell.kind == K::Plain) {
                const int k2 = dfa_.next(k, cell.a);
                const int32_t r = dfa_.accept_rule[static_cast<size_t>(k2)];
                if (r < 0) return Quintuple{Cell::compound(cell.a, k2), true, MachineState::shift(k2)};
                const Rule& rule = sys_.rules[static_cast<size_t>(r)];
                const int U = static_cast<int>(rule.lhs.size());
                const int V = static_cast<int>(rule.rhs.size());
                Cell write = V > 0 ? Cell::plain(rule.rhs[static_cast<size_t>(V - 1)])
                                   : Cell::plain(kBlank);
                MachineState next = U == 1 ? MachineState::reduce_peek(r)
                                           : MachineState::reduce_write(r, std::max(V - 1, 0), U - 1);
                return Quintuple{write, false, next};
            }
            return std::nullopt;
        }
        case P::ReduceWrite: {
            if (cell.kind != K::Compound) return std::nullopt;
            const int r = state.x;
            const Rule& rule = sys_.rules[static_cast<size_t>(r)];
            const int v_rem = state.y, u_rem = state.z;
            // Blank cells pass through as blanks; once blank, a square stays
            // blank. Reduct symbols land on nonblank cells only.
            if (cell.a == kBlank)
                return Quintuple{Cell::plain(kBlank), false,
                                 MachineState::reduce_write(r, v_rem, u_rem)};
            Cell write = v_rem > 0 ? Cell::plain(rule.rhs[static_cast<size_t>(v_rem - 1)])
                                   : Cell::plain(kBlank);
            const int v2 = std::max(v_rem - 1, 0);
            const int u2 = u_rem - 1;
            MachineState next =
                u2 == 0 ? MachineState::reduce_peek(r) : MachineState::reduce_write(r, v2, u2);
            return Quintuple{write, false, next};
        }
        case P::ReducePeek: {
            if (cell.kind == K::Compound)
                return Quintuple{cell, true, MachineState::reduce_return(cell.k)};
            if (cell.kind == K::Cent)
                return Quintuple{Cell::cent(), true, MachineState::reduce_return(RedexDfa::initial)};
            return std::nullopt;
        }
        case P::ReduceReturn: {
            if (cell.kind == K::Plain && cell.a == kBlank)
                return Quintuple{Cell::compound(kBlank, state.x), true,
                                 MachineState::shift(state.x)};
            return std::nullopt;
        }
        case P::Final: {
            const int j = state.x;
            if (cell.kind == K::Compound && cell.a == kBlank)
                return Quintuple{cell, false, MachineState::final_phase(j)};
            if (cell.kind == K::Compound) {
                if (j < t3n && cell.a == sys_.t3[static_cast<size_t>(t3n - 1 - j)])
                    return Quintuple{cell, false, MachineState::final_phase(j + 1)};
                return Quintuple{cell, false, MachineState::reject()};
            }
            if (cell.kind == K::Cent) {
                return Quintuple{Cell::cent(), true,
                                 j == t3n ? MachineState::accept() : MachineState::reject()};
            }
            return std::nullopt;
        }
        case P::Accept:
        case P::Reject: return std::nullopt;
    }
    return std::nullopt;
}

Configuration initial_config(const MachineProgram& prog, const Word& x) {
    for (Sym a : x)
        if (a < 0 || a >= prog.system().alphabet_size())
            throw Error("input symbol outside the system alphabet");
    Configuration cfg;
    const int n = prog.tape_len(static_cast<int>(x.size()));
    cfg.tape.assign(static_cast<size_t>(n), Cell::plain(kBlank));
    const int x0 = prog.cent_t1_len() + 1;
    for (size_t i = 0; i < x.size(); ++i) cfg.tape[static_cast<size_t>(x0 - 1) + i] = Cell::plain(x[i]);
    cfg.head = prog.initial_head(static_cast<int>(x.size()));
    cfg.state = MachineState::init_right(0);
    cfg.time = 0;
    cfg.blanks = n - static_cast<int>(x.size());
    return cfg;
}

StepEvent step(const MachineProgram& prog, Configuration& cfg) {
    if (cfg.state.halted()) throw Error("step: machine has halted");
    const Cell& cur = cfg.at(cfg.head);
    auto q = prog.quintuple(cfg.state, cur);
    if (!q)
        throw Error("machine bug: no instruction for state " + state_name(cfg.state) +
                    " at square " + std::to_string(cfg.head));
    const bool was_blank = cur.is_blank();
    cfg.at(cfg.head) = q->write;
    cfg.blanks += static_cast<int>(q->write.is_blank()) - static_cast<int>(was_blank);
    StepEvent ev;
    ev.from = cfg.head;
    ev.to = cfg.head + (q->move_right ? 1 : -1);
    ev.state_after = q->next;
    if (ev.to < 1 || ev.to > cfg.n())
        throw Error("machine bug: head left the tape at square " + std::to_string(ev.to));
    cfg.head = ev.to;
    cfg.state = q->next;
    ++cfg.time;
    return ev;
}

long default_fuel(int n) {
    const long ln = n;
    return 8 * ln * ln + 8 * ln;
}

Word h_image(const std::vector<Cell>& cells) {
    Word out;
    for (const Cell& c : cells)
        if ((c.kind == Cell::Kind::Plain || c.kind == Cell::Kind::Compound) && c.a != kBlank)
            out.push_back(c.a);
    return out;
}

Word h_image(const std::vector<Cell>& cells, int from_square, int to_square) {
    Word out;
    for (int sq = std::max(from_square, 1); sq <= std::min(to_square, static_cast<int>(cells.size()));
         ++sq) {
        const Cell& c = cells[static_cast<size_t>(sq - 1)];
        if ((c.kind == Cell::Kind::Plain || c.kind == Cell::Kind::Compound) && c.a != kBlank)
            out.push_back(c.a);
    }
    return out;
}

namespace {

// Debug-mode invariants: the compound prefix is historical, h(alpha) is
// irreducible, h(tape) tracks the leftmost reduction chain, blanks are
// monotone and grow across every REDUCE phase, each REDUCE scans at most L+1
// nonblank cells, and leftward moves happen only in left-sweeping phases.
struct Auditor {
    const MachineProgram& prog;
    Word expected; // current reduct of t1 x t2, advanced at reduce boundaries
    bool tracking = false;
    int prev_blanks = 0;
    int reduce_nonblank_reads = 0;

    explicit Auditor(const MachineProgram& p) : prog(p) {}

    void fail(const std::string& msg, long time) const {
        throw Error("audit failed at time " + std::to_string(time) + ": " + msg);
    }

    void start(const Configuration& cfg) {
        prev_blanks = cfg.blanks;
        if (cfg.state.phase == MachineState::Phase::Shift) {
            tracking = true;
            expected = h_image(cfg.tape);
        }
    }

    void after_step(const MachineState& prev_state, const Cell& read_cell, const StepEvent& ev,
                    const Configuration& cfg) {
        using P = MachineState::Phase;
        // Blank monotonicity holds once the init sweeps are done; the init
        // phases legitimately fill blank squares with the context strings.
        if (tracking) {
            if (cfg.blanks < prev_blanks) fail("blank count decreased", cfg.time);
            prev_blanks = cfg.blanks;
        }
        if (ev.to < ev.from) {
            switch (ev.state_after.phase) {
                case P::InitLeft:
                case P::ReduceWrite:
                case P::ReducePeek:
                case P::Final:
                case P::Reject: break;
                default: fail("leftward move outside a left-sweeping phase", cfg.time);
            }
        }
        // Nonblank cells scanned during the reduce: the accept cell plus the
        // ReduceWrite/ReducePeek reads.
        const bool reduce_read =
            (prev_state.phase == P::Shift && (ev.state_after.phase == P::ReduceWrite ||
                                              ev.state_after.phase == P::ReducePeek)) ||
            prev_state.phase == P::ReduceWrite || prev_state.phase == P::ReducePeek;
        if (reduce_read && !read_cell.is_blank() && read_cell.kind != Cell::Kind::Cent)
            ++reduce_nonblank_reads;
        if (cfg.state.phase != P::Shift) return;
        if (!tracking) {
            tracking = true;
            expected = h_image(cfg.tape);
            prev_blanks = cfg.blanks;
            return;
        }
        Word img = h_image(cfg.tape);
        if (img != expected) {
            // Reduce boundary: must be exactly one leftmost step.
            auto m = find_leftmost_redex(prog.system(), expected);
            if (!m) fail("tape changed but the expected reduct is irreducible", cfg.time);
            Word next = apply_rule(prog.system(), expected, *m);
            if (img != next) fail("h(tape) is not the expected leftmost reduct", cfg.time);
            expected = std::move(next);
            if (prev_state.phase != P::ReduceReturn)
                fail("h(tape) changed outside a reduce boundary", cfg.time);
            if (reduce_nonblank_reads > prog.system().max_redex_len + 1)
                fail("REDUCE scanned more than L+1 nonblank cells", cfg.time);
            reduce_nonblank_reads = 0;
        }
        check_shape(cfg);
    }

    void check_shape(const Configuration& cfg) const {
        const int n = cfg.n();
        std::vector<CompoundCell> alpha;
        for (int sq = 1; sq <= n; ++sq) {
            const Cell& c = cfg.at(sq);
            if (sq == 1) {
                if (c.kind != Cell::Kind::Cent) fail("square 1 is not the cent", cfg.time);
            } else if (sq < cfg.head) {
                if (c.kind != Cell::Kind::Compound) fail("alpha cell is not compound", cfg.time);
                alpha.push_back({c.a, c.k});
            } else if (sq < n) {
                if (c.kind != Cell::Kind::Plain) fail("beta cell is not plain", cfg.time);
            } else {
                if (c.kind != Cell::Kind::Dollar) fail("square n is not the dollar", cfg.time);
            }
        }
        if (!is_historical(prog.dfa(), alpha)) fail("alpha is not historical", cfg.time);
        Word halpha;
        for (const auto& c : alpha)
            if (c.a != kBlank) halpha.push_back(c.a);
        if (!is_irreducible(prog.system(), halpha)) fail("h(alpha) is reducible", cfg.time);
    }
};

} // namespace

RunResult run_from(const MachineProgram& prog, Configuration cfg, long fuel,
                   const StepObserver& observer, bool audit) {
    if (fuel < 0) fuel = default_fuel(cfg.n());
    Auditor auditor(prog);
    if (audit) auditor.start(cfg);
    RunResult res;
    int blanks_at_reduce_entry = -1;
    while (!cfg.state.halted()) {
        if (cfg.time >= fuel)
            throw Error("fuel exhausted after " + std::to_string(cfg.time) +
                        " steps (machine compiler bug)");
        const MachineState prev_state = cfg.state;
        const Cell read_cell = cfg.at(cfg.head);
        const int blanks_before = cfg.blanks;
        StepEvent ev = step(prog, cfg);
        if (ev.state_after.phase == MachineState::Phase::ReducePeek) ++res.reduce_count;
        if (prev_state.phase == MachineState::Phase::Shift &&
            (ev.state_after.phase == MachineState::Phase::ReduceWrite ||
             ev.state_after.phase == MachineState::Phase::ReducePeek))
            blanks_at_reduce_entry = blanks_before;
        if (audit) {
            auditor.after_step(prev_state, read_cell, ev, cfg);
            if (prev_state.phase == MachineState::Phase::ReduceReturn &&
                cfg.state.phase == MachineState::Phase::Shift) {
                if (blanks_at_reduce_entry >= 0 && cfg.blanks <= blanks_at_reduce_entry)
                    auditor.fail("REDUCE did not increase the blank count", cfg.time);
            }
        }
        if (observer && !observer(cfg, ev)) break;
    }
    res.accepted = cfg.state.phase == MachineState::Phase::Accept;
    res.final_tape = cfg.tape;
    res.steps = cfg.time;
    res.h_image_word = h_image(cfg.tape);
    return res;
}

RunResult run(const MachineProgram& prog, const Word& x, long fuel, const StepObserver& observer,
              bool audit) {
    return run_from(prog, initial_config(prog, x), fuel, observer, audit);
}

Configuration insert_blanks(const MachineProgram&, const Configuration& cfg, int square,
                            int count) {
    if (cfg.state.phase != MachineState::Phase::Shift)
        throw Error("insert_blanks: only legal between phases (state must be Shift)");
    if (count < 0) throw Error("insert_blanks: negative count");
    if (square < 2 || square > cfg.n()) throw Error("insert_blanks: square out of range");
    Configuration out = cfg;
    if (count == 0) return out;
    Cell fill = Cell::plain(kBlank);
    if (square <= cfg.head) {
        int k = RedexDfa::initial;
        for (int sq = square - 1; sq >= 2; --sq) {
            const Cell& c = cfg.at(sq);
            if (c.kind == Cell::Kind::Compound) {
                k = c.k;
                break;
            }
        }
        fill = Cell::compound(kBlank, k);
        out.head += count;
    }
    out.tape.insert(out.tape.begin() + (square - 1), static_cast<size_t>(count), fill);
    out.blanks += count;
    return out;
}

} // namespace thuelab
