#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "thuelab/crossing.hpp"
#include "thuelab/depletion.hpp"
#include "thuelab/experiment.hpp"
#include "thuelab/langs.hpp"

using namespace thuelab;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file '" + path + "'");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file '" + path + "'");
    out << text;
}

struct Common {
    std::string system_file;
    bool json = false;
    bool audit = false;
    uint64_t seed = 0;

    ThueSystem load_system() const {
        if (system_file.empty()) throw Error("--system FILE is required");
        return parse_system(read_file(system_file));
    }
    MachineProgram load_program() const {
        ThueSystem sys = load_system();
        RedexDfa dfa = build_redex_dfa(sys);
        return MachineProgram(std::move(sys), std::move(dfa));
    }
};

// Parses "P/Q" or "P" into a rational.
std::pair<long, long> parse_alpha(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return {std::stol(text), 1};
        return {std::stol(text.substr(0, slash)), std::stol(text.substr(slash + 1))};
    } catch (...) {
        throw Error("bad rational '" + text + "'");
    }
}

int cmd_check(const Common& c) {
    ThueSystem sys = c.load_system();
    ConfluenceResult res = is_church_rosser(sys);
    if (c.json) {
        nlohmann::json j;
        j["church_rosser"] = res.yes;
        if (!res.yes && res.witness) {
            j["witness_peak"] = sys.render(res.witness->peak);
            j["witness_left"] = sys.render(res.witness->left);
            j["witness_right"] = sys.render(res.witness->right);
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "church-rosser: " << (res.yes ? "yes" : "no") << "\n";
        if (!res.yes && res.witness)
            std::cout << "witness peak: " << sys.render(res.witness->peak) << "\n"
                      << "  reduct 1: " << sys.render(res.witness->left) << "\n"
                      << "  reduct 2: " << sys.render(res.witness->right) << "\n";
    }
    return res.yes ? 0 : 1;
}

int cmd_reduce(const Common& c, const std::string& input) {
    ThueSystem sys = c.load_system();
    Word w = sys.word(input);
    Word nf = normal_form_leftmost(sys, w);
    if (c.json) {
        nlohmann::json j;
        j["input"] = sys.render(w);
        j["normal_form"] = sys.render(nf);
        j["irreducible"] = true;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << sys.render(nf) << "\n";
    }
    return 0;
}

int cmd_run(const Common& c, const std::string& input, const std::string& trace_out, long fuel) {
    MachineProgram prog = c.load_program();
    Word x = prog.system().word(input);
    RunResult res = run(prog, x, fuel, nullptr, c.audit);
    if (!trace_out.empty()) {
        TraceData tr = record_trace(prog, x);
        write_file(trace_out, trace_to_json(prog, tr));
    }
    if (c.json) {
        nlohmann::json j;
        j["accepted"] = res.accepted;
        j["normal_form"] = prog.system().render(res.h_image_word);
        j["steps"] = res.steps;
        j["reduces"] = res.reduce_count;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << (res.accepted ? "accepted" : "rejected") << "\n"
                  << prog.system().render(res.h_image_word) << "\n";
    }
    return res.accepted ? 0 : 1;
}

int cmd_dump_dfa(const Common& c) {
    ThueSystem sys = c.load_system();
    RedexDfa dfa = build_redex_dfa(sys);
    std::cout << dump_dfa(dfa, sys);
    return 0;
}

int cmd_trace(const Common& c, const std::string& input, long stop, const std::string& out) {
    MachineProgram prog = c.load_program();
    TraceData tr = record_trace(prog, prog.system().word(input), stop);
    std::string text = trace_to_json(prog, tr);
    if (out.empty()) std::cout << text << "\n";
    else write_file(out, text);
    return 0;
}

int cmd_verify(const Common& c, const std::string& trace_file) {
    MachineProgram prog = c.load_program();
    TraceData tr = trace_from_json(prog, read_file(trace_file));
    VerificationReport rep = full_verification(prog, tr);
    bool locals = triples_all_compatible(prog, tr);
    if (c.json) {
        nlohmann::json j;
        j["full"] = rep.consistent;
        j["triples"] = locals;
        j["agree"] = rep.consistent == locals;
        if (!rep.consistent) j["reason"] = rep.reason;
        if (rep.consistent) {
            j["end_square"] = rep.end_square;
            j["end_matches_head"] = rep.end_square == tr.head;
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "full-verification: " << (rep.consistent ? "consistent" : "inconsistent")
                  << "\n";
        if (!rep.consistent) std::cout << "  reason: " << rep.reason << "\n";
        std::cout << "triples-compatible: " << (locals ? "yes" : "no") << "\n";
        if (rep.consistent)
            std::cout << "end square: " << rep.end_square
                      << (rep.end_square == tr.head ? " (matches head)" : " (head differs!)")
                      << "\n";
    }
    if (rep.consistent != locals) return 2;
    return rep.consistent ? 0 : 1;
}

int cmd_pump(const Common& c, const std::string& trace_file, int i, int j,
             const std::string& out) {
    MachineProgram prog = c.load_program();
    TraceData tr = trace_from_json(prog, read_file(trace_file));
    TraceData cut = pump_cut(prog, tr, i, j);
    std::string text = trace_to_json(prog, cut);
    if (out.empty()) std::cout << text << "\n";
    else write_file(out, text);
    std::cerr << "pumped " << tr.n << " -> " << cut.n << " squares; verification consistent\n";
    return 0;
}

int cmd_splice(const Common& c, const std::string& in1, int u1, int v1, long t1,
               const std::string& in2, int u2, int v2, long t2) {
    MachineProgram prog = c.load_program();
    SpliceSpec a{prog.system().word(in1), u1, v1, t1};
    SpliceSpec b{prog.system().word(in2), u2, v2, t2};
    Word out = splice(prog, a, b);
    if (c.json) {
        nlohmann::json j;
        j["spliced"] = prog.system().render(out);
        j["verified"] = true;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << prog.system().render(out) << "\n";
    }
    return 0;
}

int cmd_constants(const Common& c, const std::string& alpha) {
    ThueSystem sys = c.load_system();
    auto [num, den] = parse_alpha(alpha);
    DepletionParams p = compute_constants(num, den, sys.alphabet_size(), sys.max_redex_len);
    if (c.json) {
        nlohmann::json j;
        j["A"] = p.A;
        j["log2A"] = p.log2A;
        j["beta"] = std::to_string(p.beta_num) + "/" + std::to_string(p.beta_den);
        j["L"] = p.L;
        j["H"] = p.H;
        j["K"] = p.K;
        j["d"] = p.d;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "A " << p.A << "\nbeta " << p.beta_num << "/" << p.beta_den << "\nL " << p.L
                  << "\nH " << p.H << "\nK " << p.K << "\nd " << p.d << "\n";
    }
    return 0;
}

int cmd_gen_midbit(const std::string& out, bool counts) {
    GeneratedSystem gen = generate_midbit_system();
    if (counts) {
        for (const auto& [name, count] : gen.rule_groups)
            std::cout << name << " " << count << "\n";
        std::cout << "bitstring-redex " << gen.bitstring_redex_rules << "\n";
        std::cout << "total " << gen.total_rules << "\n";
        std::cout << "reference " << GeneratedSystem::reference_rule_count << "\n";
        if (gen.total_rules != GeneratedSystem::reference_rule_count)
            std::cout << "note: total differs from the commonly quoted figure by "
                      << gen.total_rules - GeneratedSystem::reference_rule_count << "\n";
    }
    if (!out.empty()) write_file(out, render_system(gen.system));
    if (out.empty() && !counts) std::cout << render_system(gen.system);
    return 0;
}

int cmd_encode_num(unsigned long r) {
    std::cout << encode_number(r).str() << "\n";
    return 0;
}

int cmd_decode_num(const std::string& bits) {
    auto [value, rest] = decode_number(BitString::parse(bits));
    std::cout << value;
    if (rest.size() > 0) std::cout << " remainder " << rest.str();
    std::cout << "\n";
    return 0;
}

int cmd_experiment(const Common& c, const std::string& family, const std::string& w, int m, int i,
                   const std::string& alpha, const std::string& report, const std::string& sym0,
                   const std::string& sym1) {
    MachineProgram prog = c.load_program();
    ExperimentConfig cfg;
    if (family == "palpower") cfg.family = InputFamily::PalPower;
    else if (family == "fourthpower") cfg.family = InputFamily::FourthPower;
    else throw Error("--family must be palpower or fourthpower");
    if (w.empty() && m > 0) cfg.w_bits = pseudo_hard_string(m, c.seed);
    else cfg.w_bits = w;
    cfg.i = i;
    std::tie(cfg.alpha_num, cfg.alpha_den) = parse_alpha(alpha);
    cfg.sym0 = sym0;
    cfg.sym1 = sym1;
    std::string json = run_experiment_json(prog, cfg);
    if (report.empty()) std::cout << json << "\n";
    else write_file(report, json);
    return 0;
}

int cmd_preimage(const Common& c, const std::string& family, const std::string& w, int i,
                 const std::string& alpha, const std::string& sym0, const std::string& sym1,
                 int jobs) {
    auto sys = std::make_shared<ThueSystem>(c.load_system());
    auto prog = std::make_shared<MachineProgram>(*sys, build_redex_dfa(*sys));
    InputFamily fam = family == "fourthpower" ? InputFamily::FourthPower : InputFamily::PalPower;
    auto [num, den] = parse_alpha(alpha);
    DepletionParams params =
        compute_constants(num, den, std::max(2, sys->alphabet_size()), sys->max_redex_len);
    auto builder = [&](const std::string& bits) {
        PreimageInstance inst;
        inst.prog = prog;
        BuiltInput bi = build_input(*prog, fam, bits, i, sym0, sym1);
        inst.input = std::move(bi.input);
        inst.layout = bi.layout;
        return inst;
    };
    auto target = preimage_target(builder(w), params);
    if (!target) {
        std::cout << "no qualifying single-depleted-block snapshot for w=" << w << "\n";
        return 1;
    }
    auto matches =
        residue_preimage_search(builder, static_cast<int>(w.size()), *target, params, jobs);
    std::cout << "matches " << matches.size() << "\n";
    for (const auto& m : matches) std::cout << m << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"workbench for length-reducing Church-Rosser Thue systems and their "
                 "1-tape reduction machines"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--system", common.system_file, "Thue system file")->expected(1);
    app.add_flag("--json", common.json, "structured JSON output");
    app.add_flag("--audit", common.audit, "enable per-step machine invariant checks");
    app.add_option("--seed", common.seed, "seed for randomized helpers");

    std::string input, trace_out, trace_file, out_file, alpha = "1/7";
    std::string family = "palpower", wbits, sym0 = "0", sym1 = "1";
    std::string in1, in2, bits;
    long stop = -1, fuel = -1, t1 = 0, t2 = 0;
    int pi = 0, pj = 0, u1 = 0, v1 = 0, u2 = 0, v2 = 0, iexp = 1, jobs = 1, mlen = 0;
    unsigned long number = 0;
    bool counts = false;

    auto* check = app.add_subcommand("check", "decide whether the system is Church-Rosser");
    auto* reduce = app.add_subcommand("reduce", "leftmost normal form of a word");
    reduce->add_option("--input", input, "whitespace-separated symbols")->required();
    auto* runc = app.add_subcommand("run", "run the reduction machine on an input");
    runc->add_option("--input", input, "whitespace-separated symbols");
    runc->add_option("--trace", trace_out, "write the run's trace JSON here");
    runc->add_option("--fuel", fuel, "step budget override");
    auto* dump = app.add_subcommand("dump-dfa", "print the redex DFA as tab-separated text");
    auto* tracec = app.add_subcommand("trace", "record a (partial) run's crossing sequences");
    tracec->add_option("--input", input, "whitespace-separated symbols");
    tracec->add_option("--stop", stop, "stop after this many steps");
    tracec->add_option("--out", out_file, "output file (default stdout)");
    auto* verify = app.add_subcommand("verify", "full + local verification of a trace file");
    verify->add_option("--trace", trace_file, "trace JSON file")->required();
    auto* pump = app.add_subcommand("pump", "splice out a region between equal crossing sequences");
    pump->add_option("--trace", trace_file, "trace JSON file")->required();
    pump->add_option("--i", pi, "left crossing point")->required();
    pump->add_option("--j", pj, "right crossing point")->required();
    pump->add_option("--out", out_file, "output trace file (default stdout)");
    auto* splicec = app.add_subcommand("splice", "residue-matched cut and paste of two runs");
    splicec->add_option("--input1", in1)->required();
    splicec->add_option("--u1", u1)->required();
    splicec->add_option("--v1", v1)->required();
    splicec->add_option("--time1", t1)->required();
    splicec->add_option("--input2", in2)->required();
    splicec->add_option("--u2", u2)->required();
    splicec->add_option("--v2", v2)->required();
    splicec->add_option("--time2", t2)->required();
    auto* consts = app.add_subcommand("constants", "depletion-lemma constants for the system");
    consts->add_option("--alpha", alpha, "depletion level as P/Q (default 1/7)");
    auto* enc = app.add_subcommand("encode-num", "prefix-free encoding of a number");
    enc->add_option("value", number, "nonnegative integer")->required();
    auto* dec = app.add_subcommand("decode-num", "decode a prefix-free number");
    dec->add_option("bits", bits, "bit string")->required();
    auto* gen = app.add_subcommand("gen-midbit", "emit the middle-bit Thue system");
    gen->add_option("--out", out_file, "write the system file here");
    gen->add_flag("--counts", counts, "print per-group rule counts");
    auto* exp = app.add_subcommand("experiment", "block depletion experiment on power inputs");
    exp->add_option("--family", family, "palpower | fourthpower");
    exp->add_option("--w", wbits, "bitstring w (omit to derive from --m and --seed)");
    exp->add_option("--m", mlen, "length of a seeded stand-in w when --w is absent");
    exp->add_option("--i", iexp, "power parameter i");
    exp->add_option("--alpha", alpha, "depletion level P/Q");
    exp->add_option("--report", out_file, "report JSON file (default stdout)");
    exp->add_option("--sym0", sym0, "system symbol for bit 0");
    exp->add_option("--sym1", sym1, "system symbol for bit 1");
    auto* pre = app.add_subcommand("preimage", "brute-force residue preimage search");
    pre->add_option("--family", family, "palpower | fourthpower");
    pre->add_option("--w", wbits, "target bitstring w")->required();
    pre->add_option("--i", iexp, "power parameter i");
    pre->add_option("--alpha", alpha, "depletion level P/Q");
    pre->add_option("--sym0", sym0, "system symbol for bit 0");
    pre->add_option("--sym1", sym1, "system symbol for bit 1");
    pre->add_option("--jobs", jobs, "worker threads");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();
    CLI11_PARSE(app, argc, argv);
    try {
        if (check->parsed()) return cmd_check(common);
        if (reduce->parsed()) return cmd_reduce(common, input);
        if (runc->parsed()) return cmd_run(common, input, trace_out, fuel);
        if (dump->parsed()) return cmd_dump_dfa(common);
        if (tracec->parsed()) return cmd_trace(common, input, stop, out_file);
        if (verify->parsed()) return cmd_verify(common, trace_file);
        if (pump->parsed()) return cmd_pump(common, trace_file, pi, pj, out_file);
        if (splicec->parsed()) return cmd_splice(common, in1, u1, v1, t1, in2, u2, v2, t2);
        if (consts->parsed()) return cmd_constants(common, alpha);
        if (enc->parsed()) return cmd_encode_num(number);
        if (dec->parsed()) return cmd_decode_num(bits);
        if (gen->parsed()) return cmd_gen_midbit(out_file, counts);
        if (exp->parsed())
            return cmd_experiment(common, family, wbits, mlen, iexp, alpha, out_file, sym0, sym1);
        if (pre->parsed())
            return cmd_preimage(common, family, wbits, iexp, alpha, sym0, sym1, jobs);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
