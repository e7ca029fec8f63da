#include "thuelab/depletion.hpp"

#include "thuelab/bitcodec.hpp"

namespace thuelab {

DepletionParams compute_constants(long alpha_num, long alpha_den, int A, int L) {
    if (alpha_num <= 0 || alpha_den <= 0 || alpha_num >= alpha_den)
        throw Error("alpha must be a rational in (0,1)");
    if (A < 2) throw Error("alphabet size must be at least 2");
    if (L < 2) throw Error("all redexes have length 1: the depletion constants degenerate");
    DepletionParams p;
    p.alpha_num = alpha_num;
    p.alpha_den = alpha_den;
    p.A = A;
    p.log2A = bits_per_symbol(A);
    p.beta_num = alpha_num;
    p.beta_den = alpha_den * p.log2A;
    p.L = L;
    // K(H) = floor(H/2 - 2) + L - 1; minimal H >= 6 with K > (L-1)/beta,
    // i.e. K * beta_num > (L-1) * beta_den.
    const long need = (L - 1) * p.beta_den;
    int H = 6;
    auto section = [&](int h) { return static_cast<long>(h / 2 - 2 + L - 1); };
    while (section(H) * p.beta_num <= need) ++H;
    p.H = H;
    p.K = section(H);
    // d = ceil(1 / (beta K / (L-1) - 1)) = ceil((L-1) beta_den / (K beta_num - (L-1) beta_den)).
    const long denom = p.K * p.beta_num - need;
    p.d = (need + denom - 1) / denom;
    if (p.d < 1) p.d = 1;
    return p;
}

bool is_depleted_counts(long nonblank, long width, const DepletionParams& p) {
    // nonblank <= beta * width  <=>  nonblank * beta_den <= beta_num * width
    return nonblank * p.beta_den <= p.beta_num * width;
}

bool is_depleted(const std::vector<Cell>& tape, int j1, int j2, const DepletionParams& p) {
    if (j1 < 0 || j2 > static_cast<int>(tape.size()) || j1 >= j2)
        throw Error("is_depleted: bad crossing-point pair");
    long nonblank = static_cast<long>(h_image(tape, j1 + 1, j2).size());
    return is_depleted_counts(nonblank, j2 - j1, p);
}

std::vector<DepletionViolation> check_depletion_snapshot(const std::vector<long>& heights,
                                                         const std::vector<Cell>& tape,
                                                         const DepletionParams& p, long time) {
    std::vector<DepletionViolation> out;
    const int n = static_cast<int>(tape.size());
    if (static_cast<int>(heights.size()) != n + 1)
        throw Error("check_depletion_snapshot: heights must cover points 0..n");
    // Nonblank prefix sums over squares.
    std::vector<long> pre(static_cast<size_t>(n) + 1, 0);
    for (int sq = 1; sq <= n; ++sq) {
        const Cell& c = tape[static_cast<size_t>(sq - 1)];
        bool nb = (c.kind == Cell::Kind::Plain || c.kind == Cell::Kind::Compound) && c.a != kBlank;
        pre[static_cast<size_t>(sq)] = pre[static_cast<size_t>(sq - 1)] + (nb ? 1 : 0);
    }
    // Maximal intervals of points with height >= H, then all pairs >= d apart.
    int i = 0;
    while (i <= n) {
        if (heights[static_cast<size_t>(i)] < p.H) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 <= n && heights[static_cast<size_t>(j + 1)] >= p.H) ++j;
        for (int a = i; a <= j; ++a)
            for (int b = a + static_cast<int>(p.d); b <= j; ++b) {
                long nonblank = pre[static_cast<size_t>(b)] - pre[static_cast<size_t>(a)];
                if (!is_depleted_counts(nonblank, b - a, p))
                    out.push_back({time, a, b, nonblank});
            }
        i = j + 1;
    }
    return out;
}

std::vector<DepletionViolation> check_depletion_lemma(const MachineProgram& prog, const Word& x,
                                                      const DepletionParams& p) {
    Configuration cfg = initial_config(prog, x);
    std::vector<long> heights(static_cast<size_t>(cfg.n()) + 1, 0);
    std::vector<DepletionViolation> out;
    long max_height = 0;
    auto observer = [&](const Configuration& c, const StepEvent& ev) {
        int point = std::min(ev.from, ev.to);
        long h = ++heights[static_cast<size_t>(point)];
        max_height = std::max(max_height, h);
        if (max_height >= p.H) {
            auto v = check_depletion_snapshot(heights, c.tape, p, c.time);
            out.insert(out.end(), v.begin(), v.end());
        }
        return true;
    };
    run_from(prog, std::move(cfg), -1, observer, false);
    return out;
}

} // namespace thuelab
