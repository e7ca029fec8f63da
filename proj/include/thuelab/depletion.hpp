#pragma once

#include <vector>

#include "thuelab/machine.hpp"

namespace thuelab {

// Exact rational threshold arithmetic: a region of `width` squares holding
// `nonblank` symbols is depleted iff nonblank <= beta * width with
// beta = alpha / ceil(log2 A).
struct DepletionParams {
    long alpha_num = 1, alpha_den = 7;
    int A = 0;        // alphabet size
    int log2A = 0;    // ceil(log2 A)
    long beta_num = 0, beta_den = 0;
    int L = 0;        // max redex length
    int H = 0;        // crossing-height threshold, minimal with K > (L-1)/beta
    long K = 0;       // section length floor(H/2 - 2) + L - 1
    long d = 0;       // minimum separation ceil(1 / (beta K / (L-1) - 1))
};

// Requires A >= 2 and L >= 2; H is the smallest integer >= 6 satisfying the
// section constraint.
DepletionParams compute_constants(long alpha_num, long alpha_den, int A, int L);

bool is_depleted_counts(long nonblank, long width, const DepletionParams& p);

// |h| of the cells strictly between crossing points j1 and j2 (squares
// j1+1..j2) against beta * (j2 - j1).
bool is_depleted(const std::vector<Cell>& tape, int j1, int j2, const DepletionParams& p);

struct DepletionViolation {
    long time = 0;
    int j1 = 0, j2 = 0;
    long nonblank = 0;
};

// Core checker over one snapshot: every pair (j1, j2) with j2-j1 >= d whose
// crossing heights at and between them are all >= H must be depleted.
// heights[i] is the height at crossing point i, 0 <= i <= n.
std::vector<DepletionViolation> check_depletion_snapshot(const std::vector<long>& heights,
                                                         const std::vector<Cell>& tape,
                                                         const DepletionParams& p, long time);

// Runs the machine on x and applies the snapshot checker at every step
// boundary. Empty for every run of this machine (the Depletion Lemma as an
// executable property).
std::vector<DepletionViolation> check_depletion_lemma(const MachineProgram& prog, const Word& x,
                                                      const DepletionParams& p);

} // namespace thuelab
