#pragma once
// Entropy/influence ratios, the per-term entropy bound with its explicit
// 2^{O(k)} witness constant, the p-biased (all-equal-bias) inequality sides,
// and the sweep engine the `verify` command and the acceptance checks run.
//
// Ratio conventions:
//   fei ratio        H[f] / Inf[f]                 (uniform measure)
//   fei+ ratio       H_mu[f^{>=1}] / (Inf - Var)   (any product measure)
// A ratio is "undefined" (std::nullopt, never NaN) when its denominator is
// below kRatioEps; constants and +-dictators legitimately produce that.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "feilab/boolfn.hpp"
#include "feilab/fourier.hpp"
#include "feilab/measures.hpp"

namespace feilab {

std::optional<double> fei_ratio(const TruthTable& f);
std::optional<double> fei_plus_ratio(const TruthTable& f, const BiasVector& mu);
// Same ratios given an already-computed spectrum (sweeps reuse one transform).
std::optional<double> fei_ratio(const Spectrum& s);
std::optional<double> fei_plus_ratio(const Spectrum& s);

// One subset's entropy term against the derivative variance of a pivot
// coordinate j in S:
//   lhs = c(S)^2 log2(prod_{i in S} sigma_i^2 / c(S)^2)
//   rhs = (2^{2k} / ln 2) * sigma_j^2 Var_mu[D_j f],   k = arity of f.
// Callers skip subsets with c(S) = 0 (the bound assumes a nonzero term).
struct TermBound {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};
TermBound check_term_bound(const TruthTable& f, const BiasVector& mu, SubsetMask s, int j,
                           double slack = 1e-10);

// Explicit witness constant for the k-ary "entropy at most constant times
// influence gap" bound: every nonempty subset's term is at most
// (2^{2k}/ln 2) times some derivative variance, there are 2^k - 1 subsets,
// and the summed derivative variances are at most 2 (Inf - Var). Sufficient,
// nowhere near optimal.
double product_fei_constant(int k);

// Both sides of the all-equal-bias inequality at Pr[x_i = TRUE] = p (so
// mu_i = 1 - 2p): lhs = sum_S phi(c(S)) including the empty set, rhs =
// (log2(1/p)/(1-p)) * Inf. The caller supplies its own constant C to compare
// lhs against C * rhs.
struct KmsSides {
    double lhs = 0.0;
    double rhs = 0.0;
};
KmsSides kms_sides(const TruthTable& f, double p);

// Verifies the chain "FEI+ with constant C implies FEI with constant
// max{C, 1/ln 2}" on a concrete f at the uniform measure, including the
// intermediate step (1-e) log2(1/(1-e)) <= e/ln 2 with e = Var[f].
bool fei_from_fei_plus(const TruthTable& f, double c);

// --- sweep engine -------------------------------------------------------------

struct SweepOptions {
    double slack = 1e-10;  // additive tolerance on every inequality
    int jobs = 0;
};

struct SweepViolation {
    std::string kind;        // "term-bound" or "product-fei"
    int arity = 0;
    std::uint64_t fn_bits = 0;  // packed truth table (bit a <-> value -1)
    std::vector<double> mu;
    SubsetMask subset = 0;   // term-bound only
    int pivot = -1;          // term-bound only
    double lhs = 0.0;
    double rhs = 0.0;
};

struct SweepSummary {
    long long functions = 0;      // (f, mu) pairs visited
    long long term_checks = 0;    // (S, j) pairs checked
    double max_term_ratio = 0.0;  // max lhs/rhs over checks with rhs > kRatioEps
    std::optional<double> max_fei_plus;  // max defined fei+ ratio seen
    std::uint64_t max_fei_plus_fn = 0;   // witness for max_fei_plus
    int max_fei_plus_arity = 0;
    std::vector<double> max_fei_plus_mu;
    // Smallest H_mu[f^{>=1}] observed. Whether that quantity can go negative
    // is an open question; the sweep measures and reports, asserting nothing.
    std::optional<double> min_entropy_ge1;
    std::vector<SweepViolation> violations;  // sorted, deterministic

    bool clean() const { return violations.empty(); }
};

// Every function of each arity 1..max_arity against every bias vector built
// from `levels` (the grid levels^k); checks the per-term bound and the
// product-fei bound for the function's own arity.
SweepSummary term_bound_sweep_exhaustive(int max_arity, const std::vector<double>& levels,
                                         const SweepOptions& opt = {});

// `samples` random (f, mu) pairs with arity cycling over 1..max_arity and
// |mu_i| <= 0.9; deterministic for a fixed seed regardless of jobs.
SweepSummary term_bound_sweep_random(int max_arity, long long samples, std::uint64_t seed,
                                     const SweepOptions& opt = {});

// Merge b into a (counts add, maxima/minima combine, violations concatenate).
void merge_sweeps(SweepSummary& a, const SweepSummary& b);

} // namespace feilab
