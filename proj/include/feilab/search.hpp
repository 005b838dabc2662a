#pragma once
// Search over function space for entropy/influence extremes: exhaustive scans
// (arity <= 4) for the max uniform entropy-to-influence ratio, worst observed
// product-measure FEI+ constants over a bias grid, and a seeded hill-climb
// whose objective is the self-composition ratio limit — the route by which
// the headline 6-input witness is (re)discovered.

#include <cstdint>
#include <vector>

#include "feilab/boolfn.hpp"

namespace feilab {

enum class SearchConstraint { kAny, kBalanced };

// Sparse fixed-width histogram: bin b counts ratios in [b*width, (b+1)*width).
struct RatioHistogram {
    double width = 0.25;
    std::vector<std::pair<int, uint64_t>> bins;  // sorted by bin index
};

struct ScanResult {
    TruthTable best{1, +1};     // smallest packed table achieving the max
    double best_ratio = 0.0;
    bool any_defined = false;   // false when every scanned ratio was undefined
    RatioHistogram histogram;   // over scanned functions with a defined ratio
    uint64_t scanned = 0;
    uint64_t undefined_count = 0;
};

// Max of uniform fei_ratio over all functions of the given arity (<= 4), or
// over the balanced class only. With `quotient` set, scans one representative
// per orbit of {output negation} x {input negations} x {coordinate
// permutations} — an optimization that cannot change the max since the ratio
// is orbit-invariant (entropy sums are accumulated in sorted order so orbit
// mates produce bit-identical values). Deterministic for any jobs count.
ScanResult exhaustive_max_fei(int arity, SearchConstraint constraint,
                              bool quotient = false, int jobs = 0);

// Orbit-minimal packed table id under the symmetry group above; arity <= 4.
uint64_t canonical_function_id(uint64_t bits, int arity);

// Max of fei_plus_ratio over every function of the given arity (<= 4) and
// every bias vector from the grid levels^arity (empty levels = uniform only).
// `observed` must stay below `bound` = product_fei_constant(arity).
struct WorstCaseResult {
    TruthTable function{1, +1};
    std::vector<double> mu;
    double observed = 0.0;
    double bound = 0.0;
    uint64_t evaluated = 0;  // (function, bias) pairs with a defined ratio
};
WorstCaseResult worst_case_product_fei(int arity, const std::vector<double>& levels,
                                       int jobs = 0);

// Hill-climb objective at the uniform measure: the self-composition ratio
// limit H/(Inf-1) for balanced candidates with Inf strictly above 1, else the
// plain ratio H/Inf, else 0 when undefined.
double search_objective(const TruthTable& f, SearchConstraint constraint);

struct LocalSearchOptions {
    int arity = 6;                 // 1..16
    SearchConstraint constraint = SearchConstraint::kBalanced;
    int restarts = 8;
    int max_steps = 64;            // accepted moves per restart
    uint64_t seed = 1;
    int jobs = 0;
};

struct TraceEntry {
    int restart = 0;
    int step = 0;        // 0 is the starting point
    double objective = 0.0;
};

struct LocalSearchResult {
    TruthTable best{1, +1};
    double best_objective = 0.0;
    int best_restart = 0;
    std::vector<TraceEntry> trace;  // accepted moves, grouped by restart
    uint64_t evaluations = 0;       // objective evaluations across restarts
};

// Steepest-ascent hill-climb: single-entry flips, or balance-preserving swaps
// of a TRUE point with a FALSE point under the balanced constraint. Full move
// enumeration per step for tables up to 256 entries, fixed-size sampled
// proposals beyond. Deterministic given the seed: restart r runs on its own
// generator seeded by mix(seed, r), and results merge independently of the
// jobs count.
LocalSearchResult local_search_max_ratio(const LocalSearchOptions& options);

} // namespace feilab
