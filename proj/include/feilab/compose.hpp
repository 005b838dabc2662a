#pragma once
// Disjoint composition f = F(g_1(x^1), ..., g_k(x^k)) where the inner
// functions live on consecutive disjoint variable blocks, plus everything
// built on it: the tensor-product identities, the closed-form
// entropy/influence/variance of a composition, the composition-theorem
// checker, and the self-composition amplification that squeezes a lower
// bound on the entropy/influence constant out of one good base function.
//
// Throughout, eta_i = E_mu[g_i] are the induced biases of the outer
// function's inputs and Phi(g) = (g - E[g]) / Var[g]^{1/2} is the
// normalized lift with mean 0 and second moment 1.

#include <cstdint>
#include <vector>

#include "feilab/boolfn.hpp"
#include "feilab/fourier.hpp"

namespace feilab {

struct CompositionSpec {
    TruthTable outer;                 // F, arity k
    std::vector<TruthTable> inner;    // g_1..g_k on blocks of arity l_i
    BiasVector inner_biases;          // mu over sum(l_i) coordinates

    CompositionSpec(TruthTable f, std::vector<TruthTable> g, BiasVector mu);
    int outer_arity() const { return outer.arity(); }
    int total_arity() const;
    // First coordinate of block i (blocks are consecutive: g_1 first).
    int block_offset(int i) const;
};

// Dense composed table; total arity <= kMaxArity.
TruthTable compose(const CompositionSpec& spec);

// eta_i = E_mu[g_i] under block i's biases; rejects inner functions that are
// constant under mu (|eta_i| at the bias guard), which would degenerate the
// eta-biased basis.
BiasVector eta_biases(const CompositionSpec& spec);

// (g - E_mu[g]) / Var_mu[g]^{1/2}: mean 0, second moment 1 under mu.
RealTable normalized_lift(const TruthTable& g, const BiasVector& mu);
RealTable normalized_lift(const RealTable& g, const BiasVector& mu);

// Both tensor identities for a pointwise product of functions on disjoint
// consecutive blocks (factor i occupies the next factors[i].arity()
// coordinates):
//   H_mu[P1...Pk]   = sum_i H_mu[P_i]   * prod_{j != i} E[P_j^2]
//   Inf_mu[P1...Pk] = sum_i Inf_mu[P_i] * prod_{j != i} E[P_j^2]
// where H_mu is the all-subsets biased entropy. Returns the directly
// computed left sides next to the factor-formula right sides.
struct TensorIdentityReport {
    double entropy_direct = 0.0, entropy_formula = 0.0;
    double influence_direct = 0.0, influence_formula = 0.0;
};
TensorIdentityReport verify_tensor_identities(const std::vector<RealTable>& factors,
                                              const BiasVector& mu);

// The three composition identities, each as (direct, closed_form):
//   (1) H_mu[f^{>=1}]  = H_eta[F^{>=1}] + sum_{S != 0} C_F(S)^2 *
//                        sum_{i in S} H_mu[g_i^{>=1}] / Var_mu[g_i]
//   (2) Inf_mu[f]      = same shape with Inf_mu[g_i] in the inner sum
//   (3) Var_mu[f]      = sum_{S != 0} C_F(S)^2  (= Var_eta[F])
// The direct sides come from the composed table's spectrum, so total arity
// is capped at 16 here; larger compositions must use the closed forms alone.
struct IdentityPair {
    double direct = 0.0;
    double closed = 0.0;
};
struct CompositionIdentities {
    IdentityPair entropy_ge1;
    IdentityPair influence;
    IdentityPair variance;
};
CompositionIdentities composition_identities(const CompositionSpec& spec);

// The closed-form sides alone — never materializes the composed function, so
// it works at any total arity the spec admits.
struct CompositionMeasures {
    double mean = 0.0;
    double variance = 0.0;
    double influence = 0.0;
    double entropy_ge1 = 0.0;
};
CompositionMeasures composition_closed_form(const CompositionSpec& spec);

// Squared spectral mass of the composed function grouped by which inner
// blocks a monomial touches; entry at outer-mask S equals C_F(S)^2 (the
// partition structure of the composed support). Total arity <= 16.
std::vector<double> grouped_support_mass(const CompositionSpec& spec);

// The composition theorem, instantiated numerically: if every inner function
// and the outer function (at its eta biases) satisfy the FEI+ inequality
// with constant c, then so does the composition. Also checks the key
// intermediate influence inequality
//   Inf_mu[f] >= Inf_eta[F] + (1/c) sum_{S != 0} C_F(S)^2 *
//                sum_{i in S} H_mu[g_i^{>=1}] / Var_mu[g_i],
// which follows from the inner hypotheses alone.
struct CompositionTheoremCheck {
    double constant = 0.0;
    bool inner_hypothesis = false;   // every g_i satisfies FEI+ with c
    bool outer_hypothesis = false;   // F at eta satisfies FEI+ with c
    bool conclusion = false;         // f satisfies FEI+ with c
    bool influence_recursion = false;  // intermediate inequality (under inner hyp.)
    double conclusion_lhs = 0.0, conclusion_rhs = 0.0;
    double recursion_lhs = 0.0, recursion_rhs = 0.0;

    // What the theorem actually promises.
    bool implication_holds() const {
        return (!(inner_hypothesis && outer_hypothesis) || conclusion) &&
               (!inner_hypothesis || influence_recursion);
    }
};
CompositionTheoremCheck composition_theorem_check(const CompositionSpec& spec, double c,
                                                  double slack = 1e-9);

// --- self-composition amplification ----------------------------------------------

// Uniform-measure entropy H (all subsets) and total influence of a balanced
// function, the two numbers the amplification recurrences run on.
struct AmplifyStats {
    double entropy = 0.0;
    double influence = 0.0;
    int level = 0;  // m, for stats describing the m-th composition power
    bool degenerate = false;  // set when the influence-1 linear form was used
};

// Measures a balanced function (exact count check) at the uniform measure.
AmplifyStats uniform_amplify_stats(const TruthTable& f);

// Level-m stats of f_m = F(f_{m-1}, ..., f_{m-1}) with f_0 = g:
//   H[f_m]   = H[g] Inf[F]^m + H[F] (Inf[F]^m - 1)/(Inf[F] - 1)
//   Inf[f_m] = Inf[g] Inf[F]^m
// (linear form H[g] + m H[F] when Inf[F] = 1, flagged as degenerate).
AmplifyStats amplify_closed_form(const AmplifyStats& outer, const AmplifyStats& base, int m);

// lim_m H[f_m]/Inf[f_m] for self-composition (base = outer):
//   H/Inf + H/(Inf (Inf - 1)),
// requiring Inf > 1. The finite-m value is the limit minus
// H/(Inf^{m+1} (Inf - 1)), increasing in m.
double amplify_ratio_limit(const AmplifyStats& outer);
double amplify_ratio_at(const AmplifyStats& outer, int m);
// General base: lim of H[f_m]/Inf[f_m] = (H[g] + H[F]/(Inf[F]-1)) / Inf[g].
double amplify_ratio_limit(const AmplifyStats& outer, const AmplifyStats& base);

// The 6-input balanced witness driving the artifact's headline bound: total
// influence 13/8 exactly, uniform entropy 3.9243407829..., so the
// self-composition ratio limit is 6.2789452527... Local search over balanced
// 6-input functions (`local_search_max_ratio`) rediscovers this value, and
// the acceptance checks pin it. Defined by the disjunctive normal form below.
TruthTable lower_bound_witness();

} // namespace feilab
