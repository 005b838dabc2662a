#pragma once
// Scalar quantities of a spectrum: spectral entropy (uniform and biased,
// with and without the empty set), total and per-coordinate influence,
// variance, and derivative variance. All logarithms are base 2.
//
// The biased entropy weights each squared coefficient against the variance
// mass of its subset:
//   H_mu[f]        = sum_S     c(S)^2 log2( prod_{i in S} sigma_i^2 / c(S)^2 )
//   H_mu[f^{>=1}]  = the same sum restricted to S != empty.
// Zero coefficients contribute 0 (phi(0) = 0) and are skipped outright.
// Individual terms may be negative when c(S)^2 exceeds its sigma product;
// the sums are reported as-is, never clamped.

#include <cstdint>
#include <optional>
#include <vector>

#include "feilab/boolfn.hpp"
#include "feilab/fourier.hpp"

namespace feilab {

// t^2 log2(1/t^2), with phi(0) = 0.
double phi(double t);

// Biased entropy over S != empty (the FEI+ numerator).
double spectral_entropy_ge1(const Spectrum& s);

// Biased entropy over all S, with the constant-function convention
// H_mu[c] = phi(c) coming out of the empty-set term.
double spectral_entropy_all(const Spectrum& s);

// sum_S phi(c(S)) with no sigma weighting and the empty set included --
// the entropy the p-biased inequality of kms_sides uses. Coincides with
// spectral_entropy_all at uniform biases.
double raw_phi_entropy(const Spectrum& s);

// sum_S phi(c(S)) over all S; requires a uniform basis (the plain FEI H[f]).
double uniform_entropy(const Spectrum& s);

// Inf = sum_S |S| c(S)^2 and Inf_i = sum_{S contains i} c(S)^2.
double total_influence(const Spectrum& s);
double coordinate_influence(const Spectrum& s, int i);

// The restriction definition of influence: the expected mu_i-variance of f
// with every other coordinate pinned by a mu-random restriction. Computed
// straight from the table as an independent cross-check of the Fourier
// formula.
double coordinate_influence_combinatorial(const TruthTable& f, const BiasVector& mu, int i);
double total_influence_combinatorial(const TruthTable& f, const BiasVector& mu);

// Number of points where flipping coordinate i changes f; at uniform biases
// influence is exactly this count divided by 2^n (a dyadic rational, so the
// equality is exact even in doubles).
std::uint64_t flip_disagreements(const TruthTable& f, int i);

// Var = sum_{S != empty} c(S)^2.
double variance(const Spectrum& s);

// sigma_j^2 * Var_mu[D_j f], computed from the derivative table; equals
// sum_{S contains j, |S| >= 2} c(S)^2 on the Fourier side.
double derivative_variance(const TruthTable& f, const BiasVector& mu, int j);
double derivative_variance(const RealTable& f, const BiasVector& mu, int j);

// Inf - Var; nonnegative for every f and mu (Poincare inequality).
double poincare_gap(const Spectrum& s);

struct MeasureReport {
    int arity = 0;
    std::vector<double> mu;
    double mean = 0.0;
    double variance = 0.0;
    double total_influence = 0.0;
    std::vector<double> per_coordinate_influence;
    double spectral_entropy_ge1 = 0.0;
    std::optional<double> uniform_entropy;  // present only when mu = 0
    double poincare_gap = 0.0;
    // Self-diagnostic: max over i of |Fourier influence - combinatorial
    // influence|; both routes are always computed, never collapsed into one.
    double influence_discrepancy = 0.0;
};

MeasureReport compute_measures(const TruthTable& f, const BiasVector& mu, int jobs = 0);

} // namespace feilab
