#pragma once
// The mu-biased Fourier transform and its inverse.
//
// For a product measure with biases mu the orthonormal basis is
//   phi_S(x) = prod_{i in S} (x_i - mu_i)/sigma_i,   sigma_i^2 = 1 - mu_i^2,
// and f(x) = sum_S coeff(S) phi_S(x) with coeff(S) = E_mu[f phi_S].
// At mu = 0 this is the ordinary Walsh-Hadamard expansion.
//
// The fast path is an O(n 2^n) in-place butterfly derived from the basis:
// splitting on coordinate i (bit clear <-> x_i = +1) with p = (1+mu_i)/2 and
// q = (1-mu_i)/2,
//   E-part        e = p*lo + q*hi          (conditional mean over x_i)
//   phi_i-part    d = sigma_i*(lo - hi)/2  (E[f phi_i | rest], since
//                                           p(1-mu)/sigma = q(1+mu)/sigma
//                                           = sigma/2)
// applied once per coordinate. The inverse reads the pair back:
//   lo = e + d*(1-mu_i)/sigma_i,  hi = e - d*(1+mu_i)/sigma_i.
// A deliberately naive O(4^n) summation path is kept as the correctness
// oracle for n <= 12.

#include <cstdint>
#include <utility>
#include <vector>

#include "feilab/boolfn.hpp"

namespace feilab {

class Spectrum {
public:
    // Dense coefficients indexed by SubsetMask, against the given basis.
    Spectrum(BiasVector basis, std::vector<double> coeffs);

    // Dense table from sparse (mask, value) entries; unlisted masks are 0.
    static Spectrum from_sparse(BiasVector basis,
                                const std::vector<std::pair<SubsetMask, double>>& entries);

    int arity() const { return basis_.arity(); }
    const BiasVector& basis() const { return basis_; }
    double coeff(SubsetMask s) const { return coeffs_.at(static_cast<size_t>(s)); }
    const std::vector<double>& coeffs() const { return coeffs_; }

    // Mask-ascending (mask, value) pairs with |value| > eps dropped as zero.
    std::vector<std::pair<SubsetMask, double>> sparse_entries(double eps = kSparseEps) const;

private:
    BiasVector basis_;
    std::vector<double> coeffs_;
};

// phi_S(a) for one point; used by the naive path and the orthonormality tests.
double basis_value(SubsetMask s, std::uint32_t a, const BiasVector& mu);

// Fast butterfly transform. `jobs` threads are used for large tables; the
// result is independent of the thread count (disjoint writes only).
Spectrum biased_transform(const TruthTable& f, const BiasVector& mu, int jobs = 0);
Spectrum biased_transform(const RealTable& f, const BiasVector& mu, int jobs = 0);

// Reference path: coeff(S) = sum_a Pr_mu[a] f(a) phi_S(a), summed literally.
// O(4^n); restricted to n <= 12.
Spectrum biased_transform_naive(const TruthTable& f, const BiasVector& mu);
Spectrum biased_transform_naive(const RealTable& f, const BiasVector& mu);

// f(x) = sum_S coeff(S) phi_S(x), via the inverse butterfly.
RealTable inverse_transform(const Spectrum& s, int jobs = 0);

// coeff(S) through the derivative identity
//   coeff(S) = (prod_{i in S} sigma_i) * E_mu[D_{x^S} f],
// an independent route used to cross-check the transform.
double coefficient_via_derivative(const TruthTable& f, const BiasVector& mu, SubsetMask s);
double coefficient_via_derivative(const RealTable& f, const BiasVector& mu, SubsetMask s);

// Zeroes every coefficient with |S| < k (the f^{>=k} projection).
Spectrum project_min_degree(const Spectrum& s, int k);

} // namespace feilab
