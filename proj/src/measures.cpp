#include "feilab/measures.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "feilab/parallel.hpp"

namespace feilab {

namespace {

// Entropy term for one subset: c^2 * (log2 of the sigma product - log2 c^2).
// Computed in log space so tiny coefficients stay accurate.
inline double entropy_term(double c, double log2_sigma_prod) {
    const double c2 = c * c;
    return c2 * (log2_sigma_prod - std::log2(c2));
}

// log2(prod_{i in S} sigma_i^2) for every S, by prefix over bits.
std::vector<double> subset_log_sigma(const BiasVector& mu) {
    const std::size_t n_masks = std::size_t(1) << mu.arity();
    std::vector<double> log_sigma(n_masks, 0.0);
    for (int i = 0; i < mu.arity(); ++i) {
        const double l = std::log2(mu.sigma_sq(i));
        const std::size_t bit = std::size_t(1) << i;
        for (std::size_t s = bit; s < n_masks; s = (s + 1) | bit)
            log_sigma[s] += l;
    }
    return log_sigma;
}

double entropy_impl(const Spectrum& s, bool include_empty) {
    const auto log_sigma = subset_log_sigma(s.basis());
    const auto& c = s.coeffs();
    double h = include_empty && c[0] != 0.0 ? entropy_term(c[0], 0.0) : 0.0;
    for (std::size_t mask = 1; mask < c.size(); ++mask)
        if (c[mask] != 0.0) h += entropy_term(c[mask], log_sigma[mask]);
    return h;
}

} // namespace

double phi(double t) {
    if (t == 0.0) return 0.0;
    return entropy_term(t, 0.0);
}

double spectral_entropy_ge1(const Spectrum& s) { return entropy_impl(s, false); }
double spectral_entropy_all(const Spectrum& s) { return entropy_impl(s, true); }

double raw_phi_entropy(const Spectrum& s) {
    double h = 0.0;
    for (double c : s.coeffs())
        if (c != 0.0) h += phi(c);
    return h;
}

double uniform_entropy(const Spectrum& s) {
    if (!s.basis().is_uniform())
        throw std::invalid_argument("uniform_entropy requires a uniform basis");
    return raw_phi_entropy(s);
}

double total_influence(const Spectrum& s) {
    const auto& c = s.coeffs();
    double inf = 0.0;
    for (std::size_t mask = 1; mask < c.size(); ++mask)
        inf += static_cast<double>(std::popcount(mask)) * c[mask] * c[mask];
    return inf;
}

double coordinate_influence(const Spectrum& s, int i) {
    if (i < 0 || i >= s.arity()) throw std::invalid_argument("coordinate out of range");
    const auto& c = s.coeffs();
    const std::size_t bit = std::size_t(1) << i;
    double inf = 0.0;
    for (std::size_t mask = bit; mask < c.size(); mask = (mask + 1) | bit)
        inf += c[mask] * c[mask];
    return inf;
}

double coordinate_influence_combinatorial(const TruthTable& f, const BiasVector& mu, int i) {
    if (f.arity() != mu.arity()) throw std::invalid_argument("arity mismatch");
    if (i < 0 || i >= f.arity()) throw std::invalid_argument("coordinate out of range");
    const std::uint32_t bit = std::uint32_t(1) << i;
    // A restriction y of the other coordinates has weight Pr[y] = w(y,+1) +
    // w(y,-1); the pinned 1-bit function's mu_i-variance is p*q*(lo - hi)^2.
    const double pq = 0.25 * mu.sigma_sq(i);
    double inf = 0.0;
    for (std::uint32_t a = 0; a < f.size(); ++a) {
        if (a & bit) continue;
        const double pr_y = mu.point_probability(a) + mu.point_probability(a | bit);
        const double diff = f.value(a) - f.value(a | bit);
        inf += pr_y * pq * diff * diff;
    }
    return inf;
}

double total_influence_combinatorial(const TruthTable& f, const BiasVector& mu) {
    double inf = 0.0;
    for (int i = 0; i < f.arity(); ++i)
        inf += coordinate_influence_combinatorial(f, mu, i);
    return inf;
}

std::uint64_t flip_disagreements(const TruthTable& f, int i) {
    if (i < 0 || i >= f.arity()) throw std::invalid_argument("coordinate out of range");
    const std::uint32_t bit = std::uint32_t(1) << i;
    std::uint64_t count = 0;
    for (std::uint32_t a = 0; a < f.size(); ++a)
        count += f.value(a) != f.value(a ^ bit);
    return count;
}

double variance(const Spectrum& s) {
    const auto& c = s.coeffs();
    double v = 0.0;
    for (std::size_t mask = 1; mask < c.size(); ++mask) v += c[mask] * c[mask];
    return v;
}

double derivative_variance(const TruthTable& f, const BiasVector& mu, int j) {
    return derivative_variance(RealTable(f), mu, j);
}

double derivative_variance(const RealTable& f, const BiasVector& mu, int j) {
    if (f.arity() != mu.arity()) throw std::invalid_argument("arity mismatch");
    if (j < 0 || j >= f.arity()) throw std::invalid_argument("coordinate out of range");
    return mu.sigma_sq(j) * variance_direct(discrete_derivative(f, j), mu);
}

double poincare_gap(const Spectrum& s) { return total_influence(s) - variance(s); }

MeasureReport compute_measures(const TruthTable& f, const BiasVector& mu, int jobs) {
    if (f.arity() != mu.arity()) throw std::invalid_argument("arity mismatch");
    jobs = resolve_jobs(jobs);
    const Spectrum s = biased_transform(f, mu, jobs);

    MeasureReport r;
    r.arity = f.arity();
    r.mu = mu.biases();
    r.mean = s.coeff(0);
    r.variance = variance(s);
    r.total_influence = total_influence(s);
    r.spectral_entropy_ge1 = spectral_entropy_ge1(s);
    if (mu.is_uniform()) r.uniform_entropy = uniform_entropy(s);
    r.poincare_gap = r.total_influence - r.variance;

    r.per_coordinate_influence.resize(static_cast<size_t>(f.arity()));
    double discrepancy = 0.0;
#ifdef FEILAB_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs) \
    reduction(max : discrepancy) if (f.arity() >= 14 && jobs > 1)
#endif
    for (int i = 0; i < f.arity(); ++i) {
        const double fourier = coordinate_influence(s, i);
        const double combinatorial = coordinate_influence_combinatorial(f, mu, i);
        r.per_coordinate_influence[static_cast<size_t>(i)] = fourier;
        const double d = std::abs(fourier - combinatorial);
        if (d > discrepancy) discrepancy = d;
    }
    r.influence_discrepancy = discrepancy;
    return r;
}

} // namespace feilab
