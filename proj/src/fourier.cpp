#include "feilab/fourier.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "feilab/parallel.hpp"

namespace feilab {

namespace {

// Tables at or above this size get their butterfly stages parallelized;
// below it the fork/join overhead costs more than the stage.
constexpr std::size_t kParallelCut = std::size_t(1) << 15;

void forward_stage(std::vector<double>& v, int i, double mu_i, int jobs) {
    const std::size_t half = std::size_t(1) << i;
    const double p = 0.5 * (1.0 + mu_i);
    const double q = 0.5 * (1.0 - mu_i);
    const double hs = 0.5 * std::sqrt(1.0 - mu_i * mu_i);
    const std::size_t pairs = v.size() / 2;
    (void)jobs;
#ifdef FEILAB_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(jobs) if (v.size() >= kParallelCut && jobs > 1)
#endif
    for (std::size_t t = 0; t < pairs; ++t) {
        const std::size_t a = ((t & ~(half - 1)) << 1) | (t & (half - 1));
        const std::size_t b = a | half;
        const double lo = v[a], hi = v[b];
        v[a] = p * lo + q * hi;
        v[b] = hs * (lo - hi);
    }
}

void inverse_stage(std::vector<double>& v, int i, double mu_i, int jobs) {
    const std::size_t half = std::size_t(1) << i;
    const double s = std::sqrt(1.0 - mu_i * mu_i);
    const double cp = (1.0 - mu_i) / s;  // phi_i at x_i = +1
    const double cm = (1.0 + mu_i) / s;  // -phi_i at x_i = -1
    const std::size_t pairs = v.size() / 2;
    (void)jobs;
#ifdef FEILAB_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(jobs) if (v.size() >= kParallelCut && jobs > 1)
#endif
    for (std::size_t t = 0; t < pairs; ++t) {
        const std::size_t a = ((t & ~(half - 1)) << 1) | (t & (half - 1));
        const std::size_t b = a | half;
        const double e = v[a], d = v[b];
        v[a] = e + d * cp;
        v[b] = e - d * cm;
    }
}

std::vector<double> table_as_doubles(const TruthTable& f) {
    std::vector<double> v(f.size());
    for (std::uint32_t a = 0; a < f.size(); ++a) v[a] = f.value(a);
    return v;
}

Spectrum transform_buffer(std::vector<double> v, const BiasVector& mu, int jobs) {
    jobs = resolve_jobs(jobs);
    for (int i = 0; i < mu.arity(); ++i) forward_stage(v, i, mu.bias(i), jobs);
    return Spectrum(mu, std::move(v));
}

template <typename Table>
Spectrum naive_impl(const Table& f, const BiasVector& mu) {
    if (f.arity() != mu.arity()) throw std::invalid_argument("arity mismatch");
    if (f.arity() > 12)
        throw std::invalid_argument("naive transform is the n <= 12 reference path");
    const std::uint32_t n_points = f.size();
    std::vector<double> weights(n_points);
    for (std::uint32_t a = 0; a < n_points; ++a) weights[a] = mu.point_probability(a);
    std::vector<double> coeffs(n_points, 0.0);
    for (std::uint32_t s = 0; s < n_points; ++s) {
        double acc = 0.0;
        for (std::uint32_t a = 0; a < n_points; ++a)
            acc += weights[a] * f.value(a) * basis_value(s, a, mu);
        coeffs[s] = acc;
    }
    return Spectrum(mu, std::move(coeffs));
}

} // namespace

Spectrum::Spectrum(BiasVector basis, std::vector<double> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != (std::size_t(1) << basis_.arity()))
        throw std::invalid_argument("coefficient array length must be 2^arity");
    for (double c : coeffs_)
        if (!std::isfinite(c)) throw std::invalid_argument("coefficients must be finite");
}

Spectrum Spectrum::from_sparse(BiasVector basis,
                               const std::vector<std::pair<SubsetMask, double>>& entries) {
    std::vector<double> coeffs(std::size_t(1) << basis.arity(), 0.0);
    for (const auto& [mask, value] : entries) {
        if (mask >= coeffs.size())
            throw std::invalid_argument("spectrum mask has bits beyond the arity");
        coeffs[static_cast<size_t>(mask)] = value;
    }
    return Spectrum(std::move(basis), std::move(coeffs));
}

std::vector<std::pair<SubsetMask, double>> Spectrum::sparse_entries(double eps) const {
    std::vector<std::pair<SubsetMask, double>> out;
    for (std::size_t s = 0; s < coeffs_.size(); ++s)
        if (std::abs(coeffs_[s]) > eps) out.emplace_back(static_cast<SubsetMask>(s), coeffs_[s]);
    return out;
}

double basis_value(SubsetMask s, std::uint32_t a, const BiasVector& mu) {
    if (s >> mu.arity()) throw std::invalid_argument("subset has bits beyond the arity");
    double v = 1.0;
    for (int i = 0; i < mu.arity(); ++i) {
        if (!((s >> i) & 1u)) continue;
        const double x = (a >> i) & 1u ? -1.0 : 1.0;
        v *= (x - mu.bias(i)) / std::sqrt(mu.sigma_sq(i));
    }
    return v;
}

Spectrum biased_transform(const TruthTable& f, const BiasVector& mu, int jobs) {
    if (f.arity() != mu.arity()) throw std::invalid_argument("arity mismatch");
    return transform_buffer(table_as_doubles(f), mu, jobs);
}

Spectrum biased_transform(const RealTable& f, const BiasVector& mu, int jobs) {
    if (f.arity() != mu.arity()) throw std::invalid_argument("arity mismatch");
    return transform_buffer(f.data(), mu, jobs);
}

Spectrum biased_transform_naive(const TruthTable& f, const BiasVector& mu) {
    return naive_impl(f, mu);
}
Spectrum biased_transform_naive(const RealTable& f, const BiasVector& mu) {
    return naive_impl(f, mu);
}

RealTable inverse_transform(const Spectrum& s, int jobs) {
    jobs = resolve_jobs(jobs);
    std::vector<double> v = s.coeffs();
    // Undo the forward stages in reverse coordinate order.
    for (int i = s.arity() - 1; i >= 0; --i) inverse_stage(v, i, s.basis().bias(i), jobs);
    return RealTable::from_values(s.arity(), std::move(v));
}

double coefficient_via_derivative(const TruthTable& f, const BiasVector& mu, SubsetMask s) {
    return coefficient_via_derivative(RealTable(f), mu, s);
}

double coefficient_via_derivative(const RealTable& f, const BiasVector& mu, SubsetMask s) {
    if (f.arity() != mu.arity()) throw std::invalid_argument("arity mismatch");
    if (s == 0) throw std::invalid_argument("coefficient_via_derivative requires nonempty subset");
    double sigma_prod = 1.0;
    for (int i = 0; i < mu.arity(); ++i)
        if ((s >> i) & 1u) sigma_prod *= std::sqrt(mu.sigma_sq(i));
    return sigma_prod * mean(iterated_derivative(f, s), mu);
}

Spectrum project_min_degree(const Spectrum& s, int k) {
    if (k < 0 || k > s.arity()) throw std::invalid_argument("degree cut out of range");
    std::vector<double> coeffs = s.coeffs();
    for (std::size_t mask = 0; mask < coeffs.size(); ++mask)
        if (std::popcount(mask) < k) coeffs[mask] = 0.0;
    return Spectrum(s.basis(), std::move(coeffs));
}

} // namespace feilab
