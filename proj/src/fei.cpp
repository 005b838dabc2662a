#include "feilab/fei.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "feilab/parallel.hpp"
#include "feilab/rng.hpp"

#ifdef FEILAB_HAVE_OPENMP
#include <omp.h>
#endif

namespace feilab {

namespace {

std::optional<double> ratio_or_undefined(double num, double den) {
    if (den < kRatioEps) return std::nullopt;
    return num / den;
}

} // namespace

std::optional<double> fei_ratio(const Spectrum& s) {
    return ratio_or_undefined(uniform_entropy(s), total_influence(s));
}

std::optional<double> fei_ratio(const TruthTable& f) {
    return fei_ratio(biased_transform(f, BiasVector::uniform(f.arity())));
}

std::optional<double> fei_plus_ratio(const Spectrum& s) {
    return ratio_or_undefined(spectral_entropy_ge1(s), poincare_gap(s));
}

std::optional<double> fei_plus_ratio(const TruthTable& f, const BiasVector& mu) {
    return fei_plus_ratio(biased_transform(f, mu));
}

TermBound check_term_bound(const TruthTable& f, const BiasVector& mu, SubsetMask s, int j,
                           double slack) {
    if (s == 0) throw std::invalid_argument("term bound needs a nonempty subset");
    if (j < 0 || j >= f.arity() || !((s >> j) & 1u))
        throw std::invalid_argument("pivot coordinate must lie in the subset");
    const Spectrum spec = biased_transform(f, mu);
    const double c = spec.coeff(s);
    double log_sigma = 0.0;
    for (int i = 0; i < f.arity(); ++i)
        if ((s >> i) & 1u) log_sigma += std::log2(mu.sigma_sq(i));
    TermBound b;
    b.lhs = c == 0.0 ? 0.0 : c * c * (log_sigma - std::log2(c * c));
    const double factor = std::exp2(2 * f.arity()) / std::log(2.0);
    b.rhs = factor * derivative_variance(f, mu, j);
    b.holds = b.lhs <= b.rhs + slack;
    return b;
}

double product_fei_constant(int k) {
    if (k < 1) throw std::invalid_argument("arity must be >= 1");
    return (std::exp2(k) - 1.0) * (std::exp2(2 * k) / std::log(2.0)) * 2.0;
}

KmsSides kms_sides(const TruthTable& f, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0, 1)");
    // Pr[x_i = TRUE] = Pr[x_i = -1] = p means mu_i = E[x_i] = 1 - 2p.
    const BiasVector mu = BiasVector::constant(f.arity(), 1.0 - 2.0 * p);
    const Spectrum s = biased_transform(f, mu);
    KmsSides k;
    k.lhs = raw_phi_entropy(s);
    k.rhs = (std::log2(1.0 / p) / (1.0 - p)) * total_influence(s);
    return k;
}

bool fei_from_fei_plus(const TruthTable& f, double c) {
    const Spectrum s = biased_transform(f, BiasVector::uniform(f.arity()));
    const double h = uniform_entropy(s);
    const double inf = total_influence(s);
    const double eps = variance(s);
    const double slack = 1e-10;
    // phi(c0) is exactly (1-eps) log2(1/(1-eps)) since c0^2 = 1 - eps.
    const bool intermediate = phi(s.coeff(0)) <= eps / std::log(2.0) + slack;
    const bool conclusion = h <= std::max(c, 1.0 / std::log(2.0)) * inf + slack;
    return intermediate && conclusion;
}

// --- sweep engine -------------------------------------------------------------

namespace {

bool witness_less(int arity_a, std::uint64_t fn_a, const std::vector<double>& mu_a,
                  int arity_b, std::uint64_t fn_b, const std::vector<double>& mu_b) {
    if (arity_a != arity_b) return arity_a < arity_b;
    if (fn_a != fn_b) return fn_a < fn_b;
    return mu_a < mu_b;
}

// Examine one (f, mu) pair: per-term bounds for every nonzero nonempty
// subset with every pivot, plus the assembled product-fei bound for the
// pair's own arity. Everything is computed from one transform.
void sweep_one(const TruthTable& f, const BiasVector& mu, const SweepOptions& opt,
               SweepSummary& out) {
    const int k = f.arity();
    const std::uint32_t n_masks = f.size();
    const Spectrum spec = biased_transform(f, mu, 1);

    double dvar[kMaxArity];
    for (int j = 0; j < k; ++j) dvar[j] = derivative_variance(f, mu, j);

    double log_sigma_coord[kMaxArity];
    for (int j = 0; j < k; ++j) log_sigma_coord[j] = std::log2(mu.sigma_sq(j));

    const double term_factor = std::exp2(2 * k) / std::log(2.0);

    double entropy_ge1 = 0.0, inf = 0.0, var = 0.0;
    for (std::uint32_t s = 1; s < n_masks; ++s) {
        const double c = spec.coeff(s);
        const double c2 = c * c;
        var += c2;
        inf += static_cast<double>(std::popcount(s)) * c2;
        if (std::abs(c) <= kSparseEps) continue;  // the lemma assumes c(S) != 0
        double log_sigma = 0.0;
        for (int j = 0; j < k; ++j)
            if ((s >> j) & 1u) log_sigma += log_sigma_coord[j];
        const double lhs = c2 * (log_sigma - std::log2(c2));
        entropy_ge1 += lhs;
        for (int j = 0; j < k; ++j) {
            if (!((s >> j) & 1u)) continue;
            const double rhs = term_factor * dvar[j];
            ++out.term_checks;
            if (rhs > kRatioEps) {
                const double r = lhs / rhs;
                if (r > out.max_term_ratio) out.max_term_ratio = r;
            }
            if (lhs > rhs + opt.slack) {
                out.violations.push_back({"term-bound", k, f.packed_bits(), mu.biases(),
                                          s, j, lhs, rhs});
            }
        }
    }

    ++out.functions;
    if (!out.min_entropy_ge1 || entropy_ge1 < *out.min_entropy_ge1)
        out.min_entropy_ge1 = entropy_ge1;

    const double gap = inf - var;
    const double cap = product_fei_constant(k);
    if (entropy_ge1 > cap * gap + opt.slack) {
        out.violations.push_back({"product-fei", k, f.packed_bits(), mu.biases(),
                                  0, -1, entropy_ge1, cap * gap});
    }
    if (gap >= kRatioEps) {
        const double r = entropy_ge1 / gap;
        if (!out.max_fei_plus || r > *out.max_fei_plus ||
            (r == *out.max_fei_plus &&
             witness_less(k, f.packed_bits(), mu.biases(), out.max_fei_plus_arity,
                          out.max_fei_plus_fn, out.max_fei_plus_mu))) {
            out.max_fei_plus = r;
            out.max_fei_plus_fn = f.packed_bits();
            out.max_fei_plus_arity = k;
            out.max_fei_plus_mu = mu.biases();
        }
    }
}

void finalize(SweepSummary& s) {
    std::sort(s.violations.begin(), s.violations.end(),
              [](const SweepViolation& a, const SweepViolation& b) {
                  if (a.kind != b.kind) return a.kind < b.kind;
                  if (a.arity != b.arity) return a.arity < b.arity;
                  if (a.fn_bits != b.fn_bits) return a.fn_bits < b.fn_bits;
                  if (a.mu != b.mu) return a.mu < b.mu;
                  if (a.subset != b.subset) return a.subset < b.subset;
                  return a.pivot < b.pivot;
              });
}

// Run `body(index, local_summary)` for index in [0, total) across jobs
// threads, then merge the per-thread partials. The merge rules are
// content-based (max/min/tie-breaks on the data itself), so the result does
// not depend on how indices were scheduled.
template <typename Body>
SweepSummary parallel_sweep(long long total, int jobs, Body body) {
    jobs = resolve_jobs(jobs);
#ifdef FEILAB_HAVE_OPENMP
    std::vector<SweepSummary> partial(static_cast<size_t>(std::max(jobs, 1)));
#pragma omp parallel num_threads(jobs)
    {
        SweepSummary& mine = partial[static_cast<size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 64)
        for (long long i = 0; i < total; ++i) body(i, mine);
    }
    SweepSummary out;
    for (auto& p : partial) merge_sweeps(out, p);
#else
    SweepSummary out;
    for (long long i = 0; i < total; ++i) body(i, out);
#endif
    finalize(out);
    return out;
}

} // namespace

void merge_sweeps(SweepSummary& a, const SweepSummary& b) {
    a.functions += b.functions;
    a.term_checks += b.term_checks;
    a.max_term_ratio = std::max(a.max_term_ratio, b.max_term_ratio);
    if (b.max_fei_plus) {
        if (!a.max_fei_plus || *b.max_fei_plus > *a.max_fei_plus ||
            (*b.max_fei_plus == *a.max_fei_plus &&
             witness_less(b.max_fei_plus_arity, b.max_fei_plus_fn, b.max_fei_plus_mu,
                          a.max_fei_plus_arity, a.max_fei_plus_fn, a.max_fei_plus_mu))) {
            a.max_fei_plus = b.max_fei_plus;
            a.max_fei_plus_fn = b.max_fei_plus_fn;
            a.max_fei_plus_arity = b.max_fei_plus_arity;
            a.max_fei_plus_mu = b.max_fei_plus_mu;
        }
    }
    if (b.min_entropy_ge1 &&
        (!a.min_entropy_ge1 || *b.min_entropy_ge1 < *a.min_entropy_ge1))
        a.min_entropy_ge1 = b.min_entropy_ge1;
    a.violations.insert(a.violations.end(), b.violations.begin(), b.violations.end());
}

SweepSummary term_bound_sweep_exhaustive(int max_arity, const std::vector<double>& levels,
                                         const SweepOptions& opt) {
    if (max_arity < 1 || max_arity > 4)
        throw std::invalid_argument("exhaustive sweep supports arity 1..4");
    if (levels.empty()) throw std::invalid_argument("empty bias grid");
    SweepSummary total;
    for (int k = 1; k <= max_arity; ++k) {
        const long long n_fns = 1ll << (1 << k);
        long long n_grid = 1;
        for (int i = 0; i < k; ++i) n_grid *= static_cast<long long>(levels.size());
        const long long n_pairs = n_fns * n_grid;
        SweepSummary part = parallel_sweep(n_pairs, opt.jobs, [&](long long idx, SweepSummary& out) {
            const std::uint64_t fn_bits = static_cast<std::uint64_t>(idx / n_grid);
            long long g = idx % n_grid;
            std::vector<double> mu(static_cast<size_t>(k));
            for (int i = 0; i < k; ++i) {
                mu[static_cast<size_t>(i)] = levels[static_cast<size_t>(g % levels.size())];
                g /= static_cast<long long>(levels.size());
            }
            sweep_one(TruthTable::from_packed_bits(k, fn_bits), BiasVector(std::move(mu)), opt, out);
        });
        merge_sweeps(total, part);
    }
    finalize(total);
    return total;
}

SweepSummary term_bound_sweep_random(int max_arity, long long samples, std::uint64_t seed,
                                     const SweepOptions& opt) {
    if (max_arity < 1 || max_arity > 6)
        throw std::invalid_argument("random sweep supports arity 1..6 "
                                    "(function ids are 64-bit packed tables)");
    if (samples < 1) throw std::invalid_argument("need at least one sample");
    return parallel_sweep(samples, opt.jobs, [&](long long i, SweepSummary& out) {
        Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(i)));
        const int k = 1 + static_cast<int>(i % max_arity);
        const TruthTable f = rng.table(k);
        const BiasVector mu = rng.biases(k, 0.9);
        sweep_one(f, mu, opt, out);
    });
}

} // namespace feilab
