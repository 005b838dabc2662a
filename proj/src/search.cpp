#include "feilab/search.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

#include "feilab/fei.hpp"
#include "feilab/fourier.hpp"
#include "feilab/measures.hpp"
#include "feilab/parallel.hpp"
#include "feilab/rng.hpp"

#ifdef FEILAB_HAVE_OPENMP
#include <omp.h>
#endif

namespace feilab {
namespace {

// Entropy accumulated over the sorted squared coefficients: the sum depends
// only on the multiset of c^2 values, so symmetry-equivalent functions get
// bit-identical entropies (the quotient optimization relies on this).
double sorted_uniform_entropy(const Spectrum& sp) {
    std::vector<double> sq;
    sq.reserve(sp.coeffs().size());
    for (double c : sp.coeffs())
        if (c != 0.0) sq.push_back(c * c);
    std::sort(sq.begin(), sq.end());
    double h = 0.0;
    for (double s : sq) h += s * std::log2(1.0 / s);
    return h;
}

// Total influence as an exactly-dyadic sum (uniform coefficients of an
// arity-<=4 table are multiples of 2^-4), so summation order is immaterial.
double dyadic_influence(const Spectrum& sp) {
    double inf = 0.0;
    for (SubsetMask s = 0; s < sp.coeffs().size(); ++s)
        inf += static_cast<double>(std::popcount(s)) * sp.coeff(s) * sp.coeff(s);
    return inf;
}

std::vector<uint64_t> balanced_function_ids(int arity) {
    // All ways to choose 2^(arity-1) TRUE points out of 2^arity.
    const int size = 1 << arity;
    const int half = size / 2;
    std::vector<uint64_t> ids;
    uint64_t v = (uint64_t{1} << half) - 1;
    const uint64_t limit = uint64_t{1} << size;
    while (v < limit) {
        ids.push_back(v);
        const uint64_t c = v & (~v + 1);
        const uint64_t r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    return ids;
}

struct ScanPartial {
    double best_ratio = -1.0;
    uint64_t best_id = 0;
    bool any = false;
    std::map<int, uint64_t> hist;
    uint64_t scanned = 0;
    uint64_t undefined = 0;

    void offer(double ratio, uint64_t id) {
        if (!any || ratio > best_ratio || (ratio == best_ratio && id < best_id)) {
            best_ratio = ratio;
            best_id = id;
            any = true;
        }
    }
    void absorb(const ScanPartial& other) {
        if (other.any) offer(other.best_ratio, other.best_id);
        for (const auto& [bin, count] : other.hist) hist[bin] += count;
        scanned += other.scanned;
        undefined += other.undefined;
    }
};

} // namespace

uint64_t canonical_function_id(uint64_t bits, int arity) {
    if (arity < 1 || arity > 4)
        throw std::invalid_argument("canonical ids support arity 1..4");
    const int size = 1 << arity;
    const uint64_t full = (size == 64) ? ~uint64_t{0} : (uint64_t{1} << size) - 1;
    std::vector<int> perm(arity);
    for (int i = 0; i < arity; ++i) perm[i] = i;
    uint64_t best = ~uint64_t{0};
    do {
        std::vector<int> amap(size);
        for (int a = 0; a < size; ++a) {
            int b = 0;
            for (int i = 0; i < arity; ++i)
                if (a >> i & 1) b |= 1 << perm[i];
            amap[a] = b;
        }
        for (int neg = 0; neg < size; ++neg) {
            uint64_t g = 0;
            for (int a = 0; a < size; ++a)
                if (bits >> (amap[a] ^ neg) & 1) g |= uint64_t{1} << a;
            best = std::min({best, g, ~g & full});
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

ScanResult exhaustive_max_fei(int arity, SearchConstraint constraint, bool quotient,
                              int jobs) {
    if (arity < 1 || arity > 4)
        throw std::invalid_argument("exhaustive scan supports arity 1..4");
    std::vector<uint64_t> ids;
    if (constraint == SearchConstraint::kBalanced) {
        ids = balanced_function_ids(arity);
    } else {
        ids.resize(uint64_t{1} << (1 << arity));
        for (uint64_t i = 0; i < ids.size(); ++i) ids[i] = i;
    }

    const int threads = resolve_jobs(jobs);
    std::vector<ScanPartial> partials(std::max(threads, 1));
    const BiasVector uniform = BiasVector::uniform(arity);
    const int64_t count = static_cast<int64_t>(ids.size());
#ifdef FEILAB_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 256) num_threads(threads) if (threads > 1)
#endif
    for (int64_t t = 0; t < count; ++t) {
        ScanPartial& p = partials[
#ifdef FEILAB_HAVE_OPENMP
            omp_get_thread_num()
#else
            0
#endif
        ];
        const uint64_t id = ids[t];
        if (quotient && canonical_function_id(id, arity) != id) continue;
        p.scanned += 1;
        const Spectrum sp = biased_transform(TruthTable::from_packed_bits(arity, id), uniform);
        const double inf = dyadic_influence(sp);
        if (inf <= kRatioEps) {
            p.undefined += 1;
            continue;
        }
        const double ratio = sorted_uniform_entropy(sp) / inf;
        p.hist[static_cast<int>(std::floor(ratio / 0.25))] += 1;
        p.offer(ratio, id);
    }

    ScanPartial all;
    for (const ScanPartial& p : partials) all.absorb(p);
    ScanResult out;
    out.best = TruthTable::from_packed_bits(arity, all.any ? all.best_id : 0);
    out.best_ratio = all.any ? all.best_ratio : 0.0;
    out.any_defined = all.any;
    out.histogram.bins.assign(all.hist.begin(), all.hist.end());
    out.scanned = all.scanned;
    out.undefined_count = all.undefined;
    return out;
}

WorstCaseResult worst_case_product_fei(int arity, const std::vector<double>& levels,
                                       int jobs) {
    if (arity < 1 || arity > 4)
        throw std::invalid_argument("worst-case scan supports arity 1..4");
    for (double v : levels)
        if (!(std::abs(v) <= 1.0 - kBiasGuard))
            throw std::invalid_argument("grid levels must lie in (-1, 1)");

    const uint64_t functions = uint64_t{1} << (1 << arity);
    uint64_t grid_points = 1;
    if (!levels.empty())
        for (int i = 0; i < arity; ++i) grid_points *= levels.size();

    struct Partial {
        double best = -1.0;
        uint64_t fn = 0;
        uint64_t grid = 0;
        bool any = false;
        uint64_t evaluated = 0;
        void offer(double ratio, uint64_t f, uint64_t g) {
            if (!any || ratio > best || (ratio == best && (f < fn || (f == fn && g < grid)))) {
                best = ratio;
                fn = f;
                grid = g;
                any = true;
            }
        }
    };
    const int threads = resolve_jobs(jobs);
    std::vector<Partial> partials(std::max(threads, 1));
    const int64_t total = static_cast<int64_t>(functions * grid_points);

#ifdef FEILAB_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads) if (threads > 1)
#endif
    for (int64_t t = 0; t < total; ++t) {
        Partial& p = partials[
#ifdef FEILAB_HAVE_OPENMP
            omp_get_thread_num()
#else
            0
#endif
        ];
        const uint64_t fn = static_cast<uint64_t>(t) / grid_points;
        const uint64_t grid = static_cast<uint64_t>(t) % grid_points;
        std::vector<double> mu(arity, 0.0);
        if (!levels.empty()) {
            uint64_t g = grid;
            for (int i = 0; i < arity; ++i) {
                mu[i] = levels[g % levels.size()];
                g /= levels.size();
            }
        }
        const Spectrum sp =
            biased_transform(TruthTable::from_packed_bits(arity, fn), BiasVector(mu));
        if (auto ratio = fei_plus_ratio(sp)) {
            p.evaluated += 1;
            p.offer(*ratio, fn, grid);
        }
    }

    Partial all;
    for (const Partial& p : partials) {
        if (p.any) all.offer(p.best, p.fn, p.grid);
        all.evaluated += p.evaluated;
    }
    WorstCaseResult out;
    out.function = TruthTable::from_packed_bits(arity, all.any ? all.fn : 0);
    out.mu.assign(arity, 0.0);
    if (!levels.empty() && all.any) {
        uint64_t g = all.grid;
        for (int i = 0; i < arity; ++i) {
            out.mu[i] = levels[g % levels.size()];
            g /= levels.size();
        }
    }
    out.observed = all.any ? all.best : 0.0;
    out.bound = product_fei_constant(arity);
    out.evaluated = all.evaluated;
    return out;
}

// --- hill-climb -------------------------------------------------------------------

double search_objective(const TruthTable& f, SearchConstraint constraint) {
    const Spectrum sp = biased_transform(f, BiasVector::uniform(f.arity()));
    const double h = spectral_entropy_all(sp);
    const double inf = total_influence(sp);
    if (constraint == SearchConstraint::kBalanced && f.is_balanced() &&
        inf > 1.0 + 1e-9)
        return h / (inf - 1.0);
    if (inf > kRatioEps) return h / inf;
    return 0.0;
}

namespace {

struct RestartOutcome {
    TruthTable best;
    double objective = 0.0;
    std::vector<TraceEntry> trace;
    uint64_t evaluations = 0;
    RestartOutcome() : best(1, +1) {}
};

constexpr int kFullEnumerationLimit = 256;  // table entries
constexpr int kSampledProposals = 128;

// One move: flip position `a`, or swap values at `a` and `b` when b >= 0.
struct Move {
    int64_t a = -1;
    int64_t b = -1;
};

double evaluate_move(TruthTable& f, const Move& m, SearchConstraint constraint) {
    const int va = f.value(m.a);
    f.set_value(m.a, -va);
    int vb = 0;
    if (m.b >= 0) {
        vb = f.value(m.b);
        f.set_value(m.b, -vb);
    }
    const double obj = search_objective(f, constraint);
    f.set_value(m.a, va);
    if (m.b >= 0) f.set_value(m.b, vb);
    return obj;
}

RestartOutcome run_restart(const LocalSearchOptions& o, int restart) {
    Rng rng(Rng::mix(o.seed, static_cast<uint64_t>(restart)));
    const int64_t size = int64_t{1} << o.arity;
    const bool balanced = o.constraint == SearchConstraint::kBalanced;

    RestartOutcome out;
    TruthTable f(o.arity, +1);
    if (balanced) {
        std::vector<int64_t> order(size);
        for (int64_t a = 0; a < size; ++a) order[a] = a;
        for (int64_t i = 0; i < size / 2; ++i) {
            const int64_t j =
                i + static_cast<int64_t>(rng.below(static_cast<uint64_t>(size - i)));
            std::swap(order[i], order[j]);
            f.set_value(order[i], -1);
        }
    } else {
        uint64_t word = 0;
        for (int64_t a = 0; a < size; ++a) {
            if (a % 64 == 0) word = rng.next_u64();
            f.set_value(a, (word >> (a % 64) & 1) ? -1 : +1);
        }
    }

    double obj = search_objective(f, o.constraint);
    out.evaluations += 1;
    out.trace.push_back({restart, 0, obj});

    std::vector<int64_t> trues, falses;
    const auto refresh_sides = [&] {
        trues.clear();
        falses.clear();
        for (int64_t a = 0; a < size; ++a)
            (f.value(a) < 0 ? trues : falses).push_back(a);
    };

    for (int step = 1; step <= o.max_steps; ++step) {
        Move best_move;
        double best_obj = obj;
        const auto consider = [&](const Move& m) {
            const double cand = evaluate_move(f, m, o.constraint);
            out.evaluations += 1;
            if (cand > best_obj) {
                best_obj = cand;
                best_move = m;
            }
        };

        if (size <= kFullEnumerationLimit) {
            if (balanced) {
                refresh_sides();
                for (int64_t t : trues)
                    for (int64_t u : falses) consider({t, u});
            } else {
                for (int64_t a = 0; a < size; ++a) consider({a, -1});
            }
        } else {
            refresh_sides();
            for (int p = 0; p < kSampledProposals; ++p) {
                if (balanced) {
                    consider({trues[rng.below(trues.size())],
                              falses[rng.below(falses.size())]});
                } else {
                    consider({static_cast<int64_t>(
                                  rng.below(static_cast<uint64_t>(size))),
                              -1});
                }
            }
        }

        if (best_move.a < 0) break;  // local optimum
        f.set_value(best_move.a, -f.value(best_move.a));
        if (best_move.b >= 0) f.set_value(best_move.b, -f.value(best_move.b));
        obj = best_obj;
        out.trace.push_back({restart, step, obj});
    }

    out.best = std::move(f);
    out.objective = obj;
    return out;
}

} // namespace

LocalSearchResult local_search_max_ratio(const LocalSearchOptions& options) {
    if (options.arity < 1 || options.arity > 16)
        throw std::invalid_argument("local search supports arity 1..16");
    if (options.restarts < 1)
        throw std::invalid_argument("local search needs at least one restart");
    if (options.max_steps < 0)
        throw std::invalid_argument("negative step budget");

    std::vector<RestartOutcome> outcomes(options.restarts);
    const int threads = std::min(resolve_jobs(options.jobs), options.restarts);
#ifdef FEILAB_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads > 1)
#endif
    for (int r = 0; r < options.restarts; ++r) outcomes[r] = run_restart(options, r);

    LocalSearchResult out;
    out.best = outcomes[0].best;
    out.best_objective = outcomes[0].objective;
    out.best_restart = 0;
    for (int r = 1; r < options.restarts; ++r) {
        if (outcomes[r].objective > out.best_objective) {
            out.best = outcomes[r].best;
            out.best_objective = outcomes[r].objective;
            out.best_restart = r;
        }
    }
    for (const RestartOutcome& o : outcomes) {
        out.trace.insert(out.trace.end(), o.trace.begin(), o.trace.end());
        out.evaluations += o.evaluations;
    }
    return out;
}

} // namespace feilab
