// Timing comparison of the three transform paths: the naive O(4^n) reference
// summation, the fast butterfly run serially, and the fast butterfly run with
// a thread team. Checks agreement while it measures.
//
// Usage: bench_transform [max_arity] [repeats]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "feilab/boolfn.hpp"
#include "feilab/fourier.hpp"
#include "feilab/parallel.hpp"
#include "feilab/rng.hpp"

namespace {

using namespace feilab;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

TruthTable random_function(int n, Rng& rng) {
    std::vector<int8_t> values(size_t{1} << n);
    for (auto& v : values) v = rng.below(2) ? int8_t{-1} : int8_t{1};
    return TruthTable::from_values(n, values);
}

BiasVector random_biases(int n, Rng& rng) {
    std::vector<double> mu(n);
    for (double& m : mu) m = rng.symmetric(0.9);
    return BiasVector(std::move(mu));
}

double max_abs_diff(const Spectrum& a, const Spectrum& b) {
    double worst = 0.0;
    const auto& ca = a.coeffs();
    const auto& cb = b.coeffs();
    for (size_t i = 0; i < ca.size(); ++i)
        worst = std::max(worst, std::abs(ca[i] - cb[i]));
    return worst;
}

} // namespace

int main(int argc, char** argv) {
    const int max_arity = argc > 1 ? std::atoi(argv[1]) : 22;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
    const int threads = resolve_jobs(0);

    std::printf("transform benchmark: naive vs fast-serial vs fast-parallel (%d threads)\n",
                threads);
    std::printf("%4s %12s %14s %16s %10s %12s\n", "n", "naive_ms", "fast_serial_ms",
                "fast_parallel_ms", "speedup", "max_abs_diff");

    Rng rng(20260821);
    for (int n = 8; n <= max_arity; n += 2) {
        const TruthTable f = random_function(n, rng);
        const BiasVector mu = random_biases(n, rng);

        double naive_ms = -1.0, serial_ms = 1e300, parallel_ms = 1e300;
        double check = 0.0;

        Spectrum serial = biased_transform(f, mu, 1);
        if (n <= 12) {
            const auto t0 = Clock::now();
            const Spectrum naive = biased_transform_naive(f, mu);
            naive_ms = seconds_since(t0) * 1e3;
            check = std::max(check, max_abs_diff(naive, serial));
        }
        for (int r = 0; r < repeats; ++r) {
            auto t0 = Clock::now();
            Spectrum s1 = biased_transform(f, mu, 1);
            serial_ms = std::min(serial_ms, seconds_since(t0) * 1e3);

            t0 = Clock::now();
            Spectrum sp = biased_transform(f, mu, 0);
            parallel_ms = std::min(parallel_ms, seconds_since(t0) * 1e3);
            check = std::max(check, max_abs_diff(s1, sp));
        }

        std::string naive_cell = naive_ms < 0 ? "-" : std::to_string(naive_ms);
        std::printf("%4d %12s %14.3f %16.3f %9.2fx %12.3e\n", n, naive_cell.c_str(),
                    serial_ms, parallel_ms, serial_ms / parallel_ms, check);
        if (check > 1e-11) {
            std::fprintf(stderr, "path disagreement above 1e-11 at n=%d\n", n);
            return 1;
        }
    }
    return 0;
}
