#pragma once
// Deterministic random source for the search and sweep code.
//
// The contract is stronger than "seeded": the same seed must give the same
// draw sequence on every platform and toolchain, because search traces and
// sweep samples are part of reproducible reports. std::mt19937_64's raw
// output sequence is pinned down by the C++ standard, so we use it directly
// and do our own range reduction instead of std::uniform_int_distribution
// (whose mapping is implementation-defined). The first few outputs are
// frozen in a golden test.

#include <cstdint>
#include <random>

#include "feilab/boolfn.hpp"

namespace feilab {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, bound). Plain modulo: the tiny bias (< 2^-53 for the
    // bounds used here) is irrelevant next to cross-platform determinism.
    std::uint64_t below(std::uint64_t bound) { return gen_() % bound; }

    // Uniform double in [-r, r], built from the top 53 bits so the value is
    // an exact dyadic rational times r.
    double symmetric(double r) {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;  // [0,1)
        return (2.0 * u - 1.0) * r;
    }

    // A random +-1 table on `arity` inputs.
    TruthTable table(int arity) {
        TruthTable t(arity);
        std::uint64_t word = 0;
        int left = 0;
        for (std::uint32_t a = 0; a < t.size(); ++a) {
            if (left == 0) { word = gen_(); left = 64; }
            t.set_value(a, word & 1u ? -1 : +1);
            word >>= 1;
            --left;
        }
        return t;
    }

    // A random bias vector with every |mu_i| <= r (default keeps variances
    // comfortably away from 0 for numerically tight cross-checks).
    BiasVector biases(int arity, double r = 0.9) {
        std::vector<double> mu(static_cast<size_t>(arity));
        for (auto& m : mu) m = symmetric(r);
        return BiasVector(std::move(mu));
    }

    // Stable mixing for per-task seeds (splitmix64 finalizer).
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 gen_;
};

} // namespace feilab
