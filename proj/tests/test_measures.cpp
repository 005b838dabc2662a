#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "feilab/boolfn.hpp"
#include "feilab/fourier.hpp"
#include "feilab/measures.hpp"
#include "feilab/rng.hpp"
#include "test_util.hpp"

using namespace feilab;

TEST_SUITE("measures") {

TEST_CASE("phi basics") {
    CHECK(phi(0.0) == 0.0);
    CHECK(phi(1.0) == 0.0);
    CHECK(phi(-1.0) == 0.0);
    CHECK(phi(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(phi(-0.5) == phi(0.5));
    CHECK(phi(0.25) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("entropy anchors") {
    const Spectrum and2 = biased_transform(make_and(2), BiasVector::uniform(2));
    CHECK(uniform_entropy(and2) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(spectral_entropy_ge1(and2) == doctest::Approx(1.5).epsilon(1e-14));

    // Parity concentrates on one subset: zero entropy, influence n.
    for (int n : {2, 4, 7}) {
        const Spectrum x = biased_transform(make_xor(n), BiasVector::uniform(n));
        CHECK(std::abs(uniform_entropy(x)) < 1e-12);
        CHECK(total_influence(x) == doctest::Approx(n).epsilon(1e-13));
    }

    CHECK_THROWS(uniform_entropy(biased_transform(make_and(2), BiasVector({0.2, 0.0}))));
}

TEST_CASE("entropy decompositions") {
    Rng rng(301);
    for (int trial = 0; trial < 25; ++trial) {
        const TruthTable f = testutil::random_table(6, rng);
        const Spectrum u = biased_transform(f, BiasVector::uniform(6));
        // At the uniform measure, dropping the empty set costs exactly phi of
        // the mean coefficient.
        CHECK(std::abs(spectral_entropy_ge1(u) -
                       (uniform_entropy(u) - phi(u.coeff(0)))) < 1e-10);
        // And the all-subsets biased entropy reduces to the uniform one.
        CHECK(std::abs(spectral_entropy_all(u) - uniform_entropy(u)) < 1e-12);
        CHECK(std::abs(raw_phi_entropy(u) - uniform_entropy(u)) < 1e-12);
    }

    // At a biased measure the sigma^2 products enter the >=1 entropy: check
    // one term by hand on the dictator, where the only live subset is {1}.
    const BiasVector mu({0.6});
    const Spectrum d = biased_transform(make_dictator(1, 0), mu);
    const double c = d.coeff(1);
    CHECK(std::abs(spectral_entropy_ge1(d) -
                   c * c * std::log2(mu.sigma_sq(0) / (c * c))) < 1e-14);
    CHECK(std::abs(raw_phi_entropy(d) - (phi(d.coeff(0)) + phi(c))) < 1e-14);
}

TEST_CASE("influence anchors") {
    CHECK(total_influence(biased_transform(make_dictator(4, 2), BiasVector::uniform(4))) ==
          doctest::Approx(1.0).epsilon(1e-14));
    const Spectrum and2 = biased_transform(make_and(2), BiasVector::uniform(2));
    CHECK(total_influence(and2) == doctest::Approx(1.0).epsilon(1e-14));
    const Spectrum maj = biased_transform(make_maj3(), BiasVector::uniform(3));
    CHECK(total_influence(maj) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(coordinate_influence(maj, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("combinatorial influence equals the Fourier formula") {
    Rng rng(302);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(8));
        const TruthTable f = testutil::random_table(n, rng);
        const BiasVector mu = testutil::random_biases(n, rng);
        const Spectrum s = biased_transform(f, mu);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double comb = coordinate_influence_combinatorial(f, mu, i);
            CHECK(std::abs(comb - coordinate_influence(s, i)) < 1e-12);
            sum += comb;
        }
        const double total = total_influence_combinatorial(f, mu);
        CHECK(std::abs(total - sum) < 1e-12);
        CHECK(std::abs(total - total_influence(s)) < 1e-12);
    }
}

TEST_CASE("uniform influence is the exact flip probability") {
    CHECK(flip_disagreements(make_and(2), 0) == 2);
    Rng rng(303);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(8));
        const TruthTable f = testutil::random_table(n, rng);
        const BiasVector mu = BiasVector::uniform(n);
        for (int i = 0; i < n; ++i) {
            const double exact =
                static_cast<double>(flip_disagreements(f, i)) / f.size();
            // Dyadic on both sides: equality must be bit-for-bit.
            CHECK(coordinate_influence_combinatorial(f, mu, i) == exact);
        }
    }
}

TEST_CASE("variance and the Poincare inequality") {
    Rng rng(304);
    CHECK(poincare_gap(biased_transform(make_xor(2), BiasVector::uniform(2))) ==
          doctest::Approx(1.0).epsilon(1e-14));
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(6));
        const TruthTable f = testutil::random_table(n, rng);
        const BiasVector mu = testutil::random_biases(n, rng);
        const Spectrum s = biased_transform(f, mu);
        CHECK(std::abs(variance(s) - variance_direct(f, mu)) < 1e-10);
        CHECK(poincare_gap(s) >= -1e-12);
        CHECK(std::abs(poincare_gap(s) - (total_influence(s) - variance(s))) < 1e-12);
    }
}

TEST_CASE("entropy and influence are negation-invariant") {
    Rng rng(305);
    // Exhaustive over all 3-variable functions at the uniform measure.
    for (uint64_t bits = 0; bits < 256; ++bits) {
        const TruthTable f = TruthTable::from_packed_bits(3, bits);
        const Spectrum a = biased_transform(f, BiasVector::uniform(3));
        const Spectrum b = biased_transform(f.negated(), BiasVector::uniform(3));
        CHECK(std::abs(uniform_entropy(a) - uniform_entropy(b)) < 1e-12);
        CHECK(std::abs(total_influence(a) - total_influence(b)) < 1e-12);
    }
    // Random biased spot-checks at n = 4.
    for (int trial = 0; trial < 20; ++trial) {
        const TruthTable f = testutil::random_table(4, rng);
        const BiasVector mu = testutil::random_biases(4, rng);
        const Spectrum a = biased_transform(f, mu);
        const Spectrum b = biased_transform(f.negated(), mu);
        CHECK(std::abs(spectral_entropy_ge1(a) - spectral_entropy_ge1(b)) < 1e-12);
        CHECK(std::abs(total_influence(a) - total_influence(b)) < 1e-12);
    }
}

TEST_CASE("degree-two tail is controlled by the Poincare gap") {
    Rng rng(306);
    for (int trial = 0; trial < 40; ++trial) {
        const TruthTable f = testutil::random_table(6, rng);
        const BiasVector mu = testutil::random_biases(6, rng);
        const Spectrum s = biased_transform(f, mu);
        double tail = 0.0;
        for (SubsetMask m = 0; m < 64; ++m) {
            const int size = std::popcount(static_cast<uint64_t>(m));
            if (size >= 2) tail += size * s.coeff(m) * s.coeff(m);
        }
        CHECK(tail <= 2.0 * poincare_gap(s) + 1e-10);

        // The same tail splits across coordinates as derivative variances.
        double dv_sum = 0.0;
        for (int j = 0; j < 6; ++j) {
            const double dv = derivative_variance(f, mu, j);
            double fourier = 0.0;
            for (SubsetMask m = 0; m < 64; ++m)
                if (((m >> j) & 1u) &&
                    std::popcount(static_cast<uint64_t>(m)) >= 2)
                    fourier += s.coeff(m) * s.coeff(m);
            CHECK(std::abs(dv - fourier) < 1e-12);
            dv_sum += dv;
        }
        CHECK(std::abs(dv_sum - tail) < 1e-10);
    }
}

TEST_CASE("derivative variance anchors") {
    // A dictator has flat derivatives: no degree->=2 weight anywhere.
    const BiasVector mu({0.3, -0.5});
    CHECK(std::abs(derivative_variance(make_dictator(2, 0), mu, 0)) < 1e-14);
    CHECK(std::abs(derivative_variance(make_dictator(2, 0), mu, 1)) < 1e-14);
    // Parity at uniform: D_1 = x_2, so sigma^2 Var[D_1] = 1.
    CHECK(derivative_variance(make_xor(2), BiasVector::uniform(2), 0) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("measure report is internally consistent") {
    Rng rng(307);
    const TruthTable f = testutil::random_table(6, rng);
    const BiasVector mu = testutil::random_biases(6, rng);
    const MeasureReport rep = compute_measures(f, mu);
    CHECK(rep.arity == 6);
    CHECK(rep.influence_discrepancy < 1e-12);
    CHECK(!rep.uniform_entropy.has_value());
    double per_sum = 0.0;
    for (double v : rep.per_coordinate_influence) per_sum += v;
    CHECK(std::abs(per_sum - rep.total_influence) < 1e-10);

    const MeasureReport uni = compute_measures(f, BiasVector::uniform(6));
    CHECK(uni.uniform_entropy.has_value());
    CHECK(std::abs(*uni.uniform_entropy -
                   (uni.spectral_entropy_ge1 +
                    phi(mean(f, BiasVector::uniform(6))))) < 1e-10);
}

}
