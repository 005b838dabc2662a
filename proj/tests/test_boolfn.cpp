#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "feilab/boolfn.hpp"
#include "feilab/compose.hpp"
#include "feilab/rng.hpp"
#include "test_util.hpp"

using namespace feilab;

namespace {
// Insert bit `b01` for coordinate i into a reduced assignment index.
uint32_t expand_index(uint32_t reduced, int i, int b01) {
    const uint32_t low = reduced & ((1u << i) - 1u);
    const uint32_t high = reduced >> i;
    return low | (static_cast<uint32_t>(b01) << i) | (high << (i + 1));
}
} // namespace

TEST_SUITE("boolfn") {

TEST_CASE("truth table hex round-trip") {
    CHECK(make_and(2).to_hex() == "8");
    CHECK(TruthTable::from_hex(2, "8").value(3) == -1);
    CHECK(TruthTable::from_hex(2, "8").value(0) == +1);

    Rng rng(101);
    for (int n = 1; n <= 10; ++n) {
        const TruthTable f = testutil::random_table(n, rng);
        const std::string hex = f.to_hex();
        CHECK(hex.size() == ((size_t{1} << n) + 3) / 4);
        const TruthTable back = TruthTable::from_hex(n, hex);
        CHECK(back.values() == f.values());
    }
    CHECK_THROWS(TruthTable::from_hex(2, "80"));   // wrong digit count
    CHECK_THROWS(TruthTable::from_hex(2, "g"));    // not a hex digit
}

TEST_CASE("packed bits round-trip") {
    Rng rng(102);
    for (int n = 1; n <= 6; ++n) {
        const TruthTable f = testutil::random_table(n, rng);
        CHECK(TruthTable::from_packed_bits(n, f.packed_bits()).values() == f.values());
    }
    CHECK_THROWS(TruthTable::from_packed_bits(7, 0));
}

TEST_CASE("evaluate anchors") {
    const TruthTable x = make_xor(2);
    CHECK(x.value(0) == +1);  // both inputs False
    CHECK(x.value(1) == -1);
    CHECK(x.value(2) == -1);
    CHECK(x.value(3) == +1);  // two flips cancel

    // All-False point of the 6-variable witness: every disjunct needs some
    // True input, so the function is False (+1) there.
    CHECK(lower_bound_witness().value(0) == +1);
}

TEST_CASE("restriction anchors") {
    const TruthTable d = restrict_coordinate(make_xor(2), 0, +1);
    CHECK(d.arity() == 1);
    CHECK(d.value(0) == +1);
    CHECK(d.value(1) == -1);

    // Fixing one AND input to False pins the output to False.
    const TruthTable a = restrict_coordinate(make_and(2), 0, +1);
    CHECK(a.value(0) == +1);
    CHECK(a.value(1) == +1);

    // Majority with two equal fixed votes is constant.
    const TruthTable m1 = restrict_coordinate(make_maj3(), 2, +1);
    const TruthTable m2 = restrict_coordinate(m1, 1, +1);
    CHECK(m2.arity() == 1);
    CHECK(m2.value(0) == +1);
    CHECK(m2.value(1) == +1);
}

TEST_CASE("restriction matches the half-cube") {
    Rng rng(103);
    for (int n : {3, 7, 10}) {
        const TruthTable f = testutil::random_table(n, rng);
        for (int i = 0; i < n; ++i) {
            for (int b : {+1, -1}) {
                const TruthTable r = restrict_coordinate(f, i, b);
                REQUIRE(r.arity() == n - 1);
                const int bit = b == -1 ? 1 : 0;
                for (uint32_t a = 0; a < (1u << (n - 1)); ++a)
                    CHECK(r.value(a) == f.value(expand_index(a, i, bit)));
            }
        }
    }
}

TEST_CASE("derivative anchors and range") {
    // Dictator: D_1 is the constant +1 table.
    const RealTable d1 = discrete_derivative(make_dictator(3, 0), 0);
    for (double v : d1.data()) CHECK(v == 1.0);

    // Parity: D_1 equals the other variable.
    const RealTable dx = discrete_derivative(make_xor(2), 0);
    for (uint32_t a = 0; a < 4; ++a) {
        const double x2 = (a >> 1) & 1 ? -1.0 : 1.0;
        CHECK(dx.data()[a] == x2);
    }

    // AND2: exactly two nonzero derivative entries, both of magnitude 1.
    const RealTable da = discrete_derivative(make_and(2), 0);
    int nonzero = 0;
    for (double v : da.data())
        if (v != 0.0) {
            ++nonzero;
            CHECK(std::abs(v) == 1.0);
        }
    CHECK(nonzero == 2);

    Rng rng(104);
    const TruthTable f = testutil::random_table(6, rng);
    for (int i = 0; i < 6; ++i) {
        const RealTable d = discrete_derivative(f, i);
        for (uint32_t a = 0; a < 64; ++a) {
            const double v = d.data()[a];
            CHECK((v == -1.0 || v == 0.0 || v == 1.0));
            CHECK(d.data()[a | (1u << i)] == d.data()[a & ~(1u << i)]);
        }
    }
}

TEST_CASE("iterated derivative") {
    // Two derivative passes over parity leave the constant +1 table.
    const RealTable dd = iterated_derivative(make_xor(2), 0b11);
    for (double v : dd.data()) CHECK(v == 1.0);

    // Second derivative of a degree-1 function vanishes.
    const RealTable z = iterated_derivative(make_dictator(2, 0), 0b11);
    for (double v : z.data()) CHECK(v == 0.0);

    CHECK_THROWS(iterated_derivative(make_xor(2), 0));

    // Order independence: compare manual application orders, n = 6, |S| <= 3.
    Rng rng(105);
    const TruthTable f = testutil::random_table(6, rng);
    for (SubsetMask s = 1; s < 64; ++s) {
        std::vector<int> coords;
        for (int i = 0; i < 6; ++i)
            if ((s >> i) & 1u) coords.push_back(i);
        if (coords.size() > 3) continue;
        const RealTable forward = iterated_derivative(f, s);
        RealTable backward = discrete_derivative(f, coords.back());
        for (auto it = coords.rbegin() + 1; it != coords.rend(); ++it)
            backward = discrete_derivative(backward, *it);
        for (size_t a = 0; a < forward.data().size(); ++a)
            CHECK(forward.data()[a] == backward.data()[a]);
    }
}

TEST_CASE("mean anchors and multilinearity") {
    Rng rng(106);
    CHECK(mean(make_constant(3, +1), testutil::random_biases(3, rng)) == 1.0);
    CHECK(mean(lower_bound_witness(), BiasVector::uniform(6)) == 0.0);
    CHECK(mean(make_and(2), BiasVector::uniform(2)) == 0.5);

    // Bounded by the range of f, and affine in each coordinate bias.
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 5;
        const TruthTable f = testutil::random_table(n, rng);
        std::vector<double> base = testutil::random_biases(n, rng).biases();
        CHECK(std::abs(mean(f, BiasVector(base))) <= 1.0 + 1e-15);
        for (int j = 0; j < n; ++j) {
            auto at = [&](double t) {
                std::vector<double> mu = base;
                mu[j] = t;
                return mean(f, BiasVector(std::move(mu)));
            };
            const double m1 = at(-0.5), m2 = at(0.1), m3 = at(0.7);
            const double slope12 = (m2 - m1) / 0.6, slope13 = (m3 - m1) / 1.2;
            CHECK(std::abs(slope12 - slope13) < 1e-12);
        }
    }
}

TEST_CASE("bias vector basics") {
    const BiasVector mu({0.3, -0.4});
    CHECK(mu.sigma_sq(0) == doctest::Approx(0.91).epsilon(1e-15));
    CHECK(mu.sigma(1) == doctest::Approx(std::sqrt(0.84)).epsilon(1e-15));
    CHECK(!mu.is_uniform());
    CHECK(BiasVector::uniform(4).is_uniform());
    CHECK_THROWS(BiasVector({1.0}));
    CHECK_THROWS(BiasVector({-1.0 + 1e-12}));

    // Point probabilities form a distribution.
    Rng rng(107);
    const BiasVector b = testutil::random_biases(6, rng);
    double total = 0.0;
    for (uint32_t a = 0; a < 64; ++a) total += b.point_probability(a);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("negation and permutation helpers") {
    Rng rng(108);
    const TruthTable f = testutil::random_table(4, rng);
    const BiasVector mu = testutil::random_biases(4, rng);
    CHECK(mean(f.negated(), mu) == -mean(f, mu));

    // Negating an input coordinate mirrors the bias.
    std::vector<double> flipped = mu.biases();
    flipped[2] = -flipped[2];
    CHECK(mean(f.with_coordinate_negated(2), BiasVector(flipped)) ==
          doctest::Approx(mean(f, mu)).epsilon(1e-14));

    // New coordinate i reads old coordinate perm[i], so it inherits that bias.
    const std::vector<int> perm = {2, 0, 3, 1};
    const TruthTable g = f.with_coordinates_permuted(perm);
    std::vector<double> pmu(4);
    for (int i = 0; i < 4; ++i) pmu[i] = mu.bias(perm[i]);
    CHECK(mean(g, BiasVector(pmu)) == doctest::Approx(mean(f, mu)).epsilon(1e-14));
}

TEST_CASE("balance counters") {
    CHECK(make_xor(5).count_true() == 16);
    CHECK(make_xor(5).is_balanced());
    CHECK(!make_and(3).is_balanced());
    CHECK(make_and(3).count_true() == 1);
}

}
