#pragma once
// Core value types for functions on the hypercube {-1,+1}^n and the product
// measures they are analyzed under.
//
// Conventions, fixed once and used by every module and file format:
//   * logical TRUE is -1 and FALSE is +1, so XOR is a product of inputs and
//     a "balanced" function has equally many -1 and +1 outputs;
//   * an assignment of n inputs is an n-bit index a, where bit i-1 of a is
//     set exactly when x_i = -1 (bit 0 <-> x_1);
//   * in code, coordinates are 0-based (0..n-1); the CLI and the formula
//     language name them x1..xn;
//   * a subset S of coordinates is a bitmask (bit i <-> coordinate i).
//
// All types here are immutable value types in spirit: operations never
// mutate their inputs and the results are safe to share across threads.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace feilab {

using SubsetMask = std::uint64_t;

// Dense tables are capped at 24 inputs (128 MiB of doubles); anything larger
// must go through the composition closed forms instead of materializing.
inline constexpr int kMaxArity = 24;

// Biases are kept away from +-1 by this guard: at |mu_i| = 1 the coordinate
// variance vanishes and the biased basis (and every ratio built on it)
// degenerates, so such inputs are rejected rather than treated as limits.
inline constexpr double kBiasGuard = 1e-9;

// Coefficients at or below this magnitude count as zero when sparsifying a
// spectrum: well above double-precision noise, well below honest round-off.
inline constexpr double kSparseEps = 1e-13;

// Denominators below this make a ratio "undefined" (a first-class outcome,
// never NaN): constants and dictators legitimately hit it in sweeps.
inline constexpr double kRatioEps = 1e-12;

// Product measure on {-1,+1}^n: independent coordinates with E[x_i] = mu_i,
// hence Pr[x_i = +1] = (1+mu_i)/2 and coordinate variance sigma_i^2 = 1-mu_i^2.
class BiasVector {
public:
    explicit BiasVector(std::vector<double> biases);
    static BiasVector uniform(int arity);                 // all mu_i = 0
    static BiasVector constant(int arity, double mu);     // all mu_i equal

    int arity() const { return static_cast<int>(mu_.size()); }
    double bias(int i) const { return mu_.at(static_cast<size_t>(i)); }
    double sigma_sq(int i) const { double m = bias(i); return 1.0 - m * m; }
    double sigma(int i) const;
    bool is_uniform() const;
    const std::vector<double>& biases() const { return mu_; }

    // Pr_mu[a] = prod_i (1 + x_i(a) mu_i)/2.
    double point_probability(std::uint32_t a) const;

    // The biases of coordinates [lo, lo+len), as their own vector.
    BiasVector slice(int lo, int len) const;

private:
    std::vector<double> mu_;
};

// A Boolean function as a packed array of +-1 values indexed by assignment.
class TruthTable {
public:
    explicit TruthTable(int arity, int fill = +1);
    static TruthTable from_values(int arity, const std::vector<std::int8_t>& values);

    // Truth-table file payload: the 2^n value bits (1 <-> value -1) packed
    // little-endian by assignment index and rendered as a hex string of
    // exactly ceil(2^n/4) digits. Round-trips bit-exactly.
    static TruthTable from_hex(int arity, const std::string& hex);
    std::string to_hex() const;

    int arity() const { return arity_; }
    std::uint32_t size() const { return std::uint32_t(1) << arity_; }
    int value(std::uint32_t a) const;
    void set_value(std::uint32_t a, int v);

    std::uint64_t count_true() const;            // number of -1 entries
    bool is_balanced() const;                    // exact integer check
    // The packed value bits as a single word — the compact function id used
    // by sweeps and search. Both directions require arity <= 6.
    std::uint64_t packed_bits() const;
    static TruthTable from_packed_bits(int arity, std::uint64_t bits);

    TruthTable negated() const;                  // f -> -f
    TruthTable with_coordinate_negated(int i) const;  // x_i -> -x_i
    TruthTable with_coordinates_permuted(const std::vector<int>& perm) const;

    bool operator==(const TruthTable& o) const { return arity_ == o.arity_ && values_ == o.values_; }

    const std::vector<std::int8_t>& values() const { return values_; }

private:
    int arity_;
    std::vector<std::int8_t> values_;
};

// A real-valued function on the hypercube (derivatives, normalized lifts,
// inverse transforms land here). Same indexing as TruthTable.
class RealTable {
public:
    explicit RealTable(int arity, double fill = 0.0);
    static RealTable from_values(int arity, std::vector<double> values);
    explicit RealTable(const TruthTable& t);

    int arity() const { return arity_; }
    std::uint32_t size() const { return std::uint32_t(1) << arity_; }
    double value(std::uint32_t a) const;
    void set_value(std::uint32_t a, double v);

    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }

private:
    int arity_;
    std::vector<double> values_;
};

// --- pointwise operations -------------------------------------------------

// f with x_{i+1} fixed to b in {-1,+1}; remaining coordinates keep their
// relative order (coordinate j > i becomes j-1).
TruthTable restrict_coordinate(const TruthTable& f, int i, int b);
RealTable restrict_coordinate(const RealTable& f, int i, int b);

// D_i f at every a: (f(a with bit i clear) - f(a with bit i set)) / 2.
// Stored at full arity n (constant in coordinate i) so that iterated
// derivatives never renumber coordinates. For Boolean f entries are in
// {-1, 0, +1}.
RealTable discrete_derivative(const TruthTable& f, int i);
RealTable discrete_derivative(const RealTable& f, int i);

// Composition of discrete_derivative over all i in S; order-independent.
RealTable iterated_derivative(const TruthTable& f, SubsetMask s);
RealTable iterated_derivative(const RealTable& f, SubsetMask s);

// E_mu[f], by contracting one coordinate at a time (exact summation; the
// rounding sequence matches the transform's empty-set path, so this agrees
// with that coefficient to the last bit).
double mean(const TruthTable& f, const BiasVector& mu);
double mean(const RealTable& f, const BiasVector& mu);
double mean_of_square(const TruthTable& f, const BiasVector& mu);
double mean_of_square(const RealTable& f, const BiasVector& mu);

// E_mu[f^2] - E_mu[f]^2 straight from the table (no spectrum).
double variance_direct(const TruthTable& f, const BiasVector& mu);
double variance_direct(const RealTable& f, const BiasVector& mu);

// --- stock functions --------------------------------------------------------

TruthTable make_constant(int arity, int v);
TruthTable make_dictator(int arity, int i);   // f = x_{i+1}
TruthTable make_not1();                       // 1-input negation
TruthTable make_and(int arity);               // TRUE iff all inputs TRUE
TruthTable make_or(int arity);                // TRUE iff any input TRUE
TruthTable make_xor(int arity);               // product of inputs
TruthTable make_maj3();                       // majority of three

} // namespace feilab
