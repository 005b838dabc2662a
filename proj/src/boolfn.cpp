#include "feilab/boolfn.hpp"

#include <bit>
#include <cmath>

namespace feilab {

namespace {

void check_arity(int arity) {
    if (arity < 1 || arity > kMaxArity)
        throw std::invalid_argument("arity must be in [1, " + std::to_string(kMaxArity) +
                                    "], got " + std::to_string(arity));
}

void check_coordinate(int arity, int i) {
    if (i < 0 || i >= arity)
        throw std::invalid_argument("coordinate " + std::to_string(i) +
                                    " out of range for arity " + std::to_string(arity));
}

int hex_digit_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

// Removes coordinate i from the index space once the table is constant in it.
template <typename Vec>
Vec drop_coordinate(const Vec& in, int arity, int i, int keep_bit) {
    const std::uint32_t bit = std::uint32_t(1) << i;
    const std::uint32_t low_mask = bit - 1;
    Vec out(std::size_t(1) << (arity - 1));
    for (std::uint32_t y = 0; y < out.size(); ++y) {
        std::uint32_t a = ((y & ~low_mask) << 1) | (y & low_mask);
        if (keep_bit) a |= bit;
        out[y] = in[a];
    }
    return out;
}

// One step of E_mu: average out coordinate i of a 2^m-entry buffer, leaving
// a 2^(m-1)-entry buffer over the remaining coordinates.
void contract_lowest(std::vector<double>& buf, double mu_low) {
    const double p = 0.5 * (1.0 + mu_low);  // weight of x = +1 (bit clear)
    const double q = 0.5 * (1.0 - mu_low);
    const std::size_t half = buf.size() / 2;
    for (std::size_t y = 0; y < half; ++y)
        buf[y] = p * buf[2 * y] + q * buf[2 * y + 1];
    buf.resize(half);
}

double contract_mean(std::vector<double> buf, const BiasVector& mu) {
    // Contract coordinate 0 first each time; after step i the buffer is
    // indexed by coordinates i+1..n-1, so the next lowest bias is mu(i).
    // Iterating lowest-coordinate-first keeps the rounding sequence identical
    // to the transform butterfly's empty-set path.
    for (int i = 0; i < mu.arity(); ++i) {
        // After i contractions the buffer's lowest coordinate is original i,
        // but entries are laid out pairwise (bit 0 of the current index is
        // the current lowest coordinate), which contract_lowest expects.
        contract_lowest(buf, mu.bias(i));
    }
    return buf[0];
}

} // namespace

// --- BiasVector -------------------------------------------------------------

BiasVector::BiasVector(std::vector<double> biases) : mu_(std::move(biases)) {
    check_arity(static_cast<int>(mu_.size()));
    for (double m : mu_) {
        if (!std::isfinite(m) || std::abs(m) > 1.0 - kBiasGuard)
            throw std::invalid_argument("bias out of range: |mu_i| must be <= 1 - 1e-9");
    }
}

BiasVector BiasVector::uniform(int arity) {
    return BiasVector(std::vector<double>(static_cast<size_t>(arity), 0.0));
}

BiasVector BiasVector::constant(int arity, double mu) {
    return BiasVector(std::vector<double>(static_cast<size_t>(arity), mu));
}

double BiasVector::sigma(int i) const { return std::sqrt(sigma_sq(i)); }

bool BiasVector::is_uniform() const {
    for (double m : mu_)
        if (m != 0.0) return false;
    return true;
}

double BiasVector::point_probability(std::uint32_t a) const {
    double p = 1.0;
    for (int i = 0; i < arity(); ++i) {
        const double m = mu_[static_cast<size_t>(i)];
        p *= (a >> i) & 1u ? 0.5 * (1.0 - m) : 0.5 * (1.0 + m);
    }
    return p;
}

BiasVector BiasVector::slice(int lo, int len) const {
    if (lo < 0 || len < 1 || lo + len > arity())
        throw std::invalid_argument("bad bias slice");
    return BiasVector(std::vector<double>(mu_.begin() + lo, mu_.begin() + lo + len));
}

// --- TruthTable ---------------------------------------------------------------

TruthTable::TruthTable(int arity, int fill) : arity_(arity) {
    check_arity(arity);
    if (fill != 1 && fill != -1) throw std::invalid_argument("fill must be +-1");
    values_.assign(std::size_t(1) << arity, static_cast<std::int8_t>(fill));
}

TruthTable TruthTable::from_values(int arity, const std::vector<std::int8_t>& values) {
    check_arity(arity);
    if (values.size() != (std::size_t(1) << arity))
        throw std::invalid_argument("value array length must be 2^arity");
    TruthTable t(arity);
    for (std::size_t a = 0; a < values.size(); ++a) {
        if (values[a] != 1 && values[a] != -1)
            throw std::invalid_argument("truth-table entries must be +-1");
        t.values_[a] = values[a];
    }
    return t;
}

TruthTable TruthTable::from_hex(int arity, const std::string& hex) {
    check_arity(arity);
    const std::size_t n_points = std::size_t(1) << arity;
    const std::size_t want_digits = (n_points + 3) / 4;
    if (hex.size() != want_digits)
        throw std::invalid_argument("hex payload must have exactly " +
                                    std::to_string(want_digits) + " digits for arity " +
                                    std::to_string(arity));
    TruthTable t(arity);
    for (std::size_t d = 0; d < want_digits; ++d) {
        // Rightmost digit holds assignments 0..3, the next one 4..7, etc.
        const int v = hex_digit_value(hex[want_digits - 1 - d]);
        if (v < 0) throw std::invalid_argument("invalid hex digit in truth table");
        for (int b = 0; b < 4; ++b) {
            const std::size_t a = 4 * d + static_cast<std::size_t>(b);
            const bool bit = (v >> b) & 1;
            if (a >= n_points) {
                if (bit) throw std::invalid_argument("hex payload sets bits beyond 2^arity");
                continue;
            }
            t.values_[a] = bit ? -1 : +1;
        }
    }
    return t;
}

std::string TruthTable::to_hex() const {
    const std::size_t n_points = values_.size();
    const std::size_t digits = (n_points + 3) / 4;
    std::string out(digits, '0');
    for (std::size_t d = 0; d < digits; ++d) {
        int v = 0;
        for (int b = 0; b < 4; ++b) {
            const std::size_t a = 4 * d + static_cast<std::size_t>(b);
            if (a < n_points && values_[a] == -1) v |= 1 << b;
        }
        out[digits - 1 - d] = "0123456789abcdef"[v];
    }
    return out;
}

int TruthTable::value(std::uint32_t a) const {
    if (a >= values_.size()) throw std::out_of_range("assignment index out of range");
    return values_[a];
}

void TruthTable::set_value(std::uint32_t a, int v) {
    if (a >= values_.size()) throw std::out_of_range("assignment index out of range");
    if (v != 1 && v != -1) throw std::invalid_argument("truth-table entries must be +-1");
    values_[a] = static_cast<std::int8_t>(v);
}

std::uint64_t TruthTable::count_true() const {
    std::uint64_t c = 0;
    for (std::int8_t v : values_) c += v == -1;
    return c;
}

bool TruthTable::is_balanced() const { return 2 * count_true() == values_.size(); }

std::uint64_t TruthTable::packed_bits() const {
    if (arity_ > 6) throw std::invalid_argument("packed_bits requires arity <= 6");
    std::uint64_t bits = 0;
    for (std::size_t a = 0; a < values_.size(); ++a)
        if (values_[a] == -1) bits |= std::uint64_t(1) << a;
    return bits;
}

TruthTable TruthTable::from_packed_bits(int arity, std::uint64_t bits) {
    if (arity < 1 || arity > 6)
        throw std::invalid_argument("from_packed_bits requires arity 1..6");
    TruthTable f(arity, +1);
    for (std::uint32_t a = 0; a < f.size(); ++a)
        if (bits >> a & 1) f.set_value(a, -1);
    return f;
}

TruthTable TruthTable::negated() const {
    TruthTable t(*this);
    for (auto& v : t.values_) v = static_cast<std::int8_t>(-v);
    return t;
}

TruthTable TruthTable::with_coordinate_negated(int i) const {
    check_coordinate(arity_, i);
    TruthTable t(arity_);
    const std::uint32_t bit = std::uint32_t(1) << i;
    for (std::uint32_t a = 0; a < size(); ++a) t.values_[a] = values_[a ^ bit];
    return t;
}

TruthTable TruthTable::with_coordinates_permuted(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != arity_)
        throw std::invalid_argument("permutation length must equal arity");
    TruthTable t(arity_);
    for (std::uint32_t a = 0; a < size(); ++a) {
        // Coordinate i of the new function reads old coordinate perm[i].
        std::uint32_t b = 0;
        for (int i = 0; i < arity_; ++i)
            if ((a >> i) & 1u) b |= std::uint32_t(1) << perm[static_cast<size_t>(i)];
        t.values_[a] = values_[b];
    }
    return t;
}

// --- RealTable ----------------------------------------------------------------

RealTable::RealTable(int arity, double fill) : arity_(arity) {
    check_arity(arity);
    values_.assign(std::size_t(1) << arity, fill);
}

RealTable RealTable::from_values(int arity, std::vector<double> values) {
    check_arity(arity);
    if (values.size() != (std::size_t(1) << arity))
        throw std::invalid_argument("value array length must be 2^arity");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("real-table entries must be finite");
    RealTable t(arity);
    t.values_ = std::move(values);
    return t;
}

RealTable::RealTable(const TruthTable& t) : arity_(t.arity()) {
    values_.resize(t.size());
    for (std::uint32_t a = 0; a < t.size(); ++a) values_[a] = t.value(a);
}

double RealTable::value(std::uint32_t a) const {
    if (a >= values_.size()) throw std::out_of_range("assignment index out of range");
    return values_[a];
}

void RealTable::set_value(std::uint32_t a, double v) {
    if (a >= values_.size()) throw std::out_of_range("assignment index out of range");
    if (!std::isfinite(v)) throw std::invalid_argument("real-table entries must be finite");
    values_[a] = v;
}

// --- restriction / derivatives -------------------------------------------------

TruthTable restrict_coordinate(const TruthTable& f, int i, int b) {
    check_coordinate(f.arity(), i);
    if (b != 1 && b != -1) throw std::invalid_argument("restriction value must be +-1");
    if (f.arity() == 1) throw std::invalid_argument("cannot restrict a 1-input function");
    auto vals = drop_coordinate(f.values(), f.arity(), i, b == -1);
    return TruthTable::from_values(f.arity() - 1, vals);
}

RealTable restrict_coordinate(const RealTable& f, int i, int b) {
    check_coordinate(f.arity(), i);
    if (b != 1 && b != -1) throw std::invalid_argument("restriction value must be +-1");
    if (f.arity() == 1) throw std::invalid_argument("cannot restrict a 1-input function");
    auto vals = drop_coordinate(f.data(), f.arity(), i, b == -1);
    return RealTable::from_values(f.arity() - 1, std::move(vals));
}

namespace {
template <typename Table>
RealTable derivative_impl(const Table& f, int i) {
    check_coordinate(f.arity(), i);
    const std::uint32_t bit = std::uint32_t(1) << i;
    RealTable d(f.arity());
    for (std::uint32_t a = 0; a < f.size(); ++a) {
        // Bit clear means x_i = +1, so this is (f(x^{i<-+1}) - f(x^{i<--1}))/2.
        const double lo = f.value(a & ~bit);
        const double hi = f.value(a | bit);
        d.set_value(a, 0.5 * (lo - hi));
    }
    return d;
}
} // namespace

RealTable discrete_derivative(const TruthTable& f, int i) { return derivative_impl(f, i); }
RealTable discrete_derivative(const RealTable& f, int i) { return derivative_impl(f, i); }

namespace {
RealTable iterated_impl(RealTable d, SubsetMask s, int arity) {
    if (s == 0) throw std::invalid_argument("iterated_derivative requires nonempty subset");
    if (s >> arity) throw std::invalid_argument("subset has bits beyond the arity");
    for (int i = 0; i < arity; ++i)
        if ((s >> i) & 1u) d = discrete_derivative(d, i);
    return d;
}
} // namespace

RealTable iterated_derivative(const TruthTable& f, SubsetMask s) {
    return iterated_impl(RealTable(f), s, f.arity());
}
RealTable iterated_derivative(const RealTable& f, SubsetMask s) {
    return iterated_impl(f, s, f.arity());
}

// --- exact means -----------------------------------------------------------------

namespace {
template <typename Table>
double mean_impl(const Table& f, const BiasVector& mu, bool square) {
    if (f.arity() != mu.arity()) throw std::invalid_argument("arity mismatch");
    std::vector<double> buf(f.size());
    for (std::uint32_t a = 0; a < f.size(); ++a) {
        const double v = f.value(a);
        buf[a] = square ? v * v : v;
    }
    return contract_mean(std::move(buf), mu);
}
} // namespace

double mean(const TruthTable& f, const BiasVector& mu) { return mean_impl(f, mu, false); }
double mean(const RealTable& f, const BiasVector& mu) { return mean_impl(f, mu, false); }
double mean_of_square(const TruthTable& f, const BiasVector& mu) { return mean_impl(f, mu, true); }
double mean_of_square(const RealTable& f, const BiasVector& mu) { return mean_impl(f, mu, true); }

double variance_direct(const TruthTable& f, const BiasVector& mu) {
    const double m = mean(f, mu);
    return mean_of_square(f, mu) - m * m;
}
double variance_direct(const RealTable& f, const BiasVector& mu) {
    const double m = mean(f, mu);
    return mean_of_square(f, mu) - m * m;
}

// --- stock functions ----------------------------------------------------------------

TruthTable make_constant(int arity, int v) { return TruthTable(arity, v); }

TruthTable make_dictator(int arity, int i) {
    check_coordinate(arity, i);
    TruthTable t(arity);
    for (std::uint32_t a = 0; a < t.size(); ++a)
        t.set_value(a, (a >> i) & 1u ? -1 : +1);
    return t;
}

TruthTable make_not1() {
    TruthTable t(1);
    t.set_value(0, -1);  // NOT(FALSE) = TRUE
    t.set_value(1, +1);
    return t;
}

TruthTable make_and(int arity) {
    TruthTable t(arity);
    t.set_value(t.size() - 1, -1);  // TRUE only when every input bit is set
    return t;
}

TruthTable make_or(int arity) {
    TruthTable t(arity, -1);
    t.set_value(0, +1);  // FALSE only on the all-FALSE point
    return t;
}

TruthTable make_xor(int arity) {
    TruthTable t(arity);
    for (std::uint32_t a = 0; a < t.size(); ++a)
        t.set_value(a, std::popcount(a) % 2 ? -1 : +1);
    return t;
}

TruthTable make_maj3() {
    TruthTable t(3);
    for (std::uint32_t a = 0; a < 8; ++a)
        t.set_value(a, std::popcount(a) >= 2 ? -1 : +1);
    return t;
}

} // namespace feilab
