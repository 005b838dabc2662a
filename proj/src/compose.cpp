#include "feilab/compose.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "feilab/measures.hpp"

namespace feilab {
namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace

CompositionSpec::CompositionSpec(TruthTable f, std::vector<TruthTable> g, BiasVector mu)
    : outer(std::move(f)), inner(std::move(g)), inner_biases(std::move(mu)) {
    require(static_cast<int>(inner.size()) == outer.arity(),
            "composition needs one inner function per outer input");
    int total = 0;
    for (const TruthTable& gi : inner) total += gi.arity();
    require(total == inner_biases.arity(),
            "inner bias vector must cover the concatenated inner blocks");
    require(total <= kMaxArity, "composed arity exceeds the supported maximum");
}

int CompositionSpec::total_arity() const { return inner_biases.arity(); }

int CompositionSpec::block_offset(int i) const {
    require(i >= 0 && i < static_cast<int>(inner.size()), "block index out of range");
    int off = 0;
    for (int j = 0; j < i; ++j) off += inner[j].arity();
    return off;
}

TruthTable compose(const CompositionSpec& spec) {
    const int n = spec.total_arity();
    const int k = spec.outer_arity();
    TruthTable out(n);
    const uint64_t size = uint64_t{1} << n;
    std::vector<int> offset(k);
    for (int i = 0; i < k; ++i) offset[i] = spec.block_offset(i);
    for (uint64_t a = 0; a < size; ++a) {
        uint64_t outer_index = 0;
        for (int i = 0; i < k; ++i) {
            const uint64_t block =
                (a >> offset[i]) & ((uint64_t{1} << spec.inner[i].arity()) - 1);
            if (spec.inner[i].value(block) < 0) outer_index |= uint64_t{1} << i;
        }
        out.set_value(a, spec.outer.value(outer_index));
    }
    return out;
}

BiasVector eta_biases(const CompositionSpec& spec) {
    std::vector<double> eta(spec.outer_arity());
    for (int i = 0; i < spec.outer_arity(); ++i) {
        const BiasVector block =
            spec.inner_biases.slice(spec.block_offset(i), spec.inner[i].arity());
        eta[i] = mean(spec.inner[i], block);
        if (std::abs(eta[i]) > 1.0 - kBiasGuard)
            throw std::invalid_argument("inner function " + std::to_string(i + 1) +
                                        " is (near-)constant under its biases; "
                                        "its normalized lift is undefined");
    }
    return BiasVector(std::move(eta));
}

RealTable normalized_lift(const RealTable& g, const BiasVector& mu) {
    const double m = mean(g, mu);
    const double var = variance_direct(g, mu);
    if (var < kRatioEps * kRatioEps)
        throw std::invalid_argument("normalized lift of a (near-)constant function");
    const double inv_sd = 1.0 / std::sqrt(var);
    RealTable out(g.arity());
    for (uint64_t a = 0; a < (uint64_t{1} << g.arity()); ++a)
        out.set_value(a, (g.value(a) - m) * inv_sd);
    return out;
}

RealTable normalized_lift(const TruthTable& g, const BiasVector& mu) {
    return normalized_lift(RealTable(g), mu);
}

TensorIdentityReport verify_tensor_identities(const std::vector<RealTable>& factors,
                                              const BiasVector& mu) {
    require(!factors.empty(), "tensor identity needs at least one factor");
    int total = 0;
    for (const RealTable& p : factors) total += p.arity();
    require(total == mu.arity(), "bias vector must cover the concatenated factors");
    require(total <= 16, "direct tensor verification is capped at 16 coordinates");

    // Direct side: materialize the pointwise product on the full cube.
    RealTable product(total);
    for (uint64_t a = 0; a < (uint64_t{1} << total); ++a) {
        double v = 1.0;
        int off = 0;
        for (const RealTable& p : factors) {
            v *= p.value((a >> off) & ((uint64_t{1} << p.arity()) - 1));
            off += p.arity();
        }
        product.set_value(a, v);
    }

    TensorIdentityReport rep;
    Spectrum sp = biased_transform(product, mu);
    rep.entropy_direct = spectral_entropy_all(sp);
    rep.influence_direct = total_influence(sp);

    // Factor side: per-factor entropy/influence and second moments.
    const int k = static_cast<int>(factors.size());
    std::vector<double> h(k), inf(k), m2(k);
    int off = 0;
    for (int i = 0; i < k; ++i) {
        const BiasVector block = mu.slice(off, factors[i].arity());
        Spectrum si = biased_transform(factors[i], block);
        h[i] = spectral_entropy_all(si);
        inf[i] = total_influence(si);
        m2[i] = mean_of_square(factors[i], block);
        off += factors[i].arity();
    }
    for (int i = 0; i < k; ++i) {
        double others = 1.0;
        for (int j = 0; j < k; ++j)
            if (j != i) others *= m2[j];
        rep.entropy_formula += h[i] * others;
        rep.influence_formula += inf[i] * others;
    }
    return rep;
}

namespace {

// Per-inner-function measures entering the closed forms: entropy and
// influence each divided by the variance, plus eta for the outer basis.
struct InnerTerms {
    std::vector<double> entropy_over_var;
    std::vector<double> influence_over_var;
    Spectrum outer_spectrum;
};

InnerTerms inner_terms(const CompositionSpec& spec) {
    const int k = spec.outer_arity();
    std::vector<double> hv(k), iv(k);
    for (int i = 0; i < k; ++i) {
        const BiasVector block =
            spec.inner_biases.slice(spec.block_offset(i), spec.inner[i].arity());
        Spectrum si = biased_transform(spec.inner[i], block);
        const double var = variance(si);
        if (var < kRatioEps)
            throw std::invalid_argument("inner function " + std::to_string(i + 1) +
                                        " has (near-)zero variance under its biases");
        hv[i] = spectral_entropy_ge1(si) / var;
        iv[i] = total_influence(si) / var;
    }
    return InnerTerms{std::move(hv), std::move(iv),
                      biased_transform(spec.outer, eta_biases(spec))};
}

} // namespace

CompositionMeasures composition_closed_form(const CompositionSpec& spec) {
    const InnerTerms terms = inner_terms(spec);
    const int k = spec.outer_arity();
    CompositionMeasures out;
    out.mean = terms.outer_spectrum.coeff(0);
    out.entropy_ge1 = spectral_entropy_ge1(terms.outer_spectrum);
    for (SubsetMask s = 1; s < (uint64_t{1} << k); ++s) {
        const double c2 = terms.outer_spectrum.coeff(s) * terms.outer_spectrum.coeff(s);
        out.variance += c2;
        double hsum = 0.0, isum = 0.0;
        for (int i = 0; i < k; ++i) {
            if (!(s >> i & 1)) continue;
            hsum += terms.entropy_over_var[i];
            isum += terms.influence_over_var[i];
        }
        out.entropy_ge1 += c2 * hsum;
        out.influence += c2 * isum;
    }
    return out;
}

CompositionIdentities composition_identities(const CompositionSpec& spec) {
    require(spec.total_arity() <= 16,
            "direct composition verification is capped at 16 coordinates");
    const CompositionMeasures closed = composition_closed_form(spec);

    CompositionIdentities out;
    out.entropy_ge1.closed = closed.entropy_ge1;
    out.influence.closed = closed.influence;
    out.variance.closed = closed.variance;

    Spectrum direct = biased_transform(compose(spec), spec.inner_biases);
    out.entropy_ge1.direct = spectral_entropy_ge1(direct);
    out.influence.direct = total_influence(direct);
    out.variance.direct = variance(direct);
    return out;
}

std::vector<double> grouped_support_mass(const CompositionSpec& spec) {
    require(spec.total_arity() <= 16,
            "grouped support mass is capped at 16 coordinates");
    const int k = spec.outer_arity();
    const int n = spec.total_arity();
    std::vector<int> block_of(n);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < spec.inner[i].arity(); ++j)
            block_of[spec.block_offset(i) + j] = i;

    Spectrum sp = biased_transform(compose(spec), spec.inner_biases);
    std::vector<double> mass(uint64_t{1} << k, 0.0);
    for (SubsetMask s = 0; s < (uint64_t{1} << n); ++s) {
        SubsetMask outer_mask = 0;
        for (int c = 0; c < n; ++c)
            if (s >> c & 1) outer_mask |= uint64_t{1} << block_of[c];
        mass[outer_mask] += sp.coeff(s) * sp.coeff(s);
    }
    return mass;
}

CompositionTheoremCheck composition_theorem_check(const CompositionSpec& spec, double c,
                                                  double slack) {
    require(c > 0.0, "the composition theorem needs a positive constant");
    CompositionTheoremCheck out;
    out.constant = c;

    const InnerTerms terms = inner_terms(spec);
    const int k = spec.outer_arity();

    out.inner_hypothesis = true;
    for (int i = 0; i < k; ++i) {
        // H_ge1 / Var <= c (Inf/Var - 1) is FEI+ for g_i divided by Var.
        if (terms.entropy_over_var[i] >
            c * (terms.influence_over_var[i] - 1.0) + slack)
            out.inner_hypothesis = false;
    }

    const double h_outer = spectral_entropy_ge1(terms.outer_spectrum);
    const double inf_outer = total_influence(terms.outer_spectrum);
    const double var_outer = variance(terms.outer_spectrum);
    out.outer_hypothesis = h_outer <= c * (inf_outer - var_outer) + slack;

    // Closed-form measures of the composed function.
    double h_comp = h_outer, inf_comp = 0.0, var_comp = 0.0, entropy_flow = 0.0;
    for (SubsetMask s = 1; s < (uint64_t{1} << k); ++s) {
        const double c2 = terms.outer_spectrum.coeff(s) * terms.outer_spectrum.coeff(s);
        var_comp += c2;
        double hsum = 0.0, isum = 0.0;
        for (int i = 0; i < k; ++i) {
            if (!(s >> i & 1)) continue;
            hsum += terms.entropy_over_var[i];
            isum += terms.influence_over_var[i];
        }
        h_comp += c2 * hsum;
        inf_comp += c2 * isum;
        entropy_flow += c2 * hsum;
    }

    out.conclusion_lhs = h_comp;
    out.conclusion_rhs = c * (inf_comp - var_comp);
    out.conclusion = out.conclusion_lhs <= out.conclusion_rhs + slack;

    // Intermediate step: Inf[f] >= Inf_eta[F] + (1/c) * entropy flow from the
    // inner functions; a consequence of the inner hypotheses alone.
    out.recursion_lhs = inf_comp;
    out.recursion_rhs = inf_outer + entropy_flow / c;
    out.influence_recursion = out.recursion_lhs >= out.recursion_rhs - slack;
    return out;
}

AmplifyStats uniform_amplify_stats(const TruthTable& f) {
    if (!f.is_balanced())
        throw std::invalid_argument("amplification needs a balanced function");
    Spectrum sp = biased_transform(f, BiasVector::uniform(f.arity()));
    AmplifyStats st;
    st.entropy = spectral_entropy_all(sp);
    st.influence = total_influence(sp);
    return st;
}

AmplifyStats amplify_closed_form(const AmplifyStats& outer, const AmplifyStats& base,
                                 int m) {
    if (m < 0) throw std::invalid_argument("composition level must be nonnegative");
    AmplifyStats st;
    st.level = m;
    const double ratio_pow = std::pow(outer.influence, m);
    st.influence = base.influence * ratio_pow;
    if (std::abs(outer.influence - 1.0) < kRatioEps) {
        // Geometric sum degenerates to a linear one.
        st.entropy = base.entropy + m * outer.entropy;
        st.degenerate = true;
    } else {
        st.entropy = base.entropy * ratio_pow +
                     outer.entropy * (ratio_pow - 1.0) / (outer.influence - 1.0);
    }
    return st;
}

double amplify_ratio_limit(const AmplifyStats& outer) {
    if (outer.influence <= 1.0 + kRatioEps)
        throw std::invalid_argument(
            "ratio amplification needs total influence strictly above 1");
    // H/Inf + H/(Inf (Inf-1)) = H/(Inf-1).
    return outer.entropy / (outer.influence - 1.0);
}

double amplify_ratio_at(const AmplifyStats& outer, int m) {
    const double limit = amplify_ratio_limit(outer);
    return limit - outer.entropy /
                       (std::pow(outer.influence, m + 1) * (outer.influence - 1.0));
}

double amplify_ratio_limit(const AmplifyStats& outer, const AmplifyStats& base) {
    if (outer.influence <= 1.0 + kRatioEps)
        throw std::invalid_argument(
            "ratio amplification needs total influence strictly above 1");
    return (base.entropy + outer.entropy / (outer.influence - 1.0)) / base.influence;
}

TruthTable lower_bound_witness() {
    // Balanced 6-input function with total influence 13/8 and uniform
    // entropy ~3.92434, found by local search over balanced functions and
    // kept here in disjunctive normal form. TRUE is the value -1.
    TruthTable f(6, +1);
    const auto x = [](uint64_t a, int i) { return (a >> (i - 1) & 1) != 0; };
    for (uint64_t a = 0; a < 64; ++a) {
        const bool t = (!x(a, 1) && x(a, 2) && x(a, 3)) ||
                       (x(a, 1) && !x(a, 2) && x(a, 4)) ||
                       (x(a, 1) && !x(a, 2) && x(a, 5) && x(a, 6)) ||
                       (x(a, 1) && x(a, 2) && x(a, 3)) ||
                       (x(a, 1) && x(a, 2) && (x(a, 4) || x(a, 5)));
        if (t) f.set_value(a, -1);
    }
    return f;
}

} // namespace feilab
