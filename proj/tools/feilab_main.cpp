// feilab — command-line front end: analyze / spectrum / compose / amplify /
// verify / search / parse. Data goes to stdout (or --out), diagnostics to
// stderr. Exit codes: 0 success, 1 usage or input error, 2 a mathematical
// bound was violated (verify / search re-verification).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "feilab/boolfn.hpp"
#include "feilab/compose.hpp"
#include "feilab/fei.hpp"
#include "feilab/formula.hpp"
#include "feilab/fourier.hpp"
#include "feilab/io.hpp"
#include "feilab/measures.hpp"
#include "feilab/parallel.hpp"
#include "feilab/search.hpp"

namespace {

using namespace feilab;

// Usage/input problem discovered after flag parsing: exit code 1.
struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::optional<TruthTable> builtin_table(const std::string& name) {
    const std::string key = upper(name);
    if (key == "WITNESS6") return lower_bound_witness();
    if (key == "NOT") return make_not1();
    if (key == "MAJ3") return make_maj3();
    for (int k = 2; k <= 8; ++k) {
        const std::string suffix = std::to_string(k);
        if (key == "AND" + suffix) return make_and(k);
        if (key == "OR" + suffix) return make_or(k);
        if (key == "XOR" + suffix) return make_xor(k);
    }
    return std::nullopt;
}

// --input accepts a table file, a builtin name (AND2..8, OR2..8, XOR2..8,
// MAJ3, NOT, WITNESS6), or formula text in the DSL.
struct FunctionInput {
    TruthTable table;
    std::optional<FormulaNode> ast;  // set when the input was a formula
    std::string digest;
};

FunctionInput resolve_input(const std::string& value, const GateBasis& basis) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(value, ec)) {
        const std::string bytes = read_file(value);
        return {read_table_json(bytes), std::nullopt, digest_string(bytes)};
    }
    if (auto t = builtin_table(value)) return {*t, std::nullopt, digest_string(value)};
    FormulaNode ast = parse_formula(value, basis);
    TruthTable table = formula_to_table(ast, basis);
    return {std::move(table), std::move(ast), digest_string(value)};
}

BiasVector parse_mu(const std::string& flag, int n) {
    std::string t = flag;
    t.erase(0, t.find_first_not_of(" \t"));
    t.erase(t.find_last_not_of(" \t") + 1);
    if (t.empty() || upper(t) == "UNIFORM") return BiasVector::uniform(n);
    std::vector<double> mu;
    std::stringstream ss(t);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        char* end = nullptr;
        const double v = std::strtod(piece.c_str(), &end);
        while (end && *end == ' ') ++end;
        if (!end || *end != '\0' || piece.empty())
            throw CliError("--mu: cannot parse '" + piece + "' as a number");
        mu.push_back(v);
    }
    if (static_cast<int>(mu.size()) != n)
        throw CliError("--mu needs " + std::to_string(n) + " comma-separated values, got " +
                       std::to_string(mu.size()));
    return BiasVector(std::move(mu));
}

std::vector<double> parse_levels(const std::string& flag) {
    if (upper(flag) == "UNIFORM") return {};
    std::vector<double> levels;
    std::stringstream ss(flag);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        char* end = nullptr;
        const double v = std::strtod(piece.c_str(), &end);
        while (end && *end == ' ') ++end;
        if (!end || *end != '\0' || piece.empty())
            throw CliError("--grid: cannot parse '" + piece + "' as a number");
        levels.push_back(v);
    }
    if (levels.empty()) throw CliError("--grid needs at least one level");
    return levels;
}

void emit(const std::string& data, const std::string& out_path) {
    if (out_path.empty()) {
        std::fwrite(data.data(), 1, data.size(), stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw CliError("cannot write '" + out_path + "'");
    out << data;
}

std::string mu_csv_cell(const std::vector<double>& mu) {
    std::string s;
    for (size_t i = 0; i < mu.size(); ++i) {
        if (i) s += ";";
        s += format_double(mu[i]);
    }
    return s;
}

void write_mu_array(JsonWriter& w, const std::vector<double>& mu) {
    w.begin_array();
    for (double m : mu) w.value(m);
    w.end_array();
}

// --- analyze ---------------------------------------------------------------------

int run_analyze(const FunctionInput& input, const std::string& mu_flag,
                const std::string& format, const std::string& out_path, int jobs,
                bool dump_table, const GateBasis& basis, RunManifest manifest) {
    manifest.sort();

    if (dump_table) {
        JsonWriter w;
        w.begin_object();
        w.key("manifest");
        write_manifest(w, manifest);
        w.key("n").value(input.table.arity());
        w.key("hex").value(input.table.to_hex());
        w.end_object();
        emit(w.str() + "\n", out_path);
        return 0;
    }

    if (input.ast) {
        // Formula path: read-once analysis from per-gate closed forms.
        const int n = formula_arity(*input.ast);
        const BiasVector mu = parse_mu(mu_flag, n);
        const ReadOnceReport rep = analyze_read_once(*input.ast, basis, mu);
        if (format == "csv") {
            std::string csv = manifest_comment(manifest) + "\n";
            csv += "gate,eta,H_ge1,Inf,Var,ratio\n";
            for (const NodeMeasures& m : rep.nodes) {
                csv += m.label + "," + format_double(m.eta) + "," +
                       format_double(m.entropy_ge1) + "," + format_double(m.influence) +
                       "," + format_double(m.variance) + "," +
                       (m.gate_ratio ? format_double(*m.gate_ratio) : "") + "\n";
            }
            emit(csv, out_path);
            return 0;
        }
        JsonWriter w;
        w.begin_object();
        w.key("manifest");
        write_manifest(w, manifest);
        w.key("formula").value(format_formula(*input.ast));
        w.key("n").value(n);
        w.key("mu");
        write_mu_array(w, mu.biases());
        w.key("root").begin_object();
        w.key("mean").value(rep.mean);
        w.key("variance").value(rep.variance);
        w.key("influence").value(rep.influence);
        w.key("entropy_ge1").value(rep.entropy_ge1);
        w.end_object();
        if (rep.any_gate_ratio)
            w.key("max_gate_ratio").value(rep.max_gate_ratio);
        else
            w.key("max_gate_ratio").value_null();
        w.key("root_bound_holds").value(rep.root_bound_holds);
        w.key("cross_checked").value(rep.cross_checked);
        w.key("cross_check_error").value(rep.cross_check_error);
        w.key("nodes").begin_array();
        for (const NodeMeasures& m : rep.nodes) {
            w.begin_object();
            w.key("gate").value(std::string_view(m.label));
            w.key("eta").value(m.eta);
            w.key("H_ge1").value(m.entropy_ge1);
            w.key("Inf").value(m.influence);
            w.key("Var").value(m.variance);
            if (m.gate_ratio)
                w.key("ratio").value(*m.gate_ratio);
            else
                w.key("ratio").value_null();
            w.end_object();
        }
        w.end_array();
        w.end_object();
        emit(w.str() + "\n", out_path);
        return 0;
    }

    // Table path: full measure report plus the two ratios.
    const TruthTable& f = input.table;
    const BiasVector mu = parse_mu(mu_flag, f.arity());
    const MeasureReport rep = compute_measures(f, mu, jobs);
    const auto fr = fei_ratio(f);
    const auto fpr = fei_plus_ratio(biased_transform(f, mu, jobs));

    if (format == "csv") {
        std::string csv = manifest_comment(manifest) + "\n";
        csv += "field,value\n";
        csv += "n," + std::to_string(rep.arity) + "\n";
        csv += "mu," + mu_csv_cell(rep.mu) + "\n";
        csv += "mean," + format_double(rep.mean) + "\n";
        csv += "variance," + format_double(rep.variance) + "\n";
        csv += "total_influence," + format_double(rep.total_influence) + "\n";
        for (int i = 0; i < rep.arity; ++i)
            csv += "influence_x" + std::to_string(i + 1) + "," +
                   format_double(rep.per_coordinate_influence[i]) + "\n";
        csv += "spectral_entropy_ge1," + format_double(rep.spectral_entropy_ge1) + "\n";
        csv += "uniform_entropy," +
               (rep.uniform_entropy ? format_double(*rep.uniform_entropy) : "") + "\n";
        csv += "poincare_gap," + format_double(rep.poincare_gap) + "\n";
        csv += "influence_discrepancy," + format_double(rep.influence_discrepancy) + "\n";
        csv += "fei_ratio," + (fr ? format_double(*fr) : "") + "\n";
        csv += "fei_plus_ratio," + (fpr ? format_double(*fpr) : "") + "\n";
        emit(csv, out_path);
        return 0;
    }

    JsonWriter w;
    w.begin_object();
    w.key("manifest");
    write_manifest(w, manifest);
    w.key("n").value(rep.arity);
    w.key("mu");
    write_mu_array(w, rep.mu);
    w.key("mean").value(rep.mean);
    w.key("variance").value(rep.variance);
    w.key("total_influence").value(rep.total_influence);
    w.key("per_coordinate_influence");
    write_mu_array(w, rep.per_coordinate_influence);
    w.key("spectral_entropy_ge1").value(rep.spectral_entropy_ge1);
    if (rep.uniform_entropy)
        w.key("uniform_entropy").value(*rep.uniform_entropy);
    else
        w.key("uniform_entropy").value_null();
    w.key("poincare_gap").value(rep.poincare_gap);
    w.key("influence_discrepancy").value(rep.influence_discrepancy);
    if (fr)
        w.key("fei_ratio").value(*fr);
    else
        w.key("fei_ratio").value_null();
    if (fpr)
        w.key("fei_plus_ratio").value(*fpr);
    else
        w.key("fei_plus_ratio").value_null();
    w.end_object();
    emit(w.str() + "\n", out_path);
    return 0;
}

// --- spectrum ---------------------------------------------------------------------

int run_spectrum(const FunctionInput& input, const std::string& mu_flag, int min_degree,
                 const std::string& format, const std::string& out_path, int jobs,
                 RunManifest manifest) {
    manifest.sort();
    const TruthTable& f = input.table;
    const BiasVector mu = parse_mu(mu_flag, f.arity());
    Spectrum sp = biased_transform(f, mu, jobs);
    if (min_degree > 0) sp = project_min_degree(sp, min_degree);

    if (format == "csv") {
        std::string csv = manifest_comment(manifest) + "\n";
        csv += "mask,coeff\n";
        for (const auto& [mask, value] : sp.sparse_entries())
            csv += std::to_string(mask) + "," + format_double(value) + "\n";
        emit(csv, out_path);
        return 0;
    }

    JsonWriter w;
    w.begin_object();
    w.key("manifest");
    write_manifest(w, manifest);
    w.key("n").value(f.arity());
    w.key("mu");
    write_mu_array(w, mu.biases());
    w.key("coeffs").begin_array();
    for (const auto& [mask, value] : sp.sparse_entries())
        w.begin_array().value(mask).value(value).end_array();
    w.end_array();
    w.end_object();
    emit(w.str() + "\n", out_path);
    return 0;
}

// --- compose ----------------------------------------------------------------------

int run_compose(const std::string& spec_path, const std::string& mu_flag,
                const std::string& format, const std::string& out_path,
                RunManifest manifest) {
    const std::string bytes = read_file(spec_path);
    manifest.add_input("spec", bytes);
    manifest.sort();
    CompositionSpec spec = read_composition_spec_json(bytes);
    if (!mu_flag.empty()) {
        BiasVector mu = parse_mu(mu_flag, spec.total_arity());
        spec = CompositionSpec(spec.outer, spec.inner, std::move(mu));
    }

    const TruthTable composed = compose(spec);
    const BiasVector eta = eta_biases(spec);
    const CompositionMeasures closed = composition_closed_form(spec);
    std::optional<CompositionIdentities> ids;
    if (spec.total_arity() <= 16) ids = composition_identities(spec);

    if (format == "csv") {
        std::string csv = manifest_comment(manifest) + "\n";
        csv += "field,value\n";
        csv += "n," + std::to_string(composed.arity()) + "\n";
        csv += "hex," + composed.to_hex() + "\n";
        csv += "eta," + mu_csv_cell(eta.biases()) + "\n";
        csv += "mean," + format_double(closed.mean) + "\n";
        csv += "variance," + format_double(closed.variance) + "\n";
        csv += "influence," + format_double(closed.influence) + "\n";
        csv += "entropy_ge1," + format_double(closed.entropy_ge1) + "\n";
        if (ids) {
            const double residual = std::max(
                {std::abs(ids->entropy_ge1.direct - ids->entropy_ge1.closed),
                 std::abs(ids->influence.direct - ids->influence.closed),
                 std::abs(ids->variance.direct - ids->variance.closed)});
            csv += "identity_residual," + format_double(residual) + "\n";
        }
        emit(csv, out_path);
        return 0;
    }

    JsonWriter w;
    w.begin_object();
    w.key("manifest");
    write_manifest(w, manifest);
    w.key("n").value(composed.arity());
    w.key("hex").value(composed.to_hex());
    w.key("eta");
    write_mu_array(w, eta.biases());
    w.key("closed_form").begin_object();
    w.key("mean").value(closed.mean);
    w.key("variance").value(closed.variance);
    w.key("influence").value(closed.influence);
    w.key("entropy_ge1").value(closed.entropy_ge1);
    w.end_object();
    if (ids) {
        w.key("identities").begin_object();
        const auto pair = [&](const char* name, const IdentityPair& p) {
            w.key(name).begin_object();
            w.key("direct").value(p.direct);
            w.key("closed").value(p.closed);
            w.end_object();
        };
        pair("entropy_ge1", ids->entropy_ge1);
        pair("influence", ids->influence);
        pair("variance", ids->variance);
        w.end_object();
    } else {
        w.key("identities").value_null();
    }
    w.end_object();
    emit(w.str() + "\n", out_path);
    return 0;
}

// --- amplify ----------------------------------------------------------------------

int run_amplify(const FunctionInput& outer_in, const FunctionInput& base_in, int m,
                const std::string& format, const std::string& out_path,
                RunManifest manifest) {
    manifest.sort();
    const AmplifyStats outer = uniform_amplify_stats(outer_in.table);
    const AmplifyStats base = uniform_amplify_stats(base_in.table);

    std::vector<AmplifyStats> rows;
    rows.reserve(m + 1);
    for (int level = 0; level <= m; ++level)
        rows.push_back(amplify_closed_form(outer, base, level));
    std::optional<double> limit;
    if (outer.influence > 1.0 + kRatioEps)
        limit = amplify_ratio_limit(outer, base);

    if (format == "json") {
        JsonWriter w;
        w.begin_object();
        w.key("manifest");
        write_manifest(w, manifest);
        w.key("outer").begin_object();
        w.key("entropy").value(outer.entropy);
        w.key("influence").value(outer.influence);
        w.end_object();
        w.key("base").begin_object();
        w.key("entropy").value(base.entropy);
        w.key("influence").value(base.influence);
        w.end_object();
        w.key("rows").begin_array();
        for (const AmplifyStats& r : rows) {
            w.begin_object();
            w.key("m").value(r.level);
            w.key("entropy").value(r.entropy);
            w.key("influence").value(r.influence);
            w.key("ratio").value(r.entropy / r.influence);
            w.end_object();
        }
        w.end_array();
        if (limit)
            w.key("limit").value(*limit);
        else
            w.key("limit").value_null();
        w.end_object();
        emit(w.str() + "\n", out_path);
        return 0;
    }

    std::string csv = manifest_comment(manifest) + "\n";
    csv += "m,entropy,influence,ratio\n";
    for (const AmplifyStats& r : rows)
        csv += std::to_string(r.level) + "," + format_double(r.entropy) + "," +
               format_double(r.influence) + "," + format_double(r.entropy / r.influence) +
               "\n";
    csv += "limit,,," + (limit ? format_double(*limit) : "") + "\n";
    emit(csv, out_path);
    return 0;
}

// --- verify -----------------------------------------------------------------------

void write_violation_fields(JsonWriter& w, const SweepViolation& v) {
    w.begin_object();
    w.key("kind").value(std::string_view(v.kind));
    w.key("arity").value(v.arity);
    w.key("hex").value(TruthTable::from_packed_bits(v.arity, v.fn_bits).to_hex());
    w.key("mu");
    write_mu_array(w, v.mu);
    if (v.kind == "term-bound") {
        w.key("subset").value(v.subset);
        w.key("pivot").value(v.pivot + 1);  // x1-based in reports
    }
    w.key("lhs").value(v.lhs);
    w.key("rhs").value(v.rhs);
    w.end_object();
}

std::string violation_line(const SweepViolation& v) {
    std::string s = v.kind + " arity=" + std::to_string(v.arity) +
                    " hex=" + TruthTable::from_packed_bits(v.arity, v.fn_bits).to_hex() +
                    " mu=" + mu_csv_cell(v.mu);
    if (v.kind == "term-bound") {
        s += " subset=" + std::to_string(v.subset) +
             " pivot=x" + std::to_string(v.pivot + 1);
    }
    s += " lhs=" + format_double(v.lhs) + " rhs=" + format_double(v.rhs);
    return s;
}

int run_verify(int grid_arity, const std::vector<double>& levels, int uniform_arity,
               long long samples, int random_arity, uint64_t seed, double slack,
               int jobs, const std::string& format, const std::string& out_path,
               RunManifest manifest) {
    manifest.sort();
    SweepOptions opt;
    opt.slack = slack;
    opt.jobs = jobs;

    SweepSummary total;
    if (grid_arity > 0) {
        SweepSummary s = term_bound_sweep_exhaustive(grid_arity, levels, opt);
        merge_sweeps(total, s);
    }
    if (uniform_arity > 0) {
        SweepSummary s = term_bound_sweep_exhaustive(uniform_arity, {0.0}, opt);
        merge_sweeps(total, s);
    }
    if (samples > 0) {
        SweepSummary s = term_bound_sweep_random(random_arity, samples, seed, opt);
        merge_sweeps(total, s);
    }

    if (format == "csv") {
        std::string csv = manifest_comment(manifest) + "\n";
        csv += "field,value\n";
        csv += "functions," + std::to_string(total.functions) + "\n";
        csv += "term_checks," + std::to_string(total.term_checks) + "\n";
        csv += "max_term_ratio," + format_double(total.max_term_ratio) + "\n";
        csv += "max_fei_plus," +
               (total.max_fei_plus ? format_double(*total.max_fei_plus) : "") + "\n";
        csv += "min_entropy_ge1," +
               (total.min_entropy_ge1 ? format_double(*total.min_entropy_ge1) : "") +
               "\n";
        csv += "violations," + std::to_string(total.violations.size()) + "\n";
        emit(csv, out_path);
    } else {
        JsonWriter w;
        w.begin_object();
        w.key("manifest");
        write_manifest(w, manifest);
        w.key("functions").value(static_cast<uint64_t>(total.functions));
        w.key("term_checks").value(static_cast<uint64_t>(total.term_checks));
        w.key("max_term_ratio").value(total.max_term_ratio);
        if (total.max_fei_plus) {
            w.key("max_fei_plus").begin_object();
            w.key("value").value(*total.max_fei_plus);
            w.key("arity").value(total.max_fei_plus_arity);
            w.key("hex").value(TruthTable::from_packed_bits(total.max_fei_plus_arity,
                                                            total.max_fei_plus_fn)
                                   .to_hex());
            w.key("mu");
            write_mu_array(w, total.max_fei_plus_mu);
            w.end_object();
        } else {
            w.key("max_fei_plus").value_null();
        }
        if (total.min_entropy_ge1)
            w.key("min_entropy_ge1").value(*total.min_entropy_ge1);
        else
            w.key("min_entropy_ge1").value_null();
        w.key("clean").value(total.clean());
        w.key("violations").begin_array();
        for (const SweepViolation& v : total.violations) write_violation_fields(w, v);
        w.end_array();
        w.end_object();
        emit(w.str() + "\n", out_path);
    }

    if (!total.clean()) {
        for (const SweepViolation& v : total.violations)
            std::cerr << "violation: " << violation_line(v) << "\n";
        return 2;
    }
    return 0;
}

// --- search -----------------------------------------------------------------------

int run_search_exhaustive(int arity, SearchConstraint constraint, bool quotient,
                          int jobs, const std::string& format,
                          const std::string& out_path, RunManifest manifest) {
    manifest.sort();
    const ScanResult res = exhaustive_max_fei(arity, constraint, quotient, jobs);

    // Independent re-verification of the reported witness.
    if (res.any_defined) {
        const Spectrum sp =
            biased_transform(res.best, BiasVector::uniform(res.best.arity()));
        const double again = uniform_entropy(sp) / total_influence(sp);
        if (std::abs(again - res.best_ratio) > 1e-9) {
            std::cerr << "witness failed re-verification: scan ratio "
                      << format_double(res.best_ratio) << " vs recomputed "
                      << format_double(again) << "\n";
            return 2;
        }
    }

    if (format == "csv") {
        std::string csv = manifest_comment(manifest) + "\n";
        csv += "bin_low,count\n";
        for (const auto& [bin, count] : res.histogram.bins)
            csv += format_double(bin * res.histogram.width) + "," +
                   std::to_string(count) + "\n";
        emit(csv, out_path);
        return 0;
    }

    JsonWriter w;
    w.begin_object();
    w.key("manifest");
    write_manifest(w, manifest);
    w.key("mode").value("exhaustive");
    w.key("arity").value(arity);
    w.key("constraint")
        .value(constraint == SearchConstraint::kBalanced ? "balanced" : "any");
    w.key("quotient").value(quotient);
    w.key("scanned").value(res.scanned);
    w.key("undefined").value(res.undefined_count);
    if (res.any_defined) {
        w.key("best").begin_object();
        w.key("hex").value(res.best.to_hex());
        w.key("ratio").value(res.best_ratio);
        w.end_object();
    } else {
        w.key("best").value_null();
    }
    w.key("histogram").begin_array();
    for (const auto& [bin, count] : res.histogram.bins)
        w.begin_array().value(bin * res.histogram.width).value(count).end_array();
    w.end_array();
    w.end_object();
    emit(w.str() + "\n", out_path);
    return 0;
}

int run_search_local(const LocalSearchOptions& opt, const std::string& format,
                     const std::string& out_path, RunManifest manifest) {
    manifest.sort();
    const LocalSearchResult res = local_search_max_ratio(opt);

    // Re-verify the winner's objective through the measure/amplify modules.
    double again = 0.0;
    if (opt.constraint == SearchConstraint::kBalanced && res.best.is_balanced()) {
        const AmplifyStats st = uniform_amplify_stats(res.best);
        if (st.influence > 1.0 + 1e-9)
            again = amplify_ratio_limit(st);
        else
            again = fei_ratio(res.best).value_or(0.0);
    } else {
        again = fei_ratio(res.best).value_or(0.0);
    }
    if (std::abs(again - res.best_objective) > 1e-9) {
        std::cerr << "witness failed re-verification: search objective "
                  << format_double(res.best_objective) << " vs recomputed "
                  << format_double(again) << "\n";
        return 2;
    }

    if (format == "csv") {
        std::string csv = manifest_comment(manifest) + "\n";
        csv += "restart,step,objective\n";
        for (const TraceEntry& t : res.trace)
            csv += std::to_string(t.restart) + "," + std::to_string(t.step) + "," +
                   format_double(t.objective) + "\n";
        emit(csv, out_path);
        return 0;
    }

    JsonWriter w;
    w.begin_object();
    w.key("manifest");
    write_manifest(w, manifest);
    w.key("mode").value("local");
    w.key("arity").value(opt.arity);
    w.key("constraint")
        .value(opt.constraint == SearchConstraint::kBalanced ? "balanced" : "any");
    w.key("restarts").value(opt.restarts);
    w.key("max_steps").value(opt.max_steps);
    w.key("best").begin_object();
    w.key("hex").value(res.best.to_hex());
    w.key("objective").value(res.best_objective);
    w.key("restart").value(res.best_restart);
    w.end_object();
    w.key("evaluations").value(res.evaluations);
    w.key("trace").begin_array();
    for (const TraceEntry& t : res.trace)
        w.begin_array().value(t.restart).value(t.step).value(t.objective).end_array();
    w.end_array();
    w.end_object();
    emit(w.str() + "\n", out_path);
    return 0;
}

int run_search_worst_case(int arity, const std::vector<double>& levels, int jobs,
                          const std::string& format, const std::string& out_path,
                          RunManifest manifest) {
    manifest.sort();
    const WorstCaseResult res = worst_case_product_fei(arity, levels, jobs);

    const bool within = res.observed <= res.bound + 1e-10;
    if (format == "csv") {
        std::string csv = manifest_comment(manifest) + "\n";
        csv += "field,value\n";
        csv += "observed," + format_double(res.observed) + "\n";
        csv += "bound," + format_double(res.bound) + "\n";
        csv += "hex," + res.function.to_hex() + "\n";
        csv += "mu," + mu_csv_cell(res.mu) + "\n";
        csv += "evaluated," + std::to_string(res.evaluated) + "\n";
        csv += std::string("within_bound,") + (within ? "true" : "false") + "\n";
        emit(csv, out_path);
    } else {
        JsonWriter w;
        w.begin_object();
        w.key("manifest");
        write_manifest(w, manifest);
        w.key("mode").value("worst-case");
        w.key("arity").value(arity);
        w.key("grid");
        write_mu_array(w, levels);
        w.key("observed").value(res.observed);
        w.key("bound").value(res.bound);
        w.key("witness").begin_object();
        w.key("hex").value(res.function.to_hex());
        w.key("mu");
        write_mu_array(w, res.mu);
        w.end_object();
        w.key("evaluated").value(res.evaluated);
        w.key("within_bound").value(within);
        w.end_object();
        emit(w.str() + "\n", out_path);
    }

    if (!within) {
        std::cerr << "violation: fei+ ratio " << format_double(res.observed)
                  << " exceeds the arity-" << arity << " constant "
                  << format_double(res.bound) << " (hex=" << res.function.to_hex()
                  << " mu=" << mu_csv_cell(res.mu) << ")\n";
        return 2;
    }
    return 0;
}

// --- parse ------------------------------------------------------------------------

int run_parse(const std::string& text, const std::string& format,
              const std::string& out_path, const GateBasis& basis,
              RunManifest manifest) {
    manifest.sort();
    const FormulaNode ast = parse_formula(text, basis);
    if (auto dup = find_duplicate_variable(ast))
        throw FormulaError("variable x" + std::to_string(dup->var + 1) +
                               " appears more than once (first at line " +
                               std::to_string(dup->first_line) + ":" +
                               std::to_string(dup->first_col) + ")",
                           dup->second_line, dup->second_col);

    if (format == "csv") {
        std::string csv = manifest_comment(manifest) + "\n";
        csv += "field,value\n";
        csv += "formula," + format_formula(ast) + "\n";
        csv += "n," + std::to_string(formula_arity(ast)) + "\n";
        csv += "read_once,true\n";
        emit(csv, out_path);
        return 0;
    }
    JsonWriter w;
    w.begin_object();
    w.key("manifest");
    write_manifest(w, manifest);
    w.key("formula").value(format_formula(ast));
    w.key("n").value(formula_arity(ast));
    w.key("read_once").value(true);
    w.end_object();
    emit(w.str() + "\n", out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"feilab — biased Fourier analysis of Boolean functions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(RunManifest::kTool) + " " +
                                          RunManifest::kVersion);

    const GateBasis basis = GateBasis::standard();

    // Shared flag storage (each subcommand registers the ones it uses).
    std::string input, mu_flag = "uniform", format = "json", out_path;
    int jobs = 0;
    uint64_t seed = 1;

    auto* analyze = app.add_subcommand(
        "analyze", "Measure a function: influence, entropy, ratios");
    bool dump_table = false;
    analyze->add_option("--input", input,
                        "Table file, builtin name, or formula text")->required();
    analyze->add_option("--mu", mu_flag, "Comma-separated biases or 'uniform'");
    analyze->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    analyze->add_option("--out", out_path, "Write the data stream to a file");
    analyze->add_option("--jobs", jobs, "Worker threads (0 = auto)")
        ->envname("FEI_LAB_JOBS");
    analyze->add_flag("--dump-table", dump_table,
                      "Emit the dense truth table instead of measures");

    auto* spectrum = app.add_subcommand("spectrum", "Biased Fourier coefficients");
    int min_degree = 0;
    spectrum->add_option("--input", input)->required();
    spectrum->add_option("--mu", mu_flag);
    spectrum->add_option("--min-degree", min_degree,
                         "Zero out coefficients of subsets smaller than this");
    spectrum->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    spectrum->add_option("--out", out_path);
    spectrum->add_option("--jobs", jobs)->envname("FEI_LAB_JOBS");

    auto* compose_cmd = app.add_subcommand(
        "compose", "Disjoint composition from a JSON spec, with identity checks");
    std::string compose_mu;  // empty = keep the spec's biases
    compose_cmd->add_option("--input", input, "Composition spec JSON file")->required();
    compose_cmd->add_option("--mu", compose_mu,
                            "Override the spec's biases (comma list or 'uniform')");
    compose_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    compose_cmd->add_option("--out", out_path);

    auto* amplify = app.add_subcommand(
        "amplify", "Self-composition entropy/influence table and its ratio limit");
    std::string outer_input, base_input, amplify_format = "csv";
    int levels_m = 10;
    amplify->add_option("--F", outer_input, "Outer balanced function")->required();
    amplify->add_option("--g", base_input, "Base function (defaults to --F)");
    amplify->add_option("--m", levels_m, "Highest composition level")
        ->check(CLI::NonNegativeNumber);
    amplify->add_option("--format", amplify_format)
        ->check(CLI::IsMember({"json", "csv"}));
    amplify->add_option("--out", out_path);

    auto* verify = app.add_subcommand(
        "verify", "Sweep the per-term and product-measure entropy bounds");
    int grid_arity = 3, uniform_arity = 4, random_arity = 6;
    long long samples = 100000;
    double slack = 1e-10;
    std::string grid_flag = "-0.8,-0.4,0,0.4,0.8";
    verify->add_option("--grid", grid_flag, "Bias grid levels for the exhaustive part");
    verify->add_option("--grid-arity", grid_arity, "Exhaustive grid sweep up to arity")
        ->check(CLI::Range(0, 3));
    verify->add_option("--uniform-arity", uniform_arity,
                       "Exhaustive uniform-measure sweep up to arity (0 = skip)")
        ->check(CLI::Range(0, 4));
    verify->add_option("--samples", samples, "Random (function, bias) samples");
    verify->add_option("--random-arity", random_arity, "Random sweep max arity")
        ->check(CLI::Range(1, 6));
    verify->add_option("--seed", seed);
    verify->add_option("--slack", slack, "Additive tolerance on every bound");
    verify->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    verify->add_option("--out", out_path);
    verify->add_option("--jobs", jobs)->envname("FEI_LAB_JOBS");

    auto* search = app.add_subcommand("search", "Hunt for extreme-ratio functions");
    std::string mode = "exhaustive", constraint_flag = "any";
    std::string search_grid = "uniform";
    int arity = 0, restarts = 8, max_steps = 64;
    bool quotient = false;
    search->add_option("--mode", mode)
        ->check(CLI::IsMember({"exhaustive", "local", "worst-case"}));
    search->add_option("--arity", arity, "Function arity (default per mode)");
    search->add_option("--constraint", constraint_flag)
        ->check(CLI::IsMember({"any", "balanced"}));
    search->add_flag("--quotient", quotient,
                     "Scan one representative per symmetry orbit");
    search->add_option("--grid", search_grid,
                       "worst-case mode: bias levels, or 'uniform'");
    search->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
    search->add_option("--steps", max_steps)->check(CLI::NonNegativeNumber);
    search->add_option("--seed", seed);
    search->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    search->add_option("--out", out_path);
    search->add_option("--jobs", jobs)->envname("FEI_LAB_JOBS");

    auto* parse = app.add_subcommand("parse", "Parse and validate a formula");
    std::string formula_text;
    parse->add_option("formula", formula_text, "Formula text (or use --input)");
    parse->add_option("--input", input, "Formula text");
    parse->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    parse->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*analyze) {
            RunManifest m;
            m.subcommand = "analyze";
            m.add_flag("mu", mu_flag);
            m.add_flag("format", format);
            if (dump_table) m.add_flag("dump-table", "true");
            FunctionInput in = resolve_input(input, basis);
            m.inputs.emplace_back("input", in.digest);
            return run_analyze(in, mu_flag, format, out_path, jobs, dump_table, basis,
                               std::move(m));
        }
        if (*spectrum) {
            RunManifest m;
            m.subcommand = "spectrum";
            m.add_flag("mu", mu_flag);
            m.add_flag("format", format);
            m.add_flag("min-degree", std::to_string(min_degree));
            FunctionInput in = resolve_input(input, basis);
            m.inputs.emplace_back("input", in.digest);
            return run_spectrum(in, mu_flag, min_degree, format, out_path, jobs,
                                std::move(m));
        }
        if (*compose_cmd) {
            RunManifest m;
            m.subcommand = "compose";
            if (!compose_mu.empty()) m.add_flag("mu", compose_mu);
            m.add_flag("format", format);
            return run_compose(input, compose_mu, format, out_path, std::move(m));
        }
        if (*amplify) {
            RunManifest m;
            m.subcommand = "amplify";
            m.add_flag("m", std::to_string(levels_m));
            m.add_flag("format", amplify_format);
            if (base_input.empty()) base_input = outer_input;
            FunctionInput fin = resolve_input(outer_input, basis);
            FunctionInput gin = resolve_input(base_input, basis);
            m.inputs.emplace_back("F", fin.digest);
            m.inputs.emplace_back("g", gin.digest);
            return run_amplify(fin, gin, levels_m, amplify_format, out_path,
                               std::move(m));
        }
        if (*verify) {
            RunManifest m;
            m.subcommand = "verify";
            m.add_flag("grid", grid_flag);
            m.add_flag("grid-arity", std::to_string(grid_arity));
            m.add_flag("uniform-arity", std::to_string(uniform_arity));
            m.add_flag("samples", std::to_string(samples));
            m.add_flag("random-arity", std::to_string(random_arity));
            m.add_flag("slack", format_double(slack));
            m.add_flag("format", format);
            m.seed = seed;
            return run_verify(grid_arity, parse_levels(grid_flag), uniform_arity,
                              samples, random_arity, seed, slack, jobs, format,
                              out_path, std::move(m));
        }
        if (*search) {
            RunManifest m;
            m.subcommand = "search";
            m.add_flag("mode", mode);
            m.add_flag("format", format);
            const SearchConstraint c = constraint_flag == "balanced"
                                           ? SearchConstraint::kBalanced
                                           : SearchConstraint::kAny;
            if (mode == "exhaustive") {
                if (arity == 0) arity = 4;
                m.add_flag("arity", std::to_string(arity));
                m.add_flag("constraint", constraint_flag);
                m.add_flag("quotient", quotient ? "true" : "false");
                return run_search_exhaustive(arity, c, quotient, jobs, format, out_path,
                                             std::move(m));
            }
            if (mode == "local") {
                LocalSearchOptions opt;
                opt.arity = arity == 0 ? 6 : arity;
                opt.constraint = c;
                opt.restarts = restarts;
                opt.max_steps = max_steps;
                opt.seed = seed;
                opt.jobs = jobs;
                m.add_flag("arity", std::to_string(opt.arity));
                m.add_flag("constraint", constraint_flag);
                m.add_flag("restarts", std::to_string(restarts));
                m.add_flag("steps", std::to_string(max_steps));
                m.seed = seed;
                return run_search_local(opt, format, out_path, std::move(m));
            }
            if (arity == 0) arity = 2;
            m.add_flag("arity", std::to_string(arity));
            m.add_flag("grid", search_grid);
            return run_search_worst_case(arity, parse_levels(search_grid), jobs, format,
                                         out_path, std::move(m));
        }
        if (*parse) {
            RunManifest m;
            m.subcommand = "parse";
            m.add_flag("format", format);
            const std::string text = formula_text.empty() ? input : formula_text;
            if (text.empty()) throw CliError("parse needs a formula argument or --input");
            m.add_input("input", text);
            return run_parse(text, format, out_path, basis, std::move(m));
        }
    } catch (const FormulaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
