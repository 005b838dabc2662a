#pragma once
// Serialization: deterministic decimal formatting (12 significant digits with
// a shortest-round-trip fallback), a tiny order-preserving JSON writer for
// byte-stable outputs, FNV-1a input digests, and the on-disk formats — truth
// tables {"n", "hex"}, spectra {"n", "mu", "coeffs"}, and composition specs.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "feilab/boolfn.hpp"
#include "feilab/compose.hpp"
#include "feilab/fourier.hpp"

namespace feilab {

// %.12g, upgraded to %.17g when 12 digits do not round-trip the exact value.
// Negative zero is normalized; non-finite values are rejected.
std::string format_double(double v);

// Minimal streaming JSON writer. Keys are emitted in call order, numbers via
// format_double, output is pretty-printed with two-space indent — the same
// calls always produce the same bytes.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(std::string_view name);
    JsonWriter& value(double v);
    JsonWriter& value(int v);
    JsonWriter& value(uint64_t v);
    JsonWriter& value(bool v);
    JsonWriter& value(std::string_view s);
    JsonWriter& value(const char* s) { return value(std::string_view(s)); }
    JsonWriter& value_null();

    const std::string& str() const { return out_; }

private:
    void prepare_slot();
    void newline();

    std::string out_;
    // One frame per open container: whether it's an object and whether a
    // value has already been written at this level.
    std::vector<std::pair<bool, bool>> stack_;
    bool pending_key_ = false;
};

uint64_t fnv1a64(std::string_view bytes);
// "fnv1a64:<16 hex digits>" — the digest format used in run manifests.
std::string digest_string(std::string_view bytes);

// Truth-table file format: {"n": int, "hex": string}, hex exactly
// ceil(2^n / 4) digits, bit a set <=> value at assignment a is -1.
TruthTable read_table_json(const std::string& text);
std::string write_table_json(const TruthTable& f);

// Spectrum: {"n": int, "mu": [..], "coeffs": [[mask, value], ..]} with masks
// ascending; coefficients below the sparsity threshold are dropped.
std::string write_spectrum_json(const Spectrum& sp);

// Composition spec: {"outer": table, "inner": [table, ..],
// "mu": [..] | "uniform"}.
CompositionSpec read_composition_spec_json(const std::string& text);

// Everything a run needs to be reproduced, embedded in every output.
struct RunManifest {
    static constexpr const char* kTool = "feilab";
    static constexpr const char* kVersion = "1.0.0";

    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> flags;    // sorted by key
    std::vector<std::pair<std::string, std::string>> inputs;   // (name, digest)
    std::optional<uint64_t> seed;

    void add_flag(std::string name, std::string value);
    void add_input(std::string name, std::string_view bytes);
    void sort();
};

// Writes the manifest under the current key/slot of `w` as one JSON object.
void write_manifest(JsonWriter& w, const RunManifest& m);
// One-line rendering for CSV outputs ("# tool=... subcommand=... ...").
std::string manifest_comment(const RunManifest& m);

} // namespace feilab
