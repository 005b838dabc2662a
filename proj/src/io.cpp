#include "feilab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "json.hpp"

namespace feilab {

std::string format_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in output");
    if (v == 0.0) return "0";  // normalizes -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// --- JSON writer ------------------------------------------------------------------

void JsonWriter::newline() {
    out_.push_back('\n');
    out_.append(2 * stack_.size(), ' ');
}

void JsonWriter::prepare_slot() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (stack_.empty()) return;
    if (stack_.back().second) out_.push_back(',');
    stack_.back().second = true;
    newline();
}

JsonWriter& JsonWriter::begin_object() {
    prepare_slot();
    out_.push_back('{');
    stack_.emplace_back(true, false);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    const bool had_values = stack_.back().second;
    stack_.pop_back();
    if (had_values) newline();
    out_.push_back('}');
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    prepare_slot();
    out_.push_back('[');
    stack_.emplace_back(false, false);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    const bool had_values = stack_.back().second;
    stack_.pop_back();
    if (had_values) newline();
    out_.push_back(']');
    return *this;
}

JsonWriter& JsonWriter::key(std::string_view name) {
    prepare_slot();
    out_.push_back('"');
    out_.append(name);
    out_.append("\": ");
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    prepare_slot();
    out_.append(format_double(v));
    return *this;
}

JsonWriter& JsonWriter::value(int v) {
    prepare_slot();
    out_.append(std::to_string(v));
    return *this;
}

JsonWriter& JsonWriter::value(uint64_t v) {
    prepare_slot();
    out_.append(std::to_string(v));
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    prepare_slot();
    out_.append(v ? "true" : "false");
    return *this;
}

JsonWriter& JsonWriter::value(std::string_view s) {
    prepare_slot();
    out_.push_back('"');
    for (char c : s) {
        switch (c) {
            case '"': out_.append("\\\""); break;
            case '\\': out_.append("\\\\"); break;
            case '\n': out_.append("\\n"); break;
            case '\t': out_.append("\\t"); break;
            case '\r': out_.append("\\r"); break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out_.append(buf);
                } else {
                    out_.push_back(c);
                }
        }
    }
    out_.push_back('"');
    return *this;
}

JsonWriter& JsonWriter::value_null() {
    prepare_slot();
    out_.append("null");
    return *this;
}

// --- digests ----------------------------------------------------------------------

uint64_t fnv1a64(std::string_view bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string digest_string(std::string_view bytes) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

// --- file formats -----------------------------------------------------------------

namespace {

using nlohmann::json;

json parse_strict(const std::string& text) {
    json j = json::parse(text, nullptr, true, /*ignore_comments=*/false);
    return j;
}

TruthTable table_from_json(const json& j, const char* what) {
    if (!j.is_object() || !j.contains("n") || !j.contains("hex"))
        throw std::runtime_error(std::string(what) +
                                 " must be an object with fields \"n\" and \"hex\"");
    if (!j["n"].is_number_integer())
        throw std::runtime_error(std::string(what) + ": \"n\" must be an integer");
    if (!j["hex"].is_string())
        throw std::runtime_error(std::string(what) + ": \"hex\" must be a string");
    const int n = j["n"].get<int>();
    if (n < 1 || n > kMaxArity)
        throw std::runtime_error(std::string(what) + ": arity out of range 1..24");
    return TruthTable::from_hex(n, j["hex"].get<std::string>());
}

} // namespace

TruthTable read_table_json(const std::string& text) {
    json j;
    try {
        j = parse_strict(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("invalid JSON: ") + e.what());
    }
    return table_from_json(j, "truth table");
}

std::string write_table_json(const TruthTable& f) {
    JsonWriter w;
    w.begin_object();
    w.key("n").value(f.arity());
    w.key("hex").value(f.to_hex());
    w.end_object();
    return w.str() + "\n";
}

std::string write_spectrum_json(const Spectrum& sp) {
    JsonWriter w;
    w.begin_object();
    w.key("n").value(sp.basis().arity());
    w.key("mu").begin_array();
    for (double m : sp.basis().biases()) w.value(m);
    w.end_array();
    w.key("coeffs").begin_array();
    for (const auto& [mask, value] : sp.sparse_entries()) {
        w.begin_array().value(mask).value(value).end_array();
    }
    w.end_array();
    w.end_object();
    return w.str() + "\n";
}

CompositionSpec read_composition_spec_json(const std::string& text) {
    json j;
    try {
        j = parse_strict(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("outer") || !j.contains("inner"))
        throw std::runtime_error(
            "composition spec needs fields \"outer\", \"inner\", and \"mu\"");
    TruthTable outer = table_from_json(j["outer"], "outer function");
    if (!j["inner"].is_array() || j["inner"].empty())
        throw std::runtime_error("\"inner\" must be a non-empty array of tables");
    std::vector<TruthTable> inner;
    int total = 0;
    for (const json& t : j["inner"]) {
        inner.push_back(table_from_json(t, "inner function"));
        total += inner.back().arity();
    }
    std::vector<double> mu;
    if (!j.contains("mu") || (j["mu"].is_string() && j["mu"] == "uniform")) {
        mu.assign(total, 0.0);
    } else if (j["mu"].is_array()) {
        for (const json& v : j["mu"]) {
            if (!v.is_number())
                throw std::runtime_error("\"mu\" entries must be numbers");
            mu.push_back(v.get<double>());
        }
    } else {
        throw std::runtime_error("\"mu\" must be \"uniform\" or an array of biases");
    }
    return CompositionSpec(std::move(outer), std::move(inner),
                           BiasVector(std::move(mu)));
}

// --- run manifest -----------------------------------------------------------------

void RunManifest::add_flag(std::string name, std::string value) {
    flags.emplace_back(std::move(name), std::move(value));
}

void RunManifest::add_input(std::string name, std::string_view bytes) {
    inputs.emplace_back(std::move(name), digest_string(bytes));
}

void RunManifest::sort() {
    std::sort(flags.begin(), flags.end());
    std::sort(inputs.begin(), inputs.end());
}

void write_manifest(JsonWriter& w, const RunManifest& m) {
    w.begin_object();
    w.key("tool").value(std::string_view(RunManifest::kTool));
    w.key("version").value(std::string_view(RunManifest::kVersion));
    w.key("subcommand").value(std::string_view(m.subcommand));
    w.key("flags").begin_object();
    for (const auto& [name, value] : m.flags) w.key(name).value(std::string_view(value));
    w.end_object();
    w.key("inputs").begin_object();
    for (const auto& [name, digest] : m.inputs)
        w.key(name).value(std::string_view(digest));
    w.end_object();
    if (m.seed)
        w.key("seed").value(*m.seed);
    else
        w.key("seed").value_null();
    w.end_object();
}

std::string manifest_comment(const RunManifest& m) {
    std::string line = "# tool=";
    line += RunManifest::kTool;
    line += " version=";
    line += RunManifest::kVersion;
    line += " subcommand=" + m.subcommand;
    for (const auto& [name, value] : m.flags) line += " " + name + "=" + value;
    for (const auto& [name, digest] : m.inputs) line += " " + name + "=" + digest;
    if (m.seed) line += " seed=" + std::to_string(*m.seed);
    return line;
}

} // namespace feilab
