#pragma once
// Read-once formulas over a bounded-arity gate basis: a small recursive-descent
// parser for the grammar
//
//   expr := IDENT '(' expr (',' expr)* ')' | VAR        VAR := 'x' digits
//
// (whitespace-insensitive, gate names case-insensitive, variables global and
// explicit), plus the structural-induction analyzer that computes the root's
// biased measures purely from per-gate closed forms — never from a dense table
// of the whole formula — and checks the composition bound at the root.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "feilab/boolfn.hpp"

namespace feilab {

// Parse/validation/analysis failure with a source position (1-based).
class FormulaError : public std::runtime_error {
public:
    FormulaError(const std::string& msg, int line, int col);
    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_, col_;
};

struct FormulaNode {
    enum class Kind { kLeaf, kGate };
    Kind kind = Kind::kLeaf;
    // Leaf: variable index (0-based; "x3" is index 2) and an optional negation
    // folded in from a wrapping NOT.
    int var = -1;
    bool negated = false;
    // Gate: canonical basis name (e.g. "AND2", "MAJ3", "NOT") and children.
    std::string gate;
    std::vector<FormulaNode> children;
    // Source position of the node's first token.
    int line = 1, col = 1;
};

// Named gate tables, arity 1..8. Lookup is case-insensitive; the bare names
// AND/OR/XOR resolve to AND<k>/OR<k>/XOR<k> by the argument count.
class GateBasis {
public:
    static constexpr int kMaxGateArity = 8;

    // NOT, MAJ3, and AND/OR/XOR at each arity 2..8.
    static GateBasis standard();

    // Registers (or replaces) a gate under an upper-cased name.
    void register_gate(const std::string& name, TruthTable table);
    // Resolves a gate for `arity` children; returns the canonical name and
    // table, or nullopt when the name is unknown. Throws FormulaError-free;
    // arity mismatches are reported by the caller with positions.
    struct Resolved {
        std::string name;
        const TruthTable* table;
    };
    std::optional<Resolved> find(const std::string& name, int arity) const;
    bool has(const std::string& name) const;
    int max_arity() const;

private:
    std::map<std::string, TruthTable> gates_;
};

// Parses one expression covering the whole input. Throws FormulaError with a
// position on syntax errors, unknown gates, arity mismatches, and variable
// indices outside x1..x24. NOT around a leaf folds into the leaf; NOT around
// a gate stays as an arity-1 gate.
FormulaNode parse_formula(const std::string& text, const GateBasis& basis);

// Canonical unparse; parse_formula(format_formula(ast)) == ast structurally.
std::string format_formula(const FormulaNode& ast);

// Read-once check: every variable at most once. Reports the first duplicated
// variable with both source positions.
struct DuplicateVariable {
    int var = 0;  // 0-based index
    int first_line = 0, first_col = 0;
    int second_line = 0, second_col = 0;
};
std::optional<DuplicateVariable> find_duplicate_variable(const FormulaNode& ast);

// Number of table coordinates: max variable index + 1 (unused indices below
// the max are legal and become irrelevant coordinates).
int formula_arity(const FormulaNode& ast);

// Dense evaluation (repeated variables allowed); arity <= 24.
TruthTable formula_to_table(const FormulaNode& ast, const GateBasis& basis);

// Per-node measures under mu, computed bottom-up. `eta` is the node's mean —
// the bias its parent sees. `gate_ratio` is the gate's FEI+ ratio at the
// children's means (absent for leaves and for gates with a degenerate
// influence-variance gap, e.g. NOT).
struct NodeMeasures {
    std::string label;  // "x3", "NOT(x3)", or the canonical gate name
    double eta = 0.0;
    double variance = 0.0;
    double influence = 0.0;
    double entropy_ge1 = 0.0;
    std::optional<double> gate_ratio;
    int line = 1, col = 1;
};

struct ReadOnceReport {
    std::vector<NodeMeasures> nodes;  // pre-order over the AST
    // Root measures from the per-gate closed forms.
    double mean = 0.0, variance = 0.0, influence = 0.0, entropy_ge1 = 0.0;
    // Max over gates with a defined ratio (0 when none is defined).
    double max_gate_ratio = 0.0;
    bool any_gate_ratio = false;
    // Root entropy <= max_gate_ratio * (influence - variance) + 1e-9 — the
    // composition bound with the best measured per-gate constant.
    bool root_bound_holds = false;
    // Dense cross-check, run automatically when the formula has <= 16
    // variables: max |closed - dense| over (mean, variance, influence, H>=1).
    bool cross_checked = false;
    double cross_check_error = 0.0;
};

// Structural induction over a read-once AST: each gate's measures come from
// its basis table at the children's means via the composition identities.
// Throws FormulaError on repeated variables and on subformulas that are
// (near-)constant under mu, naming the offending subtree.
ReadOnceReport analyze_read_once(const FormulaNode& ast, const GateBasis& basis,
                                 const BiasVector& mu);

} // namespace feilab
