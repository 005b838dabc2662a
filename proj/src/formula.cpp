#include "feilab/formula.hpp"

#include <cassert>
#include <cctype>
#include <cmath>

#include "feilab/fourier.hpp"
#include "feilab/measures.hpp"

namespace feilab {
namespace {

std::string position_prefix(int line, int col) {
    return "line " + std::to_string(line) + ":" + std::to_string(col) + ": ";
}

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

bool is_variable_token(const std::string& ident) {
    if (ident.size() < 2) return false;
    if (ident[0] != 'x' && ident[0] != 'X') return false;
    for (size_t i = 1; i < ident.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(ident[i]))) return false;
    return true;
}

} // namespace

FormulaError::FormulaError(const std::string& msg, int line, int col)
    : std::runtime_error(position_prefix(line, col) + msg), line_(line), col_(col) {}

void GateBasis::register_gate(const std::string& name, TruthTable table) {
    if (table.arity() < 1 || table.arity() > kMaxGateArity)
        throw std::invalid_argument("gate arity must be 1.." +
                                    std::to_string(kMaxGateArity));
    gates_.insert_or_assign(upper(name), std::move(table));
}

GateBasis GateBasis::standard() {
    GateBasis b;
    b.register_gate("NOT", make_not1());
    b.register_gate("MAJ3", make_maj3());
    for (int k = 2; k <= kMaxGateArity; ++k) {
        const std::string suffix = std::to_string(k);
        b.register_gate("AND" + suffix, make_and(k));
        b.register_gate("OR" + suffix, make_or(k));
        b.register_gate("XOR" + suffix, make_xor(k));
    }
    return b;
}

bool GateBasis::has(const std::string& name) const {
    return gates_.count(upper(name)) != 0;
}

int GateBasis::max_arity() const {
    int m = 0;
    for (const auto& [name, table] : gates_) m = std::max(m, table.arity());
    return m;
}

std::optional<GateBasis::Resolved> GateBasis::find(const std::string& name,
                                                   int arity) const {
    const std::string key = upper(name);
    auto it = gates_.find(key);
    if (it != gates_.end())
        return it->second.arity() == arity
                   ? std::optional<Resolved>{Resolved{key, &it->second}}
                   : std::nullopt;
    // Bare AND/OR/XOR style names resolve by argument count.
    it = gates_.find(key + std::to_string(arity));
    if (it != gates_.end() && it->second.arity() == arity)
        return Resolved{it->first, &it->second};
    return std::nullopt;
}

// --- parser ---------------------------------------------------------------------

namespace {

class Parser {
public:
    Parser(const std::string& text, const GateBasis& basis)
        : text_(text), basis_(basis) {}

    FormulaNode parse() {
        FormulaNode root = expr();
        skip_ws();
        if (pos_ < text_.size())
            throw FormulaError("unexpected input after the formula", line_, col_);
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg, int line, int col) {
        throw FormulaError(msg, line, col);
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            advance();
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    bool at_ident_start() const {
        if (pos_ >= text_.size()) return false;
        const unsigned char c = static_cast<unsigned char>(text_[pos_]);
        return std::isalpha(c) || c == '_';
    }

    std::string read_ident() {
        std::string out;
        while (pos_ < text_.size()) {
            const unsigned char c = static_cast<unsigned char>(text_[pos_]);
            if (!std::isalnum(c) && c != '_') break;
            out.push_back(text_[pos_]);
            advance();
        }
        return out;
    }

    void expect(char c, const std::string& what) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c)
            fail("expected " + what, line_, col_);
        advance();
    }

    FormulaNode leaf_from_token(const std::string& ident, int line, int col) {
        long idx = 0;
        for (size_t i = 1; i < ident.size(); ++i) {
            idx = idx * 10 + (ident[i] - '0');
            if (idx > kMaxArity) break;
        }
        if (idx < 1)
            fail("variable indices start at x1", line, col);
        if (idx > kMaxArity)
            fail("variable index exceeds x" + std::to_string(kMaxArity), line, col);
        FormulaNode node;
        node.kind = FormulaNode::Kind::kLeaf;
        node.var = static_cast<int>(idx - 1);
        node.line = line;
        node.col = col;
        return node;
    }

    FormulaNode expr() {
        skip_ws();
        const int line = line_, col = col_;
        if (!at_ident_start()) {
            if (pos_ >= text_.size()) fail("expected a gate or variable", line, col);
            fail(std::string("unexpected character '") + text_[pos_] + "'", line, col);
        }
        const std::string ident = read_ident();
        if (is_variable_token(ident)) return leaf_from_token(ident, line, col);

        expect('(', "'(' after gate name '" + ident + "'");
        std::vector<FormulaNode> children;
        children.push_back(expr());
        skip_ws();
        while (pos_ < text_.size() && text_[pos_] == ',') {
            advance();
            children.push_back(expr());
            skip_ws();
        }
        expect(')', "')' or ',' in the argument list of '" + ident + "'");
        return make_gate(ident, std::move(children), line, col);
    }

    FormulaNode make_gate(const std::string& ident, std::vector<FormulaNode> children,
                          int line, int col) {
        const std::string name = upper(ident);
        const int nargs = static_cast<int>(children.size());
        if (name == "NOT") {
            if (nargs != 1)
                fail("NOT takes exactly 1 argument, got " + std::to_string(nargs),
                     line, col);
            if (children[0].kind == FormulaNode::Kind::kLeaf) {
                children[0].negated = !children[0].negated;
                return std::move(children[0]);
            }
        }
        auto resolved = basis_.find(name, nargs);
        if (!resolved) {
            if (basis_.has(name))
                fail("gate '" + name + "' does not take " + std::to_string(nargs) +
                         " argument(s)",
                     line, col);
            fail("no gate '" + name + "' with " + std::to_string(nargs) +
                     " input(s) in the basis",
                 line, col);
        }
        FormulaNode node;
        node.kind = FormulaNode::Kind::kGate;
        node.gate = resolved->name;
        node.children = std::move(children);
        node.line = line;
        node.col = col;
        return node;
    }

    const std::string& text_;
    const GateBasis& basis_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

} // namespace

FormulaNode parse_formula(const std::string& text, const GateBasis& basis) {
    return Parser(text, basis).parse();
}

std::string format_formula(const FormulaNode& ast) {
    if (ast.kind == FormulaNode::Kind::kLeaf) {
        const std::string name = "x" + std::to_string(ast.var + 1);
        return ast.negated ? "NOT(" + name + ")" : name;
    }
    std::string out = ast.gate + "(";
    for (size_t i = 0; i < ast.children.size(); ++i) {
        if (i) out += ",";
        out += format_formula(ast.children[i]);
    }
    return out + ")";
}

namespace {

void walk_leaves(const FormulaNode& node, std::optional<DuplicateVariable>& dup,
                 std::vector<std::pair<int, int>>& seen) {
    if (dup) return;
    if (node.kind == FormulaNode::Kind::kLeaf) {
        if (static_cast<size_t>(node.var) >= seen.size())
            seen.resize(node.var + 1, {0, 0});
        auto& first = seen[node.var];
        if (first.first != 0) {
            dup = DuplicateVariable{node.var, first.first, first.second, node.line,
                                    node.col};
        } else {
            first = {node.line, node.col};
        }
        return;
    }
    for (const FormulaNode& c : node.children) walk_leaves(c, dup, seen);
}

} // namespace

std::optional<DuplicateVariable> find_duplicate_variable(const FormulaNode& ast) {
    std::optional<DuplicateVariable> dup;
    std::vector<std::pair<int, int>> seen;
    walk_leaves(ast, dup, seen);
    return dup;
}

int formula_arity(const FormulaNode& ast) {
    if (ast.kind == FormulaNode::Kind::kLeaf) return ast.var + 1;
    int n = 0;
    for (const FormulaNode& c : ast.children) n = std::max(n, formula_arity(c));
    return n;
}

namespace {

int eval_node(const FormulaNode& node, const GateBasis& basis, uint64_t a) {
    if (node.kind == FormulaNode::Kind::kLeaf) {
        const int v = (a >> node.var & 1) ? -1 : +1;
        return node.negated ? -v : v;
    }
    uint64_t index = 0;
    for (size_t i = 0; i < node.children.size(); ++i)
        if (eval_node(node.children[i], basis, a) < 0) index |= uint64_t{1} << i;
    auto resolved = basis.find(node.gate, static_cast<int>(node.children.size()));
    assert(resolved);
    return resolved->table->value(index);
}

} // namespace

TruthTable formula_to_table(const FormulaNode& ast, const GateBasis& basis) {
    const int n = formula_arity(ast);
    TruthTable out(n);
    for (uint64_t a = 0; a < (uint64_t{1} << n); ++a)
        out.set_value(a, eval_node(ast, basis, a));
    return out;
}

// --- read-once analysis -----------------------------------------------------------

namespace {

struct NodeStats {
    double eta = 0.0;       // mean under mu
    double variance = 0.0;
    double influence = 0.0;
    double entropy_ge1 = 0.0;
};

NodeStats analyze_node(const FormulaNode& node, const GateBasis& basis,
                       const BiasVector& mu, std::vector<NodeMeasures>& out) {
    const size_t slot = out.size();
    out.emplace_back();

    NodeStats stats;
    if (node.kind == FormulaNode::Kind::kLeaf) {
        const double bias = mu.bias(node.var);
        stats.eta = node.negated ? -bias : bias;
        stats.variance = mu.sigma_sq(node.var);
        stats.influence = stats.variance;
        stats.entropy_ge1 = 0.0;
    } else {
        std::vector<NodeStats> child_stats;
        child_stats.reserve(node.children.size());
        for (const FormulaNode& c : node.children)
            child_stats.push_back(analyze_node(c, basis, mu, out));
        std::vector<double> eta(node.children.size());
        for (size_t i = 0; i < node.children.size(); ++i) {
            eta[i] = child_stats[i].eta;
            if (std::abs(eta[i]) > 1.0 - kBiasGuard)
                throw FormulaError("subformula '" + format_formula(node.children[i]) +
                                       "' is (near-)constant under the biases",
                                   node.children[i].line, node.children[i].col);
        }
        auto resolved = basis.find(node.gate, static_cast<int>(node.children.size()));
        assert(resolved);
        const Spectrum sp = biased_transform(*resolved->table, BiasVector(eta));
        const double gate_entropy = spectral_entropy_ge1(sp);
        const double gate_influence = total_influence(sp);
        const double gate_variance = variance(sp);

        stats.eta = sp.coeff(0);
        stats.variance = gate_variance;
        stats.entropy_ge1 = gate_entropy;
        const int k = static_cast<int>(node.children.size());
        for (SubsetMask s = 1; s < (uint64_t{1} << k); ++s) {
            const double c2 = sp.coeff(s) * sp.coeff(s);
            if (c2 == 0.0) continue;
            double hsum = 0.0, isum = 0.0;
            for (int i = 0; i < k; ++i) {
                if (!(s >> i & 1)) continue;
                hsum += child_stats[i].entropy_ge1 / child_stats[i].variance;
                isum += child_stats[i].influence / child_stats[i].variance;
            }
            stats.entropy_ge1 += c2 * hsum;
            stats.influence += c2 * isum;
        }

        const double gap = gate_influence - gate_variance;
        if (gap > kRatioEps) out[slot].gate_ratio = gate_entropy / gap;
    }

    NodeMeasures& m = out[slot];
    if (node.kind == FormulaNode::Kind::kLeaf) {
        m.label = "x" + std::to_string(node.var + 1);
        if (node.negated) m.label = "NOT(" + m.label + ")";
    } else {
        m.label = node.gate;
    }
    m.eta = stats.eta;
    m.variance = stats.variance;
    m.influence = stats.influence;
    m.entropy_ge1 = stats.entropy_ge1;
    m.line = node.line;
    m.col = node.col;
    return stats;
}

} // namespace

ReadOnceReport analyze_read_once(const FormulaNode& ast, const GateBasis& basis,
                                 const BiasVector& mu) {
    if (auto dup = find_duplicate_variable(ast))
        throw FormulaError("variable x" + std::to_string(dup->var + 1) +
                               " appears more than once (first at line " +
                               std::to_string(dup->first_line) + ":" +
                               std::to_string(dup->first_col) + ")",
                           dup->second_line, dup->second_col);
    const int n = formula_arity(ast);
    if (mu.arity() != n)
        throw std::invalid_argument("bias vector has arity " +
                                    std::to_string(mu.arity()) + ", formula needs " +
                                    std::to_string(n));

    ReadOnceReport rep;
    const NodeStats root = analyze_node(ast, basis, mu, rep.nodes);
    rep.mean = root.eta;
    rep.variance = root.variance;
    rep.influence = root.influence;
    rep.entropy_ge1 = root.entropy_ge1;

    for (const NodeMeasures& m : rep.nodes) {
        if (!m.gate_ratio) continue;
        rep.any_gate_ratio = true;
        rep.max_gate_ratio = std::max(rep.max_gate_ratio, *m.gate_ratio);
    }
    rep.root_bound_holds =
        rep.entropy_ge1 <=
        rep.max_gate_ratio * (rep.influence - rep.variance) + 1e-9;

    if (n <= 16) {
        const Spectrum sp = biased_transform(formula_to_table(ast, basis), mu);
        double err = std::abs(sp.coeff(0) - rep.mean);
        err = std::max(err, std::abs(variance(sp) - rep.variance));
        err = std::max(err, std::abs(total_influence(sp) - rep.influence));
        err = std::max(err, std::abs(spectral_entropy_ge1(sp) - rep.entropy_ge1));
        rep.cross_checked = true;
        rep.cross_check_error = err;
    }
    return rep;
}

} // namespace feilab
