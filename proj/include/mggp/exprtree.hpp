#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mggp/error.hpp"
#include "mggp/rng.hpp"

namespace mggp {

enum class OpCode : std::uint8_t { Add, Sub, Mul, Div, Sin, Cos, SqrtAbs, Square, Exp, LogAbs };

inline constexpr std::array<OpCode, 10> kAllOps = {
    OpCode::Add, OpCode::Sub,     OpCode::Mul,    OpCode::Div, OpCode::Sin,
    OpCode::Cos, OpCode::SqrtAbs, OpCode::Square, OpCode::Exp, OpCode::LogAbs,
};

constexpr int arity(OpCode op) noexcept {
    switch (op) {
    case OpCode::Add:
    case OpCode::Sub:
    case OpCode::Mul:
    case OpCode::Div:
        return 2;
    default:
        return 1;
    }
}

/// Token used in the prefix serialization.
constexpr std::string_view op_name(OpCode op) noexcept {
    switch (op) {
    case OpCode::Add: return "add";
    case OpCode::Sub: return "sub";
    case OpCode::Mul: return "mul";
    case OpCode::Div: return "div";
    case OpCode::Sin: return "sin";
    case OpCode::Cos: return "cos";
    case OpCode::SqrtAbs: return "sqrtabs";
    case OpCode::Square: return "square";
    case OpCode::Exp: return "exp";
    case OpCode::LogAbs: return "logabs";
    }
    return "?";
}

inline std::optional<OpCode> op_from_name(std::string_view name) noexcept {
    for (auto op : kAllOps) {
        if (op_name(op) == name) return op;
    }
    return std::nullopt;
}

struct Node {
    enum class Kind : std::uint8_t { Op, Var, Const };

    Kind kind = Kind::Const;
    OpCode op = OpCode::Add;
    std::uint16_t var = 0;
    double value = 0.0;

    static Node make_op(OpCode o) { return {Kind::Op, o, 0, 0.0}; }
    static Node variable(int index) { return {Kind::Var, OpCode::Add, static_cast<std::uint16_t>(index), 0.0}; }
    static Node constant(double v) { return {Kind::Const, OpCode::Add, 0, v}; }

    int arity() const noexcept { return kind == Kind::Op ? mggp::arity(op) : 0; }
    bool is_leaf() const noexcept { return kind != Kind::Op; }

    friend bool operator==(const Node&, const Node&) = default;
};

/// One gene: an expression tree stored as a prefix-ordered node array.
/// Every subtree occupies a contiguous range starting at its root.
class ExprTree {
public:
    explicit ExprTree(std::vector<Node> prefix) : nodes_(std::move(prefix)) {
        if (nodes_.empty()) throw std::invalid_argument("empty expression tree");
        if (subtree_end(0) != nodes_.size()) throw std::invalid_argument("malformed prefix node sequence");
    }

    static ExprTree var(int index) { return ExprTree({Node::variable(index)}); }
    static ExprTree constant(double v) { return ExprTree({Node::constant(v)}); }

    static ExprTree op(OpCode o, const ExprTree& child) {
        assert(arity(o) == 1);
        std::vector<Node> n{Node::make_op(o)};
        n.insert(n.end(), child.nodes_.begin(), child.nodes_.end());
        return ExprTree(std::move(n));
    }

    static ExprTree op(OpCode o, const ExprTree& lhs, const ExprTree& rhs) {
        assert(arity(o) == 2);
        std::vector<Node> n{Node::make_op(o)};
        n.insert(n.end(), lhs.nodes_.begin(), lhs.nodes_.end());
        n.insert(n.end(), rhs.nodes_.begin(), rhs.nodes_.end());
        return ExprTree(std::move(n));
    }

    std::span<const Node> nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// One past the last node of the subtree rooted at `i`; `nodes_.size() + 1` if truncated.
    std::size_t subtree_end(std::size_t i) const noexcept {
        std::size_t need = 1;
        while (need > 0) {
            if (i >= nodes_.size()) return nodes_.size() + 1;
            need += static_cast<std::size_t>(nodes_[i].arity());
            --need;
            ++i;
        }
        return i;
    }

    /// Level of each node, root at level 1.
    std::vector<int> levels() const {
        std::vector<int> lv(nodes_.size());
        std::vector<std::pair<int, int>> open; // (parent level, children still expected)
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const int level = open.empty() ? 1 : open.back().first + 1;
            lv[i] = level;
            if (!open.empty() && --open.back().second == 0) open.pop_back();
            if (nodes_[i].arity() > 0) open.emplace_back(level, nodes_[i].arity());
        }
        return lv;
    }

    int depth() const {
        const auto lv = levels();
        return *std::max_element(lv.begin(), lv.end());
    }

    /// Largest variable index referenced, or -1 when the tree has no variables.
    int max_variable() const noexcept {
        int m = -1;
        for (const auto& n : nodes_) {
            if (n.kind == Node::Kind::Var) m = std::max(m, static_cast<int>(n.var));
        }
        return m;
    }

    ExprTree subtree(std::size_t i) const {
        return ExprTree(std::vector<Node>(nodes_.begin() + static_cast<std::ptrdiff_t>(i),
                                          nodes_.begin() + static_cast<std::ptrdiff_t>(subtree_end(i))));
    }

    ExprTree replace_subtree(std::size_t i, const ExprTree& replacement) const {
        const auto end = subtree_end(i);
        std::vector<Node> out;
        out.reserve(nodes_.size() - (end - i) + replacement.size());
        out.insert(out.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(i));
        out.insert(out.end(), replacement.nodes_.begin(), replacement.nodes_.end());
        out.insert(out.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(end), nodes_.end());
        return ExprTree(std::move(out));
    }

    friend bool operator==(const ExprTree&, const ExprTree&) = default;

private:
    std::vector<Node> nodes_;
};

inline std::size_t node_count(const ExprTree& t) noexcept { return t.size(); }
inline int depth(const ExprTree& t) { return t.depth(); }

// ---------------------------------------------------------------------------
// Evaluation

struct EvalOutcome {
    Eigen::VectorXd values;
    bool finite = true;
};

/// Evaluates `tree` on every row of `inputs` (n rows x d columns).
/// Division and exp are unprotected; non-finite results only clear `finite`.
inline EvalOutcome eval_tree(const ExprTree& tree, const Eigen::MatrixXd& inputs) {
    const auto nodes = tree.nodes();
    const Eigen::Index rows = inputs.rows();
    std::vector<Eigen::ArrayXd> stack;
    stack.reserve(nodes.size());

    for (std::size_t k = nodes.size(); k-- > 0;) {
        const Node& n = nodes[k];
        switch (n.kind) {
        case Node::Kind::Var:
            assert(n.var < inputs.cols());
            stack.emplace_back(inputs.col(n.var).array());
            continue;
        case Node::Kind::Const:
            stack.emplace_back(Eigen::ArrayXd::Constant(rows, n.value));
            continue;
        case Node::Kind::Op:
            break;
        }

        if (arity(n.op) == 2) {
            // Reverse traversal leaves the first operand on top.
            Eigen::ArrayXd lhs = std::move(stack.back());
            stack.pop_back();
            Eigen::ArrayXd& rhs = stack.back();
            switch (n.op) {
            case OpCode::Add: rhs = lhs + rhs; break;
            case OpCode::Sub: rhs = lhs - rhs; break;
            case OpCode::Mul: rhs = lhs * rhs; break;
            case OpCode::Div: rhs = lhs / rhs; break;
            default: break;
            }
        } else {
            Eigen::ArrayXd& a = stack.back();
            switch (n.op) {
            case OpCode::Sin: a = a.sin(); break;
            case OpCode::Cos: a = a.cos(); break;
            case OpCode::SqrtAbs: a = a.abs().sqrt(); break;
            case OpCode::Square: a = a.square(); break;
            case OpCode::Exp: a = a.exp(); break;
            case OpCode::LogAbs: a = a.abs().log(); break;
            default: break;
            }
        }
    }

    assert(stack.size() == 1);
    EvalOutcome out;
    out.values = std::move(stack.back()).matrix();
    out.finite = out.values.allFinite();
    return out;
}

// ---------------------------------------------------------------------------
// Random construction and variation

enum class InitMethod { Grow, Full };

/// Shape limits and leaf distribution for generated trees.
struct TreeLimits {
    int max_depth = 5;
    int var_count = 6;
    double const_lo = -10.0;
    double const_hi = 10.0;
    double p_var = 0.8; // probability that a leaf is a variable rather than a constant
};

namespace detail {

inline Node random_leaf(Rng& rng, const TreeLimits& lim) {
    if (coin(rng, lim.p_var)) return Node::variable(static_cast<int>(uniform_index(rng, static_cast<std::size_t>(lim.var_count))));
    return Node::constant(uniform_real(rng, lim.const_lo, lim.const_hi));
}

inline void grow_into(std::vector<Node>& out, Rng& rng, int level, int max_depth, InitMethod method,
                      const TreeLimits& lim) {
    bool leaf = level >= max_depth;
    if (!leaf && method == InitMethod::Grow) {
        // Uniform pick over the primitive set: var_count variables + one constant class + ten operators.
        const auto terminals = static_cast<double>(lim.var_count + 1);
        leaf = coin(rng, terminals / (terminals + static_cast<double>(kAllOps.size())));
    }
    if (leaf) {
        out.push_back(random_leaf(rng, lim));
        return;
    }
    const OpCode op = kAllOps[uniform_index(rng, kAllOps.size())];
    out.push_back(Node::make_op(op));
    for (int c = 0; c < arity(op); ++c) grow_into(out, rng, level + 1, max_depth, method, lim);
}

} // namespace detail

/// Random tree of depth <= `max_depth` (exactly `max_depth` on every branch for Full).
inline ExprTree random_tree(Rng& rng, int max_depth, InitMethod method, const TreeLimits& lim) {
    std::vector<Node> nodes;
    detail::grow_into(nodes, rng, 1, std::max(1, max_depth), method, lim);
    return ExprTree(std::move(nodes));
}

/// Ramped half-and-half: depth uniform in [2, max_depth], grow or full with equal odds.
inline ExprTree ramped_tree(Rng& rng, const TreeLimits& lim) {
    const int lo = std::min(2, lim.max_depth);
    const int d = lo + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(lim.max_depth - lo + 1)));
    const auto method = coin(rng, 0.5) ? InitMethod::Grow : InitMethod::Full;
    return random_tree(rng, d, method, lim);
}

/// Swaps the subtree rooted at `i` in `a` with the one rooted at `j` in `b`.
inline std::pair<ExprTree, ExprTree> swap_subtrees(const ExprTree& a, std::size_t i, const ExprTree& b, std::size_t j) {
    return {a.replace_subtree(i, b.subtree(j)), b.replace_subtree(j, a.subtree(i))};
}

inline constexpr int kCrossoverAttempts = 8;

/// Subtree crossover. Each child is retried independently until it respects
/// `max_depth`; a child still invalid after the attempt budget is its parent.
inline std::pair<ExprTree, ExprTree> subtree_crossover(Rng& rng, const ExprTree& a, const ExprTree& b, int max_depth) {
    const auto lv_a = a.levels();
    const auto lv_b = b.levels();
    std::optional<ExprTree> child_a;
    std::optional<ExprTree> child_b;

    for (int attempt = 0; attempt < kCrossoverAttempts && !(child_a && child_b); ++attempt) {
        const std::size_t i = uniform_index(rng, a.size());
        const std::size_t j = uniform_index(rng, b.size());
        const ExprTree sub_a = a.subtree(i);
        const ExprTree sub_b = b.subtree(j);
        if (!child_a && lv_a[i] - 1 + sub_b.depth() <= max_depth) child_a = a.replace_subtree(i, sub_b);
        if (!child_b && lv_b[j] - 1 + sub_a.depth() <= max_depth) child_b = b.replace_subtree(j, sub_a);
    }
    return {child_a ? std::move(*child_a) : a, child_b ? std::move(*child_b) : b};
}

/// Replaces node `i` with `replacement`.
inline ExprTree mutate_at(const ExprTree& a, std::size_t i, const ExprTree& replacement) {
    return a.replace_subtree(i, replacement);
}

/// Subtree mutation: a uniformly chosen node is replaced by a fresh grow
/// subtree whose depth keeps the result within `lim.max_depth`.
inline ExprTree subtree_mutation(Rng& rng, const ExprTree& a, const TreeLimits& lim) {
    const auto lv = a.levels();
    const std::size_t i = uniform_index(rng, a.size());
    const int room = std::max(1, lim.max_depth - lv[i] + 1);
    return mutate_at(a, i, random_tree(rng, room, InitMethod::Grow, lim));
}

// ---------------------------------------------------------------------------
// Text forms

/// Constant formatted with 17 significant digits (round-trips exactly).
inline std::string format_constant(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void serialize_into(std::string& out, std::span<const Node> nodes, std::size_t& i) {
    const Node& n = nodes[i++];
    switch (n.kind) {
    case Node::Kind::Var:
        out += 'x';
        out += std::to_string(n.var + 1);
        return;
    case Node::Kind::Const:
        out += format_constant(n.value);
        return;
    case Node::Kind::Op:
        out += '(';
        out += op_name(n.op);
        for (int c = 0; c < arity(n.op); ++c) {
            out += ' ';
            serialize_into(out, nodes, i);
        }
        out += ')';
        return;
    }
}

inline std::string infix_constant(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return v < 0 ? "(" + std::string(buf) + ")" : std::string(buf);
}

inline std::string infix_from(std::span<const Node> nodes, std::size_t& i, const std::vector<std::string>& names) {
    const Node& n = nodes[i++];
    if (n.kind == Node::Kind::Var) {
        return n.var < names.size() ? names[n.var] : "x" + std::to_string(n.var + 1);
    }
    if (n.kind == Node::Kind::Const) return infix_constant(n.value);

    if (arity(n.op) == 2) {
        const std::string lhs = infix_from(nodes, i, names);
        const std::string rhs = infix_from(nodes, i, names);
        const char* sym = n.op == OpCode::Add ? " + " : n.op == OpCode::Sub ? " - " : n.op == OpCode::Mul ? " * " : " / ";
        return "(" + lhs + sym + rhs + ")";
    }
    const std::string a = infix_from(nodes, i, names);
    switch (n.op) {
    case OpCode::Sin: return "sin(" + a + ")";
    case OpCode::Cos: return "cos(" + a + ")";
    case OpCode::SqrtAbs: return "sqrt(|" + a + "|)";
    case OpCode::Square: return "(" + a + ")^2";
    case OpCode::Exp: return "exp(" + a + ")";
    case OpCode::LogAbs: return "log(|" + a + "|)";
    default: return "?";
    }
}

struct Token {
    std::string text;
};

inline std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
        } else if (c == '(' || c == ')') {
            out.push_back({std::string(1, c)});
            ++i;
        } else {
            std::size_t j = i;
            while (j < s.size() && s[j] != '(' && s[j] != ')' && s[j] != ' ' && s[j] != '\t' && s[j] != '\n' && s[j] != '\r') ++j;
            out.push_back({std::string(s.substr(i, j - i))});
            i = j;
        }
    }
    return out;
}

class PrefixParser {
public:
    explicit PrefixParser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    ExprTree parse() {
        if (tokens_.empty()) throw ParseError(0, "", "empty expression");
        parse_node();
        if (pos_ != tokens_.size()) throw ParseError(pos_, tokens_[pos_].text, "unexpected trailing token");
        return ExprTree(std::move(nodes_));
    }

private:
    void parse_node() {
        if (pos_ >= tokens_.size()) throw ParseError(pos_, "", "unexpected end of input");
        const std::string& tok = tokens_[pos_].text;
        if (tok == ")") throw ParseError(pos_, tok, "unexpected ')'");
        if (tok == "(") {
            ++pos_;
            if (pos_ >= tokens_.size()) throw ParseError(pos_, "", "expected operator name");
            const std::string& name = tokens_[pos_].text;
            const auto op = op_from_name(name);
            if (!op) throw ParseError(pos_, name, "unknown operator");
            ++pos_;
            nodes_.push_back(Node::make_op(*op));
            for (int c = 0; c < arity(*op); ++c) {
                if (pos_ < tokens_.size() && tokens_[pos_].text == ")") {
                    throw ParseError(pos_, ")", "too few operands for '" + name + "'");
                }
                parse_node();
            }
            if (pos_ >= tokens_.size()) throw ParseError(pos_, "", "missing ')'");
            if (tokens_[pos_].text != ")") throw ParseError(pos_, tokens_[pos_].text, "too many operands for '" + name + "'");
            ++pos_;
            return;
        }
        nodes_.push_back(parse_leaf(tok));
        ++pos_;
    }

    Node parse_leaf(const std::string& tok) const {
        if (tok.size() >= 2 && tok[0] == 'x') {
            int idx = 0;
            const auto [p, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), idx);
            if (ec != std::errc() || p != tok.data() + tok.size() || idx < 1 || idx > 65535) {
                throw ParseError(pos_, tok, "bad variable name");
            }
            return Node::variable(idx - 1);
        }
        double v = 0.0;
        const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v)) {
            throw ParseError(pos_, tok, "bad constant");
        }
        return Node::constant(v);
    }

    std::vector<Token> tokens_;
    std::vector<Node> nodes_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Canonical prefix form, e.g. "(add x1 2)".
inline std::string serialize(const ExprTree& t) {
    std::string out;
    std::size_t i = 0;
    detail::serialize_into(out, t.nodes(), i);
    return out;
}

inline ExprTree deserialize(std::string_view text) {
    return detail::PrefixParser(detail::tokenize(text)).parse();
}

/// Fully parenthesized infix rendering. Variables beyond `names` print as x<k>.
inline std::string to_infix(const ExprTree& t, const std::vector<std::string>& names = {}) {
    std::size_t i = 0;
    return detail::infix_from(t.nodes(), i, names);
}

} // namespace mggp
