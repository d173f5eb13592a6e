#pragma once

#include <algorithm>
#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "qcsp/core/common.hpp"

namespace qcsp {

// Quantifier-free formula over x1..xk with equality and constants.
// Variables are stored 0-based; the text form is 1-based.
struct ExprNode {
  enum class Kind { True, False, EqVar, EqConst, NeVar, NeConst, And, Or };
  Kind kind = Kind::True;
  std::size_t lhs = 0;  // variable index
  std::size_t rhs = 0;  // variable index or constant
  std::vector<ExprNode> children;

  static ExprNode eq_var(std::size_t a, std::size_t b) { return {Kind::EqVar, a, b, {}}; }
  static ExprNode eq_const(std::size_t a, Element c) { return {Kind::EqConst, a, c, {}}; }
  static ExprNode ne_var(std::size_t a, std::size_t b) { return {Kind::NeVar, a, b, {}}; }
  static ExprNode ne_const(std::size_t a, Element c) { return {Kind::NeConst, a, c, {}}; }
  static ExprNode conj(std::vector<ExprNode> c) { return {Kind::And, 0, 0, std::move(c)}; }
  static ExprNode disj(std::vector<ExprNode> c) { return {Kind::Or, 0, 0, std::move(c)}; }

  bool is_atom() const { return kind != Kind::And && kind != Kind::Or; }

  bool eval(std::span<const Element> t) const {
    switch (kind) {
      case Kind::True: return true;
      case Kind::False: return false;
      case Kind::EqVar: return t[lhs] == t[rhs];
      case Kind::EqConst: return t[lhs] == rhs;
      case Kind::NeVar: return t[lhs] != t[rhs];
      case Kind::NeConst: return t[lhs] != rhs;
      case Kind::And:
        for (const auto& c : children)
          if (!c.eval(t)) return false;
        return true;
      case Kind::Or:
        for (const auto& c : children)
          if (c.eval(t)) return true;
        return false;
    }
    return false;
  }

  std::size_t atom_count() const {
    if (kind == Kind::And || kind == Kind::Or) {
      std::size_t s = 0;
      for (const auto& c : children) s += c.atom_count();
      return s;
    }
    return (kind == Kind::True || kind == Kind::False) ? 0 : 1;
  }

  bool operator==(const ExprNode&) const = default;
};

class RelationExpr {
 public:
  RelationExpr() = default;
  RelationExpr(std::size_t arity, ExprNode root) : arity_(arity), root_(std::move(root)) {}

  std::size_t arity() const { return arity_; }
  const ExprNode& root() const { return root_; }
  bool eval(std::span<const Element> t) const { return root_.eval(t); }
  std::size_t atom_count() const { return root_.atom_count(); }

  // Disjunction of conjunctions of atoms (an atom or a bare conjunction count too).
  bool is_dnf() const {
    auto conj_ok = [](const ExprNode& n) {
      if (n.is_atom()) return true;
      if (n.kind != ExprNode::Kind::And) return false;
      return std::all_of(n.children.begin(), n.children.end(),
                         [](const ExprNode& c) { return c.is_atom(); });
    };
    if (root_.kind == ExprNode::Kind::Or)
      return std::all_of(root_.children.begin(), root_.children.end(), conj_ok);
    return conj_ok(root_);
  }

  // Largest constant mentioned, or -1.
  long max_constant() const { return max_const(root_); }
  // Largest variable index mentioned, or -1.
  long max_variable() const { return max_var(root_); }

  std::string to_string() const { return print(root_, false); }

  bool operator==(const RelationExpr&) const = default;

 private:
  static long max_const(const ExprNode& n) {
    long m = -1;
    if (n.kind == ExprNode::Kind::EqConst || n.kind == ExprNode::Kind::NeConst) m = static_cast<long>(n.rhs);
    for (const auto& c : n.children) m = std::max(m, max_const(c));
    return m;
  }
  static long max_var(const ExprNode& n) {
    long m = -1;
    using K = ExprNode::Kind;
    if (n.kind == K::EqVar || n.kind == K::NeVar) m = static_cast<long>(std::max(n.lhs, n.rhs));
    if (n.kind == K::EqConst || n.kind == K::NeConst) m = static_cast<long>(n.lhs);
    for (const auto& c : n.children) m = std::max(m, max_var(c));
    return m;
  }
  static std::string var(std::size_t i) { return "x" + std::to_string(i + 1); }
  static std::string print(const ExprNode& n, bool inside_and) {
    using K = ExprNode::Kind;
    switch (n.kind) {
      case K::True: return "true";
      case K::False: return "false";
      case K::EqVar: return var(n.lhs) + "=" + var(n.rhs);
      case K::EqConst: return var(n.lhs) + "=" + std::to_string(n.rhs);
      case K::NeVar: return var(n.lhs) + "!=" + var(n.rhs);
      case K::NeConst: return var(n.lhs) + "!=" + std::to_string(n.rhs);
      case K::And:
      case K::Or: {
        if (n.children.empty()) return n.kind == K::And ? "true" : "false";
        std::string s;
        const char* sep = n.kind == K::And ? " & " : " | ";
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          if (i) s += sep;
          s += print(n.children[i], n.kind == K::And);
        }
        bool wrap = n.kind == K::Or && inside_and;
        return wrap ? "(" + s + ")" : s;
      }
    }
    return "";
  }

  std::size_t arity_ = 0;
  ExprNode root_;
};

// Recursive-descent parser for the formula grammar:
//   expr := conj ('|' conj)* ; conj := unit ('&' unit)* ;
//   unit := '(' expr ')' | 'true' | 'false' | term ('=' | '!=') term ; term := 'x'<int> | <int>
inline RelationExpr parse_relation_expr(std::string_view text, std::size_t arity) {
  struct P {
    std::string_view s;
    std::size_t i = 0;
    std::size_t arity;
    void ws() {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    [[noreturn]] void fail(const std::string& what) {
      throw InputError("formula: " + what + " at offset " + std::to_string(i) + " in '" + std::string(s) + "'");
    }
    bool eat(std::string_view tok) {
      ws();
      if (s.substr(i, tok.size()) == tok) {
        i += tok.size();
        return true;
      }
      return false;
    }
    struct TermT {
      bool is_var;
      std::size_t v;
    };
    std::size_t number() {
      ws();
      std::size_t start = i, v = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) v = v * 10 + static_cast<std::size_t>(s[i++] - '0');
      if (i == start) fail("expected number");
      return v;
    }
    TermT term() {
      ws();
      if (i < s.size() && s[i] == 'x') {
        ++i;
        std::size_t v = number();
        if (v == 0 || v > arity) fail("variable x" + std::to_string(v) + " out of range");
        return {true, v - 1};
      }
      return {false, number()};
    }
    ExprNode unit() {
      ws();
      if (eat("(")) {
        ExprNode e = expr();
        if (!eat(")")) fail("expected ')'");
        return e;
      }
      if (eat("true")) return ExprNode{};
      if (eat("false")) return ExprNode{ExprNode::Kind::False, 0, 0, {}};
      TermT a = term();
      bool ne;
      if (eat("!=")) ne = true;
      else if (eat("=")) ne = false;
      else fail("expected '=' or '!='");
      TermT b = term();
      if (!a.is_var && !b.is_var) {
        bool holds = (a.v == b.v) != ne;
        return ExprNode{holds ? ExprNode::Kind::True : ExprNode::Kind::False, 0, 0, {}};
      }
      if (!a.is_var) std::swap(a, b);
      if (b.is_var) return ne ? ExprNode::ne_var(a.v, b.v) : ExprNode::eq_var(a.v, b.v);
      return ne ? ExprNode::ne_const(a.v, static_cast<Element>(b.v)) : ExprNode::eq_const(a.v, static_cast<Element>(b.v));
    }
    ExprNode conj() {
      std::vector<ExprNode> parts{unit()};
      while (eat("&")) parts.push_back(unit());
      if (parts.size() == 1) return std::move(parts[0]);
      return ExprNode::conj(std::move(parts));
    }
    ExprNode expr() {
      std::vector<ExprNode> parts{conj()};
      while (eat("|")) parts.push_back(conj());
      if (parts.size() == 1) return std::move(parts[0]);
      return ExprNode::disj(std::move(parts));
    }
  };
  if (arity == 0) throw InputError("relation arity must be positive");
  P p{text, 0, arity};
  ExprNode root = p.expr();
  p.ws();
  if (p.i != text.size()) p.fail("trailing input");
  return RelationExpr(arity, std::move(root));
}

// Finite relation kept as a sorted tuple list, with an optional symbolic source.
class Relation {
 public:
  Relation() = default;
  Relation(std::size_t domain_size, std::size_t arity, std::vector<Tuple> tuples,
           std::optional<RelationExpr> source = std::nullopt)
      : n_(domain_size), arity_(arity), tuples_(std::move(tuples)), source_(std::move(source)) {
    if (arity_ == 0) throw InputError("relation arity must be positive");
    if (n_ == 0) throw InputError("domain must be nonempty");
    for (const auto& t : tuples_) {
      if (t.size() != arity_) throw InputError("tuple " + tuple_to_string(t) + " has wrong arity");
      for (Element e : t)
        if (e >= n_) throw InputError("element " + std::to_string(e) + " outside domain");
    }
    std::sort(tuples_.begin(), tuples_.end());
    tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
    build_index();
  }

  std::size_t domain_size() const { return n_; }
  std::size_t arity() const { return arity_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }
  const std::vector<Tuple>& tuples() const { return tuples_; }
  const std::optional<RelationExpr>& source() const { return source_; }

  bool contains(std::span<const Element> t) const {
    if (t.size() != arity_) return false;
    std::uint64_t c = encode(t, n_);
    if (!dense_->empty()) return (*dense_)[c] != 0;
    return hashed_->count(c) != 0;
  }

  bool operator==(const Relation& o) const {
    return n_ == o.n_ && arity_ == o.arity_ && tuples_ == o.tuples_;
  }

 private:
  void build_index() {
    dense_ = std::make_shared<std::vector<std::uint8_t>>();
    hashed_ = std::make_shared<std::unordered_set<std::uint64_t>>();
    std::uint64_t total = checked_pow(n_, arity_);
    if (total == kOverflow) throw InputError("relation too large to index");
    if (total <= (std::uint64_t{1} << 22)) {
      dense_->assign(total, 0);
      for (const auto& t : tuples_) (*dense_)[encode(t, n_)] = 1;
    } else {
      for (const auto& t : tuples_) hashed_->insert(encode(t, n_));
    }
  }

  std::size_t n_ = 1;
  std::size_t arity_ = 1;
  std::vector<Tuple> tuples_;
  std::optional<RelationExpr> source_;
  std::shared_ptr<std::vector<std::uint8_t>> dense_ = std::make_shared<std::vector<std::uint8_t>>();
  std::shared_ptr<std::unordered_set<std::uint64_t>> hashed_ = std::make_shared<std::unordered_set<std::uint64_t>>();
};

inline Relation materialize(const RelationExpr& expr, std::size_t domain_size) {
  if (expr.arity() == 0) throw InputError("relation arity must be positive");
  if (expr.max_constant() >= static_cast<long>(domain_size))
    throw InputError("formula mentions element " + std::to_string(expr.max_constant()) + " outside domain");
  if (expr.max_variable() >= static_cast<long>(expr.arity())) throw InputError("formula variable out of range");
  if (checked_pow(domain_size, expr.arity()) > (std::uint64_t{1} << 26))
    throw BudgetExceeded("materialization over " + std::to_string(domain_size) + "^" + std::to_string(expr.arity()) + " tuples");
  std::vector<Tuple> out;
  for_each_tuple(domain_size, expr.arity(), [&](const Tuple& t) {
    if (expr.eval(t)) out.push_back(t);
    return true;
  });
  return Relation(domain_size, expr.arity(), std::move(out), expr);
}

inline Relation relation_from_tuples(std::size_t n, std::size_t arity, std::vector<Tuple> tuples) {
  return Relation(n, arity, std::move(tuples));
}

// DNF with one conjunction of constant atoms per tuple.
inline RelationExpr tuples_to_dnf(const Relation& r) {
  std::vector<ExprNode> disjuncts;
  for (const auto& t : r.tuples()) {
    std::vector<ExprNode> atoms;
    for (std::size_t i = 0; i < t.size(); ++i) atoms.push_back(ExprNode::eq_const(i, t[i]));
    disjuncts.push_back(atoms.size() == 1 ? atoms[0] : ExprNode::conj(std::move(atoms)));
  }
  if (disjuncts.empty()) return RelationExpr(r.arity(), ExprNode{ExprNode::Kind::False, 0, 0, {}});
  if (disjuncts.size() == 1) return RelationExpr(r.arity(), disjuncts[0]);
  return RelationExpr(r.arity(), ExprNode::disj(std::move(disjuncts)));
}

}  // namespace qcsp
