#pragma once

#include <array>
#include <bit>
#include <string>
#include <vector>

#include "qcsp/classification/projectivity.hpp"
#include "qcsp/core/structure.hpp"
#include "qcsp/logic/sentence.hpp"

namespace qcsp {

inline std::size_t domain_of(Mask alpha, Mask beta) {
  return static_cast<std::size_t>(std::bit_width(alpha | beta));
}

namespace detail {

// Disjunction over blocks of `width` variables; a block holds iff its values all lie in α
// or all lie in β. Each block lists α^width then β^width as constant conjunctions.
inline RelationExpr block_dnf(Mask alpha, Mask beta, std::size_t k, std::size_t width) {
  std::size_t n = domain_of(alpha, beta);
  validate_alpha_beta(alpha, beta, n);
  if (k == 0) throw InputError("k must be positive");
  std::vector<ExprNode> disjuncts;
  for (std::size_t blk = 0; blk < k; ++blk)
    for (Mask side : {alpha, beta}) {
      auto elems = elements_of(side);
      for_each_tuple(elems.size(), width, [&](const Tuple& pick) {
        std::vector<ExprNode> c;
        for (std::size_t i = 0; i < width; ++i) c.push_back(ExprNode::eq_const(blk * width + i, elems[pick[i]]));
        disjuncts.push_back(ExprNode::conj(std::move(c)));
        return true;
      });
    }
  return RelationExpr(k * width, ExprNode::disj(std::move(disjuncts)));
}

}  // namespace detail

// σ_k(x1,y1,...,xk,yk): some pair (xi,yi) in α×α ∪ β×β.
inline RelationExpr sigma_k(Mask alpha, Mask beta, std::size_t k) { return detail::block_dnf(alpha, beta, k, 2); }

// τ_k(x1,y1,z1,...): some triple in α³ ∪ β³.
inline RelationExpr tau_k(Mask alpha, Mask beta, std::size_t k) { return detail::block_dnf(alpha, beta, k, 3); }

// Conjunction of σ_k atoms over variables 0..arity-1.
struct PPFormula {
  std::size_t arity = 0;
  std::vector<std::vector<std::size_t>> conjuncts;

  std::string to_string() const {
    std::string s;
    for (std::size_t c = 0; c < conjuncts.size(); ++c) {
      if (c) s += " & ";
      s += "sigma(";
      for (std::size_t i = 0; i < conjuncts[c].size(); ++i) {
        if (i) s += ",";
        s += "v" + std::to_string(conjuncts[c][i] + 1);
      }
      s += ")";
    }
    return s.empty() ? "true" : s;
  }
};

// One σ_k atom per way of picking a pair out of every triple (x_i,y_i,z_i).
inline PPFormula tau_from_sigma_formula(std::size_t k) {
  if (k == 0) throw InputError("k must be positive");
  PPFormula f;
  f.arity = 3 * k;
  static const std::array<std::array<std::size_t, 2>, 3> pairs = {{{0, 1}, {1, 2}, {0, 2}}};
  for_each_tuple(3, k, [&](const Tuple& choice) {
    std::vector<std::size_t> args;
    for (std::size_t i = 0; i < k; ++i) {
      args.push_back(3 * i + pairs[choice[i]][0]);
      args.push_back(3 * i + pairs[choice[i]][1]);
    }
    f.conjuncts.push_back(std::move(args));
    return true;
  });
  return f;
}

inline Relation materialize_pp(const PPFormula& f, const Relation& sigma, const Budget& budget = Budget{}) {
  std::size_t n = sigma.domain_size();
  if (checked_pow(n, f.arity) > budget.enumeration) throw BudgetExceeded("pp-formula materialization too large");
  for (const auto& c : f.conjuncts)
    if (c.size() != sigma.arity()) throw InputError("conjunct arity differs from sigma");
  std::vector<Tuple> rows;
  Tuple sub(sigma.arity());
  for_each_tuple(n, f.arity, [&](const Tuple& t) {
    for (const auto& c : f.conjuncts) {
      for (std::size_t i = 0; i < c.size(); ++i) sub[i] = t[c[i]];
      if (!sigma.contains(sub)) return true;
    }
    rows.push_back(t);
    return true;
  });
  return Relation(n, f.arity, std::move(rows));
}

struct PPDefinition {
  PPFormula formula;
  Relation phi, tau;
  bool equal = false;
};

inline PPDefinition pp_define_tau_in_sigma(Mask alpha, Mask beta, std::size_t k, const Budget& budget = Budget{}) {
  std::size_t n = domain_of(alpha, beta);
  if (checked_pow(n, 3 * k) > budget.enumeration) throw BudgetExceeded("3k-ary materialization over the cap");
  PPDefinition d;
  d.formula = tau_from_sigma_formula(k);
  Relation sigma = materialize(sigma_k(alpha, beta, k), n);
  d.phi = materialize_pp(d.formula, sigma, budget);
  d.tau = materialize(tau_k(alpha, beta, k), n);
  d.equal = d.phi == d.tau;
  return d;
}

struct NAEInstance {
  std::size_t num_vars = 0;
  std::vector<std::array<std::size_t, 3>> clauses;

  void validate() const {
    for (const auto& c : clauses)
      for (auto v : c)
        if (v >= num_vars) throw InputError("clause variable out of range");
  }
  bool satisfied_by(const std::vector<bool>& a) const {
    for (const auto& c : clauses)
      if (a[c[0]] == a[c[1]] && a[c[1]] == a[c[2]]) return false;
    return true;
  }
};

// Brute force over 2^num_vars assignments.
inline std::optional<std::vector<bool>> nae_solve(const NAEInstance& I) {
  I.validate();
  if (I.num_vars > 30) throw BudgetExceeded("too many NAE variables for brute force");
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << I.num_vars); ++bits) {
    std::vector<bool> a(I.num_vars);
    for (std::size_t i = 0; i < I.num_vars; ++i) a[i] = (bits >> i) & 1;
    if (I.satisfied_by(a)) return a;
  }
  return std::nullopt;
}

struct NAEReduction {
  Structure structure;
  PHSentence sentence;
  std::size_t atom_count = 0;  // DNF atoms of the τ_k relation used
};

// ψ = ∀v1..vm τ_k(clause triples). The instance is NAE-satisfiable iff ψ is false.
// With no clauses τ_0 is the empty disjunction, encoded as a unary empty relation.
inline NAEReduction naesat_complement_reduction(const NAEInstance& I, Mask alpha, Mask beta) {
  I.validate();
  std::size_t n = domain_of(alpha, beta);
  validate_alpha_beta(alpha, beta, n);
  if (!(alpha & ~beta) || !(beta & ~alpha)) throw InputError("need elements in alpha\\beta and in beta\\alpha");
  NAEReduction out{Structure(n), {}, 0};
  PHSentence& psi = out.sentence;
  for (std::size_t i = 0; i < I.num_vars; ++i) psi.add_var(Quantifier::Forall, "v" + std::to_string(i + 1));
  if (I.clauses.empty()) {
    out.structure.add_relation("empty", Relation(n, 1, {}));
    if (I.num_vars == 0) psi.add_var(Quantifier::Exists, "z");
    psi.matrix.push_back(Atom{0, {Term::var(0)}});
    return out;
  }
  RelationExpr expr = tau_k(alpha, beta, I.clauses.size());
  out.atom_count = expr.atom_count();
  Relation tau = materialize(expr, n);
  out.structure.add_relation("tau", Relation(n, expr.arity(), tau.tuples(), expr));
  Atom a{0, {}};
  for (const auto& c : I.clauses)
    for (auto v : c) a.args.push_back(Term::var(static_cast<std::uint32_t>(v)));
  psi.matrix.push_back(std::move(a));
  return out;
}

// Forward translation: 0 ↦ least of α\β, 1 ↦ least of β\α. Falsifies ψ when the
// assignment is NAE-satisfying.
inline Tuple nae_assignment_to_play(const std::vector<bool>& a, Mask alpha, Mask beta) {
  Element zero = elements_of(alpha & ~beta).at(0), one = elements_of(beta & ~alpha).at(0);
  Tuple t;
  for (bool b : a) t.push_back(b ? one : zero);
  return t;
}

// Back translation: elements of β\α become 1, everything else 0.
inline std::vector<bool> play_to_nae_assignment(const Tuple& play, Mask alpha, Mask beta) {
  std::vector<bool> a;
  for (Element e : play) a.push_back(((beta & ~alpha) >> e) & 1);
  return a;
}

// Size of a relation under the two encodings.
struct EncodingSize {
  std::size_t dnf_atoms = 0;
  std::size_t tuple_entries = 0;  // |R| · arity
};

inline EncodingSize encoding_size(const RelationExpr& expr, std::size_t n) {
  Relation r = materialize(expr, n);
  return {expr.atom_count(), r.size() * r.arity()};
}

}  // namespace qcsp
