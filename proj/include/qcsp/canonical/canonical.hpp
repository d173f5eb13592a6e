#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qcsp/adversaries/families.hpp"
#include "qcsp/adversaries/generation.hpp"
#include "qcsp/adversaries/reactive.hpp"
#include "qcsp/logic/game.hpp"

namespace qcsp {

enum class CanonicalMode { Pi2, General };

// Sentence ∀w ∃e : (canonical query of a product of copies of S).
// Universal w_u stands for block j = u / block, index i = u % block.
// Factor r of the product is the copy of S expanded by the constants factor_map[r].
struct CanonicalSentence {
  PHSentence sentence;
  CanonicalMode mode = CanonicalMode::Pi2;
  std::size_t block = 1;  // n (1 in Π₂ mode)
  std::size_t length = 0;  // m
  std::size_t domain_size = 1;
  std::vector<std::size_t> factor_member;
  std::vector<Tuple> factor_map;              // length block*length each
  std::vector<std::uint64_t> element_of_var;  // product element (base-|A| code) per variable
  std::uint64_t atom_count = 0;

  std::size_t arity() const { return factor_map.size(); }
};

namespace detail {

inline CanonicalSentence build_canonical(const Structure& s, CanonicalMode mode, std::size_t block, std::size_t m,
                                         std::vector<Tuple> factors, std::vector<std::size_t> members,
                                         const Budget& budget) {
  std::size_t N = s.domain_size();
  std::size_t k = factors.size();
  std::size_t L = block * m;
  if (k == 0) throw InputError("canonical sentence needs a nonempty adversary set");
  if (checked_pow(N, k) == kOverflow) throw BudgetExceeded("product of " + std::to_string(k) + " factors cannot be indexed");
  std::uint64_t atoms = 0;
  for (const auto& nr : s.relations()) {
    std::uint64_t c = checked_pow(nr.relation.size(), k);
    if (c == kOverflow || atoms + c > budget.product_atoms)
      throw BudgetExceeded("canonical product needs more than " + std::to_string(budget.product_atoms) + " atoms (" +
                           std::to_string(k) + " factors)");
    atoms += c;
  }
  CanonicalSentence cs;
  cs.mode = mode;
  cs.block = block;
  cs.length = m;
  cs.domain_size = N;
  cs.factor_member = std::move(members);
  cs.factor_map = std::move(factors);
  cs.atom_count = atoms;
  auto code_of_column = [&](std::size_t u) {
    std::uint64_t c = 0;
    for (std::size_t r = 0; r < k; ++r) c = c * N + cs.factor_map[r][u];
    return c;
  };
  std::map<std::uint64_t, std::size_t> universal_of;
  PHSentence& phi = cs.sentence;
  for (std::size_t u = 0; u < L; ++u) {
    std::uint64_t c = code_of_column(u);
    if (!universal_of.emplace(c, u).second)
      throw InputError("degenerate adversary set: two universal positions coincide in every tuple");
    std::string name = mode == CanonicalMode::Pi2 ? "w" + std::to_string(u + 1)
                                                  : "w" + std::to_string(u % block + 1) + "_" + std::to_string(u / block + 1);
    phi.add_var(Quantifier::Forall, name);
    cs.element_of_var.push_back(c);
  }
  std::map<std::uint64_t, Element> diag;
  for (const auto& c : s.constants()) {
    std::uint64_t d = 0;
    for (std::size_t r = 0; r < k; ++r) d = d * N + c.element;
    diag.emplace(d, c.element);
  }
  for (auto& [code, u] : universal_of) {
    auto it = diag.find(code);
    if (it != diag.end()) phi.matrix.push_back(Atom{Atom::kEquality, {Term::var(static_cast<std::uint32_t>(u)), Term::constant(it->second)}});
  }
  std::map<std::uint64_t, std::size_t> existential_of;
  auto term_of = [&](std::uint64_t code) -> Term {
    if (auto it = universal_of.find(code); it != universal_of.end()) return Term::var(static_cast<std::uint32_t>(it->second));
    if (auto it = diag.find(code); it != diag.end()) return Term::constant(it->second);
    auto [it, fresh] = existential_of.emplace(code, phi.num_vars());
    if (fresh) {
      phi.add_var(Quantifier::Exists, "e" + std::to_string(code));
      cs.element_of_var.push_back(code);
    }
    return Term::var(static_cast<std::uint32_t>(it->second));
  };
  for (std::size_t ri = 0; ri < s.relations().size(); ++ri) {
    const auto& rows = s.relations()[ri].relation.tuples();
    std::size_t ar = s.relations()[ri].relation.arity();
    if (rows.empty()) continue;
    for_each_tuple(rows.size(), k, [&](const Tuple& pick) {
      Atom a;
      a.relation = ri;
      for (std::size_t i = 0; i < ar; ++i) {
        std::uint64_t c = 0;
        for (std::size_t r = 0; r < k; ++r) c = c * N + rows[pick[r]][i];
        a.args.push_back(term_of(c));
      }
      phi.matrix.push_back(std::move(a));
      return true;
    });
  }
  return cs;
}

// μ:[n]×[m]→A (stored j-major) consistent with member b: every choice of one value
// per block lands in b.
inline std::vector<Tuple> consistent_maps(const Adversary& b, std::size_t n, std::size_t N, const Budget& budget) {
  std::size_t m = b.length();
  std::vector<Tuple> out;
  Tuple mu(n * m, 0);
  std::uint64_t steps = 0;
  // check: all combinations of the chosen block value sets through block j are prefixes of b
  auto ok_through = [&](std::size_t j) {
    std::vector<Mask> sets(j + 1, 0);
    for (std::size_t jj = 0; jj <= j; ++jj)
      for (std::size_t i = 0; i < n; ++i) sets[jj] |= Mask{1} << mu[jj * n + i];
    bool ok = true;
    for_each_tuple(N, j + 1, [&](const Tuple& p) {
      for (std::size_t jj = 0; jj <= j; ++jj)
        if (!((sets[jj] >> p[jj]) & 1)) return true;
      auto it = std::lower_bound(b.tuples().begin(), b.tuples().end(), p);
      if (it == b.tuples().end() || !std::equal(p.begin(), p.end(), it->begin())) {
        ok = false;
        return false;
      }
      return true;
    });
    return ok;
  };
  auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (++steps > budget.search_nodes) throw BudgetExceeded("consistent-map enumeration exceeded cap");
    if (pos == n * m) {
      out.push_back(mu);
      return;
    }
    for (Element e = 0; e < N; ++e) {
      mu[pos] = e;
      if ((pos + 1) % n == 0 && !ok_through(pos / n)) continue;
      self(self, pos + 1);
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace detail

// Product over the distinct tuples of ∪Ω, so Ω, {∪Ω} and Ω_tuples give the same sentence.
inline CanonicalSentence canonical_pi2(const AdversarySet& omega, const Structure& s, const Budget& budget = Budget{}) {
  if (omega.members.empty()) throw InputError("canonical sentence needs a nonempty adversary set");
  if (omega.domain_size != s.domain_size()) throw InputError("adversaries over a different domain");
  if (is_degenerate(omega)) throw InputError("degenerate adversary set: canonical constants would coincide");
  auto tuples = omega.all_tuples();
  std::vector<std::size_t> members(tuples.size(), 0);
  for (std::size_t t = 0; t < tuples.size(); ++t)
    for (std::size_t o = 0; o < omega.members.size(); ++o)
      if (omega.members[o].contains(tuples[t])) {
        members[t] = o;
        break;
      }
  return detail::build_canonical(s, CanonicalMode::Pi2, 1, omega.length, std::move(tuples), std::move(members), budget);
}

// Product over all (member O, consistent μ) pairs, members in order, μ lexicographic.
inline CanonicalSentence canonical_general(std::size_t n, const AdversarySet& omega, const Structure& s,
                                           const Budget& budget = Budget{}) {
  if (omega.members.empty()) throw InputError("canonical sentence needs a nonempty adversary set");
  if (omega.domain_size != s.domain_size()) throw InputError("adversaries over a different domain");
  if (n == 0) throw InputError("block size must be positive");
  if (is_degenerate(omega)) throw InputError("degenerate adversary set: canonical constants would coincide");
  std::vector<Tuple> factors;
  std::vector<std::size_t> members;
  for (std::size_t o = 0; o < omega.members.size(); ++o)
    for (auto& mu : detail::consistent_maps(omega.members[o], n, s.domain_size(), budget)) {
      factors.push_back(std::move(mu));
      members.push_back(o);
    }
  return detail::build_canonical(s, CanonicalMode::General, n, omega.length, std::move(factors), std::move(members), budget);
}

// Evaluates with value ordering that tries the projection onto the factor matching the
// universal assignment first, so witnesses come out as projections whenever they can.
inline GameVerdict eval_canonical(const Structure& s, const CanonicalSentence& cs, Budget budget = Budget{}) {
  std::size_t L = cs.block * cs.length, k = cs.arity(), N = cs.domain_size;
  std::map<Tuple, std::size_t> factor_of;
  for (std::size_t r = 0; r < k; ++r) factor_of.emplace(cs.factor_map[r], r);
  EvalOptions opt;
  opt.budget = budget;
  opt.hint = [&, L, k, N](std::size_t var, std::span<const Element> assignment) -> std::optional<Element> {
    Tuple nu(assignment.begin(), assignment.begin() + static_cast<long>(L));
    std::size_t r = 0;
    if (auto it = factor_of.find(nu); it != factor_of.end()) r = it->second;
    std::uint64_t code = cs.element_of_var[var];
    for (std::size_t q = k - 1; q > r; --q) code /= N;
    return static_cast<Element>(code % N);
  };
  return eval_qcsp(s, cs.sentence, opt);
}

// Reads the polymorphism off a true verdict at universal assignment nu and pairs it with
// the last-coordinate decoding maps g^r_l(nu(i,l)) = μ_r(i,l). Default nu (general mode,
// block = |A|) lets block l enumerate the elements: nu(i,l) = i.
inline ReactiveWitness extract_witness_operation(const CanonicalSentence& cs, const GameVerdict& verdict,
                                                 std::optional<Tuple> nu = std::nullopt,
                                                 const Budget& budget = Budget{}) {
  if (!verdict.holds || verdict.skolem.empty()) throw InputError("witness extraction needs a true verdict");
  std::size_t L = cs.block * cs.length, k = cs.arity(), N = cs.domain_size;
  if (!nu) {
    if (cs.mode != CanonicalMode::General || cs.block != N)
      throw InputError("give the universal assignment to extract from (default needs general mode with n = |A|)");
    nu = Tuple(L);
    for (std::size_t u = 0; u < L; ++u) (*nu)[u] = static_cast<Element>(u % cs.block);
  }
  if (nu->size() != L) throw InputError("assignment has the wrong length");
  if (checked_pow(N, k) > budget.table_entries)
    throw BudgetExceeded("witness operation of arity " + std::to_string(k) + " is too large to tabulate");
  const auto& tables = verdict.skolem[0];
  std::map<std::uint64_t, Element> value_of;
  for (std::size_t v = 0; v < cs.sentence.num_vars(); ++v) {
    std::uint64_t code = cs.element_of_var[v];
    if (cs.sentence.quantifiers[v] == Quantifier::Forall) {
      value_of[code] = (*nu)[v];
      continue;
    }
    if (v >= tables.size()) throw InputError("verdict does not belong to this sentence");
    auto it = tables[v].find(*nu);
    if (it == tables[v].end()) throw InputError("verdict has no Skolem value for " + cs.sentence.names[v]);
    value_of[code] = it->second;
  }
  // elements outside the sentence (and the constant diagonals) follow the first factor
  Operation f = Operation::from_function(N, k, [&](const Tuple& y) {
    if (auto it = value_of.find(encode(y, N)); it != value_of.end()) return it->second;
    return y[0];
  });
  ReactiveWitness w;
  w.f = std::move(f);
  w.member = cs.factor_member;
  w.last_coordinate_only = true;
  for (std::size_t r = 0; r < k; ++r) {
    std::vector<std::map<Tuple, Element>> g(cs.length);
    for (std::size_t u = 0; u < L; ++u) {
      Tuple key{(*nu)[u]};
      auto [it, fresh] = g[u / cs.block].emplace(key, cs.factor_map[r][u]);
      if (!fresh && it->second != cs.factor_map[r][u])
        throw InputError("assignment repeats a value inside a block with different decodings");
    }
    w.g.push_back(std::move(g));
  }
  return w;
}

struct CollapsibilityDecision {
  bool collapsible = false;
  std::string route;  // "canonical-sentence" or "subalgebra"
  std::size_t witness_arity = 0;
  std::uint64_t product_atoms = 0;
  std::optional<ReactiveWitness> witness;
};

namespace detail {

// Sg(X) = A^L under all polymorphisms of s. First a lower bound: close X under the
// unary and binary polymorphisms plus any near-unanimity one. Then exact checks: a
// projection that is not full refutes; with a near-unanimity polymorphism of arity d,
// full (d-1)-projections prove fullness.
inline std::optional<bool> subalgebra_is_full(const Structure& s, const std::vector<Tuple>& X, std::size_t L,
                                              const Budget& budget) {
  std::size_t N = s.domain_size();
  std::vector<Operation> gens;
  for (std::size_t k = 1; k <= 2; ++k) {
    try {
      for (auto& f : polymorphisms(s, k, false, budget)) gens.push_back(std::move(f));
    } catch (const BudgetExceeded&) {
    }
  }
  std::optional<Operation> nu;
  std::size_t nu_arity = 0;
  for (std::size_t d = 3; d <= 4 && !nu; ++d) {
    try {
      nu = find_near_unanimity_polymorphism(s, d, budget);
      nu_arity = d;
    } catch (const BudgetExceeded&) {
    }
  }
  if (nu) gens.push_back(*nu);
  Budget quick = budget;
  quick.closure_work = std::min<std::uint64_t>(budget.closure_work, 20'000'000);
  try {
    auto c = traced_closure(gens, X, N, L, std::nullopt, quick);
    if (c.elements.size() == checked_pow(N, L)) return true;
  } catch (const BudgetExceeded&) {
  }
  auto project = [&](const std::vector<std::size_t>& pos) {
    std::set<Tuple> ys;
    for (const auto& x : X) {
      Tuple p;
      for (auto q : pos) p.push_back(x[q]);
      ys.insert(std::move(p));
    }
    return std::vector<Tuple>(ys.begin(), ys.end());
  };
  // nullopt when the exact check does not fit the budget
  auto projection_full = [&](const std::vector<std::size_t>& pos) -> std::optional<bool> {
    auto Y = project(pos);
    std::uint64_t full_size = checked_pow(N, pos.size());
    if (Y.size() == full_size) return true;
    try {
      if (traced_closure(gens, Y, N, pos.size(), std::nullopt, quick).elements.size() == full_size) return true;
    } catch (const BudgetExceeded&) {
    }
    bool full = true;
    try {
      for_each_tuple(N, pos.size(), [&](const Tuple& t) {
        full = polymorphism_mapping(s, Y, t, budget).has_value();
        return full;
      });
    } catch (const BudgetExceeded&) {
      return std::nullopt;
    }
    return full;
  };
  std::vector<std::size_t> all(L);
  for (std::size_t i = 0; i < L; ++i) all[i] = i;
  if (checked_pow(N, X.size()) <= budget.table_entries)
    if (auto r = projection_full(all)) return r;
  std::size_t w = nu ? nu_arity - 1 : 2;
  if (w > L) w = L;
  bool all_full = true;
  std::vector<std::size_t> pos(w);
  for (std::size_t i = 0; i < w; ++i) pos[i] = i;
  while (true) {
    auto r = projection_full(pos);
    if (r && !*r) return false;
    if (!r) all_full = false;
    std::size_t i = w;
    while (i > 0 && pos[i - 1] == L - w + i - 1) --i;
    if (i == 0) break;
    ++pos[i - 1];
    for (std::size_t j = i; j < w; ++j) pos[j] = pos[j - 1] + 1;
  }
  if (nu && all_full) return true;
  return std::nullopt;
}

}  // namespace detail

// Decides whether S models the canonical general sentence for Υ_{p+1,p,{x}}.
inline CollapsibilityDecision decide_p_collapsible_singleton(const Structure& s, Element x, std::size_t p,
                                                             const Budget& budget = Budget{}) {
  if (p == 0) throw InputError("p = 0 gives a degenerate adversary set");
  if (x >= s.domain_size()) throw InputError("source element outside domain");
  std::size_t N = s.domain_size();
  AdversarySet omega = upsilon(p + 1, p, {x}, N);
  CollapsibilityDecision d;
  try {
    CanonicalSentence cs = canonical_general(N, omega, s, budget);
    d.route = "canonical-sentence";
    d.witness_arity = cs.arity();
    d.product_atoms = cs.atom_count;
    GameVerdict v = eval_canonical(s, cs, budget);
    d.collapsible = v.holds;
    if (v.holds && checked_pow(N, cs.arity()) <= budget.table_entries) d.witness = extract_witness_operation(cs, v, std::nullopt, budget);
    return d;
  } catch (const BudgetExceeded&) {
  }
  d.route = "subalgebra";
  std::vector<Tuple> X;
  for (const auto& b : omega.members)
    for (auto& mu : detail::consistent_maps(b, N, N, budget)) X.push_back(std::move(mu));
  d.witness_arity = X.size();
  std::sort(X.begin(), X.end());
  X.erase(std::unique(X.begin(), X.end()), X.end());
  auto full = detail::subalgebra_is_full(s, X, N * (p + 1), budget);
  if (!full) throw BudgetExceeded("collapsibility undecided: witness arity " + std::to_string(d.witness_arity) +
                                  " too large and no near-unanimity shortcut applies");
  d.collapsible = *full;
  return d;
}

// Every nonempty C ⊆ B is closed under every operation.
inline bool is_conservative_on(const std::vector<Operation>& ops, Mask b) {
  for (Mask c = b; c; c = (c - 1) & b) {
    for (const auto& f : ops) {
      bool closed = true;
      auto elems = elements_of(c);
      for_each_tuple(elems.size(), f.arity(), [&](const Tuple& pick) {
        Tuple args(pick.size());
        for (std::size_t i = 0; i < pick.size(); ++i) args[i] = elems[pick[i]];
        if (!((c >> f(args)) & 1)) closed = false;
        return closed;
      });
      if (!closed) return false;
    }
  }
  return true;
}

}  // namespace qcsp
