#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcsp/core/polymorphism.hpp"
#include "qcsp/logic/game.hpp"
#include "qcsp/reductions/gadgets.hpp"

namespace qcsp {

// Least c such that overwriting any coordinate of any tuple with c stays in the relation.
inline std::optional<Element> find_canon(const std::vector<const Relation*>& rels, std::size_t n) {
  for (Element c = 0; c < n; ++c) {
    bool ok = true;
    for (const Relation* r : rels) {
      for (const auto& t : r->tuples()) {
        Tuple u = t;
        for (std::size_t i = 0; i < u.size() && ok; ++i) {
          u[i] = c;
          ok = r->contains(u);
          u[i] = t[i];
        }
        if (!ok) break;
      }
      if (!ok) break;
    }
    if (ok) return c;
  }
  return std::nullopt;
}

inline std::optional<Element> find_canon(const Structure& s) {
  std::vector<const Relation*> rels;
  for (const auto& nr : s.relations()) rels.push_back(&nr.relation);
  return find_canon(rels, s.domain_size());
}

namespace detail {

// Strategy tables for `owner`'s variables from a rule value(var, key); empty when over budget.
template <typename F>
StrategyTables tabulate(const PHSentence& phi, std::size_t n, Quantifier owner, F&& value, const Budget& budget) {
  StrategyTables t(phi.num_vars());
  std::uint64_t total = 0;
  // key length = number of preceding variables of the other quantifier
  std::size_t other = 0;
  for (std::size_t v = 0; v < phi.num_vars(); ++v) {
    if (phi.quantifiers[v] != owner) {
      ++other;
      continue;
    }
    total += checked_pow(n, other);
    if (total > budget.table_entries) return {};
    for_each_tuple(n, other, [&](const Tuple& key) {
      t[v][key] = value(v, key);
      return true;
    });
  }
  return t;
}

}  // namespace detail

struct ConpResult {
  GameVerdict verdict;
  Element canon = 0;
  std::string reason;  // why false, or "canon instantiation"
};

// Evaluation for structures whose relations share a canon: equality atoms are resolved
// first, then every existential is set to the canon and each remaining atom must hold
// for all values of its universal variables.
inline ConpResult conp_eval(const Structure& s, const PHSentence& phi, const Budget& budget = Budget{}) {
  validate_sentence(phi, s, true);
  auto canon = find_canon(s);
  if (!canon) throw InputError("the structure's relations have no canon");
  std::size_t n = s.domain_size();
  std::size_t V = phi.num_vars();
  auto is_u = [&](std::size_t v) { return phi.quantifiers[v] == Quantifier::Forall; };
  std::vector<Term> rep(V);
  for (std::size_t v = 0; v < V; ++v) rep[v] = Term::var(static_cast<std::uint32_t>(v));
  auto resolve = [&](Term t) {
    while (t.is_var && !(rep[t.value] == t)) t = rep[t.value];
    return t;
  };
  ConpResult out;
  out.canon = *canon;
  // universal play defeating the sentence: fixed values, or u = x + 1 for a pair (x before u)
  std::vector<Element> play(V, 0);
  std::optional<std::pair<std::size_t, std::size_t>> chase;
  bool failed = false;
  for (const auto& a : phi.matrix) {
    if (!a.is_equality() || failed || n == 1) continue;
    Term x = resolve(a.args[0]), y = resolve(a.args[1]);
    if (x == y) continue;
    if (!x.is_var && y.is_var) std::swap(x, y);
    if (!x.is_var) {
      failed = true;
      out.reason = "constants " + std::to_string(x.value) + " and " + std::to_string(y.value) + " differ";
    } else if (!y.is_var) {
      if (is_u(x.value)) {
        failed = true;
        play[x.value] = (y.value + 1) % n;
        out.reason = "universal " + phi.names[x.value] + " equated to a constant";
      } else {
        rep[x.value] = y;
      }
    } else {
      std::size_t p = std::min(x.value, y.value), q = std::max(x.value, y.value);
      if (is_u(p) && is_u(q)) {
        failed = true;
        play[q] = 1;
        out.reason = "universals " + phi.names[p] + " and " + phi.names[q] + " equated";
      } else if (!is_u(q)) {
        rep[q] = Term::var(static_cast<std::uint32_t>(p));  // later existential follows the earlier variable
      } else {
        failed = true;
        chase = std::make_pair(p, q);
        out.reason = "existential " + phi.names[p] + " must equal the later universal " + phi.names[q];
      }
    }
  }
  if (!failed) {
    for (const auto& a : phi.matrix) {
      if (a.is_equality()) continue;
      const Relation& r = s.relations()[a.relation].relation;
      std::vector<std::size_t> us;
      std::vector<Term> args;
      for (const auto& t0 : a.args) {
        Term t = resolve(t0);
        if (t.is_var && !is_u(t.value)) t = Term::constant(*canon);
        if (t.is_var && std::find(us.begin(), us.end(), t.value) == us.end()) us.push_back(t.value);
        args.push_back(t);
      }
      Tuple row(args.size());
      for_each_tuple(n, us.size(), [&](const Tuple& vals) {
        for (std::size_t i = 0; i < args.size(); ++i)
          row[i] = args[i].is_var ? vals[std::find(us.begin(), us.end(), args[i].value) - us.begin()] : args[i].value;
        if (r.contains(row)) return true;
        failed = true;
        for (std::size_t i = 0; i < us.size(); ++i) play[us[i]] = vals[i];
        out.reason = "atom over " + s.relations()[a.relation].name + " fails at " + tuple_to_string(row);
        return false;
      });
      if (failed) break;
    }
  }
  GameVerdict& v = out.verdict;
  v.holds = !failed;
  if (v.holds) {
    out.reason = "canon instantiation";
    // existentials: their resolved term, read off the universal values in the key
    std::vector<std::size_t> upos(V, 0);
    for (std::size_t i = 0, u = 0; i < V; ++i)
      if (is_u(i)) upos[i] = u++;
    auto tables = detail::tabulate(
        phi, n, Quantifier::Exists,
        [&](std::size_t x, const Tuple& key) -> Element {
          Term t = resolve(Term::var(static_cast<std::uint32_t>(x)));
          if (!t.is_var) return t.value;
          if (is_u(t.value)) return key[upos[t.value]];
          return *canon;
        },
        budget);
    if (!tables.empty()) v.skolem.push_back(std::move(tables));
  } else {
    std::vector<std::size_t> epos(V, 0);
    for (std::size_t i = 0, e = 0; i < V; ++i)
      if (!is_u(i)) epos[i] = e++;
    v.counter = detail::tabulate(
        phi, n, Quantifier::Forall,
        [&](std::size_t u, const Tuple& key) -> Element {
          if (chase && chase->second == u) return static_cast<Element>((key[epos[chase->first]] + 1) % n);
          return play[u];
        },
        budget);
  }
  return out;
}

struct NUReport {
  Operation op;
  std::vector<std::pair<std::size_t, bool>> sigma_preserved;  // (i, preserved)
  std::vector<Tuple> violation;                               // first failing choice of rows, if any
  bool all_preserved = true;
};

// (3m+1)-ary: inputs with at most one deviation from v go to v, all others to a.
inline NUReport near_unanimity_for_reduct(std::size_t m, Mask alpha, Mask beta, Element a,
                                          const Budget& budget = Budget{}) {
  std::size_t n = domain_of(alpha, beta);
  validate_alpha_beta(alpha, beta, n);
  if (!(alpha & beta)) throw InputError("alpha and beta must intersect");
  if (a >= n) throw InputError("default element outside domain");
  if (m == 0) throw InputError("m must be positive");
  std::size_t k = 3 * m + 1;
  if (checked_pow(n, k) > budget.table_entries) throw BudgetExceeded("near-unanimity table too large");
  NUReport rep;
  rep.op = Operation::from_function(
      n, k,
      [&](const Tuple& x) -> Element {
        std::vector<std::size_t> count(n, 0);
        for (Element e : x) ++count[e];
        for (Element v = 0; v < n; ++v)
          if (count[v] + 1 >= k) return v;
        return a;
      },
      "nu" + std::to_string(k));
  for (std::size_t i = 1; i <= m; ++i) {
    Relation sig = materialize(sigma_k(alpha, beta, i), n);
    auto viol = find_preservation_violation(rep.op, sig);
    rep.sigma_preserved.emplace_back(i, !viol);
    if (viol && rep.all_preserved) {
      rep.all_preserved = false;
      rep.violation = *viol;
    }
  }
  return rep;
}

}  // namespace qcsp
