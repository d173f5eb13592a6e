#pragma once

// Brute-force reference implementations. They share only plain data (tuples, sentence
// syntax trees) with the library and recompute everything by definition, slowly.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qcsp/adversaries/adversary.hpp"
#include "qcsp/core/operation.hpp"
#include "qcsp/core/structure.hpp"
#include "qcsp/logic/sentence.hpp"

namespace oracle {

using qcsp::Element;
using qcsp::Tuple;
using TupleSet = std::set<Tuple>;

inline void all_tuples(std::size_t n, std::size_t len, const std::function<void(const Tuple&)>& f) {
  Tuple t(len, 0);
  while (true) {
    f(t);
    std::size_t i = len;
    while (i > 0) {
      if (++t[i - 1] < n) break;
      t[i - 1] = 0;
      --i;
    }
    if (i == 0) return;
  }
}

inline TupleSet set_of(const std::vector<Tuple>& v) { return TupleSet(v.begin(), v.end()); }

// --- operations --------------------------------------------------------------------

struct Table {
  std::size_t n = 0, k = 0;
  std::map<Tuple, Element> f;
  Element operator()(const Tuple& x) const { return f.at(x); }
};

inline Table table_of(const qcsp::Operation& op) {
  Table t{op.domain_size(), op.arity(), {}};
  all_tuples(t.n, t.k, [&](const Tuple& x) { t.f[x] = op(std::span<const Element>(x)); });
  return t;
}

inline Tuple apply_rows(const Table& f, const std::vector<Tuple>& rows) {
  Tuple out(rows.empty() ? 0 : rows[0].size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    Tuple col;
    for (const auto& r : rows) col.push_back(r[j]);
    out[j] = f(col);
  }
  return out;
}

// Every choice of k rows (with repetition).
inline bool preserves(const Table& f, const TupleSet& r) {
  std::vector<Tuple> rows(r.begin(), r.end());
  if (rows.empty()) return true;
  std::vector<std::size_t> pick(f.k, 0);
  while (true) {
    std::vector<Tuple> chosen;
    for (auto i : pick) chosen.push_back(rows[i]);
    if (!r.count(apply_rows(f, chosen))) return false;
    std::size_t i = f.k;
    while (i > 0) {
      if (++pick[i - 1] < rows.size()) break;
      pick[i - 1] = 0;
      --i;
    }
    if (i == 0) return true;
  }
}

// Same question, but exhaustive over targets: for each non-member, a depth-first search over
// row choices pruned by which outputs each partial column can still reach. Usable when
// |R|^k is out of reach.
inline bool preserves_pruned(const Table& f, const TupleSet& r, std::size_t arity) {
  std::size_t n = f.n, k = f.k;
  std::map<Tuple, std::uint64_t> reach;  // partial column -> mask of reachable outputs
  std::function<std::uint64_t(Tuple&)> go = [&](Tuple& col) -> std::uint64_t {
    auto it = reach.find(col);
    if (it != reach.end()) return it->second;
    std::uint64_t m = 0;
    if (col.size() == k) {
      m = std::uint64_t{1} << f(col);
    } else {
      for (Element e = 0; e < n; ++e) {
        col.push_back(static_cast<Element>(e));
        m |= go(col);
        col.pop_back();
      }
    }
    reach[col] = m;
    return m;
  };
  std::vector<Tuple> rows(r.begin(), r.end());
  bool ok = true;
  all_tuples(n, arity, [&](const Tuple& target) {
    if (!ok || r.count(target)) return;
    std::vector<Tuple> cols(arity);
    std::function<bool(std::size_t)> dfs = [&](std::size_t depth) -> bool {
      for (std::size_t j = 0; j < arity; ++j)
        if (!((go(cols[j]) >> target[j]) & 1)) return false;
      if (depth == k) return true;
      for (const auto& row : rows) {
        for (std::size_t j = 0; j < arity; ++j) cols[j].push_back(row[j]);
        bool hit = dfs(depth + 1);
        for (std::size_t j = 0; j < arity; ++j) cols[j].pop_back();
        if (hit) return true;
      }
      return false;
    };
    if (dfs(0)) ok = false;
  });
  return ok;
}

// Naive fixpoint: apply every op to every choice of rows until nothing new appears.
inline TupleSet closure(const std::vector<Table>& ops, TupleSet x) {
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Tuple> rows(x.begin(), x.end());
    for (const auto& f : ops) {
      std::vector<std::size_t> pick(f.k, 0);
      if (rows.empty()) break;
      while (true) {
        std::vector<Tuple> chosen;
        for (auto i : pick) chosen.push_back(rows[i]);
        if (x.insert(apply_rows(f, chosen)).second) grew = true;
        std::size_t i = f.k;
        while (i > 0) {
          if (++pick[i - 1] < rows.size()) break;
          pick[i - 1] = 0;
          --i;
        }
        if (i == 0) break;
      }
    }
  }
  return x;
}

// All k-ary operations (by full table enumeration) preserving every relation and constant.
inline std::vector<Table> polymorphisms(const qcsp::Structure& s, std::size_t k) {
  std::size_t n = s.domain_size();
  std::vector<Tuple> inputs;
  all_tuples(n, k, [&](const Tuple& x) { inputs.push_back(x); });
  std::vector<Table> out;
  all_tuples(n, inputs.size(), [&](const Tuple& values) {
    Table t{n, k, {}};
    for (std::size_t i = 0; i < inputs.size(); ++i) t.f[inputs[i]] = values[i];
    for (const auto& c : s.constants())
      if (t(Tuple(k, c.element)) != c.element) return;
    for (const auto& nr : s.relations())
      if (!preserves(t, set_of(nr.relation.tuples()))) return;
    out.push_back(std::move(t));
  });
  return out;
}

inline bool is_ab_projective(const Table& f, std::uint64_t alpha, std::uint64_t beta) {
  for (std::size_t i = 0; i < f.k; ++i) {
    bool ok = true;
    for (const auto& [x, y] : f.f) {
      if (((alpha >> x[i]) & 1) && !((alpha >> y) & 1)) ok = false;
      if (((beta >> x[i]) & 1) && !((beta >> y) & 1)) ok = false;
      if (!ok) break;
    }
    if (ok) return true;
  }
  return false;
}

inline bool is_generalized_hubie(const Table& f, const Tuple& z) {
  for (std::size_t i = 0; i < f.k; ++i) {
    std::set<Element> image;
    for (const auto& [x, y] : f.f)
      if (x[i] == z[i]) image.insert(y);
    if (image.size() != f.n) return false;
  }
  return true;
}

// --- relations ---------------------------------------------------------------------

inline std::vector<Tuple> essential_tuples(const TupleSet& r, std::size_t n, std::size_t k) {
  std::vector<Tuple> out;
  if (r.empty()) return out;
  all_tuples(n, k, [&](const Tuple& t) {
    if (r.count(t)) return;
    for (std::size_t i = 0; i < k; ++i) {
      bool fixable = false;
      for (Element b = 0; b < n && !fixable; ++b) {
        Tuple u = t;
        u[i] = b;
        fixable = r.count(u) > 0;
      }
      if (!fixable) return;
    }
    out.push_back(t);
  });
  return out;
}

// Conjunction of all projections onto k-1 coordinates.
inline TupleSet rho_tilde(const TupleSet& r, std::size_t n, std::size_t k) {
  if (k < 2) return r;
  std::vector<TupleSet> proj(k);
  for (const auto& t : r)
    for (std::size_t i = 0; i < k; ++i) {
      Tuple p;
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) p.push_back(t[j]);
      proj[i].insert(p);
    }
  TupleSet out;
  all_tuples(n, k, [&](const Tuple& t) {
    for (std::size_t i = 0; i < k; ++i) {
      Tuple p;
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) p.push_back(t[j]);
      if (!proj[i].count(p)) return;
    }
    out.insert(t);
  });
  return out;
}

// --- sentences ---------------------------------------------------------------------

inline bool atom_true(const qcsp::Structure& s, const qcsp::Atom& a, const std::vector<Element>& v) {
  auto val = [&](const qcsp::Term& t) { return t.is_var ? v[t.value] : static_cast<Element>(t.value); };
  if (a.is_equality()) return val(a.args[0]) == val(a.args[1]);
  Tuple t;
  for (const auto& x : a.args) t.push_back(val(x));
  const auto& tuples = s.relations()[a.relation].relation.tuples();
  return std::find(tuples.begin(), tuples.end(), t) != tuples.end();
}

inline bool matrix_true(const qcsp::Structure& s, const qcsp::PHSentence& phi, const std::vector<Element>& v) {
  for (const auto& a : phi.matrix)
    if (!atom_true(s, a, v)) return false;
  return true;
}

// Game semantics against one adversary: the j-th universal may only take values that keep
// the universal play a prefix of some member tuple. nullptr = full adversary.
inline bool eval_against(const qcsp::Structure& s, const qcsp::PHSentence& phi, const qcsp::Adversary* b) {
  std::size_t n = s.domain_size();
  std::vector<Element> v(phi.num_vars(), 0);
  Tuple play;
  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (i == phi.num_vars()) return matrix_true(s, phi, v);
    bool forall = phi.quantifiers[i] == qcsp::Quantifier::Forall;
    bool any = false, all = true, moved = false;
    for (Element e = 0; e < n; ++e) {
      if (forall && b) {
        play.push_back(e);
        bool ok = false;
        for (const auto& t : b->tuples())
          if (std::equal(play.begin(), play.end(), t.begin())) ok = true;
        play.pop_back();
        if (!ok) continue;
      }
      moved = true;
      v[i] = e;
      if (forall) play.push_back(e);
      bool r = go(i + 1);
      if (forall) play.pop_back();
      any = any || r;
      all = all && r;
      if (forall && !all) return false;
      if (!forall && any) return true;
    }
    (void)moved;
    return forall ? all : any;
  };
  return go(0);
}

inline bool eval(const qcsp::Structure& s, const qcsp::PHSentence& phi) { return eval_against(s, phi, nullptr); }

inline bool eval_restricted(const qcsp::Structure& s, const qcsp::PHSentence& phi, const qcsp::AdversarySet& omega) {
  for (const auto& b : omega.members)
    if (!eval_against(s, phi, &b)) return false;
  return true;
}

// --- seeded generators -------------------------------------------------------------

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  std::size_t below(std::size_t k) { return std::uniform_int_distribution<std::size_t>(0, k - 1)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

  TupleSet relation(std::size_t n, std::size_t k, double density) {
    TupleSet r;
    all_tuples(n, k, [&](const Tuple& t) {
      if (coin(density)) r.insert(t);
    });
    return r;
  }

  qcsp::Adversary adversary(std::size_t n, std::size_t m, double density = 0.4) {
    std::vector<Tuple> ts;
    all_tuples(n, m, [&](const Tuple& t) {
      if (coin(density)) ts.push_back(t);
    });
    if (ts.empty()) {
      Tuple t(m);
      for (auto& e : t) e = static_cast<Element>(below(n));
      ts.push_back(t);
    }
    return qcsp::Adversary(n, m, ts);
  }

  qcsp::AdversarySet adversary_set(std::size_t n, std::size_t m, std::size_t max_members, double density = 0.4) {
    qcsp::AdversarySet o(n, m);
    std::size_t c = 1 + below(max_members);
    for (std::size_t i = 0; i < c; ++i) o.add(adversary(n, m, density));
    return o;
  }

  // Random structure with `rels` relations of arity 1..max_arity and optionally all constants.
  qcsp::Structure structure(std::size_t n, std::size_t rels, std::size_t max_arity, bool constants,
                            double density = 0.6) {
    qcsp::Structure s(n);
    for (std::size_t i = 0; i < rels; ++i) {
      std::size_t k = 1 + below(max_arity);
      TupleSet r = relation(n, k, density);
      if (r.empty()) r.insert(Tuple(k, 0));
      s.add_relation("R" + std::to_string(i), qcsp::Relation(n, k, std::vector<Tuple>(r.begin(), r.end())));
    }
    if (constants) s.add_all_constants();
    return s;
  }

  // Random sentence. pi2 puts all universals first. Constants only if the structure names them.
  qcsp::PHSentence sentence(const qcsp::Structure& s, std::size_t universals, std::size_t existentials,
                            std::size_t atoms, bool pi2, bool equality = false) {
    qcsp::PHSentence phi;
    if (universals + existentials == 0) existentials = 1;
    std::vector<qcsp::Quantifier> q(universals, qcsp::Quantifier::Forall);
    q.insert(q.end(), existentials, qcsp::Quantifier::Exists);
    if (!pi2) std::shuffle(q.begin(), q.end(), rng);
    std::size_t ucount = 0, ecount = 0;
    for (auto x : q) {
      if (x == qcsp::Quantifier::Forall) phi.add_var(x, "u" + std::to_string(++ucount));
      else phi.add_var(x, "e" + std::to_string(++ecount));
    }
    std::size_t vars = phi.num_vars();
    auto term = [&]() {
      if (!s.constants().empty() && coin(0.15))
        return qcsp::Term::constant(s.constants()[below(s.constants().size())].element);
      return qcsp::Term::var(static_cast<std::uint32_t>(below(vars)));
    };
    for (std::size_t a = 0; a < atoms; ++a) {
      qcsp::Atom at;
      if (equality && coin(0.15)) {
        at.relation = qcsp::Atom::kEquality;
        at.args = {term(), term()};
      } else {
        at.relation = below(s.relations().size());
        for (std::size_t j = 0; j < s.relations()[at.relation].relation.arity(); ++j) at.args.push_back(term());
      }
      phi.matrix.push_back(at);
    }
    return phi;
  }
};

// Every variable should occur somewhere; vacuous quantifiers are legal but uninteresting.
inline bool mentions_all(const qcsp::PHSentence& phi) {
  std::vector<bool> seen(phi.num_vars(), false);
  for (const auto& a : phi.matrix)
    for (const auto& t : a.args)
      if (t.is_var) seen[t.value] = true;
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

}  // namespace oracle
