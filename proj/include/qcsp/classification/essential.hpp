#pragma once

#include <set>
#include <vector>

#include "qcsp/core/relation.hpp"

namespace qcsp {

// Non-members of R that can be repaired into R at every single coordinate.
// Unary relations get none: there is no smaller arity to decompose into.
inline std::vector<Tuple> essential_tuples(const Relation& r, const Budget& budget = Budget{}) {
  std::size_t n = r.domain_size(), k = r.arity();
  std::vector<Tuple> out;
  if (k < 2 || r.size() == 0) return out;
  if (checked_pow(n, k) > budget.enumeration) throw BudgetExceeded("relation power too large to scan");
  for_each_tuple(n, k, [&](const Tuple& t) {
    if (r.contains(t)) return true;
    Tuple u = t;
    for (std::size_t i = 0; i < k; ++i) {
      bool repaired = false;
      for (Element b = 0; b < n && !repaired; ++b) {
        u[i] = b;
        repaired = r.contains(u);
      }
      u[i] = t[i];
      if (!repaired) return true;
    }
    out.push_back(t);
    return true;
  });
  return out;
}

// Conjunction of the projections of R that forget one coordinate (R itself when unary).
inline Relation rho_tilde(const Relation& r, const Budget& budget = Budget{}) {
  std::size_t n = r.domain_size(), k = r.arity();
  if (k < 2) return r;
  if (checked_pow(n, k) > budget.enumeration) throw BudgetExceeded("relation power too large to scan");
  std::vector<std::set<Tuple>> proj(k);
  for (const auto& t : r.tuples())
    for (std::size_t i = 0; i < k; ++i) {
      Tuple p;
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) p.push_back(t[j]);
      proj[i].insert(std::move(p));
    }
  std::vector<Tuple> rows;
  for_each_tuple(n, k, [&](const Tuple& t) {
    for (std::size_t i = 0; i < k; ++i) {
      Tuple p;
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) p.push_back(t[j]);
      if (!proj[i].count(p)) return true;
    }
    rows.push_back(t);
    return true;
  });
  return Relation(n, k, std::move(rows));
}

inline bool is_essential(const Relation& r, const Budget& budget = Budget{}) { return !essential_tuples(r, budget).empty(); }

inline bool is_essential_by_rho_tilde(const Relation& r, const Budget& budget = Budget{}) {
  return !(rho_tilde(r, budget) == r);
}

}  // namespace qcsp
