#pragma once

#include "qcsp/core/structure.hpp"

namespace qcsp {

// Direct power S^k on A^k (elements coded base n, first coordinate most significant).
// With lift_constants, every k-tuple of named constants becomes a constant named "a.b.c".
inline Structure power(const Structure& s, std::size_t k, bool lift_constants = false,
                       std::uint64_t cap = 1'000'000) {
  if (k == 0) throw InputError("power exponent must be positive");
  std::size_t n = s.domain_size();
  std::uint64_t size = checked_pow(n, k);
  if (size > cap) throw BudgetExceeded("power domain " + std::to_string(n) + "^" + std::to_string(k) + " exceeds cap");
  Structure p(size);
  for (const auto& nr : s.relations()) {
    const auto& rows = nr.relation.tuples();
    std::size_t ar = nr.relation.arity();
    std::uint64_t count = checked_pow(rows.size(), k);
    if (count > cap) throw BudgetExceeded("power relation " + nr.name + " exceeds cap");
    std::vector<Tuple> lifted;
    if (!rows.empty()) {
      for_each_tuple(rows.size(), k, [&](const Tuple& pick) {
        Tuple t(ar);
        for (std::size_t i = 0; i < ar; ++i) {
          std::uint64_t c = 0;
          for (std::size_t j = 0; j < k; ++j) c = c * n + rows[pick[j]][i];
          t[i] = static_cast<Element>(c);
        }
        lifted.push_back(std::move(t));
        return true;
      });
    }
    p.add_relation(nr.name, Relation(size, ar, std::move(lifted)));
  }
  if (lift_constants) {
    const auto& cs = s.constants();
    if (!cs.empty()) {
      for_each_tuple(cs.size(), k, [&](const Tuple& pick) {
        std::string name;
        std::uint64_t c = 0;
        for (std::size_t j = 0; j < k; ++j) {
          if (j) name += '.';
          name += cs[pick[j]].name;
          c = c * n + cs[pick[j]].element;
        }
        p.add_constant(name, static_cast<Element>(c));
        return true;
      });
    }
  }
  return p;
}

}  // namespace qcsp
