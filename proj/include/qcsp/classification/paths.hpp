#pragma once

#include <string>

#include "qcsp/core/structure.hpp"

namespace qcsp {

inline void check_bits(const std::string& beta) {
  for (char c : beta)
    if (c != '0' && c != '1') throw InputError("path form must be a 0/1 string");
}

// 0^a 1^b α with b > 0 and |α| = a, or 0^a α with |α| ∈ {a, a-1}.
inline bool is_quasi_loop_connected(const std::string& beta) {
  check_bits(beta);
  std::size_t len = beta.size();
  std::size_t lead = 0;
  while (lead < len && beta[lead] == '0') ++lead;
  for (std::size_t a = 0; a <= lead; ++a) {
    std::size_t rest = len - a;
    if (rest == a || (a >= 1 && rest == a - 1)) return true;
    for (std::size_t b = 1; a + b <= len && beta[a + b - 1] == '1'; ++b)
      if (len - a - b == a) return true;
  }
  return false;
}

// Undirected path on |β| vertices, vertex i looped iff β_i = 1.
inline Structure path_structure(const std::string& beta) {
  check_bits(beta);
  if (beta.empty()) throw InputError("path needs at least one vertex");
  std::size_t n = beta.size();
  std::vector<Tuple> edges;
  for (std::size_t i = 0; i < n; ++i) {
    Element v = static_cast<Element>(i);
    if (beta[i] == '1') edges.push_back({v, v});
    if (i + 1 < n) {
      edges.push_back({v, v + 1});
      edges.push_back({v + 1, v});
    }
  }
  Structure s(n);
  s.add_relation("E", Relation(n, 2, std::move(edges)));
  return s;
}

}  // namespace qcsp
