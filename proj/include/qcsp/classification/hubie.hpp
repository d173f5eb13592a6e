#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcsp/classification/clone_search.hpp"
#include "qcsp/core/polymorphism.hpp"

namespace qcsp {

// f(A,..,A,z_i,A,..,A) = A at every position i.
inline bool is_generalized_hubie_pol(const Operation& f, const Tuple& z) {
  std::size_t n = f.domain_size(), k = f.arity();
  if (z.size() != k) throw InputError("z must have one entry per argument");
  for (Element e : z)
    if (e >= n) throw InputError("z entry outside domain");
  Mask full = full_mask(n);
  std::vector<Mask> image(k, 0);
  for (std::uint64_t code = 0; code < f.table().size(); ++code) {
    Element y = f.table()[code];
    std::uint64_t c = code;
    for (std::size_t i = k; i-- > 0;) {
      if (c % n == z[i]) image[i] |= Mask{1} << y;
      c /= n;
    }
  }
  for (Mask m : image)
    if (m != full) return false;
  return true;
}

inline bool is_hubie_pol(const Operation& f, Element x) { return is_generalized_hubie_pol(f, Tuple(f.arity(), x)); }

struct HubieSearch {
  std::optional<Operation> op;
  std::string term;       // algebra mode only
  bool inconclusive = true;  // absence within the arity cap never settles the question
  std::string reason;
};

// Structure mode: polymorphisms of arity 2..arity_cap in table order.
inline HubieSearch find_hubie_pol(const Structure& s, Element x, std::size_t arity_cap,
                                  const Budget& budget = Budget{}) {
  if (x >= s.domain_size()) throw InputError("source element outside domain");
  HubieSearch out;
  for (std::size_t k = 1; k <= arity_cap; ++k) {
    CspSolver solver = detail::polymorphism_solver(s, k, false, budget);
    std::uint64_t seen = 0;
    solver.for_each_solution(
        [&](const std::vector<Element>& t) {
          if (++seen > budget.enumeration) throw BudgetExceeded("too many polymorphisms of arity " + std::to_string(k));
          Operation f(s.domain_size(), k, t);
          if (is_hubie_pol(f, x)) {
            out.op = std::move(f);
            return false;
          }
          return true;
        },
        budget.search_nodes);
    if (out.op) {
      out.inconclusive = false;
      return out;
    }
  }
  out.reason = "no Hubie-pol up to arity " + std::to_string(arity_cap);
  return out;
}

// Algebra mode: basic operations first, then term operations by arity.
inline HubieSearch find_hubie_pol(const std::vector<Operation>& ops, std::size_t n, Element x, std::size_t arity_cap,
                                  const Budget& budget = Budget{}) {
  if (x >= n) throw InputError("source element outside domain");
  HubieSearch out;
  for (const auto& f : ops)
    if (f.arity() <= arity_cap && is_hubie_pol(f, x)) {
      out.op = f;
      out.term = f.name().empty() ? "basic operation" : f.name();
      out.inconclusive = false;
      return out;
    }
  for (std::size_t k = 1; k <= arity_cap; ++k) {
    TermSearch t;
    try {
      t = find_term(ops, n, k, [&](const Operation& f) { return is_hubie_pol(f, x); }, budget);
    } catch (const BudgetExceeded& e) {
      out.reason = e.what();
      return out;
    }
    if (t.hit) {
      out.op = t.hit->op;
      out.term = t.hit->term;
      out.inconclusive = false;
      return out;
    }
    if (!t.exact) {
      out.reason = t.reason;
      return out;
    }
  }
  out.reason = "no Hubie-pol term up to arity " + std::to_string(arity_cap);
  return out;
}

}  // namespace qcsp
