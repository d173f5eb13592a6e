#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcsp/core/closure.hpp"

namespace qcsp {

// A term operation found by closure search, with its term text.
struct TermHit {
  Operation op;
  std::string term;
};

struct TermSearch {
  std::optional<TermHit> hit;
  bool exact = false;  // closure finished, so absence is a true negative
  std::string reason;
};

// Is there a k-ary term operation t of ops with t(rows[q]) = targets[q] for every q?
// Equivalent to: the targets column lies in the subalgebra of A^{|rows|} generated by
// the projections restricted to rows.
inline TermSearch find_term_on_rows(const std::vector<Operation>& ops, std::size_t n, std::size_t k,
                                    const std::vector<Tuple>& rows, const Tuple& targets,
                                    const Budget& budget = Budget{}) {
  if (rows.size() != targets.size()) throw InputError("rows and targets differ in length");
  for (const auto& r : rows)
    if (r.size() != k) throw InputError("row of wrong arity");
  std::vector<Tuple> seeds(k, Tuple(rows.size()));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t q = 0; q < rows.size(); ++q) seeds[i][q] = rows[q][i];
  TermSearch out;
  try {
    auto c = traced_closure(ops, seeds, n, rows.size(), targets, budget);
    if (c.target_index) {
      std::vector<std::string> names;
      for (std::size_t i = 0; i < k; ++i) names.push_back("x" + std::to_string(i + 1));
      out.hit = TermHit{traced_operation(c, ops, *c.target_index, n, k, budget),
                        traced_term_string(c, ops, *c.target_index, names)};
      out.exact = true;
    } else {
      out.exact = c.complete;
      if (!c.complete) out.reason = "closure stopped before a fixpoint";
    }
  } catch (const BudgetExceeded& e) {
    out.reason = e.what();
  }
  return out;
}

// k-ary term operations in breadth-first discovery order (the subalgebra of A^{n^k}
// generated by the projections); stops at the first one accepted by `want`.
inline TermSearch find_term(const std::vector<Operation>& ops, std::size_t n, std::size_t k,
                            const std::function<bool(const Operation&)>& want, const Budget& budget = Budget{}) {
  std::uint64_t len = checked_pow(n, k);
  if (len > budget.table_entries) throw BudgetExceeded("arity " + std::to_string(k) + " tables too large");
  std::vector<Tuple> seeds;
  for (std::size_t i = 0; i < k; ++i) seeds.push_back(Operation::projection(n, k, i).table());
  TermSearch out;
  try {
    auto c = traced_closure_until(
        ops, seeds, n, len, [&](const Tuple& t) { return want(Operation(n, k, t)); }, budget);
    if (c.target_index) {
      std::vector<std::string> names;
      for (std::size_t i = 0; i < k; ++i) names.push_back("x" + std::to_string(i + 1));
      out.hit = TermHit{Operation(n, k, c.elements[*c.target_index]), traced_term_string(c, ops, *c.target_index, names)};
      out.exact = true;
    } else {
      out.exact = c.complete;
    }
  } catch (const BudgetExceeded& e) {
    out.reason = e.what();
  }
  return out;
}

}  // namespace qcsp
